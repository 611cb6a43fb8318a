"""Run every applicable check on a single scenario."""

from __future__ import annotations

from ..errors import RankError
from ..frames import frame_report, optimal_bounds
from .. import transforms as tr
from .io import Scenario


def verify_scenario(sc: Scenario, tol_psd: float | None = None, tol_bound: float | None = None) -> dict:
    """Frame report plus one verdict per result whose inputs the scenario provides.

    ``ok`` is false when a claimed bound fails as a PSD inequality or a
    verdict has its hypotheses met but its conclusion violated.
    """
    psd = sc.tol("psd") if tol_psd is None else tol_psd
    bound = sc.tol("bound") if tol_bound is None else tol_bound
    commute = sc.tol("commute")
    fam, k = sc.family, sc.k
    verdicts = [tr.remark_bessel_to_k(fam, k, bound), tr.surjective_k(fam, k, bound), tr.tight_relation(fam, k, bound)]
    if sc.q is not None:
        verdicts.append(tr.compose_right(fam, k, sc.q, bound).verdict)
        try:
            verdicts.append(tr.invertible_rescale_check(fam, k, sc.q, bound, commute))
        except RankError:
            pass
    if sc.t is not None:
        verdicts.append(tr.k_transfer(fam, k, sc.t, bound))
        lc = tr.left_compose(fam, sc.t, k, tol=bound, tol_psd=psd, tol_commute=commute)
        verdicts += [lc.restriction, lc.surjectivity]
    if sc.l_op is not None and sc.scalars is not None and sc.l_op.norm() > 0:
        verdicts.append(tr.perturb_scalar(fam, k, sc.l_op, sc.scalars, bound).verdict)
    if sc.gamma is not None and sc.a is not None and sc.b is not None:
        alpha, beta = sc.alpha or 0.0, sc.beta or 0.0
        verdicts.append(tr.perturb_mixed(fam, sc.gamma, sc.a, sc.b, alpha, beta, k, tol=bound, tol_psd=psd))

    frame = frame_report(fam, k, sc.claimed, psd, bound)
    claims = optimal_bounds(fam, k, sc.claimed, psd).claims_hold
    counter = [v.theorem for v in verdicts if v.counterexample]
    return {
        "scenario": sc.name,
        "tolerances": {"psd": psd, "bound": bound, "commute": commute},
        "frame": frame,
        "claims_hold": claims,
        "verdicts": [v.to_json() for v in verdicts],
        "counterexamples": counter,
        "ok": claims is not False and not counter,
    }


def report_text(report: dict) -> str:
    f = report["frame"]
    lines = [f"scenario: {report['scenario']}",
             f"class: {f['class']}",
             f"optimal bounds: lower={f['lower_opt']} upper={f['upper_opt']}"]
    if "lower_claimed" in f or "upper_claimed" in f:
        lines.append(f"claimed bounds: lower={f.get('lower_claimed')} upper={f.get('upper_claimed')} "
                     f"hold={report['claims_hold']}")
    lines.append(f"douglas residual: {f['douglas_residual']}")
    for v in report["verdicts"]:
        hyp = "hypotheses met" if v["hypotheses_ok"] else "hypotheses not met"
        state = "valid" if v["valid"] else "INVALID"
        p = v["predicted"]
        lines.append(f"{v['theorem']:<20} {hyp:<19} {state:<8} predicted=({p['lower']}, {p['upper']})")
    lines.append("PASS" if report["ok"] else "FAIL: " + ", ".join(report["counterexamples"] or ["claimed bounds"]))
    return "\n".join(lines)
