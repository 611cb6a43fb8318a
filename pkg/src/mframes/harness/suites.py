"""Randomized verification suites, one per result.

A trial draws scenarios from :func:`random_instance` until one satisfies
the hypotheses of the result under test (at most ``MAX_ATTEMPTS`` draws,
after which the trial counts as skipped) and then records whether the
verdict holds.  Trial ``i``, attempt ``j`` of a suite seeded with ``s``
uses the scenario seed derived from ``SeedSequence([s, i, j])``, so
reports are reproducible regardless of the thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import DomainError, FrameError
from ..frames import bisect_lower_bound, douglas_factor, frame_operator, pencil_lower_bound
from .. import transforms as tr
from .instances import random_instance
from .io import DEFAULT_TOLERANCES, Scenario

MAX_ATTEMPTS = 100
MAX_DUMPS = 5


@dataclass
class Outcome:
    """Result of one accepted scenario: ``status`` is "pass" or "fail"."""

    status: str
    margins: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)


@dataclass
class TrialResult:
    trial: int
    status: str
    attempts: int
    scenario_seed: int | None = None
    margins: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)
    scenario: dict | None = None


@dataclass
class SuiteReport:
    name: str
    trials: int
    seed: int
    tolerances: dict
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    attempts: int = 0
    worst: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    results: list = field(default_factory=list, repr=False)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        return {"suite": self.name, "trials": self.trials, "seed": self.seed,
                "tolerances": dict(self.tolerances), "passed": self.passed, "failed": self.failed,
                "skipped": self.skipped, "attempts": self.attempts, "ok": self.ok,
                "worst": {k: _num(v) for k, v in sorted(self.worst.items())},
                "failures": self.failures}

    def summary(self) -> str:
        worst = ", ".join(f"{k}={_num(v)}" for k, v in sorted(self.worst.items()))
        return (f"{self.name}: {self.passed} passed, {self.failed} failed, {self.skipped} skipped "
                f"({self.trials} trials, seed {self.seed}){'; worst ' + worst if worst else ''}")


def _num(v):
    if v is None:
        return None
    v = float(v)
    if math.isinf(v):
        return "unbounded" if v > 0 else "-unbounded"
    return v


# --------------------------------------------------------------------------
# per-suite checks; each returns None when the hypotheses are not met


def _verdict_outcome(v: tr.TheoremVerdict) -> Outcome | None:
    if not v.hypotheses_ok:
        return None
    margins = {}
    if v.lower_slack is not None:
        margins["lower_slack"] = v.lower_slack
    if v.upper_slack is not None:
        margins["upper_slack"] = v.upper_slack
    return Outcome("fail" if v.counterexample else "pass", margins, {"verdict": v.to_json()})


def _characterization(sc: Scenario, tol) -> Outcome:
    """lower_opt > 0, A KK* <= S at the bisected A, and a Douglas factor exist together."""
    s = frame_operator(sc.family)
    s_mat, kk = s.rep(), (sc.k @ sc.k.H).rep()
    pencil = pencil_lower_bound(s_mat, kk)
    a = pencil is not None and pencil > 0
    oracle = bisect_lower_bound(s_mat, kk)
    s_norm = float(np.linalg.norm(s_mat, 2))
    kk_norm = float(np.linalg.norm(kk, 2))
    margin = None
    if oracle == math.inf:
        b = True
    else:
        margin = float(np.linalg.eigvalsh(s_mat - oracle * kk)[0])
        b = oracle > tol["bound"] * s_norm / max(kk_norm, 1e-300) and margin >= -tol["psd"] * s_norm
    factor = douglas_factor(sc.k, s, tol["bound"], tol["psd"])
    c = factor is not None
    margins = {"douglas_residual": factor.residual if c else None, "oracle_psd_margin": margin}
    return Outcome("pass" if a == b == c else "fail", {k: v for k, v in margins.items() if v is not None},
                   {"pencil": pencil is not None and a, "bisection": b, "douglas": c})


def _bisection_oracle(sc: Scenario, tol) -> Outcome:
    s_mat = frame_operator(sc.family).rep()
    kk = (sc.k @ sc.k.H).rep()
    pencil = pencil_lower_bound(s_mat, kk)
    oracle = bisect_lower_bound(s_mat, kk)
    if pencil == math.inf or oracle == math.inf:
        ok, err = pencil == oracle, 0.0
    elif pencil is None:
        # no positive bound: bisection must collapse toward zero
        scale = float(np.linalg.norm(s_mat, 2)) / float(np.linalg.norm(kk, 2))
        err = oracle / scale
        ok = err <= 1e-8
    else:
        err = abs(pencil - oracle) / pencil
        ok = err <= 1e-8
    full = len(s_mat)
    singular = sc.k.rank_() < full or np.linalg.matrix_rank(s_mat, tol=1e-10 * np.linalg.norm(s_mat, 2)) < full
    return Outcome("pass" if ok else "fail", {"neg_rel_error": -err},
                   {"pencil": _num(pencil) if pencil is not None else "none", "bisection": _num(oracle),
                    "singular": bool(singular)})


def _remark(sc, tol):
    return _verdict_outcome(tr.remark_bessel_to_k(sc.family, sc.k, tol["bound"]))


def _surjective_k(sc, tol):
    return _verdict_outcome(tr.surjective_k(sc.family, sc.k, tol["bound"]))


def _compose_right(sc, tol):
    return _verdict_outcome(tr.compose_right(sc.family, sc.k, sc.q, tol["bound"]).verdict)


def _rescale(sc, tol):
    if sc.q is None or not sc.q.is_surjective():
        return None
    v = tr.invertible_rescale_check(sc.family, sc.k, sc.q, tol["bound"], tol["commute"])
    out = _verdict_outcome(v)
    if out is not None:
        out.margins["chain_holds"] = 1.0 if v.valid else -1.0
    return out


def _tight(sc, tol):
    return _verdict_outcome(tr.tight_relation(sc.family, sc.k, tol["bound"]))


def _k_transfer(sc, tol):
    v = tr.k_transfer(sc.family, sc.k, sc.t, tol["bound"])
    if v.info.get("vacuous"):
        return None
    return _verdict_outcome(v)


def _left_compose(sc, tol):
    return _verdict_outcome(tr.left_compose(sc.family, sc.t, sc.k, tol=tol["bound"], tol_psd=tol["psd"],
                                            tol_commute=tol["commute"]).restriction)


def _surjectivity(sc, tol):
    """Non-surjective T commuting with the family, K with dense range: a violating witness must exist."""
    t, k = sc.t, sc.k
    if t.is_surjective() or not k.is_surjective():
        return None
    if not tr._family_commutator(t, sc.family, tol["commute"]).ok:
        return None
    composed = sc.family.map(lambda op: t @ op)
    v = tr.surjectivity_verdict(composed, sc.family, t, k, tol["bound"], tol["commute"])
    info = v.info
    found = bool(info["witness_violates"]) and info["witness_source"] == "null(T*)" \
        and info["witness_kstar_norm"] > 0
    status = "pass" if found and not v.counterexample else "fail"
    return Outcome(status, {"witness_kstar_norm": info.get("witness_kstar_norm", 0.0)}, {"verdict": v.to_json()})


def _perturb_scalar(sc, tol):
    if sc.scalars is None or sc.l_op is None or sc.l_op.norm() == 0:
        return None
    return _verdict_outcome(tr.perturb_scalar(sc.family, sc.k, sc.l_op, sc.scalars, tol["bound"]).verdict)


def _perturb_mixed(sc, tol):
    if sc.gamma is None:
        return None
    v = tr.perturb_mixed(sc.family, sc.gamma, sc.a, sc.b, sc.alpha, sc.beta, sc.k,
                         tol=tol["bound"], tol_psd=tol["psd"])
    out = _verdict_outcome(v)
    if out is not None:
        out.margins["operator_margin"] = v.info["operator_margin"]
    return out


@dataclass(frozen=True)
class SuiteSpec:
    check: Callable
    profiles: tuple


SUITES = {
    "characterization": SuiteSpec(_characterization, ("generic", "guaranteed_k_frame", "degenerate", "commuting_diag")),
    "bisection-oracle": SuiteSpec(_bisection_oracle, ("generic", "guaranteed_k_frame", "degenerate", "commuting_diag")),
    "remark-bessel-to-k": SuiteSpec(_remark, ("generic", "commuting_diag")),
    "surjective-k": SuiteSpec(_surjective_k, ("generic", "rank_deficient_T", "tight")),
    "compose-right": SuiteSpec(_compose_right, ("generic", "guaranteed_k_frame", "degenerate")),
    "invertible-rescale": SuiteSpec(_rescale, ("commuting_diag",)),
    "tight-inverse": SuiteSpec(_tight, ("tight",)),
    "k-transfer": SuiteSpec(_k_transfer, ("guaranteed_k_frame", "degenerate", "generic")),
    "left-compose": SuiteSpec(_left_compose, ("commuting_diag",)),
    "surjectivity": SuiteSpec(_surjectivity, ("rank_deficient_T",)),
    "perturb-scalar": SuiteSpec(_perturb_scalar, ("generic", "guaranteed_k_frame", "commuting_diag")),
    "perturb-mixed": SuiteSpec(_perturb_mixed, ("generic", "guaranteed_k_frame", "commuting_diag")),
}
SUITE_NAMES = tuple(SUITES)


def scenario_seed(seed: int, trial: int, attempt: int) -> int:
    return int(np.random.SeedSequence([seed, trial, attempt]).generate_state(1)[0])


def thread_count() -> int:
    """Worker threads, capped by MFRAMES_THREADS when set."""
    default = min(8, os.cpu_count() or 1)
    raw = os.environ.get("MFRAMES_THREADS")
    if not raw:
        return default
    try:
        return max(1, min(default, int(raw)))
    except ValueError:
        return 1


def run_trial(name: str, trial: int, seed: int, tolerances: dict) -> TrialResult:
    spec = SUITES[name]
    for attempt in range(MAX_ATTEMPTS):
        s = scenario_seed(seed, trial, attempt)
        profile = spec.profiles[(trial + attempt) % len(spec.profiles)]
        sc = random_instance(s, profile=profile)
        sc.tolerances = dict(tolerances)
        try:
            out = spec.check(sc, tolerances)
        except (DomainError, FrameError):
            out = None
        if out is None:
            continue
        dump = sc.to_json() if out.status == "fail" else None
        return TrialResult(trial, out.status, attempt + 1, s, out.margins, out.detail, dump)
    return TrialResult(trial, "skip", MAX_ATTEMPTS)


def theorem_suite(name: str, trials: int, seed: int, tolerances: dict | None = None,
                  threads: int | None = None) -> SuiteReport:
    """Run ``trials`` independent trials of suite ``name``.

    Raises KeyError for an unknown name.
    """
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; expected one of {', '.join(SUITE_NAMES)}")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    workers = threads or thread_count()
    if workers > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: run_trial(name, i, seed, tol), range(trials)))
    else:
        results = [run_trial(name, i, seed, tol) for i in range(trials)]

    report = SuiteReport(name, trials, seed, tol, results=results)
    for r in results:  # ordered by trial index
        report.attempts += r.attempts
        if r.status == "skip":
            report.skipped += 1
            continue
        if r.status == "pass":
            report.passed += 1
        else:
            report.failed += 1
            if len(report.failures) < MAX_DUMPS:
                report.failures.append({"trial": r.trial, "scenario_seed": r.scenario_seed,
                                        "detail": r.detail, "scenario": r.scenario})
        for key, val in r.margins.items():
            if val is not None and (key not in report.worst or val < report.worst[key]):
                report.worst[key] = val
    return report
