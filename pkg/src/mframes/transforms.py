"""Constructions, operator transfers and perturbations of K-frames.

Every function takes a frame scenario, builds the transformed family,
evaluates the hypotheses of the corresponding result numerically, and
compares the predicted bounds against the optimal ones.  A verdict with
``hypotheses_ok`` true and ``valid`` false is a counterexample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .algebra import DEFAULT_PSD_TOL, leq
from .errors import DomainError
from .frames import (DEFAULT_BOUND_TOL, FrameBounds, bounds_from_matrices, classify,
                     frame_integral, frame_operator, optimal_bounds)
from .measure import OperatorFamily, ScalarFamily
from .module import (ModuleOperator, ModuleVector, inner, null_basis, range_basis,
                     range_inclusion)

DEFAULT_COMMUTE_TOL = 1e-8


class Hypothesis(NamedTuple):
    ok: bool
    margin: float


class Bounds(NamedTuple):
    lower: float | None
    upper: float | None


@dataclass
class TheoremVerdict:
    theorem: str
    hypotheses: dict
    predicted: Bounds
    optimal: FrameBounds
    valid: bool
    witness: ModuleVector | None = None
    info: dict = field(default_factory=dict)

    @property
    def hypotheses_ok(self) -> bool:
        return all(h.ok for h in self.hypotheses.values())

    @property
    def counterexample(self) -> bool:
        return self.hypotheses_ok and not self.valid

    @property
    def lower_slack(self) -> float | None:
        p, o = self.predicted.lower, self.optimal.lower_opt
        if p is None or o is None or not math.isfinite(p) or not math.isfinite(o):
            return None
        return o - p

    @property
    def upper_slack(self) -> float | None:
        p, o = self.predicted.upper, self.optimal.upper_opt
        if p is None or not math.isfinite(p):
            return None
        return p - o

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "hypotheses": {k: {"ok": bool(h.ok), "margin": _num(h.margin)} for k, h in self.hypotheses.items()},
            "hypotheses_ok": bool(self.hypotheses_ok),
            "predicted": {"lower": _num(self.predicted.lower), "upper": _num(self.predicted.upper)},
            "optimal": self.optimal.to_json(),
            "valid": bool(self.valid),
            "witness": None if self.witness is None else self.witness.to_json(),
            "info": {k: _num(v) for k, v in self.info.items()},
        }


@dataclass
class Transformed:
    """A transformed family, the operator it is a frame for, and the verdict."""

    family: OperatorFamily
    k: ModuleOperator
    verdict: TheoremVerdict


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if v is None or isinstance(v, str):
        return v
    v = float(v)
    if v == math.inf:
        return "unbounded"
    if v == -math.inf:
        return "-unbounded"
    return v


def _close(a: float, b: float, tol: float) -> float:
    return tol * max(abs(a), abs(b))


def _lower_ok(pred, opt, tol):
    if pred is None or opt == math.inf:
        return True
    if pred == math.inf:
        return opt == math.inf
    if opt is None:
        return pred <= 0
    return pred <= opt + _close(pred, opt, tol)


def _upper_ok(pred, opt, tol):
    if pred is None or pred == math.inf:
        return True
    return opt <= pred + _close(pred, opt, tol)


def _le(a, b, tol):
    """a <= b up to relative tol, with inf handled."""
    if a == math.inf:
        return b == math.inf
    if b == math.inf:
        return True
    return a <= b + _close(a, b, tol)


def compare(pred: Bounds, opt: FrameBounds, tol: float) -> bool:
    return _lower_ok(pred.lower, opt.lower_opt, tol) and _upper_ok(pred.upper, opt.upper_opt, tol)


def _frame_hyp(bounds: FrameBounds, allow_unbounded: bool = True) -> Hypothesis:
    lo = bounds.lower_opt
    if lo is None:
        return Hypothesis(False, 0.0)
    if lo == math.inf:
        return Hypothesis(allow_unbounded, math.inf)
    return Hypothesis(lo > 0, lo)


def _commutator(a: ModuleOperator, b: ModuleOperator, tol: float) -> Hypothesis:
    scale = a.norm() * b.norm()
    gap = (a @ b - b @ a).norm()
    return Hypothesis(gap <= tol * scale, gap)


def _family_commutator(t: ModuleOperator, family: OperatorFamily, tol: float) -> Hypothesis:
    worst_ok, worst_gap = True, 0.0
    for op in family.ops:
        h = _commutator(t, op, tol)
        worst_ok &= h.ok
        worst_gap = max(worst_gap, h.margin)
    return Hypothesis(worst_ok, worst_gap)


# --------------------------------------------------------------------------
# constructions


def compose_right(family: OperatorFamily, k: ModuleOperator, q: ModuleOperator,
                  tol: float = DEFAULT_BOUND_TOL) -> Transformed:
    """{T_w Q} as a (Q* K)-frame with predicted bounds (A, B ||Q||^2)."""
    base = optimal_bounds(family, k)
    new_family = family.map(lambda t: t @ q)
    new_k = q.H @ k
    hyps = {"k_frame": _frame_hyp(base)}
    pred = Bounds(base.lower_opt if base.is_k_frame else None, base.upper_opt * q.norm() ** 2)
    opt = optimal_bounds(new_family, new_k)
    verdict = TheoremVerdict("compose-right", hyps, pred, opt, compare(pred, opt, tol),
                             info={"A": base.lower_opt, "B": base.upper_opt, "Q_norm": q.norm(),
                                   "degenerate_k": new_k.norm() == 0.0})
    return Transformed(new_family, new_k, verdict)


def invertible_rescale_check(family: OperatorFamily, k: ModuleOperator, q: ModuleOperator,
                             tol: float = DEFAULT_BOUND_TOL,
                             tol_commute: float = DEFAULT_COMMUTE_TOL) -> TheoremVerdict:
    """Best bounds C, D of {T_w Q} against the chain
    A ||Q^-1||^-2 <= C <= A ||Q||^2 and B ||Q^-1||^-2 <= D <= B ||Q||^2.

    Raises RankError if Q is singular.
    """
    q_inv = q.inverse()
    base = optimal_bounds(family, k)
    a, b = base.lower_opt, base.upper_opt
    comm = _commutator(q_inv, k.H, tol_commute)
    hyps = {"k_frame": _frame_hyp(base, allow_unbounded=False), "commutes_with_K_adjoint": comm}
    qn, qin = q.norm(), q_inv.norm()
    opt = optimal_bounds(family.map(lambda t: t @ q), k)
    c, d = opt.lower_opt, opt.upper_opt
    if a is None or c is None:
        chain = {"lower_left": False, "lower_right": False}
    else:
        chain = {"lower_left": _le(a / qin ** 2, c, tol), "lower_right": _le(c, a * qn ** 2, tol)}
    chain["upper_left"] = _le(b / qin ** 2, d, tol)
    chain["upper_right"] = _le(d, b * qn ** 2, tol)
    pred = Bounds(None if a is None else a / qin ** 2, b * qn ** 2)
    info = {"A": a, "B": b, "C": c, "D": d, "Q_norm": qn, "Q_inv_norm": qin}
    info.update(chain)
    return TheoremVerdict("invertible-rescale", hyps, pred, opt, all(chain.values()), info=info)


def tight_relation(family: OperatorFamily, k: ModuleOperator,
                   tol: float = DEFAULT_BOUND_TOL) -> TheoremVerdict:
    """Tight K-frame (A1) is a tight operator frame (A2) iff K K* = (A2/A1) I.

    Both directions are checked independently; a scenario meeting
    neither hypothesis is a hypothesis failure.
    """
    shape, m = k.shape, k.rank
    eye = ModuleOperator.identity(shape, m)
    cls = classify(family, k, tol)
    tight = cls.kind in ("tight_k_frame", "parseval_k_frame") and not cls.degenerate
    a1 = cls.constant if tight else None
    s = frame_operator(family)
    s_eigs = np.linalg.eigvalsh(s.rep())
    a2 = float(s_eigs[-1])
    dir_a = (s - a2 * eye).norm() <= tol * max(s.norm(), 1e-300) and a2 > 0
    kk = k @ k.H
    c = float(np.linalg.eigvalsh(kk.rep())[-1])
    dir_b = c > 0 and (kk - c * eye).norm() <= tol * c
    hyps = {"tight_k_frame": Hypothesis(tight, a1 if tight else 0.0),
            "tight_operator_frame_or_scaled_coisometry": Hypothesis(dir_a or dir_b, float(dir_a) + float(dir_b))}
    info = {"A1": a1, "A2": a2 if dir_a else None, "tight_operator_frame": dir_a, "kk_scalar": dir_b}
    ok = True
    if tight and dir_a:
        right_inv = (a1 / a2) * k.H
        gap = (k @ right_inv - eye).norm()
        info["right_inverse_gap"] = gap
        ok &= gap <= tol * (1.0 + (a1 / a2) * k.norm() ** 2)
    if tight and dir_b:
        a2_pred = c * a1
        gap = (s - a2_pred * eye).norm()
        info["predicted_A2"] = a2_pred
        info["tight_gap"] = gap
        ok &= gap <= tol * max(s.norm(), a2_pred)
    pred = Bounds(a2 if dir_a else (c * a1 if tight and dir_b else None),
                  a2 if dir_a else (c * a1 if tight and dir_b else None))
    opt = optimal_bounds(family, eye)
    return TheoremVerdict("tight-inverse", hyps, pred, opt, bool(ok), info=info)


# --------------------------------------------------------------------------
# operators preserving K-frames


def k_transfer(family: OperatorFamily, k: ModuleOperator, t: ModuleOperator,
               tol: float = DEFAULT_BOUND_TOL) -> TheoremVerdict:
    """A K-frame is a T-frame with bounds (A / lambda, B) when R(T) is in R(K)."""
    base = optimal_bounds(family, k)
    inc = range_inclusion(t, k)
    lam = inc.lambda_min
    hyps = {"k_frame": _frame_hyp(base, allow_unbounded=False),
            "range_inclusion": Hypothesis(inc.included, -1.0 if lam is None else lam)}
    if base.lower_opt is None or lam is None:
        pred_lower = None
    elif lam == 0.0:
        pred_lower = math.inf
    else:
        pred_lower = base.lower_opt / lam
    pred = Bounds(pred_lower, base.upper_opt)
    opt = optimal_bounds(family, t)
    return TheoremVerdict("k-transfer", hyps, pred, opt, compare(pred, opt, tol),
                          info={"lambda": lam, "A": base.lower_opt, "B": base.upper_opt,
                                "vacuous": lam == 0.0})


@dataclass
class LeftComposed:
    family: OperatorFamily
    restriction: TheoremVerdict
    surjectivity: TheoremVerdict


def _module_basis(shape, m, columns: np.ndarray) -> list[ModuleVector]:
    return [ModuleVector.from_rep(shape, m, columns[:, j]) for j in range(columns.shape[1])]


def _random_vector(rng, shape, m) -> ModuleVector:
    dim = m * shape.dim
    return ModuleVector.from_rep(shape, m, rng.standard_normal(dim) + 1j * rng.standard_normal(dim))


def left_compose(family: OperatorFamily, t: ModuleOperator, k: ModuleOperator, samples: int = 100,
                 seed: int = 0, tol: float = DEFAULT_BOUND_TOL, tol_psd: float = DEFAULT_PSD_TOL,
                 tol_commute: float = DEFAULT_COMMUTE_TOL) -> LeftComposed:
    """{T T_w}: restriction to R(T) and the surjectivity criterion.

    The restriction bounds (A ||T^+||^-2, B ||T||^2) rely on T^+ T acting
    as the identity on R(T); that is checked as the hypothesis
    ``pinv_identity_on_range`` because commutation alone does not give it
    (a nilpotent T commuting with everything is a counterexample).
    """
    rng = np.random.default_rng(seed)
    shape, m = t.shape, t.rank
    composed = family.map(lambda op: t @ op)
    base = optimal_bounds(family, k)
    comm = _family_commutator(t, family, tol_commute)
    rt = t.rep()
    range_cols = range_basis(rt)
    t_pinv = t.pinv()
    proj_gap = float(np.linalg.norm(range_cols - t_pinv.rep() @ rt @ range_cols, 2)) if range_cols.size else 0.0

    hyps = {
        "k_frame": _frame_hyp(base, allow_unbounded=False),
        "T_nonzero": Hypothesis(range_cols.shape[1] > 0, float(range_cols.shape[1])),
        "commutes_with_family": comm,
        "commutes_with_K_adjoint": _commutator(t, k.H, tol_commute),
        "pinv_identity_on_range": Hypothesis(proj_gap <= tol, proj_gap),
    }
    pinv_norm = t_pinv.norm()
    if base.lower_opt is None or pinv_norm == 0.0:
        pred = Bounds(None, base.upper_opt * t.norm() ** 2)
    else:
        pred = Bounds(base.lower_opt / pinv_norm ** 2, base.upper_opt * t.norm() ** 2)

    s_c = frame_operator(composed).rep()
    kk = (k @ k.H).rep()
    if range_cols.size:
        opt = bounds_from_matrices(range_cols.conj().T @ s_c @ range_cols, range_cols.conj().T @ kk @ range_cols)
    else:
        opt = FrameBounds(math.inf, 0.0)
    valid = compare(pred, opt, tol)

    # sampled check on x = T y and on an orthonormal basis of R(T)
    witness = None
    if range_cols.size and pred.lower is not None:
        points = [t(_random_vector(rng, shape, m)) for _ in range(samples)]
        points += _module_basis(shape, m, range_cols)
        for x in points:
            integral = frame_integral(composed, x)
            kx = k.H(x)
            lower_ok = not math.isfinite(pred.lower) or leq(pred.lower * inner(kx, kx), integral, tol_psd)
            upper_ok = leq(integral, pred.upper * inner(x, x), tol_psd)
            if not (lower_ok and upper_ok):
                valid = False
                if witness is None:
                    witness = x
    restriction = TheoremVerdict("left-compose", hyps, pred, opt, valid, witness,
                                 info={"T_pinv_norm": pinv_norm, "T_norm": t.norm(),
                                       "range_dim": range_cols.shape[1], "samples": samples})
    surjectivity = surjectivity_verdict(composed, family, t, k, tol=tol, tol_commute=tol_commute)
    return LeftComposed(composed, restriction, surjectivity)


def surjectivity_verdict(composed: OperatorFamily, family: OperatorFamily, t: ModuleOperator,
                         k: ModuleOperator, tol: float = DEFAULT_BOUND_TOL,
                         tol_commute: float = DEFAULT_COMMUTE_TOL) -> TheoremVerdict:
    """If {T T_w} is a K-frame and K has dense range then T is surjective.

    When T is not surjective and K has dense range, a witness x in
    null(T*) with K* x != 0 is returned together with whether it breaks
    the lower K-frame inequality of {T T_w}.
    """
    shape, m = t.shape, t.rank
    opt = optimal_bounds(composed, k)
    hyps = {
        "commutes_with_family": _family_commutator(t, family, tol_commute),
        "K_dense_range": Hypothesis(k.is_surjective(), float(np.linalg.svd(k.rep(), compute_uv=False)[-1])),
        "composed_k_frame": _frame_hyp(opt, allow_unbounded=False),
    }
    surjective = t.is_surjective()
    info = {"T_surjective": surjective, "witness_violates": None, "witness_source": None}
    witness = None
    if not surjective and hyps["K_dense_range"].ok:
        for source, mat in (("null(T*)", t.H.rep()), ("null(T)", t.rep())):
            cols = null_basis(mat)
            if not cols.size:
                continue
            kstar = k.H.rep() @ cols
            j = int(np.argmax(np.linalg.norm(kstar, axis=0)))
            x = ModuleVector.from_rep(shape, m, cols[:, j])
            kx = k.H(x)
            kk_norm = inner(kx, kx).norm()
            integral = frame_integral(composed, x).norm()
            violates = kk_norm > 0 and integral <= tol * kk_norm * max(1.0, opt.upper_opt)
            if witness is None or violates:
                witness = x
                info["witness_violates"] = bool(violates)
                info["witness_source"] = source
                info["witness_kstar_norm"] = kk_norm
                info["witness_frame_integral"] = integral
            if violates:
                break
    valid = surjective or not (hyps["K_dense_range"].ok and hyps["composed_k_frame"].ok)
    return TheoremVerdict("surjectivity", hyps, Bounds(None, None), opt, valid, witness, info=info)


# --------------------------------------------------------------------------
# perturbation


def perturbation_predictions(a: float, b: float, r: float, k_norm: float) -> Bounds:
    """((sqrt A - sqrt R)^2, (sqrt B + sqrt R ||K*||)^2)."""
    return Bounds((math.sqrt(a) - math.sqrt(r)) ** 2, (math.sqrt(b) + math.sqrt(r) * k_norm) ** 2)


def perturb_scalar(family: OperatorFamily, k: ModuleOperator, l_op: ModuleOperator, a: ScalarFamily,
                   tol: float = DEFAULT_BOUND_TOL) -> Transformed:
    """{T_w + a_w L K*} with R = ||L||^2 sum_w |a_w|^2 gated by R < A.

    The alternative gate sum |a_w|^2 < A / ||L|| is reported in ``info``
    but does not decide ``hypotheses_ok``.
    """
    l_norm = l_op.norm()
    if l_norm == 0.0:
        raise DomainError("perturbing operator L must be nonzero")
    if not a.disc.same_as(family.disc):
        raise DomainError("scalar family and operator family use different discretizations")
    base = optimal_bounds(family, k)
    big_a, big_b = base.lower_opt, base.upper_opt
    mass = a.l2_mass()
    r = l_norm ** 2 * mass
    lk = l_op @ k.H
    new_family = OperatorFamily(family.disc, [t + complex(c) * lk for t, c in zip(family.ops, a.values)])
    finite = big_a is not None and math.isfinite(big_a) and big_a > 0
    hyps = {"k_frame": Hypothesis(finite, big_a if finite else 0.0),
            "R_below_A": Hypothesis(finite and r < big_a, (big_a - r) if finite else -r)}
    pred = perturbation_predictions(big_a, big_b, r, k.norm()) if finite and r < big_a else Bounds(None, None)
    opt = optimal_bounds(new_family, k)
    info = {"R": r, "A": big_a, "B": big_b, "a_mass": mass,
            "statement_gate": bool(finite and mass < big_a / l_norm),
            "proof_gate": bool(finite and r < big_a)}
    verdict = TheoremVerdict("perturb-scalar", hyps, pred, opt, compare(pred, opt, tol), info=info)
    return Transformed(new_family, k, verdict)


def mixed_constants(a: ScalarFamily, b: ScalarFamily, alpha: float, beta: float) -> tuple[float, float]:
    """Lower and upper multipliers of the mixed perturbation result."""
    low = (1 - 2 * alpha) * a.inf ** 2 / (2 * (1 + beta) * b.sup ** 2)
    high = 2 * (1 + alpha) * a.sup ** 2 / ((1 - 2 * beta) * b.inf ** 2)
    return low, high


def perturb_mixed(family: OperatorFamily, gamma: OperatorFamily, a: ScalarFamily, b: ScalarFamily,
                  alpha: float, beta: float, k: ModuleOperator, samples: int = 64, seed: int = 0,
                  tol: float = DEFAULT_BOUND_TOL, tol_psd: float = DEFAULT_PSD_TOL) -> TheoremVerdict:
    """Gamma as a K-frame when a T - b Gamma is small relative to a T and b Gamma.

    The hypothesis is an inequality for all x; it is tested in the A-order
    at ``samples`` random vectors plus the coordinate basis.  The exact
    operator-order margin is reported alongside in ``info``.
    """
    if not (0 <= alpha < 0.5 and 0 <= beta < 0.5):
        raise DomainError(f"alpha and beta must lie in [0, 1/2), got {alpha}, {beta}")
    if not (gamma.disc.same_as(family.disc) and a.disc.same_as(family.disc) and b.disc.same_as(family.disc)):
        raise DomainError("families do not share a discretization")
    rng = np.random.default_rng(seed)
    shape, m = family.shape, family.rank
    base = optimal_bounds(family, k)
    confined = a.positively_confined() and b.positively_confined()

    diff = OperatorFamily(family.disc, [float(ai) * t - float(bi) * g
                                        for t, g, ai, bi in zip(family.ops, gamma.ops, a.values, b.values)])
    scaled_t = OperatorFamily(family.disc, [float(ai) * t for t, ai in zip(family.ops, a.values)])
    scaled_g = OperatorFamily(family.disc, [float(bi) * g for g, bi in zip(gamma.ops, b.values)])

    dim = m * shape.dim
    points = [_random_vector(rng, shape, m) for _ in range(samples)]
    points += _module_basis(shape, m, np.eye(dim))
    sample_ok, worst, witness = True, math.inf, None
    for x in points:
        lhs = frame_integral(diff, x)
        rhs = alpha * frame_integral(scaled_t, x) + beta * frame_integral(scaled_g, x)
        ok = leq(lhs, rhs, tol_psd)
        gap = rhs - lhs
        scale = max(lhs.norm(), rhs.norm(), 1e-300)
        worst = min(worst, min(float(np.linalg.eigvalsh((blk + blk.conj().T) / 2)[0]) for blk in gap.blocks) / scale)
        if not ok:
            sample_ok = False
            if witness is None:
                witness = x
    s_diff = frame_operator(diff).rep()
    s_rhs = alpha * frame_operator(scaled_t).rep() + beta * frame_operator(scaled_g).rep()
    exact = float(np.linalg.eigvalsh((s_rhs - s_diff + (s_rhs - s_diff).conj().T) / 2)[0])

    hyps = {"k_frame": _frame_hyp(base, allow_unbounded=False),
            "positively_confined": Hypothesis(confined, min(a.inf, b.inf)),
            "sampled_inequality": Hypothesis(sample_ok, worst)}
    if confined and base.lower_opt is not None and math.isfinite(base.lower_opt):
        low, high = mixed_constants(a, b, alpha, beta)
        pred = Bounds(low * base.lower_opt, high * base.upper_opt)
    else:
        pred = Bounds(None, None)
    opt = optimal_bounds(gamma, k)
    info = {"sampled_hypothesis": True, "samples": len(points), "operator_margin": exact,
            "A": base.lower_opt, "B": base.upper_opt}
    return TheoremVerdict("perturb-mixed", hyps, pred, opt, compare(pred, opt, tol),
                          None if sample_ok else witness, info=info)


# --------------------------------------------------------------------------
# K-frames versus operator frames


def remark_bessel_to_k(family: OperatorFamily, k: ModuleOperator, tol: float = DEFAULT_BOUND_TOL) -> TheoremVerdict:
    """An operator frame (A, B) is a K-frame with bounds (A ||K||^-2, B) for K != 0."""
    eye = ModuleOperator.identity(k.shape, k.rank)
    frame = optimal_bounds(family, eye)
    k_norm = k.norm()
    hyps = {"operator_frame": _frame_hyp(frame, allow_unbounded=False), "K_nonzero": Hypothesis(k_norm > 0, k_norm)}
    a = frame.lower_opt
    pred = Bounds(a / k_norm ** 2 if (a is not None and k_norm > 0) else None, frame.upper_opt)
    opt = optimal_bounds(family, k)
    return TheoremVerdict("remark-bessel-to-k", hyps, pred, opt, compare(pred, opt, tol),
                          info={"A": a, "B": frame.upper_opt, "K_norm": k_norm})


def surjective_k(family: OperatorFamily, k: ModuleOperator, tol: float = DEFAULT_BOUND_TOL) -> TheoremVerdict:
    """A K-frame with surjective K is an operator frame with bounds (A m, B), m = lambda_min(KK*)."""
    base = optimal_bounds(family, k)
    mu = float(np.linalg.eigvalsh((k @ k.H).rep())[0])
    hyps = {"k_frame": _frame_hyp(base, allow_unbounded=False),
            "K_surjective": Hypothesis(k.is_surjective(), mu)}
    eye = ModuleOperator.identity(k.shape, k.rank)
    pred = Bounds(base.lower_opt * mu if base.lower_opt is not None else None, base.upper_opt)
    opt = optimal_bounds(family, eye)
    cls = classify(family, eye, tol)
    valid = compare(pred, opt, tol) and (cls.is_frame or not hyps["k_frame"].ok or not hyps["K_surjective"].ok)
    return TheoremVerdict("surjective-k", hyps, pred, opt, valid, info={"m": mu, "class_vs_identity": str(cls)})
