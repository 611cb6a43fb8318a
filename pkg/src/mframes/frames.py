"""Frame operator, analysis/synthesis and optimal K-frame bounds.

Optimal bounds are computed on the complex representation.  With
``M = rep(S)`` and ``N = rep(KK*)`` the optimal lower bound is the PSD
pencil value ``sup{a >= 0 : a N <= M}``, which is
``1 / lambda_max(M^{+1/2} N M^{+1/2})`` when ``R(N)`` lies in ``R(M)``
and does not exist otherwise.  :func:`bisect_lower_bound` recomputes the
same quantity by bisection on PSD tests of ``M - a N`` and is kept as an
independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import DEFAULT_PSD_TOL, AlgebraElement, hermitian_part
from .errors import DomainError, ShapeError
from .measure import L2Vector, OperatorFamily
from .module import (RANK_RTOL, ModuleOperator, ModuleVector, inner, order, pinv_sqrt,
                     range_basis)

DEFAULT_BOUND_TOL = 1e-8
RANGE_TOL = 1e-8


def frame_integral(family: OperatorFamily, x: ModuleVector) -> AlgebraElement:
    """sum_k w_k <T_k x, T_k x>."""
    acc = x.shape.zeros()
    for w, op in family:
        y = op(x)
        acc = acc + float(w) * inner(y, y)
    return acc


def frame_operator(family: OperatorFamily) -> ModuleOperator:
    """S = sum_k w_k T_k^* T_k."""
    acc = ModuleOperator.zeros(family.shape, family.rank)
    for w, op in family:
        acc = acc + float(w) * (op.H @ op)
    return acc


def analysis(family: OperatorFamily, x: ModuleVector) -> L2Vector:
    """R x = {T_k x}."""
    return L2Vector(family.disc, [op(x) for op in family.ops])


def synthesis(family: OperatorFamily, yf: L2Vector) -> ModuleVector:
    """R^* {y_k} = sum_k w_k T_k^* y_k."""
    if not family.disc.same_as(yf.disc):
        raise ShapeError("l2 vector and family use different discretizations")
    acc = ModuleVector.zeros(family.shape, family.rank)
    for (w, op), y in zip(family, yf.entries):
        acc = acc + float(w) * op.H(y)
    return acc


# --------------------------------------------------------------------------
# PSD pencil


def pencil_lower_bound(m: np.ndarray, n: np.ndarray, range_tol: float = RANGE_TOL) -> float | None:
    """sup{a >= 0 : a N <= M} for Hermitian PSD M, N.

    Returns ``math.inf`` when N = 0 and None when R(N) is not contained
    in R(M) (no positive a exists).
    """
    n_norm = float(np.linalg.norm(n, 2))
    if n_norm == 0.0:
        return math.inf
    basis = range_basis(hermitian_part(m))
    outside = n - basis @ (basis.conj().T @ n)
    if float(np.linalg.norm(outside, 2)) > range_tol * n_norm:
        return None
    m_half = pinv_sqrt(m)
    top = float(np.linalg.eigvalsh(hermitian_part(m_half @ n @ m_half))[-1])
    if top <= 0.0:
        return None
    return 1.0 / top


def bisect_lower_bound(m: np.ndarray, n: np.ndarray, rtol: float = 1e-10, psd_tol: float = 1e-13) -> float:
    """Bisection for sup{a >= 0 : M - a N is PSD}.

    Only eigenvalue tests of ``M - a N`` are used.  Returns ``math.inf``
    when N = 0 and a value near zero when no positive ``a`` works.
    """
    m = hermitian_part(m)
    n = hermitian_part(n)
    m_norm = float(np.linalg.norm(m, 2))
    n_norm = float(np.linalg.norm(n, 2))
    if n_norm == 0.0:
        return math.inf

    def feasible(a):
        lam = np.linalg.eigvalsh(m - a * n)[0]
        return lam >= -psd_tol * max(m_norm, a * n_norm)

    # a N <= M forces a ||N|| <= ||M||
    hi = (m_norm / n_norm) * (1 + 1e-6) + 1e-300
    while feasible(hi):
        hi *= 2.0
    lo, floor = 0.0, hi * 1e-15
    for _ in range(400):
        if hi - lo <= rtol * lo or hi <= floor:
            break
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi) if lo > 0 else lo


# --------------------------------------------------------------------------
# bounds and classification


def _fmt_lower(v):
    if v is None:
        return "none"
    if v == math.inf:
        return "unbounded"
    return float(v)


@dataclass
class FrameBounds:
    """Optimal (and optionally claimed) bounds of a family relative to K.

    ``lower_opt`` is a float, ``math.inf`` when K = 0 (every a works) or
    None when the family is not a K-frame.
    """

    lower_opt: float | None
    upper_opt: float
    lower_claimed: float | None = None
    upper_claimed: float | None = None
    psd_margins: dict = field(default_factory=dict)

    @property
    def is_k_frame(self) -> bool:
        return self.lower_opt is not None and self.lower_opt > 0

    @property
    def claims_hold(self) -> bool | None:
        """Whether the claimed bounds are valid PSD inequalities (None if nothing claimed)."""
        keys = [k for k in ("claimed_lower", "claimed_upper") if k in self.psd_margins]
        if not keys:
            return None
        return all(self.psd_margins[f"{k}_ok"] for k in keys)

    def to_json(self) -> dict:
        out = {"lower_opt": _fmt_lower(self.lower_opt), "upper_opt": float(self.upper_opt),
               "margins": {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v))
                           for k, v in self.psd_margins.items()}}
        if self.lower_claimed is not None:
            out["lower_claimed"] = float(self.lower_claimed)
        if self.upper_claimed is not None:
            out["upper_claimed"] = float(self.upper_claimed)
        return out


def _min_eig(mat: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(hermitian_part(mat))[0])


def bounds_from_matrices(s: np.ndarray, kk: np.ndarray, claimed=None,
                         tol: float = DEFAULT_PSD_TOL) -> FrameBounds:
    """Optimal bounds for frame operator matrix ``s`` against ``kk`` = rep(KK*)."""
    upper = float(np.linalg.eigvalsh(hermitian_part(s))[-1]) if s.size else 0.0
    upper = max(upper, 0.0)
    lower = pencil_lower_bound(s, kk)
    eye = np.eye(s.shape[0])
    margins = {"upper": _min_eig(upper * eye - s)}
    if lower is not None and lower != math.inf:
        margins["lower"] = _min_eig(s - lower * kk)
    out = FrameBounds(lower, upper, psd_margins=margins)
    if claimed is not None:
        lo, hi = claimed
        scale = max(float(np.linalg.norm(s, 2)), 1e-300)
        if lo is not None:
            out.lower_claimed = float(lo)
            margins["claimed_lower"] = _min_eig(s - lo * kk)
            margins["claimed_lower_ok"] = margins["claimed_lower"] >= -tol * scale
        if hi is not None:
            out.upper_claimed = float(hi)
            margins["claimed_upper"] = _min_eig(hi * eye - s)
            margins["claimed_upper_ok"] = margins["claimed_upper"] >= -tol * scale
    return out


def optimal_bounds(family: OperatorFamily, k: ModuleOperator, claimed=None,
                   tol: float = DEFAULT_PSD_TOL) -> FrameBounds:
    """Least upper bound and greatest lower bound of ``family`` as a K-frame.

    ``claimed`` is an optional ``(lower, upper)`` pair whose validity as
    PSD inequalities is recorded in ``psd_margins``.
    """
    s = frame_operator(family).rep()
    kk = (k @ k.H).rep()
    return bounds_from_matrices(s, kk, claimed, tol)


def oracle_lower_bound(family: OperatorFamily, k: ModuleOperator) -> float:
    s = frame_operator(family).rep()
    kk = (k @ k.H).rep()
    return bisect_lower_bound(s, kk)


FRAME_KINDS = ("not_bessel", "bessel_only", "k_frame", "tight_k_frame", "parseval_k_frame", "operator_frame")


@dataclass(frozen=True)
class FrameClass:
    kind: str
    constant: float | None = None
    degenerate: bool = False

    @property
    def is_frame(self) -> bool:
        return self.kind not in ("not_bessel", "bessel_only")

    def __str__(self):
        if self.kind == "tight_k_frame":
            return f"tight_k_frame({self.constant:.12g})"
        return self.kind + (" (degenerate K=0)" if self.degenerate else "")


def classify(family: OperatorFamily, k: ModuleOperator, tol: float = DEFAULT_BOUND_TOL) -> FrameClass:
    """Classify ``family`` relative to K.

    A frame relative to K = I that is not tight is reported as
    ``operator_frame``; a finite discretization is always Bessel.
    """
    s = frame_operator(family)
    kk = k @ k.H
    b = bounds_from_matrices(s.rep(), kk.rep())
    if not math.isfinite(b.upper_opt):
        return FrameClass("not_bessel")
    if b.lower_opt == math.inf:
        return FrameClass("k_frame", math.inf, degenerate=True)
    if b.lower_opt is None or b.lower_opt <= tol:
        return FrameClass("bessel_only")
    a = b.lower_opt
    if (s - a * kk).norm() <= tol * max(s.norm(), 1e-300):
        if abs(a - 1.0) <= tol:
            return FrameClass("parseval_k_frame", 1.0)
        return FrameClass("tight_k_frame", a)
    if (k - ModuleOperator.identity(k.shape, k.rank)).norm() <= tol:
        return FrameClass("operator_frame", a)
    return FrameClass("k_frame", a)


@dataclass
class DouglasFactor:
    q: ModuleOperator
    residual: float


def douglas_factor(k: ModuleOperator, s: ModuleOperator, tol: float = DEFAULT_BOUND_TOL,
                   psd_tol: float = DEFAULT_PSD_TOL) -> DouglasFactor | None:
    """Minimal-norm Q with K = S^{1/2} Q, or None when R(K) is not in R(S^{1/2}).

    The pseudo-inverse of S^{1/2} drops singular values below
    sqrt(RANK_RTOL) of the largest, which matches the rank decision made
    on S itself.
    """
    if not s.is_positive(psd_tol):
        margin = order(ModuleOperator.zeros(s.shape, s.rank), s, psd_tol).margin
        raise DomainError(f"frame operator is not positive (min_eig={margin:.3e})", margin)
    root = s.sqrt(psd_tol)
    q = root.pinv(tol=math.sqrt(RANK_RTOL)) @ k
    residual = (root @ q - k).norm()
    if residual <= tol * max(1.0, k.norm()):
        return DouglasFactor(q, residual)
    return None


def frame_report(family: OperatorFamily, k: ModuleOperator, claimed=None,
                 tol_psd: float = DEFAULT_PSD_TOL, tol_bound: float = DEFAULT_BOUND_TOL) -> dict:
    """Everything known about ``family`` relative to K, as a JSON-ready dict."""
    s = frame_operator(family)
    b = optimal_bounds(family, k, claimed, tol_psd)
    cls = classify(family, k, tol_bound)
    factor = douglas_factor(k, s, tol_bound, tol_psd)
    out = b.to_json()
    out["class"] = str(cls)
    out["douglas_residual"] = None if factor is None else float(factor.residual)
    return out
