"""Seeded scenario generation and the worked example.

Matrix entries are drawn uniformly from the complex unit disc and every
family is rescaled so that ||S|| lands in [0.5, 2].  Operators are built
blockwise: for each algebra block k we draw the ``m n_k``-square matrix
``G_k`` of the operator directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..algebra import AlgebraElement, AlgebraShape
from ..errors import DomainError
from ..frames import frame_operator, optimal_bounds
from ..measure import OperatorFamily, ScalarFamily, discrete, family_from_generator, gauss_legendre
from ..module import ModuleOperator
from .io import Scenario

DIM_CAP = 64
PROFILES = ("generic", "guaranteed_k_frame", "rank_deficient_T", "commuting_diag", "degenerate", "tight")
_SHAPES = ((1,), (2,), (1, 1), (1, 2), (2, 1), (1, 1, 1), (3,))


@dataclass(frozen=True)
class Dims:
    block_sizes: tuple
    m: int
    atoms: int

    @property
    def rep_dim(self) -> int:
        return self.m * sum(n * n for n in self.block_sizes)


def paper_example(extras: bool = True) -> Scenario:
    """H = A over A = C + C, T_w = R[diag(w, 0)] on Lebesgue [0, 1] (two-point Gauss), K = R[diag(1, 0)].

    The 2x3 matrices (w, 0, 0; 0, 0, 0) are identified isometrically with
    diag(w, 0) in A.  With ``extras`` the scenario also carries the
    operators used by the worked checks: Q = R[diag(2, 5)],
    T = R[diag(2, 0)], L = K with a = 0.1, and Gamma_w = R[diag(1.1 w, 0)]
    with a = b = 1, alpha = 0.01, beta = 0.
    """
    r = ModuleOperator.right_mult
    d = AlgebraElement.scalars
    disc = gauss_legendre(0.0, 1.0, 2)
    family = family_from_generator([ModuleOperator.zeros((1, 1), 1), r(d(1, 0))], disc)
    k = r(d(1, 0))
    sc = Scenario(family, k, claimed=(0.25, 1 / 3), name="paper-example")
    if extras:
        sc.q = r(d(2, 5))
        sc.t = r(d(2, 0))
        sc.l_op = k
        sc.scalars = ScalarFamily.constant(disc, 0.1)
        sc.gamma = OperatorFamily(disc, [r(d(1.1 * w, 0)) for w in disc.nodes])
        sc.a = ScalarFamily.constant(disc, 1.0)
        sc.b = ScalarFamily.constant(disc, 1.0)
        sc.alpha, sc.beta = 0.01, 0.0
    return sc


class _Gen:
    def __init__(self, rng: np.random.Generator, dims: Dims):
        self.rng = rng
        self.dims = dims
        self.shape = AlgebraShape(dims.block_sizes)
        self.m = dims.m

    def disc_matrix(self, d):
        r = np.sqrt(self.rng.uniform(size=(d, d)))
        theta = self.rng.uniform(0, 2 * np.pi, size=(d, d))
        return r * np.exp(1j * theta)

    def sizes(self):
        return [self.m * n for n in self.shape]

    def op(self, mats) -> ModuleOperator:
        return ModuleOperator(self.shape, self.m, mats)

    def random(self) -> ModuleOperator:
        return self.op([self.disc_matrix(d) for d in self.sizes()])

    def unitaries(self):
        out = []
        for d in self.sizes():
            z = self.rng.standard_normal((d, d)) + 1j * self.rng.standard_normal((d, d))
            q, r = np.linalg.qr(z)
            out.append(q * (np.diag(r) / np.abs(np.diag(r))))
        return out

    def unitary(self) -> ModuleOperator:
        return self.op(self.unitaries())

    def projection(self, keep: float = 0.6) -> ModuleOperator:
        """Orthogonal projection onto a random subspace of each block (at least one dimension)."""
        mats = []
        for u, d in zip(self.unitaries(), self.sizes()):
            r = max(1, min(d - 1, int(round(keep * d)))) if d > 1 else 1
            mats.append(u[:, :r] @ u[:, :r].conj().T)
        return self.op(mats)

    def diagonal(self, basis, low=0.0, high=1.0, zero_frac=0.0) -> ModuleOperator:
        """U diag(z) U^* in the common basis, |z| in [low, high]."""
        mats = []
        for u, d in zip(basis, self.sizes()):
            z = self.rng.uniform(low, high, d) * np.exp(1j * self.rng.uniform(0, 2 * np.pi, d))
            if zero_frac > 0:
                z[self.rng.uniform(size=d) < zero_frac] = 0
            mats.append((u * z) @ u.conj().T)
        return self.op(mats)

    def atoms(self):
        return discrete(self.rng.uniform(0.2, 1.0, self.dims.atoms))

    def normalized(self, disc, ops) -> OperatorFamily:
        fam = OperatorFamily(disc, ops)
        s_norm = frame_operator(fam).norm()
        if s_norm == 0:
            return fam
        c = math.sqrt(self.rng.uniform(0.5, 2.0) / s_norm)
        return OperatorFamily(disc, [c * op for op in ops])


def default_dims(rng: np.random.Generator) -> Dims:
    shape = _SHAPES[rng.integers(len(_SHAPES))]
    return Dims(shape, int(rng.integers(1, 3)), int(rng.integers(2, 6)))


def _dims(dims, rng) -> Dims:
    if dims is None:
        dims = default_dims(rng)
    elif isinstance(dims, dict):
        dims = Dims(tuple(dims["shape"]), int(dims.get("m", 1)), int(dims.get("atoms", 3)))
    elif not isinstance(dims, Dims):
        shape, m, atoms = dims
        dims = Dims(tuple(shape), int(m), int(atoms))
    if dims.m < 1 or dims.atoms < 1 or not dims.block_sizes:
        raise DomainError(f"invalid dimensions {dims}")
    return dims


def random_instance(seed: int, dims=None, profile: str = "generic", cap: int = DIM_CAP) -> Scenario:
    """Deterministic random scenario for ``seed``.

    Profiles:

    * ``generic``: unstructured family, K, T, Q, L.
    * ``guaranteed_k_frame``: rank-deficient atoms plus one atom c K*, so
      S >= w c^2 KK* and the K-frame lower bound is positive.
    * ``rank_deficient_T``: commuting normal family, normal T of deficient
      rank commuting with it, invertible K.
    * ``commuting_diag``: every operator diagonal in one common basis.
    * ``degenerate``: family with a common kernel; K may or may not have
      its range inside R(S).
    * ``tight``: K a scaled unitary and S = A1 KK* exactly.

    Every profile also carries perturbation data: scalars with
    R = ||L||^2 sum w |a|^2 below A when the family is a K-frame, and a
    mixed-perturbation partner Gamma with coefficient families a, b.
    """
    if profile not in PROFILES:
        raise DomainError(f"unknown profile {profile!r}; expected one of {PROFILES}")
    rng = np.random.default_rng(seed)
    dims = _dims(dims, rng)
    if dims.rep_dim > cap:
        raise DomainError(f"representation dimension {dims.rep_dim} exceeds cap {cap}")
    g = _Gen(rng, dims)
    disc = g.atoms()
    n_atoms = dims.atoms

    if profile == "generic":
        family = g.normalized(disc, [g.random() for _ in range(n_atoms)])
        k, t, q = g.random(), g.random(), g.random()
    elif profile == "guaranteed_k_frame":
        k = g.random() @ g.projection(rng.uniform(0.4, 1.0))
        p = g.projection(0.5)
        ops = [g.random() @ p for _ in range(n_atoms - 1)] + [rng.uniform(0.5, 1.5) * k.H]
        family = g.normalized(disc, ops)
        t = k @ g.random() @ (g.projection(0.5) if rng.uniform() < 0.5 else ModuleOperator.identity(g.shape, g.m))
        q = g.random()
    elif profile == "degenerate":
        p = g.projection(rng.uniform(0.3, 0.8))
        family = g.normalized(disc, [g.random() @ p for _ in range(n_atoms)])
        mode = rng.integers(3)
        if mode == 0:
            k = g.random()                          # range generically escapes R(S)
        elif mode == 1:
            k = p @ g.random()                      # range inside R(S)
        else:
            k = p @ g.random() @ g.projection(0.5)  # rank-deficient, inside R(S)
        t, q = k @ g.random(), g.random()
    elif profile == "rank_deficient_T":
        basis = g.unitaries()
        family = g.normalized(disc, [g.diagonal(basis, 0.3, 1.0) for _ in range(n_atoms)])
        t = g.diagonal(basis, 0.5, 1.0)
        mats = []
        for u, gm in zip(basis, t.mats):
            z = np.diag(u.conj().T @ gm @ u).copy()
            z[rng.integers(len(z))] = 0
            if len(z) > 2:
                z[rng.uniform(size=len(z)) < 0.3] = 0
            mats.append((u * z) @ u.conj().T)
        t = g.op(mats)
        k = g.random() + 2.0 * g.unitary()          # invertible with high probability
        q = g.random()
    elif profile == "commuting_diag":
        basis = g.unitaries()
        family = g.normalized(disc, [g.diagonal(basis, 0.0, 1.0) for _ in range(n_atoms)])
        k = g.diagonal(basis, 0.0, 1.0, zero_frac=0.25 if rng.uniform() < 0.5 else 0.0)
        t = g.diagonal(basis, 0.2, 1.0, zero_frac=0.3 if rng.uniform() < 0.7 else 0.0)
        q = g.diagonal(basis, 0.5, 1.5)
    else:  # tight
        c = rng.uniform(0.25, 4.0)
        k = math.sqrt(c) * g.unitary()
        vs = [g.random() for _ in range(n_atoms)]
        acc = sum((float(w) * (v.H @ v) for w, v in zip(disc.weights, vs)), ModuleOperator.zeros(g.shape, g.m))
        w_inv = acc.sqrt().pinv()
        a1 = rng.uniform(0.2, 3.0)
        family = OperatorFamily(disc, [math.sqrt(a1) * (v @ w_inv @ k.H) for v in vs])
        t, q = g.random(), g.unitary()

    l_op = g.random()
    scalars, mix = _perturbation_data(g, family, k, l_op)
    return Scenario(family, k, t=t, q=q, l_op=l_op, gamma=mix["gamma"], scalars=scalars, a=mix["a"], b=mix["b"],
                    alpha=mix["alpha"], beta=mix["beta"], name=f"random:{profile}:{seed}")


def _perturbation_data(g: _Gen, family: OperatorFamily, k: ModuleOperator, l_op: ModuleOperator):
    rng, disc = g.rng, family.disc
    bounds = optimal_bounds(family, k)
    raw = rng.uniform(-1, 1, len(disc)) + 1j * rng.uniform(-1, 1, len(disc)) * (rng.uniform() < 0.5)
    mass = float(np.dot(disc.weights, np.abs(raw) ** 2))
    lower = bounds.lower_opt
    if lower is not None and math.isfinite(lower) and mass > 0:
        target = rng.uniform(0.02, 0.95) * lower
        raw = raw * math.sqrt(target / (l_op.norm() ** 2 * mass))
    scalars = ScalarFamily(disc, raw if np.any(np.imag(raw)) else np.real(raw))

    alpha = float(rng.uniform(0.0, 0.45))
    beta = float(rng.uniform(0.0, 0.45))
    a = ScalarFamily(disc, rng.uniform(0.5, 2.0, len(disc)))
    b = ScalarFamily(disc, rng.uniform(0.5, 2.0, len(disc)))
    # a T - b Gamma = -a V T with ||V|| <= sqrt(alpha) makes the hypothesis hold in operator order
    gamma_ops = []
    for t, ai, bi in zip(family.ops, a.values, b.values):
        v = g.random()
        v = (math.sqrt(alpha) * rng.uniform(0.0, 1.0) / max(v.norm(), 1e-300)) * v
        gamma_ops.append((ai / bi) * ((ModuleOperator.identity(g.shape, g.m) + v) @ t))
    gamma = OperatorFamily(disc, gamma_ops)
    return scalars, {"gamma": gamma, "a": a, "b": b, "alpha": alpha, "beta": beta}
