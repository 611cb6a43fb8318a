"""The Hilbert A-module H = A^m and its adjointable operators.

Conventions
-----------
A vector x = (x_1, ..., x_m) is stored per algebra block k as the
``n_k x (m n_k)`` matrix ``X_k = [x_1 | ... | x_m]``.  The inner product
is ``<x, y> = sum_i x_i y_i^*``, i.e. ``X_k Y_k^H`` blockwise, and the
algebra acts on the left.

An operator with cells ``c_ij`` acts by right multiplication,
``(Tx)_j = sum_i x_i c_ij``; blockwise this is ``X_k -> X_k C_k`` with
``C_k`` the block matrix of cells.  We store ``G_k = C_k^T`` so that
composition and adjoints are the usual matrix ones: ``T o U`` has
``G_T G_U`` and ``T*`` has ``G_T^H`` (the cell matrix of ``T o U`` is
``C_U C_T``, reversed).

The complex representation lives on the coordinate space ordered by
(block k, row p, coordinate i, column q); the entries of the ``X_k``
form an orthonormal basis and ``rep(T) = (+)_k I_{n_k} (x) G_k``.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .algebra import DEFAULT_PSD_TOL, AlgebraElement, AlgebraShape, hermitian_part
from .errors import DomainError, RankError, RepresentationError, ShapeError

RANK_RTOL = 1e-10
PULLBACK_TOL = 1e-8


def _shape(shape) -> AlgebraShape:
    return shape if isinstance(shape, AlgebraShape) else AlgebraShape(tuple(shape))


def rep_dim(shape: AlgebraShape, m: int) -> int:
    return m * shape.dim


class ModuleVector:
    """An element of A^m."""

    __slots__ = ("shape", "rank", "mats")

    def __init__(self, shape, rank: int, mats: Sequence):
        shape = _shape(shape)
        mats = tuple(np.array(x, dtype=complex) for x in mats)
        if len(mats) != len(shape):
            raise ShapeError("vector block count does not match algebra shape")
        for n, x in zip(shape, mats):
            if x.shape != (n, rank * n):
                raise ShapeError(f"vector block of shape {x.shape}, expected {(n, rank * n)}")
            x.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "rank", int(rank))
        object.__setattr__(self, "mats", mats)

    def __setattr__(self, name, value):
        raise AttributeError("ModuleVector is immutable")

    @classmethod
    def from_coords(cls, coords: Sequence[AlgebraElement]) -> ModuleVector:
        coords = list(coords)
        if not coords:
            raise ShapeError("module vector needs at least one coordinate")
        shape = coords[0].shape
        for c in coords:
            if c.shape != shape:
                raise ShapeError("coordinates do not share an algebra shape")
        mats = [np.hstack([c.blocks[k] for c in coords]) for k in range(len(shape))]
        return cls(shape, len(coords), mats)

    @classmethod
    def zeros(cls, shape, rank: int) -> ModuleVector:
        shape = _shape(shape)
        return cls(shape, rank, [np.zeros((n, rank * n), complex) for n in shape])

    @classmethod
    def from_rep(cls, shape, rank: int, v: np.ndarray) -> ModuleVector:
        """Inverse of :meth:`to_rep`."""
        shape = _shape(shape)
        v = np.asarray(v, complex).ravel()
        if v.size != rep_dim(shape, rank):
            raise ShapeError("coordinate vector has the wrong length")
        mats, pos = [], 0
        for n in shape:
            size = n * rank * n
            mats.append(v[pos:pos + size].reshape(n, rank * n))
            pos += size
        return cls(shape, rank, mats)

    @property
    def coords(self) -> list[AlgebraElement]:
        return [AlgebraElement(self.shape, [x[:, i * n:(i + 1) * n] for n, x in zip(self.shape, self.mats)])
                for i in range(self.rank)]

    def to_rep(self) -> np.ndarray:
        return np.concatenate([x.ravel() for x in self.mats])

    def _check(self, other):
        if not isinstance(other, ModuleVector):
            return NotImplemented
        if other.shape != self.shape or other.rank != self.rank:
            raise ShapeError("module vectors differ in shape or rank")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return ModuleVector(self.shape, self.rank, [a + b for a, b in zip(self.mats, other.mats)])

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return ModuleVector(self.shape, self.rank, [a - b for a, b in zip(self.mats, other.mats)])

    def __neg__(self):
        return ModuleVector(self.shape, self.rank, [-a for a in self.mats])

    def __mul__(self, c):
        if np.isscalar(c):
            return ModuleVector(self.shape, self.rank, [c * a for a in self.mats])
        return NotImplemented

    __rmul__ = __mul__

    def lmul(self, a: AlgebraElement) -> ModuleVector:
        """Module action a . x = (a x_1, ..., a x_m)."""
        if a.shape != self.shape:
            raise ShapeError("algebra element and vector differ in shape")
        return ModuleVector(self.shape, self.rank, [b @ x for b, x in zip(a.blocks, self.mats)])

    def to_json(self) -> dict:
        return {"rank": self.rank, "coords": [c.to_json() for c in self.coords]}

    @classmethod
    def from_json(cls, obj: dict) -> ModuleVector:
        v = cls.from_coords([AlgebraElement.from_json(c) for c in obj["coords"]])
        if v.rank != obj["rank"]:
            raise ShapeError("declared rank does not match coordinate count")
        return v

    def __repr__(self):
        return f"ModuleVector({self.coords!r})"


def inner(x: ModuleVector, y: ModuleVector) -> AlgebraElement:
    """A-valued inner product <x, y> = sum_i x_i y_i^*."""
    x._check(y)
    return AlgebraElement(x.shape, [a @ b.conj().T for a, b in zip(x.mats, y.mats)])


def norm(x: ModuleVector) -> float:
    """||x|| = ||<x, x>||^{1/2}."""
    return inner(x, x).norm() ** 0.5


class ModuleOperator:
    """An adjointable operator on A^m acting by right multiplication of cells."""

    __slots__ = ("shape", "rank", "mats")

    def __init__(self, shape, rank: int, mats: Sequence):
        shape = _shape(shape)
        mats = tuple(np.array(g, dtype=complex) for g in mats)
        if len(mats) != len(shape):
            raise ShapeError("operator block count does not match algebra shape")
        for n, g in zip(shape, mats):
            if g.shape != (rank * n, rank * n):
                raise ShapeError(f"operator block of shape {g.shape}, expected {(rank * n, rank * n)}")
            g.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "rank", int(rank))
        object.__setattr__(self, "mats", mats)

    def __setattr__(self, name, value):
        raise AttributeError("ModuleOperator is immutable")

    # construction -------------------------------------------------------

    @classmethod
    def from_cells(cls, cells: Sequence[Sequence[AlgebraElement]]) -> ModuleOperator:
        m = len(cells)
        if m == 0 or any(len(row) != m for row in cells):
            raise ShapeError("cell array must be square and non-empty")
        shape = cells[0][0].shape
        for row in cells:
            for c in row:
                if c.shape != shape:
                    raise ShapeError("cells do not share an algebra shape")
        mats = [np.block([[cells[i][j].blocks[k] for j in range(m)] for i in range(m)]).T
                for k in range(len(shape))]
        return cls(shape, m, mats)

    @classmethod
    def right_mult(cls, c: AlgebraElement) -> ModuleOperator:
        """R[c]: x -> x c on H = A^1."""
        return cls(c.shape, 1, [b.T for b in c.blocks])

    @classmethod
    def identity(cls, shape, rank: int) -> ModuleOperator:
        shape = _shape(shape)
        return cls(shape, rank, [np.eye(rank * n, dtype=complex) for n in shape])

    @classmethod
    def zeros(cls, shape, rank: int) -> ModuleOperator:
        shape = _shape(shape)
        return cls(shape, rank, [np.zeros((rank * n, rank * n), complex) for n in shape])

    @classmethod
    def from_rep(cls, shape, rank: int, mat: np.ndarray, tol: float = PULLBACK_TOL) -> ModuleOperator:
        """Pull a representation-space matrix back to cell form.

        Raises RepresentationError when ``mat`` is not (within ``tol``,
        relative) the representation of any module operator.
        """
        shape = _shape(shape)
        mat = np.asarray(mat, complex)
        dim = rep_dim(shape, rank)
        if mat.shape != (dim, dim):
            raise ShapeError(f"matrix of shape {mat.shape}, expected {(dim, dim)}")
        mats, pos = [], 0
        for n in shape:
            d = rank * n
            g = sum(mat[pos + p * d:pos + (p + 1) * d, pos + p * d:pos + (p + 1) * d] for p in range(n)) / n
            mats.append(g)
            pos += n * d
        op = cls(shape, rank, mats)
        scale = max(1.0, float(np.linalg.norm(mat)))
        residual = float(np.linalg.norm(mat - op.rep())) / scale
        if residual > tol:
            raise RepresentationError(f"matrix is not a module operator (residual {residual:.3e})")
        return op

    # structure ----------------------------------------------------------

    @property
    def cells(self) -> list[list[AlgebraElement]]:
        m = self.rank
        out = [[None] * m for _ in range(m)]
        for i in range(m):
            for j in range(m):
                out[i][j] = AlgebraElement(
                    self.shape, [g.T[i * n:(i + 1) * n, j * n:(j + 1) * n] for n, g in zip(self.shape, self.mats)])
        return out

    def rep(self) -> np.ndarray:
        """Matrix of the operator on the coordinate space (orthonormal basis)."""
        dim = rep_dim(self.shape, self.rank)
        out = np.zeros((dim, dim), complex)
        pos = 0
        for n, g in zip(self.shape, self.mats):
            d = g.shape[0]
            for p in range(n):
                out[pos + p * d:pos + (p + 1) * d, pos + p * d:pos + (p + 1) * d] = g
            pos += n * d
        return out

    def _check(self, other):
        if not isinstance(other, ModuleOperator):
            return NotImplemented
        if other.shape != self.shape or other.rank != self.rank:
            raise ShapeError("operators differ in shape or rank")
        return None

    # arithmetic ---------------------------------------------------------

    def __call__(self, x: ModuleVector) -> ModuleVector:
        if x.shape != self.shape or x.rank != self.rank:
            raise ShapeError("operator and vector differ in shape or rank")
        return ModuleVector(self.shape, self.rank, [xm @ g.T for xm, g in zip(x.mats, self.mats)])

    apply = __call__

    def __matmul__(self, other):
        """Composition: (T @ U)(x) = T(U(x))."""
        if self._check(other) is NotImplemented:
            return NotImplemented
        return ModuleOperator(self.shape, self.rank, [a @ b for a, b in zip(self.mats, other.mats)])

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return ModuleOperator(self.shape, self.rank, [a + b for a, b in zip(self.mats, other.mats)])

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return ModuleOperator(self.shape, self.rank, [a - b for a, b in zip(self.mats, other.mats)])

    def __neg__(self):
        return ModuleOperator(self.shape, self.rank, [-a for a in self.mats])

    def __mul__(self, c):
        if np.isscalar(c):
            return ModuleOperator(self.shape, self.rank, [c * a for a in self.mats])
        return NotImplemented

    __rmul__ = __mul__

    @property
    def H(self) -> ModuleOperator:
        return ModuleOperator(self.shape, self.rank, [g.conj().T for g in self.mats])

    def adjoint(self) -> ModuleOperator:
        return self.H

    def compose(self, other: ModuleOperator) -> ModuleOperator:
        return self @ other

    def scale(self, c) -> ModuleOperator:
        return c * self

    # functional calculus (on the representation) -----------------------

    def _pull(self, mat):
        return ModuleOperator.from_rep(self.shape, self.rank, mat)

    def norm(self) -> float:
        """Operator norm: largest singular value of rep(T)."""
        return float(np.linalg.norm(self.rep(), 2))

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.rep(), compute_uv=False)

    def rank_(self, tol: float = RANK_RTOL) -> int:
        s = self.singular_values()
        if s[0] == 0.0:
            return 0
        return int(np.sum(s > tol * s[0]))

    def is_positive(self, tol: float = DEFAULT_PSD_TOL) -> bool:
        return order(ModuleOperator.zeros(self.shape, self.rank), self, tol).leq

    def is_surjective(self, tol: float = RANK_RTOL) -> bool:
        return self.rank_(tol) == rep_dim(self.shape, self.rank)

    def is_injective(self, tol: float = RANK_RTOL) -> bool:
        # square representation: injective iff surjective
        return self.is_surjective(tol)

    def sqrt(self, tol: float = DEFAULT_PSD_TOL) -> ModuleOperator:
        if not self.is_positive(tol):
            margin = order(ModuleOperator.zeros(self.shape, self.rank), self, tol).margin
            raise DomainError(f"sqrt of non-positive operator (min_eig={margin:.3e})", margin)
        w, v = np.linalg.eigh(hermitian_part(self.rep()))
        return self._pull((v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T)

    def pinv(self, tol: float = RANK_RTOL) -> ModuleOperator:
        """Moore-Penrose inverse; singular values below tol * sigma_max count as zero."""
        return self._pull(np.linalg.pinv(self.rep(), rcond=tol))

    def inverse(self, tol: float = RANK_RTOL) -> ModuleOperator:
        s = self.singular_values()
        if s[0] == 0.0 or s[-1] <= tol * s[0]:
            raise RankError(f"operator is singular (sigma_min={s[-1]:.3e})", float(s[-1]))
        return self._pull(np.linalg.inv(self.rep()))

    def allclose(self, other: ModuleOperator, atol: float = 1e-12) -> bool:
        return (self - other).norm() <= atol

    def to_json(self) -> dict:
        return {"rank": self.rank, "cells": [[c.to_json() for c in row] for row in self.cells]}

    @classmethod
    def from_json(cls, obj: dict) -> ModuleOperator:
        op = cls.from_cells([[AlgebraElement.from_json(c) for c in row] for row in obj["cells"]])
        if op.rank != obj["rank"]:
            raise ShapeError("declared rank does not match cell array")
        return op

    def __repr__(self):
        return f"ModuleOperator(shape={self.shape.block_sizes}, rank={self.rank}, cells={self.cells!r})"


class Order(NamedTuple):
    leq: bool
    margin: float


def order(t: ModuleOperator, u: ModuleOperator, tol: float = DEFAULT_PSD_TOL) -> Order:
    """Test T <= U: rep(U - T) Hermitian PSD within tol * max(||T||, ||U||).

    ``margin`` is the smallest eigenvalue of the Hermitian part of rep(U - T).
    """
    t._check(u)
    d = u.rep() - t.rep()
    margin = float(np.linalg.eigvalsh(hermitian_part(d))[0])
    scale = max(t.norm(), u.norm())
    defect = float(np.linalg.norm(d - d.conj().T, 2))
    ok = defect <= tol * scale and margin >= -tol * scale
    return Order(ok, margin)


def range_basis(mat: np.ndarray, tol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of ``mat``."""
    u, s, _ = np.linalg.svd(mat)
    if s.size == 0 or s[0] == 0.0:
        return u[:, :0]
    return u[:, : int(np.sum(s > tol * s[0]))]


def null_basis(mat: np.ndarray, tol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of the null space of a square ``mat``."""
    _, s, vh = np.linalg.svd(mat)
    r = 0 if s[0] == 0.0 else int(np.sum(s > tol * s[0]))
    return vh[r:].conj().T


def pinv_sqrt(mat: np.ndarray, tol: float = RANK_RTOL) -> np.ndarray:
    """N^{+1/2} for Hermitian PSD N, restricted to its range."""
    w, v = np.linalg.eigh(hermitian_part(mat))
    top = max(w[-1], 0.0)
    keep = w > tol * top if top > 0 else np.zeros_like(w, bool)
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return (v * inv) @ v.conj().T


class RangeInclusion(NamedTuple):
    included: bool
    lambda_min: float | None


def range_inclusion(t: ModuleOperator, k: ModuleOperator, tol: float = 1e-8) -> RangeInclusion:
    """Douglas range test R(T) in R(K), with the least lambda for TT* <= lambda KK*."""
    t._check(k)
    rt, rk = t.rep(), k.rep()
    t_norm = float(np.linalg.norm(rt, 2))
    if t_norm == 0.0:
        return RangeInclusion(True, 0.0)
    basis = range_basis(rk)
    outside = rt - basis @ (basis.conj().T @ rt)
    if float(np.linalg.norm(outside, 2)) > tol * t_norm:
        return RangeInclusion(False, None)
    m = rt @ rt.conj().T
    n_half = pinv_sqrt(rk @ rk.conj().T)
    lam = float(np.linalg.eigvalsh(hermitian_part(n_half @ m @ n_half))[-1])
    return RangeInclusion(True, max(lam, 0.0))


def douglas_solve(t: ModuleOperator, k: ModuleOperator) -> tuple[ModuleOperator, float]:
    """Minimal-norm Q with T = K Q and the relative residual ||KQ - T|| / max(1, ||T||)."""
    q = k.pinv() @ t
    return q, (k @ q - t).norm() / max(1.0, t.norm())
