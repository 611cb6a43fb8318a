"""The coefficient C*-algebra A = M_{n_1}(C) + ... + M_{n_K}(C).

Elements are tuples of complex square blocks.  Everything here is
blockwise dense linear algebra; the only spectral primitive is the
Hermitian eigendecomposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, NumericError, ShapeError

DEFAULT_PSD_TOL = 1e-9


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Positive square root of a Hermitian PSD matrix (negative rounding clipped)."""
    w, v = np.linalg.eigh(hermitian_part(m))
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


@dataclass(frozen=True)
class AlgebraShape:
    """Block sizes (n_1, ..., n_K) of the direct sum."""

    block_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.block_sizes)
        if not sizes:
            raise ShapeError("algebra shape needs at least one block")
        if any(n < 1 for n in sizes):
            raise ShapeError(f"block sizes must be >= 1, got {sizes}")
        object.__setattr__(self, "block_sizes", sizes)

    @property
    def dim(self) -> int:
        """Complex dimension sum n_k^2."""
        return sum(n * n for n in self.block_sizes)

    def __len__(self):
        return len(self.block_sizes)

    def __iter__(self):
        return iter(self.block_sizes)

    def zeros(self) -> AlgebraElement:
        return AlgebraElement(self, [np.zeros((n, n), complex) for n in self])

    def identity(self) -> AlgebraElement:
        return AlgebraElement(self, [np.eye(n, dtype=complex) for n in self])


def _freeze(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


class AlgebraElement:
    """An element of A, stored as one complex matrix per block.

    Arithmetic is blockwise: ``a + b``, ``a - b``, ``a @ b`` (algebra
    product; ``a * b`` is accepted too), ``c * a`` for complex ``c``,
    and ``a.H`` for the involution.
    """

    __slots__ = ("shape", "blocks")

    def __init__(self, shape: AlgebraShape | Sequence[int], blocks: Sequence):
        if not isinstance(shape, AlgebraShape):
            shape = AlgebraShape(tuple(shape))
        blocks = tuple(_freeze(b) for b in blocks)
        if len(blocks) != len(shape):
            raise ShapeError(f"expected {len(shape)} blocks, got {len(blocks)}")
        for n, b in zip(shape, blocks):
            if b.shape != (n, n):
                raise ShapeError(f"block of shape {b.shape} where ({n}, {n}) expected")
            if not np.all(np.isfinite(b)):
                raise NumericError("algebra element has non-finite entries")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @classmethod
    def scalars(cls, *values) -> AlgebraElement:
        """Element of C + ... + C; ``scalars(x, y)`` is diag(x, y) over shape (1, 1)."""
        return cls(AlgebraShape((1,) * len(values)), [[[v]] for v in values])

    @classmethod
    def diag(cls, shape, values) -> AlgebraElement:
        """Element with diagonal blocks filled from a flat list of values."""
        shape = shape if isinstance(shape, AlgebraShape) else AlgebraShape(tuple(shape))
        values = list(values)
        blocks, pos = [], 0
        for n in shape:
            blocks.append(np.diag(np.asarray(values[pos:pos + n], complex)))
            pos += n
        if pos != len(values):
            raise ShapeError("diag: value count does not match shape")
        return cls(shape, blocks)

    def _check(self, other: AlgebraElement):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if other.shape != self.shape:
            raise ShapeError(f"shape mismatch: {self.shape.block_sizes} vs {other.shape.block_sizes}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.shape, [-a for a in self.blocks])

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.shape, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self @ other
        if np.isscalar(other):
            return AlgebraElement(self.shape, [other * a for a in self.blocks])
        return NotImplemented

    __rmul__ = __mul__

    @property
    def H(self) -> AlgebraElement:
        """Adjoint a*: blockwise conjugate transpose."""
        return AlgebraElement(self.shape, [a.conj().T for a in self.blocks])

    def adjoint(self) -> AlgebraElement:
        return self.H

    def scale(self, c) -> AlgebraElement:
        return c * self

    def norm(self) -> float:
        """C*-norm: largest spectral norm over blocks."""
        return max(float(np.linalg.norm(b, 2)) for b in self.blocks)

    def __abs__(self) -> AlgebraElement:
        """|a| = (a* a)^{1/2}."""
        return AlgebraElement(self.shape, [psd_sqrt(b.conj().T @ b) for b in self.blocks])

    def sqrt(self, tol: float = DEFAULT_PSD_TOL) -> AlgebraElement:
        """Unique positive square root; raises DomainError on non-positive input."""
        pos = positivity(self, tol)
        if not pos.positive:
            raise DomainError(f"sqrt of non-positive element (min_eig={pos.min_eig:.3e})", pos.min_eig)
        return AlgebraElement(self.shape, [psd_sqrt(b) for b in self.blocks])

    def allclose(self, other: AlgebraElement, atol: float = 1e-12) -> bool:
        self._check(other)
        return (self - other).norm() <= atol

    def to_json(self) -> dict:
        return {
            "block_sizes": list(self.shape.block_sizes),
            "blocks": [[[[float(z.real), float(z.imag)] for z in row] for row in b] for b in self.blocks],
        }

    @classmethod
    def from_json(cls, obj: dict) -> AlgebraElement:
        blocks = [np.array([[complex(re, im) for re, im in row] for row in b], complex).reshape(n, n)
                  for n, b in zip(obj["block_sizes"], obj["blocks"])]
        return cls(AlgebraShape(tuple(obj["block_sizes"])), blocks)

    def __repr__(self):
        if all(n == 1 for n in self.shape):
            return f"AlgebraElement.scalars({', '.join(repr(complex(b[0, 0])) for b in self.blocks)})"
        return f"AlgebraElement({self.shape.block_sizes}, {[b.tolist() for b in self.blocks]})"


class Positivity(NamedTuple):
    positive: bool
    min_eig: float
    hermitian_defect: float


def positivity(a: AlgebraElement, tol: float = DEFAULT_PSD_TOL) -> Positivity:
    """Positivity of ``a`` relative to its norm.

    The eigenvalue test runs on the Hermitian part; the distance to
    self-adjointness is reported separately so callers can reject
    non-self-adjoint inputs.
    """
    if not all(np.all(np.isfinite(b)) for b in a.blocks):
        raise NumericError("non-finite entries")
    scale = a.norm()
    defect = max(float(np.linalg.norm(b - b.conj().T, 2)) for b in a.blocks)
    min_eig = min(float(np.linalg.eigvalsh(hermitian_part(b))[0]) for b in a.blocks)
    if scale == 0.0:
        return Positivity(True, 0.0, 0.0)
    ok = defect <= tol * scale and min_eig >= -tol * scale
    return Positivity(ok, min_eig, defect)


def leq(a: AlgebraElement, b: AlgebraElement, tol: float = DEFAULT_PSD_TOL) -> bool:
    """Order test a <= b in A^+; the tolerance is relative to max(|a|, |b|)."""
    d = b - a
    scale = max(a.norm(), b.norm())
    if scale == 0.0:
        return True
    pos = positivity(d, tol=1.0)
    return pos.hermitian_defect <= tol * scale and pos.min_eig >= -tol * scale
