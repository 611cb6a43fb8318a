"""Discretized measure spaces, operator families and l^2(Omega, H)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebra import AlgebraElement
from .errors import DomainError, ShapeError
from .module import ModuleOperator, ModuleVector, inner

DEFAULT_RULE = ("gauss", 16)


@dataclass(frozen=True, eq=False)
class MeasureDiscretization:
    """Weighted atoms standing in for (Omega, mu).

    ``nodes`` is None for discrete measures (atoms are opaque indices).
    ``source`` records how the atoms were produced, e.g.
    ``("interval", 0.0, 1.0, "gauss", 16)`` or ``("discrete",)``.
    """

    weights: np.ndarray
    nodes: np.ndarray | None = None
    source: tuple = ("discrete",)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        if w.size == 0:
            raise DomainError("a discretization needs at least one atom")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise DomainError("all atom weights must be positive and finite")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.nodes is not None:
            x = np.array(self.nodes, dtype=float).ravel()
            if x.shape != w.shape:
                raise ShapeError("nodes and weights differ in length")
            x.setflags(write=False)
            object.__setattr__(self, "nodes", x)

    def __len__(self):
        return self.weights.size

    @property
    def is_interval(self) -> bool:
        return self.source[0] == "interval"

    def same_as(self, other: MeasureDiscretization) -> bool:
        if self is other:
            return True
        if len(self) != len(other) or not np.array_equal(self.weights, other.weights):
            return False
        if (self.nodes is None) != (other.nodes is None):
            return False
        return self.nodes is None or np.array_equal(self.nodes, other.nodes)

    def integrate(self, values) -> complex | np.ndarray:
        """Quadrature sum sum_k w_k f_k of scalar samples."""
        return np.tensordot(self.weights, np.asarray(values), axes=1)

    def to_json(self) -> dict:
        if self.is_interval:
            _, a, b, rule, n = self.source
            return {"type": "interval", "a": a, "b": b, "rule": rule, "n": n}
        return {"type": "discrete", "atoms": [{"w": float(w)} for w in self.weights]}


def midpoint(a: float, b: float, n: int) -> MeasureDiscretization:
    _check_interval(a, b, n)
    h = (b - a) / n
    nodes = a + (np.arange(n) + 0.5) * h
    return MeasureDiscretization(np.full(n, h), nodes, ("interval", float(a), float(b), "midpoint", int(n)))


def gauss_legendre(a: float, b: float, n: int) -> MeasureDiscretization:
    _check_interval(a, b, n)
    x, w = np.polynomial.legendre.leggauss(n)
    half = (b - a) / 2
    return MeasureDiscretization(w * half, a + (x + 1) * half, ("interval", float(a), float(b), "gauss", int(n)))


def discrete(weights: Sequence[float]) -> MeasureDiscretization:
    return MeasureDiscretization(np.asarray(weights, float))


def discretize(spec: dict) -> MeasureDiscretization:
    """Build a discretization from its JSON description."""
    kind = spec.get("type")
    if kind == "discrete":
        return discrete([atom["w"] for atom in spec["atoms"]])
    if kind == "interval":
        rule = spec.get("rule", DEFAULT_RULE[0])
        n = int(spec.get("n", DEFAULT_RULE[1]))
        if rule == "gauss":
            return gauss_legendre(spec["a"], spec["b"], n)
        if rule == "midpoint":
            return midpoint(spec["a"], spec["b"], n)
        raise DomainError(f"unknown quadrature rule {rule!r}")
    raise DomainError(f"unknown measure type {kind!r}")


def _check_interval(a, b, n):
    if n < 1:
        raise DomainError("quadrature needs n >= 1")
    if not a < b:
        raise DomainError("interval needs a < b")


class OperatorFamily:
    """Operators T_k at the atoms of a discretization, standing in for omega -> T_omega."""

    def __init__(self, disc: MeasureDiscretization, ops: Sequence[ModuleOperator], generator=None):
        ops = tuple(ops)
        if len(ops) != len(disc):
            raise ShapeError(f"{len(ops)} operators for {len(disc)} atoms")
        first = ops[0]
        for op in ops:
            first._check(op)
        self.disc = disc
        self.ops = ops
        self.generator = None if generator is None else tuple(generator)

    @property
    def shape(self):
        return self.ops[0].shape

    @property
    def rank(self) -> int:
        return self.ops[0].rank

    @property
    def weights(self) -> np.ndarray:
        return self.disc.weights

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(zip(self.disc.weights, self.ops))

    def map(self, fn: Callable[[ModuleOperator], ModuleOperator]) -> OperatorFamily:
        return OperatorFamily(self.disc, [fn(op) for op in self.ops])

    def to_json(self) -> dict:
        out = {"measure": self.disc.to_json()}
        if self.generator is not None and self.disc.is_interval:
            out["generator"] = {"coeffs": [c.to_json() for c in self.generator]}
        else:
            out["ops"] = [op.to_json() for op in self.ops]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> OperatorFamily:
        disc = discretize(obj["measure"])
        if "generator" in obj:
            return family_from_generator([ModuleOperator.from_json(c) for c in obj["generator"]["coeffs"]], disc)
        return cls(disc, [ModuleOperator.from_json(op) for op in obj["ops"]])


def family_from_generator(coeffs: Sequence[ModuleOperator], disc: MeasureDiscretization) -> OperatorFamily:
    """Evaluate the polynomial omega -> sum_d omega^d C_d at every node."""
    coeffs = list(coeffs)
    if not coeffs:
        raise DomainError("generator needs at least one coefficient")
    if disc.nodes is None:
        raise DomainError("generators need an interval discretization")
    for c in coeffs[1:]:
        coeffs[0]._check(c)
    ops = []
    for w in disc.nodes:
        acc = ModuleOperator.zeros(coeffs[0].shape, coeffs[0].rank)
        for c in reversed(coeffs):
            acc = float(w) * acc + c
        ops.append(acc)
    return OperatorFamily(disc, ops, generator=coeffs)


@dataclass(frozen=True, eq=False)
class L2Vector:
    """An element {x_k} of the discretized l^2(Omega, H)."""

    disc: MeasureDiscretization
    entries: tuple = field(default=())

    def __post_init__(self):
        entries = tuple(self.entries)
        if len(entries) != len(self.disc):
            raise ShapeError("l2 vector is not aligned with its discretization")
        for e in entries[1:]:
            entries[0]._check(e)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def zeros(cls, disc, shape, rank) -> L2Vector:
        return cls(disc, [ModuleVector.zeros(shape, rank)] * len(disc))


def l2_inner(xf: L2Vector, yf: L2Vector) -> AlgebraElement:
    """<x, y> = sum_k w_k <x_k, y_k>."""
    if not xf.disc.same_as(yf.disc):
        raise ShapeError("l2 vectors live on different discretizations")
    acc = xf.entries[0].shape.zeros()
    for w, x, y in zip(xf.disc.weights, xf.entries, yf.entries):
        acc = acc + float(w) * inner(x, y)
    return acc


def l2_norm(xf: L2Vector) -> float:
    return l2_inner(xf, xf).norm() ** 0.5


@dataclass(frozen=True, eq=False)
class ScalarFamily:
    """Scalars a_k aligned with the atoms of a discretization."""

    disc: MeasureDiscretization
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values).ravel()
        if v.size != len(self.disc):
            raise ShapeError("scalar family is not aligned with its discretization")
        if not np.iscomplexobj(v):
            v = v.astype(float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, disc, c) -> ScalarFamily:
        return cls(disc, np.full(len(disc), c))

    def l2_mass(self) -> float:
        """sum_k w_k |a_k|^2."""
        return float(np.dot(self.disc.weights, np.abs(self.values) ** 2))

    @property
    def inf(self) -> float:
        return float(np.min(np.real(self.values)))

    @property
    def sup(self) -> float:
        return float(np.max(np.real(self.values)))

    def positively_confined(self) -> bool:
        return (not np.iscomplexobj(self.values)) and 0 < self.inf <= self.sup < np.inf
