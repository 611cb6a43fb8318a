"""Scenario documents: schema validation, loading and canonical saving.

A scenario is one JSON object.  The family keys (``measure`` plus
``ops`` or ``generator``) sit at the top level next to the operators::

    {"block_sizes": [1, 1], "rank": 1,
     "measure": {"type": "interval", "a": 0, "b": 1, "rule": "gauss", "n": 2},
     "generator": {"coeffs": [<op>, <op>]},
     "K": <op>, "T": <op>, "Q": <op>, "L": <op>,
     "gamma": {"ops": [<op>, ...]},
     "scalars": [...], "a": [...], "b": [...], "alpha": 0.1, "beta": 0.0,
     "claimed": {"lower": 0.25, "upper": 0.333},
     "tolerances": {"psd": 1e-9, "bound": 1e-8, "commute": 1e-8}}

Canonical form: sorted keys, no whitespace, floats printed with 17
significant digits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from ..errors import ParseError, ShapeError
from ..measure import OperatorFamily, ScalarFamily
from ..module import ModuleOperator

DEFAULT_TOLERANCES = {"psd": 1e-9, "bound": 1e-8, "commute": 1e-8}

_number = {"type": "number"}
_complex = {"oneOf": [_number, {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}]}
_element = {
    "type": "object",
    "required": ["block_sizes", "blocks"],
    "properties": {
        "block_sizes": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "blocks": {"type": "array", "items": {"type": "array", "items": {"type": "array", "items": {
            "type": "array", "items": _number, "minItems": 2, "maxItems": 2}}}},
    },
}
_operator = {
    "type": "object",
    "required": ["rank", "cells"],
    "properties": {
        "rank": {"type": "integer", "minimum": 1},
        "cells": {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _element}},
    },
}
_measure = {
    "oneOf": [
        {"type": "object", "required": ["type", "a", "b"],
         "properties": {"type": {"const": "interval"}, "a": _number, "b": _number,
                        "rule": {"enum": ["gauss", "midpoint"]}, "n": {"type": "integer", "minimum": 1}}},
        {"type": "object", "required": ["type", "atoms"],
         "properties": {"type": {"const": "discrete"},
                        "atoms": {"type": "array", "minItems": 1, "items": {
                            "type": "object", "required": ["w"],
                            "properties": {"w": {"type": "number", "exclusiveMinimum": 0}}}}}},
    ]
}
_scalars = {"type": "array", "minItems": 1, "items": _complex}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["measure", "K"],
    "properties": {
        "name": {"type": "string"},
        "block_sizes": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "rank": {"type": "integer", "minimum": 1},
        "measure": _measure,
        "ops": {"type": "array", "minItems": 1, "items": _operator},
        "generator": {"type": "object", "required": ["coeffs"],
                      "properties": {"coeffs": {"type": "array", "minItems": 1, "items": _operator}}},
        "K": _operator, "T": _operator, "Q": _operator, "L": _operator,
        "gamma": {"type": "object", "required": ["ops"],
                  "properties": {"ops": {"type": "array", "minItems": 1, "items": _operator}}},
        "scalars": _scalars, "a": _scalars, "b": _scalars,
        "alpha": _number, "beta": _number,
        "claimed": {"type": "object", "properties": {"lower": _number, "upper": _number}},
        "tolerances": {"type": "object", "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
    },
    "oneOf": [{"required": ["ops"]}, {"required": ["generator"]}],
}


@dataclass
class Scenario:
    """A frame family with the operators and scalars the results act on."""

    family: OperatorFamily
    k: ModuleOperator
    t: ModuleOperator | None = None
    q: ModuleOperator | None = None
    l_op: ModuleOperator | None = None
    gamma: OperatorFamily | None = None
    scalars: ScalarFamily | None = None
    a: ScalarFamily | None = None
    b: ScalarFamily | None = None
    alpha: float | None = None
    beta: float | None = None
    claimed: tuple | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    name: str | None = None

    @property
    def shape(self):
        return self.family.shape

    @property
    def rank(self) -> int:
        return self.family.rank

    def tol(self, key: str) -> float:
        return self.tolerances.get(key, DEFAULT_TOLERANCES[key])

    def to_json(self) -> dict:
        out = {"block_sizes": list(self.shape.block_sizes), "rank": self.rank, "K": self.k.to_json()}
        out.update(self.family.to_json())
        for key, op in (("T", self.t), ("Q", self.q), ("L", self.l_op)):
            if op is not None:
                out[key] = op.to_json()
        if self.gamma is not None:
            out["gamma"] = {"ops": [op.to_json() for op in self.gamma.ops]}
        for key, fam in (("scalars", self.scalars), ("a", self.a), ("b", self.b)):
            if fam is not None:
                out[key] = [_complex_out(v) for v in fam.values]
        if self.alpha is not None:
            out["alpha"] = float(self.alpha)
        if self.beta is not None:
            out["beta"] = float(self.beta)
        if self.claimed is not None:
            lo, hi = self.claimed
            out["claimed"] = {k: float(v) for k, v in (("lower", lo), ("upper", hi)) if v is not None}
        out["tolerances"] = {k: float(v) for k, v in self.tolerances.items()}
        if self.name is not None:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, obj: dict) -> Scenario:
        validate(obj)
        try:
            family = OperatorFamily.from_json(obj)
            k = ModuleOperator.from_json(obj["K"])
            extra = {key: ModuleOperator.from_json(obj[src]) for key, src in
                     (("t", "T"), ("q", "Q"), ("l_op", "L")) if src in obj}
            for op in [k, *extra.values()]:
                family.ops[0]._check(op)
            if "block_sizes" in obj and tuple(obj["block_sizes"]) != family.shape.block_sizes:
                raise ShapeError("block_sizes disagree with the operators")
            if "rank" in obj and obj["rank"] != family.rank:
                raise ShapeError("rank disagrees with the operators")
            gamma = None
            if "gamma" in obj:
                gamma = OperatorFamily(family.disc, [ModuleOperator.from_json(op) for op in obj["gamma"]["ops"]])
                family.ops[0]._check(gamma.ops[0])
            scal = {key: ScalarFamily(family.disc, [_complex_in(v) for v in obj[key]])
                    for key in ("scalars", "a", "b") if key in obj}
        except ShapeError:
            raise
        except (ValueError, KeyError) as exc:
            raise ShapeError(str(exc)) from exc
        claimed = None
        if "claimed" in obj:
            claimed = (obj["claimed"].get("lower"), obj["claimed"].get("upper"))
        tolerances = dict(DEFAULT_TOLERANCES)
        tolerances.update(obj.get("tolerances", {}))
        return cls(family, k, gamma=gamma, alpha=obj.get("alpha"), beta=obj.get("beta"), claimed=claimed,
                   tolerances=tolerances, name=obj.get("name"), **extra, **scal)


def _complex_out(v):
    v = complex(v)
    return float(v.real) if v.imag == 0 else [float(v.real), float(v.imag)]


def _complex_in(v):
    return complex(v[0], v[1]) if isinstance(v, list) else v


def validate(obj) -> None:
    """Raise ParseError (with a JSON pointer) if ``obj`` violates the scenario schema."""
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = list(validator.iter_errors(obj))
    if not errors:
        return
    # the deepest error names the offending node most precisely
    err = max(errors, key=lambda e: len(list(e.absolute_path)))
    while err.context:
        err = max(err.context, key=lambda e: len(list(e.absolute_path)))
    pointer = "".join(f"/{p}" for p in err.absolute_path)
    raise ParseError(err.message, pointer)


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite float in canonical JSON")
    return format(x + 0.0, ".17g")


def canonical_dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, compact, 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, int, float, np.integer, np.floating, np.bool_)):
        return _fmt(bool(obj) if isinstance(obj, np.bool_) else obj)
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(f"{json.dumps(str(k))}:{canonical_dumps(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(canonical_dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def loads(text: str) -> Scenario:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from exc
    return Scenario.from_json(obj)


def load(path) -> Scenario:
    return loads(Path(path).read_text())


def dumps(scenario: Scenario) -> str:
    return canonical_dumps(scenario.to_json()) + "\n"


def save(scenario: Scenario, path) -> None:
    Path(path).write_text(dumps(scenario))
