import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mframes import (AlgebraElement, L2Vector, MeasureDiscretization, ModuleOperator, ModuleVector, OperatorFamily, ScalarFamily,
                     discrete, discretize, family_from_generator, gauss_legendre, l2_inner, midpoint)
from mframes.algebra import positivity
from mframes.errors import DomainError, ShapeError
from mframes.measure import l2_norm

from _util import rand_vec, seeds, shapes

D = AlgebraElement.scalars
R = ModuleOperator.right_mult


def test_one_point_gauss():
    d = gauss_legendre(0, 1, 1)
    assert d.nodes.tolist() == [0.5] and d.weights.tolist() == [1.0]


def test_two_point_midpoint():
    d = midpoint(0, 1, 2)
    assert d.nodes.tolist() == [0.25, 0.75] and d.weights.tolist() == [0.5, 0.5]


def test_two_point_gauss():
    d = gauss_legendre(0, 1, 2)
    h = 1 / (2 * np.sqrt(3))
    assert np.allclose(d.nodes, [0.5 - h, 0.5 + h])
    assert np.allclose(d.weights, [0.5, 0.5])


def test_discretize_from_json():
    assert discretize({"type": "interval", "a": 0, "b": 2}).source == ("interval", 0.0, 2.0, "gauss", 16)
    assert len(discretize({"type": "discrete", "atoms": [{"w": 1}, {"w": 2}]})) == 2
    with pytest.raises(DomainError):
        discretize({"type": "interval", "a": 0, "b": 1, "rule": "simpson"})


def test_bad_measures():
    with pytest.raises(DomainError):
        discrete([1, -1])
    with pytest.raises(DomainError):
        gauss_legendre(1, 0, 3)
    with pytest.raises(DomainError):
        midpoint(0, 1, 0)


def test_generator_examples():
    d = gauss_legendre(0, 1, 2)
    fam = family_from_generator([ModuleOperator.zeros((1, 1), 1), R(D(1, 0))], d)
    for w, op in zip(d.nodes, fam.ops):
        assert op.allclose(R(D(w, 0)))
    c0 = R(D(2, 3))
    assert all(op.allclose(c0) for op in family_from_generator([c0], d).ops)
    eye = ModuleOperator.identity((1,), 1)
    at_zero = family_from_generator([eye, eye], MeasureDiscretization([1.0], [0.0], ("interval", 0.0, 1.0, "gauss", 1)))
    assert at_zero.ops[0].allclose(eye)


def test_generator_needs_interval():
    with pytest.raises(DomainError):
        family_from_generator([R(D(1, 0))], discrete([1.0]))


def test_family_length_checked():
    with pytest.raises(ShapeError):
        OperatorFamily(discrete([1, 1]), [R(D(1, 0))])


def test_family_json_round_trip():
    d = gauss_legendre(0, 1, 3)
    fam = family_from_generator([R(D(1, 0)), R(D(0, 2))], d)
    back = OperatorFamily.from_json(fam.to_json())
    assert "generator" in fam.to_json()
    assert all(a.allclose(b) for a, b in zip(fam.ops, back.ops))


def test_l2_inner_examples():
    d = gauss_legendre(0, 1, 2)
    ones = L2Vector(d, [ModuleVector.from_coords([D(1, 0)])] * 2)
    assert l2_inner(ones, ones).allclose(D(1, 0))
    ramp = L2Vector(d, [ModuleVector.from_coords([D(w, 0)]) for w in d.nodes])
    assert l2_inner(ramp, ramp).allclose(D(1 / 3, 0))
    zero = L2Vector.zeros(d, ramp.entries[0].shape, 1)
    assert l2_inner(ramp, zero).allclose(D(0, 0))
    assert l2_norm(ramp) == pytest.approx(3 ** -0.5)


def test_l2_mismatched_discretizations():
    a = L2Vector.zeros(gauss_legendre(0, 1, 2), (1,), 1)
    b = L2Vector.zeros(midpoint(0, 1, 2), (1,), 1)
    with pytest.raises(ShapeError):
        l2_inner(a, b)


def test_scalar_family():
    d = discrete([1, 3])
    a = ScalarFamily(d, [2, -1])
    assert a.l2_mass() == pytest.approx(7)
    assert (a.inf, a.sup) == (-1, 2)
    assert not a.positively_confined()
    assert ScalarFamily.constant(d, 0.5).positively_confined()
    assert not ScalarFamily(d, [1, 1j]).positively_confined()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), seeds)
def test_gauss_exact_on_polynomials(n, seed):
    rng = np.random.default_rng(seed)
    a, b = sorted(rng.uniform(-2, 2, 2))
    if b - a < 1e-3:
        b = a + 1
    deg = int(rng.integers(0, 2 * n))
    coeffs = rng.standard_normal(deg + 1)
    d = gauss_legendre(a, b, n)
    got = d.integrate(np.polynomial.polynomial.polyval(d.nodes, coeffs))
    anti = np.polynomial.polynomial.polyint(coeffs)
    exact = np.polynomial.polynomial.polyval(b, anti) - np.polynomial.polynomial.polyval(a, anti)
    assert abs(got - exact) <= 1e-12 * max(1.0, np.abs(coeffs).sum() * max(abs(a), abs(b), 1) ** deg * (b - a))


def test_midpoint_refinement_ratio():
    def err(n):
        d = midpoint(0, 1, n)
        return abs(d.integrate(d.nodes ** 2) - 1 / 3)
    for n in (2, 4, 8, 16, 32):
        assert 3 <= err(n) / err(2 * n) <= 5


@settings(max_examples=50, deadline=None)
@given(seeds, shapes)
def test_l2_inner_is_positive(seed, shape):
    rng = np.random.default_rng(seed)
    d = discrete(rng.uniform(0.1, 1, 4))
    xf = L2Vector(d, [rand_vec(rng, shape, 2) for _ in range(4)])
    assert positivity(l2_inner(xf, xf)).positive
