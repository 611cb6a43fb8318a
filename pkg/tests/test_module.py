import numpy as np
import pytest
from hypothesis import given, settings

from mframes import AlgebraElement, ModuleOperator, ModuleVector, inner, order, range_inclusion
from mframes.algebra import leq
from mframes.errors import RankError, RepresentationError, ShapeError
from mframes.module import douglas_solve, norm

from _util import rand_elem, rand_op, rand_vec, ranks, rel, seeds, shapes

D = AlgebraElement.scalars
R = ModuleOperator.right_mult


def vec(*coords):
    return ModuleVector.from_coords(coords)


def test_inner_of_diagonal_vector():
    x = vec(D(2 + 1j, 3))
    assert inner(x, x).allclose(D(5, 9))


def test_inner_with_zero():
    x = vec(D(1, 2))
    assert inner(x, ModuleVector.zeros(x.shape, 1)).allclose(D(0, 0))


def test_inner_rank_two():
    x, y = vec(D(2), D(0)), vec(D(1), D(3))
    assert inner(x, y).allclose(D(2))
    assert norm(x) == pytest.approx(2)


def test_left_linearity():
    rng = np.random.default_rng(3)
    a = rand_elem(rng, (2, 1))
    x, y, z = (rand_vec(rng, (2, 1), 2) for _ in range(3))
    lhs = inner(x.lmul(a) + y, z)
    rhs = a @ inner(x, z) + inner(y, z)
    assert (lhs - rhs).norm() <= 1e-12 * lhs.norm()


def test_apply_right_multiplication():
    assert R(D(1, 0))(vec(D(2, 7))).coords[0].allclose(D(2, 0))


def test_adjoint_and_compose():
    assert R(D(1j, 0)).H.allclose(R(D(-1j, 0)))
    assert (R(D(2, 0)) @ R(D(0.3, 0))).allclose(R(D(0.6, 0)))


def test_rep_of_right_mult_is_diagonal():
    assert np.allclose(R(D(2, 5)).rep(), np.diag([2, 5]))
    assert np.allclose(ModuleOperator.identity((2, 1), 2).rep(), np.eye(2 * 5))


def test_cells_round_trip():
    t = rand_op(np.random.default_rng(4), (1, 2), 2)
    assert ModuleOperator.from_cells(t.cells).allclose(t)
    assert ModuleOperator.from_json(t.to_json()).allclose(t)


def test_cells_act_by_right_multiplication():
    rng = np.random.default_rng(5)
    t = rand_op(rng, (2,), 2)
    x = rand_vec(rng, (2,), 2)
    cells, xs = t.cells, x.coords
    expect = [sum((xs[i] @ cells[i][j] for i in range(2)), x.shape.zeros()) for j in range(2)]
    for got, want in zip(t(x).coords, expect):
        assert got.allclose(want, 1e-12)


def test_calculus_examples():
    assert R(D(1, 0)).norm() == pytest.approx(1)
    assert R(D(2, 0)).pinv().allclose(R(D(0.5, 0)))
    assert R(D(1 / 3, 0)).sqrt().allclose(R(D(3 ** -0.5, 0)))
    assert R(D(1, 0)).rank_() == 1
    assert not R(D(1, 0)).is_surjective()
    assert R(D(2, 3)).inverse().allclose(R(D(0.5, 1 / 3)))


def test_inverse_of_singular_raises():
    with pytest.raises(RankError):
        R(D(1, 0)).inverse()


def test_from_rep_rejects_non_module_map():
    # swapping the two summands of C + C is not right multiplication
    with pytest.raises(RepresentationError):
        ModuleOperator.from_rep((1, 1), 1, np.array([[0, 1], [1, 0]]))


def test_order_examples():
    z = ModuleOperator.zeros((1, 1), 1)
    o = order(z, R(D(1, 1)))
    assert o.leq and o.margin == pytest.approx(1)
    o = order(R(D(1, 0)), R(D(1 / 3, 0)))
    assert not o.leq and o.margin == pytest.approx(-2 / 3)
    t = R(D(2, -1))
    assert order(t, t).leq and order(t, t).margin == 0


def test_range_inclusion_examples():
    inc = range_inclusion(R(D(0.5, 0)), R(D(1, 0)))
    assert inc.included and inc.lambda_min == pytest.approx(0.25)
    assert not range_inclusion(ModuleOperator.identity((1, 1), 1), R(D(1, 0))).included
    inc = range_inclusion(ModuleOperator.zeros((1, 1), 1), R(D(1, 0)))
    assert inc.included and inc.lambda_min == 0


def test_shape_checks():
    with pytest.raises(ShapeError):
        R(D(1, 0)) @ ModuleOperator.identity((2,), 1)
    with pytest.raises(ShapeError):
        ModuleVector.from_rep((1, 1), 1, np.zeros(3))


@settings(max_examples=100, deadline=None)
@given(seeds, shapes, ranks)
def test_adjointability(seed, shape, m):
    rng = np.random.default_rng(seed)
    t, x, y = rand_op(rng, shape, m), rand_vec(rng, shape, m), rand_vec(rng, shape, m)
    gap = (inner(t(x), y) - inner(x, t.H(y))).norm()
    assert gap <= 1e-10 * t.norm() * norm(x) * norm(y)
    assert np.allclose(t.H.rep(), t.rep().conj().T)


@settings(max_examples=100, deadline=None)
@given(seeds, shapes, ranks)
def test_rep_is_a_homomorphism(seed, shape, m):
    rng = np.random.default_rng(seed)
    t, u, x = rand_op(rng, shape, m), rand_op(rng, shape, m), rand_vec(rng, shape, m)
    assert rel((t @ u).rep(), t.rep() @ u.rep()) <= 1e-12
    assert rel(t(x).to_rep(), t.rep() @ x.to_rep()) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(seeds, shapes, ranks)
def test_operator_bounds_inner_product(seed, shape, m):
    rng = np.random.default_rng(seed)
    t, x = rand_op(rng, shape, m), rand_vec(rng, shape, m)
    tx = t(x)
    assert leq(inner(tx, tx), t.norm() ** 2 * inner(x, x), 1e-10)


@settings(max_examples=50, deadline=None)
@given(seeds, shapes, ranks)
def test_surjective_bounds(seed, shape, m):
    t = rand_op(np.random.default_rng(seed), shape, m)
    tt = t @ t.H
    eye = ModuleOperator.identity(t.shape, m)
    low = 1 / tt.inverse().norm()
    assert order(low * eye, tt, 1e-9).leq
    assert order(tt, t.norm() ** 2 * eye, 1e-9).leq


@settings(max_examples=100, deadline=None)
@given(seeds, shapes, ranks, ranks)
def test_moore_penrose_identities(seed, shape, m, drop):
    t = rand_op(np.random.default_rng(seed), shape, m, rank_drop=drop)
    p = t.pinv()
    scale = max(t.norm(), 1e-300)
    assert (t @ p @ t - t).norm() <= 1e-9 * scale
    assert (p @ t @ p - p).norm() <= 1e-9 * max(p.norm(), 1e-300)
    assert ((t @ p).H - t @ p).norm() <= 1e-9
    assert ((p @ t).H - p @ t).norm() <= 1e-9
    assert rel(p.rep(), np.linalg.pinv(t.rep(), rcond=1e-10, hermitian=False)) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(seeds, shapes, ranks)
def test_sqrt_of_positive_operator(seed, shape, m):
    t = rand_op(np.random.default_rng(seed), shape, m)
    s = t.H @ t
    r = s.sqrt()
    assert (r @ r - s).norm() <= 1e-9 * s.norm()
    assert r.is_positive()


@settings(max_examples=50, deadline=None)
@given(seeds, shapes, ranks)
def test_positivity_agrees_with_sampling(seed, shape, m):
    rng = np.random.default_rng(seed)
    t = rand_op(rng, shape, m)
    h = 0.5 * (t + t.H)
    sampled = all(leq(x.shape.zeros(), inner(h(x), x), 1e-9)
                  for x in (rand_vec(rng, shape, m) for _ in range(50)))
    if h.is_positive():
        assert sampled
    psd = t.H @ t
    assert psd.is_positive()
    assert all(leq(x.shape.zeros(), inner(psd(x), x), 1e-9) for x in (rand_vec(rng, shape, m) for _ in range(20)))


@settings(max_examples=100, deadline=None)
@given(seeds, shapes, ranks, ranks)
def test_douglas_three_way(seed, shape, m, drop):
    rng = np.random.default_rng(seed)
    k = rand_op(rng, shape, m, rank_drop=drop if seed % 2 else 0)
    t = k @ rand_op(rng, shape, m) if seed % 3 else rand_op(rng, shape, m)
    inc = range_inclusion(t, k)
    q, residual = douglas_solve(t, k)
    assert inc.included == (inc.lambda_min is not None)
    assert inc.included == (residual <= 1e-8)
