import math

import numpy as np
import pytest
from hypothesis import given, settings

from mframes import (AlgebraElement, ModuleOperator, OperatorFamily, ScalarFamily, discrete, family_from_generator,
                     gauss_legendre, optimal_bounds)
from mframes import transforms as tr
from mframes.errors import DomainError, RankError
from mframes.harness import paper_example, random_instance

from _util import seeds

D = AlgebraElement.scalars
R = ModuleOperator.right_mult
K = R(D(1, 0))
EYE = ModuleOperator.identity((1, 1), 1)


@pytest.fixture
def pex():
    return paper_example(extras=False).family


def single(op, w=1.0):
    return OperatorFamily(discrete([w]), [op])


def test_compose_right_example(pex):
    out = tr.compose_right(pex, K, R(D(2, 5)))
    v = out.verdict
    assert out.k.allclose(R(D(2, 0)))
    assert v.optimal.lower_opt == pytest.approx(1 / 3)
    assert v.predicted.lower == pytest.approx(1 / 3)
    assert v.predicted.upper == pytest.approx(25 / 3)
    assert v.optimal.upper_opt == pytest.approx(4 / 3)
    assert v.valid and v.hypotheses_ok


def test_compose_right_unitary_keeps_upper():
    sc = random_instance(11, profile="generic")
    rng = np.random.default_rng(0)
    blocks = [np.linalg.qr(rng.standard_normal((len(g), len(g))) + 1j * rng.standard_normal((len(g), len(g))))[0]
              for g in sc.k.mats]
    q = ModuleOperator(sc.shape, sc.rank, blocks)
    v = tr.compose_right(sc.family, sc.k, q).verdict
    assert abs(v.optimal.upper_opt - v.predicted.upper) <= 1e-9 * v.predicted.upper


def test_invertible_rescale_example(pex):
    v = tr.invertible_rescale_check(pex, K, R(D(2, 5)))
    assert v.info["C"] == pytest.approx(4 / 3) and v.info["D"] == pytest.approx(4 / 3)
    assert v.info["Q_norm"] == pytest.approx(5) and v.info["Q_inv_norm"] == pytest.approx(0.5)
    assert all(v.info[k] for k in ("lower_left", "lower_right", "upper_left", "upper_right"))
    assert v.valid


def test_invertible_rescale_singular(pex):
    with pytest.raises(RankError):
        tr.invertible_rescale_check(pex, K, R(D(2, 0)))


def test_tight_relation_examples(pex):
    v = tr.tight_relation(single(EYE), R(D(2 ** -0.5, 2 ** -0.5)))
    assert v.info["A1"] == pytest.approx(2) and v.info["A2"] == pytest.approx(1)
    assert v.hypotheses_ok and v.valid
    v = tr.tight_relation(single(EYE), EYE)
    assert v.hypotheses_ok and v.valid
    v = tr.tight_relation(pex, K)
    assert v.hypotheses["tight_k_frame"].ok
    assert not v.info["tight_operator_frame"] and not v.info["kk_scalar"]
    assert not v.hypotheses_ok


def test_tight_relation_neither_hypothesis_is_not_a_pass():
    fam = single(R(D(1, 2)))
    v = tr.tight_relation(fam, R(D(3, 1)))
    assert not v.hypotheses_ok and not v.counterexample


def test_k_transfer_examples(pex):
    v = tr.k_transfer(pex, K, R(D(0.5, 0)))
    assert v.info["lambda"] == pytest.approx(0.25)
    assert v.predicted.lower == pytest.approx(4 / 3)
    assert v.optimal.lower_opt == pytest.approx(4 / 3)
    assert v.valid
    same = tr.k_transfer(pex, K, K)
    assert same.info["lambda"] == pytest.approx(1) and same.predicted.lower == pytest.approx(1 / 3)
    zero = tr.k_transfer(pex, K, ModuleOperator.zeros((1, 1), 1))
    assert zero.info["vacuous"] and zero.predicted.lower == math.inf


def test_left_compose_example(pex):
    lc = tr.left_compose(pex, R(D(2, 0)), K)
    v = lc.restriction
    assert v.info["T_pinv_norm"] == pytest.approx(0.5)
    assert v.predicted.lower == pytest.approx(4 / 3) and v.predicted.upper == pytest.approx(4 / 3)
    assert v.optimal.lower_opt == pytest.approx(4 / 3) and v.optimal.upper_opt == pytest.approx(4 / 3)
    assert v.hypotheses_ok and v.valid and v.witness is None


def test_left_compose_identity(pex):
    v = tr.left_compose(pex, EYE, K).restriction
    assert v.predicted.lower == pytest.approx(1 / 3) and v.valid


def test_surjectivity_witness():
    g = family_from_generator([R(D(0, 1)), R(D(1, 0))], gauss_legendre(0, 1, 2))
    assert optimal_bounds(g, EYE).lower_opt == pytest.approx(1 / 3)
    t = R(D(0, 1))
    lc = tr.left_compose(g, t, EYE)
    v = lc.surjectivity
    assert not v.info["T_surjective"]
    assert v.info["witness_violates"] and v.info["witness_source"] == "null(T*)"
    assert v.witness.coords[0].allclose(D(1, 0)) or v.witness.coords[0].allclose(D(-1, 0))
    assert not v.hypotheses["composed_k_frame"].ok
    assert v.valid


def test_nilpotent_t_breaks_restriction_without_extra_hypothesis():
    # T commutes with the identity family and with K = I but T^+ T is not the identity on R(T)
    t = ModuleOperator((1,), 2, [np.array([[0, 1], [0, 0]])])
    eye = ModuleOperator.identity((1,), 2)
    fam = OperatorFamily(discrete([1.0]), [eye])
    v = tr.left_compose(fam, t, eye).restriction
    for key in ("k_frame", "T_nonzero", "commutes_with_family", "commutes_with_K_adjoint"):
        assert v.hypotheses[key].ok
    assert not v.hypotheses["pinv_identity_on_range"].ok
    assert not v.valid and v.witness is not None
    assert not v.counterexample


def test_perturb_scalar_example(pex):
    a = ScalarFamily.constant(pex.disc, 0.1)
    out = tr.perturb_scalar(pex, K, K, a)
    v = out.verdict
    assert v.info["R"] == pytest.approx(0.01)
    assert v.optimal.lower_opt == pytest.approx(0.4433333333, abs=1e-6)
    assert v.predicted.lower == pytest.approx((math.sqrt(1 / 3) - 0.1) ** 2, abs=1e-12)
    assert v.predicted.upper == pytest.approx((math.sqrt(1 / 3) + 0.1) ** 2, abs=1e-12)
    assert v.valid and v.hypotheses_ok
    for wp, op in zip(pex.disc.nodes, out.family.ops):
        assert op.allclose(R(D(wp + 0.1, 0)))


def test_perturb_scalar_zero_and_gate(pex):
    v = tr.perturb_scalar(pex, K, K, ScalarFamily.constant(pex.disc, 0.0)).verdict
    assert v.predicted.lower == pytest.approx(1 / 3) and v.predicted.upper == pytest.approx(1 / 3)
    v = tr.perturb_scalar(pex, K, K, ScalarFamily.constant(pex.disc, 0.6)).verdict
    assert not v.hypotheses["R_below_A"].ok
    assert v.hypotheses["R_below_A"].margin == pytest.approx(1 / 3 - 0.36)
    with pytest.raises(DomainError):
        tr.perturb_scalar(pex, K, ModuleOperator.zeros((1, 1), 1), ScalarFamily.constant(pex.disc, 0.1))


def test_perturbation_predictions_monotone():
    preds = [tr.perturbation_predictions(1.0, 2.0, r, 1.5) for r in np.linspace(0, 0.9, 10)]
    lows = [p.lower for p in preds]
    highs = [p.upper for p in preds]
    assert all(a > b for a, b in zip(lows, lows[1:]))
    assert all(a < b for a, b in zip(highs, highs[1:]))


def test_perturb_mixed_examples(pex):
    one = ScalarFamily.constant(pex.disc, 1.0)
    v = tr.perturb_mixed(pex, pex, one, one, 0.0, 0.0, K)
    assert v.predicted.lower == pytest.approx(1 / 6) and v.predicted.upper == pytest.approx(2 / 3)
    assert v.hypotheses_ok and v.valid
    gamma = pex.map(lambda t: 1.1 * t)
    v = tr.perturb_mixed(pex, gamma, one, one, 0.01, 0.0, K)
    assert v.hypotheses_ok and v.valid
    two = ScalarFamily.constant(pex.disc, 2.0)
    v2 = tr.perturb_mixed(pex, pex.map(lambda t: 0.5 * t), one, two, 0.0, 0.0, K)
    assert v2.hypotheses_ok and v2.valid
    assert v2.predicted.lower == pytest.approx(1 / 24)
    with pytest.raises(DomainError):
        tr.perturb_mixed(pex, pex, one, one, 0.5, 0.0, K)


def test_perturb_mixed_detects_broken_hypothesis(pex):
    one = ScalarFamily.constant(pex.disc, 1.0)
    v = tr.perturb_mixed(pex, pex.map(lambda t: 3.0 * t), one, one, 0.01, 0.0, K)
    assert not v.hypotheses["sampled_inequality"].ok and v.witness is not None


def test_remark_and_surjective_k_examples():
    fam = single(R(D(1, 2)))
    v = tr.remark_bessel_to_k(fam, R(D(2, 1)))
    assert v.predicted.lower == pytest.approx(1 / 4) and v.valid
    v = tr.surjective_k(fam, R(D(2, 1)))
    assert v.hypotheses_ok and v.valid


def test_verdict_json():
    v = tr.k_transfer(paper_example(extras=False).family, K, ModuleOperator.zeros((1, 1), 1))
    js = v.to_json()
    assert js["predicted"]["lower"] == "unbounded"
    assert set(js) >= {"theorem", "hypotheses", "predicted", "optimal", "valid", "witness"}


PROFILE_CHECKS = {
    "compose-right": ("generic", lambda sc: tr.compose_right(sc.family, sc.k, sc.q).verdict),
    "invertible-rescale": ("commuting_diag", lambda sc: tr.invertible_rescale_check(sc.family, sc.k, sc.q)),
    "k-transfer": ("guaranteed_k_frame", lambda sc: tr.k_transfer(sc.family, sc.k, sc.t)),
    "left-compose": ("commuting_diag", lambda sc: tr.left_compose(sc.family, sc.t, sc.k, samples=10).restriction),
    "tight-inverse": ("tight", lambda sc: tr.tight_relation(sc.family, sc.k)),
    "perturb-scalar": ("guaranteed_k_frame",
                       lambda sc: tr.perturb_scalar(sc.family, sc.k, sc.l_op, sc.scalars).verdict),
}


@pytest.mark.parametrize("name", sorted(PROFILE_CHECKS))
@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_hypotheses_imply_validity(name, seed):
    profile, run = PROFILE_CHECKS[name]
    v = run(random_instance(seed, profile=profile))
    assert not v.counterexample, v.to_json()
