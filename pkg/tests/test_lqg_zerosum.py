import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randteam import lqg_zerosum as zs
from randteam.errors import GameValidationError, SingularSystemError


@pytest.mark.parametrize(
    "case,rand,value",
    [
        (1, None, 0.598131),
        (1, zs.Mole(0.5), 0.401474),
        (1, zs.Consultant(0.5, 0.5), 0.162630),
        (2, None, 0.692149),
        (2, zs.Mole(0.5), 0.204518),
        (2, zs.Consultant(0.5, 0.5), 0.234536),
    ],
)
def test_frozen_saddle_values(case, rand, value):
    sol = zs.solve_saddle(zs.reference_case(case, rand))
    assert sol.value == pytest.approx(value, abs=1e-6)
    assert sol.max_curvature < 0 < sol.min_block_eig
    assert sol.residual < 1e-10


def test_mole_case1_gains():
    sol = zs.solve_saddle(zs.reference_case(1, zs.Mole(0.5)))
    np.testing.assert_allclose(sol.alpha, [0.961538, 0.805195, 0.805195], atol=1e-6)
    np.testing.assert_allclose(sol.beta, [-0.355145, -0.355145], atol=1e-6)


def test_expanded_cost_matches_feature_model(rng):
    for rand in (None, zs.Mole(0.5), zs.Consultant(0.3, 0.6)):
        spec = zs.reference_case(2, rand)
        model = zs.feature_model(spec)
        for _ in range(5):
            th = rng.normal(size=model.size)
            assert zs.nex_cost(spec, th) == pytest.approx(model.cost(th), rel=1e-10, abs=1e-10)


def test_verify_saddle_detects_wrong_point():
    spec = zs.reference_case(1, zs.Mole(0.5))
    sol = zs.solve_saddle(spec)
    assert zs.verify_saddle(spec, sol, trials=2000).passed
    bad = sol.theta.copy()
    bad[3] = -bad[3]
    broken = zs.SaddleSolution(bad, sol.labels, zs.evaluate(spec, bad), 0.0, sol.max_curvature, sol.min_block_eig)
    check = zs.verify_saddle(spec, broken, trials=2000)
    assert not check.passed
    assert check.counterexample["side"] in ("maximizer", "minimizer")


def test_validation():
    with pytest.raises(GameValidationError):
        zs.solve_saddle(zs.ZsLqgSpec(0.25, 0.25, 1.0))
    diag = zs.validate_game(zs.ZsLqgSpec(0.0, 0.0, 0.5))
    assert diag.valid and diag.warnings
    assert not zs.validate_game(zs.ZsLqgSpec(0.1, 0.1, 1.5), raise_on_error=False).valid


def test_degenerate_randomness_is_singular():
    with pytest.raises(SingularSystemError):
        zs.solve_saddle(zs.reference_case(1, zs.Mole(0.0)))


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=-0.6, max_value=0.6),
    st.floats(min_value=-0.6, max_value=0.6),
    st.floats(min_value=-0.9, max_value=0.9),
    st.floats(min_value=0.05, max_value=5.0),
)
def test_independent_randomness_has_no_effect(r11, r12, q12, var):
    """A shared signal independent of the environment gets zero weight and leaves the value unchanged."""
    spec = zs.ZsLqgSpec(r11, r12, q12)
    base = zs.solve_saddle(spec)
    sol = zs.solve_saddle(spec.with_randomness(zs.IndependentCommon(var)))
    np.testing.assert_allclose(sol.beta, 0.0, atol=1e-10)
    assert sol.value == pytest.approx(base.value, abs=1e-10)


def test_null_information_value_is_zero():
    assert zs.solve_saddle(zs.null_information(zs.reference_case(1))).value == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("case", [1, 2])
def test_value_of_information_monotone_for_minimizers(case):
    voi = zs.value_of_information(zs.reference_case(case), zs.reference_case(case, zs.Consultant(0.5, 0.5)), team="min")
    assert voi.monotone
    assert voi.v_b < voi.v_a


def test_saddle_dict_and_orientation():
    sol = zs.solve_saddle(zs.reference_case(2, zs.Mole(0.5)))
    assert tuple(sol.as_dict()) == zs.LABELS
    assert "maximizes" in zs.ORIENTATION
