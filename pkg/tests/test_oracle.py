from fractions import Fraction

import numpy as np
import pytest

from randteam.discrete import chain_game, payoff_matrix
from randteam.errors import EnumerationCapError, ModelError, NumericalError
from randteam.lqg_team import TABLE1_B, TABLE1_S, TABLE1_SIGMA, LqgTeamSpec, assemble_quadratic, feature_model, solve_team
from randteam.oracle import (
    FiniteProblem,
    McEstimate,
    QuadraticProblem,
    block_rng,
    brute_force_optimum,
    exact_game_value,
    grid_refine,
    mc_estimate,
    quadratic_objective,
)


class Constant:
    def sample_costs(self, rng, size):
        return np.full(size, 3.0)


class Uniform:
    def sample_costs(self, rng, size):
        return rng.random(size)


def test_block_streams_are_distinct_and_reproducible():
    a = block_rng(5, 0).random(4)
    assert np.array_equal(a, block_rng(5, 0).random(4))
    assert not np.array_equal(a, block_rng(5, 1).random(4))
    assert not np.array_equal(a, block_rng(6, 0).random(4))


def test_mc_is_worker_independent():
    one = mc_estimate(Uniform(), 300_000, seed=11, workers=1)
    four = mc_estimate(Uniform(), 300_000, seed=11, workers=4)
    assert one == four
    assert one.agrees(0.5)


def test_mc_zero_variance():
    est = mc_estimate(Constant(), 1000)
    assert est.mean == 3.0 and est.stderr == 0.0
    assert est.agrees(3.0) and not est.agrees(3.1)
    with pytest.raises(ModelError):
        mc_estimate(Constant(), 0)


def test_mc_matches_finite_cell():
    game = chain_game()
    M = payoff_matrix(game)
    prof = {**game.profiles(game.minimizers)[0], **game.profiles(game.maximizers)[0]}
    est = mc_estimate(FiniteProblem(game, prof), 200_000, seed=3)
    assert est.agrees(float(M[0, 0]))


def test_mc_matches_quadratic_cost():
    spec = LqgTeamSpec.diagonal(TABLE1_B, TABLE1_S, TABLE1_SIGMA)
    sol = solve_team(spec)
    est = mc_estimate(QuadraticProblem.from_model(feature_model(spec), sol.theta), 200_000, seed=1)
    assert est.agrees(sol.value)


def test_exact_game_value_small_cases():
    assert exact_game_value([[1, -1], [-1, 1]])[0] == 0
    value, y = exact_game_value([[3]])
    assert value == 3 and y == (Fraction(1),)
    assert exact_game_value([[0, 2], [3, 1]])[0] == Fraction(3, 2)


def test_brute_force_cap():
    game = chain_game()
    with pytest.raises(EnumerationCapError):
        brute_force_optimum(game, {0: game.rules(0)[0]}, cap=10)
    with pytest.raises(ModelError):
        brute_force_optimum(game)


def test_grid_refine_baseline():
    H, g, c = assemble_quadratic(LqgTeamSpec.diagonal(TABLE1_B, TABLE1_S, TABLE1_SIGMA))
    sol = solve_team(LqgTeamSpec.diagonal(TABLE1_B, TABLE1_S, TABLE1_SIGMA))
    res = grid_refine(quadratic_objective(H, g, c), [-2.0, -2.5], [1.0, 0.5])
    assert res.value == pytest.approx(sol.value, abs=1e-4)
    np.testing.assert_allclose(res.theta, sol.theta, atol=1e-3)


def test_grid_refine_boundary_is_an_error():
    f = quadratic_objective(np.eye(1), np.array([-10.0]))
    with pytest.raises(NumericalError):
        grid_refine(f, [-1.0], [1.0])
    with pytest.raises(ModelError):
        grid_refine(f, [1.0], [-1.0])


def test_estimate_validation():
    with pytest.raises(ModelError):
        McEstimate(0.0, -1.0, 10, 0)
