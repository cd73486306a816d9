import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_pd
from randteam.errors import ModelError
from randteam.lqg_team import (
    TABLE1_B,
    TABLE1_S,
    TABLE1_SIGMA,
    CommonIndep,
    Dependent,
    LqgTeamSpec,
    PrivateIndep,
    assemble_quadratic,
    centralized_bound,
    feature_model,
    independent_randomness_report,
    paper_faithful_table1,
    printed_cost,
    printed_system,
    problem123,
    solve_team,
    table1_spec,
)


def baseline():
    return LqgTeamSpec.diagonal(TABLE1_B, TABLE1_S, TABLE1_SIGMA)


def test_baseline_closed_form():
    sol = solve_team(baseline())
    H, g, _ = assemble_quadratic(baseline())
    np.testing.assert_allclose(H, [[2.0, -0.25], [-0.25, 1.0]])
    np.testing.assert_allclose(g, [1.0, 1.0])
    np.testing.assert_allclose(sol.theta, [-20 / 31, -36 / 31], atol=1e-12)
    assert sol.value == pytest.approx(-56 / 31, abs=1e-12)


def test_trace_cost_agrees_with_quadratic_form(rng):
    model = feature_model(table1_spec((0.5, 0.5, 0.25, 0.75)))
    H, g, c = model.assemble()
    for _ in range(5):
        th = rng.normal(size=model.size)
        assert model.trace_cost(th) == pytest.approx(th @ H @ th + 2 * g @ th + c, rel=1e-12, abs=1e-12)


def test_centralized_information_attains_bound():
    spec = LqgTeamSpec.centralized(TABLE1_B, TABLE1_S, TABLE1_SIGMA)
    assert solve_team(spec).value == pytest.approx(centralized_bound(TABLE1_B, TABLE1_S, TABLE1_SIGMA), abs=1e-10)
    assert centralized_bound(TABLE1_B, TABLE1_S, TABLE1_SIGMA) == pytest.approx(-3.5)


@pytest.mark.parametrize("phi", [(0.5, 0.5, 0.5, 0.5), (2 / 3, 1 / 3, 0.75, 0.25), (1 / 3, 2 / 3, 0.25, 0.75)])
def test_full_rank_dependent_randomness_reaches_centralized(phi):
    assert solve_team(table1_spec(phi)).value == pytest.approx(-3.5, abs=1e-9)


def test_redundant_randomness_is_pruned():
    sol = solve_team(table1_spec((0.25, 0.75, 0.0, 0.0)))
    assert sol.pruned  # the zero row carries no information
    assert sol.value == pytest.approx(-3.03125, abs=1e-9)


def test_printed_system_row3():
    sol = paper_faithful_table1((0.5, 0.5, 0.5, 0.5))
    np.testing.assert_allclose(sol.theta, [-0.34336, -0.70459, -2.78617, -4.00617], atol=5e-5)
    M, rhs = printed_system((0.5, 0.5, 0.5, 0.5))
    np.testing.assert_allclose(M, M.T)
    assert printed_cost(sol.theta, (0.5, 0.5, 0.5, 0.5)) == pytest.approx(sol.value)


def test_printed_system_without_randomness_is_baseline():
    sol = paper_faithful_table1((0, 0, 0, 0))
    assert sol.value == pytest.approx(solve_team(baseline()).value, abs=1e-9)


def test_spec_validation():
    with pytest.raises(ModelError):
        LqgTeamSpec(np.array([[1.0, 2.0], [2.0, 1.0]]), np.eye(2), np.eye(2), ((0,), (1,)))
    with pytest.raises(ModelError):
        LqgTeamSpec(TABLE1_B, TABLE1_S, TABLE1_SIGMA, ((0,), (7,)))
    with pytest.raises(ModelError):
        PrivateIndep(np.array([[1.0, 0.1], [0.1, 1.0]]))
    with pytest.raises(ModelError):
        Dependent(np.eye(2), access=((0,), (3,)))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**31), st.sampled_from(["private", "common"]))
def test_independent_randomness_is_ignored(seed, kind):
    """Randomness independent of the environment receives zero gain and changes nothing."""
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 4))
    spec = LqgTeamSpec.diagonal(random_pd(rng, m), rng.normal(size=(m, m)), random_pd(rng, m))
    k = m if kind == "private" else int(rng.integers(1, 3))
    cov = np.diag(rng.uniform(0.2, 2.0, size=k)) if kind == "private" else random_pd(rng, k)
    rnd = PrivateIndep(cov) if kind == "private" else CommonIndep(cov)
    rep = independent_randomness_report(spec.with_randomness(rnd))
    assert np.linalg.norm(rep.c_star) <= 1e-10
    assert rep.j_total == pytest.approx(rep.j_base, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**31))
def test_more_information_never_hurts(seed):
    """Adding an observation (or environment-dependent randomness) weakly lowers the optimum."""
    rng = np.random.default_rng(seed)
    B, S, Sigma = random_pd(rng, 2), rng.normal(size=(2, 2)), random_pd(rng, 2)
    diag = solve_team(LqgTeamSpec.diagonal(B, S, Sigma)).value
    rich = solve_team(LqgTeamSpec.diagonal(B, S, Sigma, Dependent(rng.normal(size=(2, 2))))).value
    assert rich <= diag + 1e-9
    assert centralized_bound(B, S, Sigma) <= rich + 1e-9


def test_problem123_on_reference_matrices():
    res = problem123(baseline(), 0.5)
    assert res.j1 == pytest.approx(-1.806452, abs=1e-6)
    assert res.j2 == pytest.approx(-0.112903, abs=1e-6)
    assert res.j3 == pytest.approx(-3.125, abs=1e-9)
    assert res.bound_holds
    assert not res.symmetric and res.symmetric_facts_hold is None


def test_problem123_bound_is_not_universal():
    """Off the swap-symmetric class the mixed-observation bound can fail."""
    rng = np.random.default_rng(7)
    failures = 0
    for _ in range(200):
        spec = LqgTeamSpec.diagonal(random_pd(rng, 2), rng.normal(size=(2, 2)), random_pd(rng, 2))
        failures += not problem123(spec, 0.5).bound_holds
    assert failures > 0


def test_problem123_rejects_bad_beta():
    with pytest.raises(ModelError):
        problem123(baseline(), 1.0)
