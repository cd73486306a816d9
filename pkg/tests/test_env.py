from fractions import Fraction

import numpy as np
import pytest

from randteam.env import (
    NULL_SYMBOL,
    CoordinateSelect,
    FiniteEnv,
    Garbled,
    GaussianEnv,
    LinearMix,
    Null,
    ObservationMap,
    as_number,
    binary_chain_env,
    coarsen,
    induced_moments,
    observe,
)
from randteam.errors import ModelError


def test_as_number_parses_fractions():
    assert as_number("1/4") == Fraction(1, 4)
    assert isinstance(as_number(0.5), float)
    with pytest.raises((ModelError, TypeError, ValueError)):
        as_number(True)


def test_finite_env_validation():
    with pytest.raises(ModelError):
        FiniteEnv(1, (((0,), 0.5), ((1,), 0.4)))
    with pytest.raises(ModelError):
        FiniteEnv(1, (((0,), "1/2"), ((0,), "1/2")))
    with pytest.raises(ModelError):
        FiniteEnv(1, (((0,), "3/2"), ((1,), "-1/2")))
    with pytest.raises(ModelError):
        FiniteEnv(2, (((0,), 1),))
    env = FiniteEnv(1, (((0,), "1/3"), ((1,), "2/3"), ((2,), 0)))
    assert env.exact
    assert len(env.support) == 2
    assert env.prob((2,)) == 0


def test_binary_chain_env_exact():
    env = binary_chain_env("1/4", "1/3", "2/3")
    assert env.exact
    assert len(env.outcomes) == 8
    assert sum(p for _, p in env.outcomes) == 1
    assert env.prob((1, 1, 0)) == Fraction(1, 4) * Fraction(1, 3) * Fraction(2, 3)
    assert env.marginal(0) == {0: Fraction(3, 4), 1: Fraction(1, 4)}
    assert len(env.support) == 5


def test_observation_entries():
    s = (3, 1, 2)
    assert CoordinateSelect((2,)).apply(s) == 2
    assert CoordinateSelect((0, 1)).apply(s) == (3, 1)
    assert LinearMix((1.0, 0.0, 2.0)).apply(s) == pytest.approx(7.0)
    assert Null().apply(s) == NULL_SYMBOL
    g = Garbled(CoordinateSelect((0,)), {3: 0, 4: 0})
    assert g.apply(s) == 0


def test_observe_and_coarsen():
    m = ObservationMap((CoordinateSelect((0,)), CoordinateSelect((1,))))
    assert observe((1, 0), m, 1) == 0
    with pytest.raises(IndexError):
        observe((1, 0), m, 2)
    c = coarsen(m, 0, keep=0, drop=1)
    assert observe((1, 0), c, 0) == observe((0, 0), c, 0)
    with pytest.raises(ModelError):
        ObservationMap((CoordinateSelect((5,)),)).validate(2)


def test_gaussian_env():
    env = GaussianEnv([[1.0, 0.2], [0.2, 1.0]])
    assert env.dim == 2
    R = env.sqrt()
    np.testing.assert_allclose(R @ R.T, env.covariance, atol=1e-12)
    with pytest.raises(ModelError):
        GaussianEnv([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(ModelError):
        GaussianEnv([[1.0, 0.3], [0.0, 1.0]])


def test_induced_moments_match_sampling(rng):
    cov = np.array([[1.0, 0.25], [0.25, 1.0]])
    phi = np.array([[0.5, 0.5], [0.25, 0.75]])
    z = rng.multivariate_normal(np.zeros(2), cov, size=200_000)
    for row in phi:
        mom = induced_moments(row, cov)
        w = z @ row
        assert mom.variance == pytest.approx(np.mean(w * w), abs=0.02)
        np.testing.assert_allclose(mom.cross, z.T @ w / len(z), atol=0.02)
