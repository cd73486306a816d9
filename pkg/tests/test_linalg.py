from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randteam.errors import IndefiniteError, SingularSystemError
from randteam.linalg import (
    is_symmetric,
    min_eigenvalue,
    require_negative_definite,
    require_positive_definite,
    residual_norm,
    solve_dense,
    symmetric_sqrt,
)


def test_solve_matches_numpy(rng):
    for n in (1, 2, 5, 8):
        A = rng.normal(size=(n, n)) + n * np.eye(n)
        b = rng.normal(size=n)
        np.testing.assert_allclose(solve_dense(A, b), np.linalg.solve(A, b), rtol=1e-12, atol=1e-12)


def test_pivoting_handles_zero_leading_entry():
    x = solve_dense([[0.0, 1.0], [1.0, 0.0]], [2.0, 3.0])
    np.testing.assert_allclose(x, [3.0, 2.0])


def test_exact_mode_returns_fractions():
    x = solve_dense([[2, 1], [1, 3]], [1, 2], exact=True)
    assert x == [Fraction(1, 5), Fraction(3, 5)]


@pytest.mark.parametrize("exact", [False, True])
def test_singular_raises(exact):
    with pytest.raises(SingularSystemError):
        solve_dense([[1, 2], [2, 4]], [1, 1], exact=exact)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2**31))
def test_residual_small_for_well_conditioned(n, seed):
    """Solutions of diagonally dominated systems leave a tiny residual."""
    r = np.random.default_rng(seed)
    A = r.normal(size=(n, n)) + 2 * n * np.eye(n)
    b = r.normal(size=n)
    assert residual_norm(A, solve_dense(A, b), b) <= 1e-10 * (1 + np.linalg.norm(b))


def test_definiteness_checks():
    assert is_symmetric(np.eye(3))
    assert not is_symmetric(np.array([[1.0, 2.0], [0.0, 1.0]]))
    assert min_eigenvalue(np.zeros((0, 0))) == np.inf
    assert require_positive_definite(np.diag([1.0, 2.0]), "A") == pytest.approx(1.0)
    assert require_negative_definite(-np.eye(2), "A") == pytest.approx(-1.0)
    with pytest.raises(IndefiniteError) as info:
        require_positive_definite(np.diag([1.0, -0.5]), "A")
    assert info.value.eigenvalue == pytest.approx(-0.5)


def test_symmetric_sqrt_reconstructs(rng):
    A = rng.normal(size=(4, 2))
    cov = A @ A.T  # rank deficient PSD
    R = symmetric_sqrt(cov)
    np.testing.assert_allclose(R @ R.T, cov, atol=1e-9)
