"""Small dense linear algebra: pivoted elimination and definiteness checks.

Systems here are at most a handful of unknowns, so a plain Gaussian
elimination with partial pivoting is used instead of a LAPACK call; the
same routine runs over ``Fraction`` entries when an exact answer is wanted.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import IndefiniteError, SingularSystemError

PIVOT_RTOL = 1e-12


def solve_dense(A, b, *, exact: bool = False, rtol: float = PIVOT_RTOL):
    """Solve ``A x = b`` by elimination with partial pivoting.

    A pivot is rejected as singular when ``|pivot| <= rtol * max|A|``.  With
    ``exact=True`` entries are converted to ``Fraction``, the tolerance is
    zero and a list of fractions is returned.
    """
    n = len(A)
    if exact:
        M = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(A, b)]
        threshold = 0
    else:
        M = [[float(x) for x in row] + [float(bi)] for row, bi in zip(A, b)]
        scale = max((abs(x) for row in M for x in row[:n]), default=0.0)
        threshold = rtol * scale
    if any(len(row) != n + 1 for row in M) or len(M) != n:
        raise ValueError("solve_dense needs a square matrix and matching right-hand side")

    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(M[r][col]))
        if abs(M[piv][col]) <= threshold or M[piv][col] == 0:
            raise SingularSystemError(f"singular system: pivot {float(M[piv][col]):.3e} in column {col}")
        M[col], M[piv] = M[piv], M[col]
        pivot_row = M[col]
        for r in range(col + 1, n):
            f = M[r][col] / pivot_row[col]
            if f:
                row = M[r]
                for c in range(col, n + 1):
                    row[c] -= f * pivot_row[c]

    x = [0] * n
    for r in range(n - 1, -1, -1):
        acc = M[r][n]
        for c in range(r + 1, n):
            acc -= M[r][c] * x[c]
        x[r] = acc / M[r][r]
    return x if exact else np.asarray(x, dtype=float)


def is_symmetric(A: np.ndarray, tol: float = 1e-10) -> bool:
    A = np.asarray(A, dtype=float)
    return A.ndim == 2 and A.shape[0] == A.shape[1] and bool(np.all(np.abs(A - A.T) <= tol))


def min_eigenvalue(A) -> float:
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return float("inf")
    return float(np.linalg.eigvalsh(0.5 * (A + A.T))[0])


def require_positive_definite(A, what: str, tol: float = 1e-10) -> float:
    """Raise ``IndefiniteError`` unless the smallest eigenvalue exceeds ``tol``."""
    lam = min_eigenvalue(A)
    if not lam > tol:
        raise IndefiniteError(f"{what} is not positive definite (min eigenvalue {lam:.6g})", lam)
    return lam


def require_negative_definite(A, what: str, tol: float = 1e-10) -> float:
    lam = -min_eigenvalue(-np.asarray(A, dtype=float))
    if not lam < -tol:
        raise IndefiniteError(f"{what} is not negative definite (max eigenvalue {lam:.6g})", lam)
    return lam


def symmetric_sqrt(cov: np.ndarray, psd_tol: float = 1e-8, jitter: float = 1e-12) -> np.ndarray:
    """Symmetric square root of a PSD matrix via its eigendecomposition.

    Eigenvalues in ``[-psd_tol, 0]`` are lifted by ``jitter`` so rank-deficient
    covariances can still be sampled.
    """
    cov = np.asarray(cov, dtype=float)
    w, V = np.linalg.eigh(0.5 * (cov + cov.T))
    if w.size and w[0] < -psd_tol:
        raise IndefiniteError(f"covariance is not positive semidefinite (min eigenvalue {w[0]:.3e})", float(w[0]))
    if w.size and w[0] <= 0:
        w = w + jitter
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ V.T


def residual_norm(A: np.ndarray, x: Sequence[float], b: Sequence[float]) -> float:
    return float(np.linalg.norm(np.asarray(A, float) @ np.asarray(x, float) - np.asarray(b, float)))
