"""Quadratic costs of linear decision rules over a Gaussian feature space.

Every decision ``u_i`` is a linear combination of *features*, each feature
being a fixed linear functional ``f . z`` of a zero-mean random vector ``z``
with covariance ``Sigma_z``.  For cost ``E[u'Bu + 2 u'S_hat z]`` the expected
cost is a quadratic ``J(theta) = theta'H theta + 2 g'theta`` in the feature
weights, with

    H[k, l] = B[dm_k, dm_l] * f_k' Sigma_z f_l
    g[k]    = f_k' Sigma_z S_hat[dm_k, :]

Both the team solver and the zero-sum solver are built on this.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelError


@dataclass(frozen=True)
class Feature:
    dm: int
    row: np.ndarray  # functional over z
    label: str
    layer: str = "obs"  # "obs" for observation gains, "rand" for randomness gains


@dataclass(frozen=True)
class FeatureModel:
    B: np.ndarray
    S_hat: np.ndarray  # m x dim(z)
    sigma_z: np.ndarray
    features: tuple

    def __post_init__(self):
        m = self.B.shape[0]
        d = self.sigma_z.shape[0]
        if self.B.shape != (m, m):
            raise ModelError(f"B must be square, got {self.B.shape}")
        if self.S_hat.shape != (m, d):
            raise ModelError(f"coupling has shape {self.S_hat.shape}, expected {(m, d)}")
        for f in self.features:
            if not 0 <= f.dm < m:
                raise ModelError(f"feature {f.label} belongs to unknown decision {f.dm}")
            if f.row.shape != (d,):
                raise ModelError(f"feature {f.label} has length {f.row.size}, expected {d}")

    @property
    def size(self) -> int:
        return len(self.features)

    @property
    def labels(self) -> tuple:
        return tuple(f.label for f in self.features)

    def feature_matrix(self) -> np.ndarray:
        d = self.sigma_z.shape[0]
        if not self.features:
            return np.zeros((0, d))
        return np.vstack([f.row for f in self.features])

    def assemble(self):
        """Return ``(H, g, c)`` with ``J(theta) = theta'H theta + 2 g'theta + c``."""
        F = self.feature_matrix()
        dms = np.array([f.dm for f in self.features], dtype=int)
        G = F @ self.sigma_z @ F.T
        H = self.B[np.ix_(dms, dms)] * G
        H = 0.5 * (H + H.T)
        cross = F @ self.sigma_z @ self.S_hat.T  # cross[k, i] = f_k' Sigma S_hat[i]
        g = cross[np.arange(len(dms)), dms] if len(dms) else np.zeros(0)
        return H, g, 0.0

    def policy_matrix(self, theta) -> np.ndarray:
        """Matrix ``D`` with ``u = D z`` for the given feature weights."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.size,):
            raise ModelError(f"expected {self.size} coefficients, got shape {theta.shape}")
        D = np.zeros(self.S_hat.shape)
        for w, f in zip(theta, self.features):
            D[f.dm] += w * f.row
        return D

    def trace_cost(self, theta) -> float:
        """Direct evaluation of ``Tr[D'BD Sigma_z + 2 D'S_hat Sigma_z]``."""
        D = self.policy_matrix(theta)
        return float(np.trace(D.T @ self.B @ D @ self.sigma_z + 2.0 * D.T @ self.S_hat @ self.sigma_z))

    def cost(self, theta) -> float:
        H, g, c = self.assemble()
        theta = np.asarray(theta, dtype=float)
        return float(theta @ H @ theta + 2.0 * g @ theta + c)

    def independent_features(self, rtol: float = 1e-10) -> list:
        """Indices of a maximal set of features that are linearly independent per decision.

        Independence is measured in the ``Sigma_z`` inner product, so a feature
        that is almost surely zero or a combination of earlier features of the
        same decision is dropped.  Earlier features win.
        """
        keep: list = []
        basis: dict = {}
        for k, f in enumerate(self.features):
            v = f.row.astype(float)
            norm2 = float(v @ self.sigma_z @ v)
            scale = max(float(np.max(np.abs(np.diag(self.sigma_z)))) * float(v @ v), 1e-300)
            if norm2 <= rtol * scale:
                continue
            r = v.copy()
            for b in basis.get(f.dm, []):
                r = r - (b @ self.sigma_z @ r) * b
            rn2 = float(r @ self.sigma_z @ r)
            if rn2 <= rtol * norm2:
                continue
            basis.setdefault(f.dm, []).append(r / np.sqrt(rn2))
            keep.append(k)
        return keep

