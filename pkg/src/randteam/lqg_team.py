"""Static LQG team problems with linear decision rules.

Cost ``E[u'Bu + 2 u'S xi]`` with ``xi ~ N(0, Sigma)``.  Each decision maker
applies a linear gain to the observation components it is fed, plus optional
gains on externally provided randomness:

* ``PrivateIndep``  - each DM gets its own independent Gaussian variable;
* ``CommonIndep``   - all DMs see one shared Gaussian vector independent of xi;
* ``Dependent``     - randomness ``omega = Phi xi`` built from the environment,
  with per-DM access to rows of ``Phi``.

Coefficient order is always: every observation gain (DM by DM), then every
randomness gain (DM by DM).  For the two-DM diagonal instances with one
randomness row each this is ``(a11, a21, a12, a22)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .env import GaussianEnv
from .errors import ModelError, NumericalError
from .linalg import is_symmetric, require_positive_definite, residual_norm, solve_dense
from .quadratic import Feature, FeatureModel

PD_TOL = 1e-10


def _matrix(x, name: str) -> np.ndarray:
    a = np.array(x, dtype=float)
    if a.ndim != 2:
        raise ModelError(f"{name} must be a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ModelError(f"{name} has non-finite entries")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PrivateIndep:
    """Independent private randomness, one variable per DM; ``cov`` must be diagonal."""

    cov: np.ndarray

    def __post_init__(self):
        cov = _matrix(self.cov, "private randomness covariance")
        if np.any(np.abs(cov - np.diag(np.diag(cov))) > 0):
            raise ModelError("private randomness covariance must be diagonal")
        GaussianEnv(cov)
        object.__setattr__(self, "cov", cov)


@dataclass(frozen=True)
class CommonIndep:
    """A shared randomness vector, independent of the environment, seen by every DM."""

    cov: np.ndarray

    def __post_init__(self):
        cov = _matrix(self.cov, "common randomness covariance")
        GaussianEnv(cov)
        object.__setattr__(self, "cov", cov)


@dataclass(frozen=True)
class Dependent:
    """Randomness ``omega = phi @ xi``; DM ``i`` sees the rows listed in ``access[i]``.

    By default DM ``i`` sees row ``i`` only.
    """

    phi: np.ndarray
    access: Optional[tuple] = None

    def __post_init__(self):
        phi = _matrix(self.phi, "phi")
        object.__setattr__(self, "phi", phi)
        if self.access is None:
            object.__setattr__(self, "access", tuple((i,) for i in range(phi.shape[0])))
        else:
            object.__setattr__(self, "access", tuple(tuple(int(r) for r in rows) for rows in self.access))
        for rows in self.access:
            for r in rows:
                if not 0 <= r < phi.shape[0]:
                    raise ModelError(f"randomness row {r} does not exist (phi has {phi.shape[0]} rows)")


Randomness = Union[None, PrivateIndep, CommonIndep, Dependent]


def _feed_rows(feed, n: int) -> tuple:
    rows = []
    for item in feed:
        if isinstance(item, (int, np.integer)):
            if not 0 <= item < n:
                raise ModelError(f"observation component {item} out of range for dimension {n}")
            row = np.zeros(n)
            row[int(item)] = 1.0
        else:
            row = np.array(item, dtype=float)
            if row.shape != (n,) or not np.all(np.isfinite(row)):
                raise ModelError(f"observation weights must be {n} finite numbers, got {item!r}")
        row.setflags(write=False)
        rows.append(row)
    return tuple(rows)


@dataclass(frozen=True)
class LqgTeamSpec:
    """Quadratic team problem.

    ``feeds[i]`` lists what decision ``i`` observes: an integer selects an
    environment coordinate, a weight vector observes that linear mix.
    """

    B: np.ndarray
    S: np.ndarray
    Sigma: np.ndarray
    feeds: tuple
    randomness: Randomness = None

    def __post_init__(self):
        B = _matrix(self.B, "B")
        S = _matrix(self.S, "S")
        Sigma = GaussianEnv(self.Sigma).covariance
        m, n = B.shape[0], Sigma.shape[0]
        if B.shape != (m, m):
            raise ModelError(f"B must be square, got {B.shape}")
        if not is_symmetric(B):
            raise ModelError("B must be symmetric")
        lam = np.linalg.eigvalsh(B)[0]
        if not lam > PD_TOL:
            raise ModelError(f"B must be positive definite (min eigenvalue {lam:.6g})")
        if S.shape != (m, n):
            raise ModelError(f"S has shape {S.shape}, expected {(m, n)}")
        if len(self.feeds) != m:
            raise ModelError(f"{len(self.feeds)} feeds given for {m} decisions")
        feeds = tuple(_feed_rows(f, n) for f in self.feeds)
        r = self.randomness
        if isinstance(r, PrivateIndep) and r.cov.shape != (m, m):
            raise ModelError(f"private randomness needs an {m}x{m} covariance")
        if isinstance(r, Dependent):
            if r.phi.shape[1] != n:
                raise ModelError(f"phi has {r.phi.shape[1]} columns, environment dimension is {n}")
            if len(r.access) != m:
                raise ModelError(f"randomness access given for {len(r.access)} of {m} decisions")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "Sigma", Sigma)
        object.__setattr__(self, "feeds", feeds)

    @property
    def m(self) -> int:
        return self.B.shape[0]

    @property
    def n(self) -> int:
        return self.Sigma.shape[0]

    @classmethod
    def diagonal(cls, B, S, Sigma, randomness: Randomness = None) -> "LqgTeamSpec":
        """Decision ``i`` observes environment coordinate ``i``."""
        m = np.asarray(B).shape[0]
        return cls(B, S, Sigma, tuple((i,) for i in range(m)), randomness)

    @classmethod
    def centralized(cls, B, S, Sigma) -> "LqgTeamSpec":
        """Every decision observes the whole environment."""
        m, n = np.asarray(B).shape[0], np.asarray(Sigma).shape[0]
        return cls(B, S, Sigma, tuple(tuple(range(n)) for _ in range(m)))

    def without_randomness(self) -> "LqgTeamSpec":
        return replace(self, randomness=None)

    def with_randomness(self, randomness: Randomness) -> "LqgTeamSpec":
        return replace(self, randomness=randomness)


@dataclass(frozen=True)
class LinearPolicy:
    theta: np.ndarray
    labels: tuple
    dms: tuple
    layers: tuple

    def gain(self, label: str) -> float:
        return float(self.theta[self.labels.index(label)])

    def layer(self, layer: str) -> np.ndarray:
        return np.array([t for t, l in zip(self.theta, self.layers) if l == layer])


@dataclass(frozen=True)
class TeamSolution:
    policy: LinearPolicy
    value: float
    residual: float
    mode: str = "corrected"
    pruned: tuple = field(default_factory=tuple)

    @property
    def theta(self) -> np.ndarray:
        return self.policy.theta


def feature_model(spec: LqgTeamSpec) -> FeatureModel:
    """Lay out ``z = (xi, w)`` and one feature per free gain."""
    m, n = spec.m, spec.n
    r = spec.randomness
    if isinstance(r, (PrivateIndep, CommonIndep)):
        k = r.cov.shape[0]
    else:
        k = 0
    d = n + k
    sigma_z = np.zeros((d, d))
    sigma_z[:n, :n] = spec.Sigma
    if k:
        sigma_z[n:, n:] = r.cov
    S_hat = np.zeros((m, d))
    S_hat[:, :n] = spec.S

    def lift(row):
        z = np.zeros(d)
        z[: row.size] = row
        return z

    features = []
    for i, feed in enumerate(spec.feeds):
        for j, row in enumerate(feed):
            features.append(Feature(i, lift(row), f"A[{i},{j}]", "obs"))
    if isinstance(r, PrivateIndep):
        for i in range(m):
            e = np.zeros(d)
            e[n + i] = 1.0
            features.append(Feature(i, e, f"C[{i},{i}]", "rand"))
    elif isinstance(r, CommonIndep):
        for i in range(m):
            for j in range(k):
                e = np.zeros(d)
                e[n + j] = 1.0
                features.append(Feature(i, e, f"C[{i},{j}]", "rand"))
    elif isinstance(r, Dependent):
        for i, rows in enumerate(r.access):
            for j in rows:
                features.append(Feature(i, lift(r.phi[j]), f"C[{i},{j}]", "rand"))
    return FeatureModel(spec.B, S_hat, sigma_z, tuple(features))


def assemble_quadratic(spec: LqgTeamSpec):
    """``(H, g, c)`` such that the expected cost is ``theta'H theta + 2 g'theta + c``."""
    return feature_model(spec).assemble()


def _solve_model(model: FeatureModel, mode: str) -> TeamSolution:
    H, g, _ = model.assemble()
    keep = model.independent_features()
    theta = np.zeros(model.size)
    if keep:
        Hr = H[np.ix_(keep, keep)]
        require_positive_definite(Hr, "cost curvature on the free coefficients", PD_TOL)
        theta[keep] = solve_dense(Hr, -g[keep])
    residual = residual_norm(H, theta, -g)
    if residual > 1e-9 * (1.0 + float(np.linalg.norm(g))):
        raise NumericalError(f"stationarity residual {residual:.3e} too large")
    policy = LinearPolicy(
        theta,
        model.labels,
        tuple(f.dm for f in model.features),
        tuple(f.layer for f in model.features),
    )
    pruned = tuple(model.labels[k] for k in range(model.size) if k not in keep)
    return TeamSolution(policy, model.cost(theta), residual, mode, pruned)


def solve_team(spec: LqgTeamSpec) -> TeamSolution:
    """Team-optimal linear gains from the stationarity system ``H theta = -g``.

    Gains whose feature is almost surely zero, or duplicates information the
    same DM already has, are fixed at zero and listed in ``pruned``; this
    leaves the optimal cost unchanged.
    """
    return _solve_model(feature_model(spec), "corrected")


@dataclass(frozen=True)
class IndependentRandomnessReport:
    j_base: float
    c_star: np.ndarray  # m x k gains on the randomness
    j_total: float
    solution: TeamSolution


def independent_randomness_report(spec: LqgTeamSpec) -> IndependentRandomnessReport:
    """Solve with and without environment-independent randomness and compare."""
    r = spec.randomness
    if not isinstance(r, (PrivateIndep, CommonIndep)):
        raise ModelError("independent_randomness_report needs PrivateIndep or CommonIndep randomness")
    base = solve_team(spec.without_randomness())
    sol = solve_team(spec)
    m, k = spec.m, r.cov.shape[0]
    c_star = np.zeros((m, k))
    for t, label, layer in zip(sol.policy.theta, sol.policy.labels, sol.policy.layers):
        if layer == "rand":
            i, j = (int(x) for x in label[2:-1].split(","))
            c_star[i, j] = t
    return IndependentRandomnessReport(base.value, c_star, sol.value, sol)


def dependent_randomness_solve(spec: LqgTeamSpec) -> TeamSolution:
    """Joint optimum over observation gains and gains on ``omega = Phi xi``."""
    if not isinstance(spec.randomness, Dependent):
        raise ModelError("dependent_randomness_solve needs Dependent randomness")
    return solve_team(spec)


def centralized_bound(B, S, Sigma) -> float:
    """Optimal cost when every decision sees all of xi: ``-Tr[S'B^{-1}S Sigma]``."""
    B, S, Sigma = (np.asarray(x, dtype=float) for x in (B, S, Sigma))
    return float(-np.trace(S.T @ np.linalg.solve(B, S) @ Sigma))


# -- replication of the printed four-coefficient system -----------------------

TABLE1_B = np.array([[2.0, -1.0], [-1.0, 1.0]])
TABLE1_S = np.eye(2)
TABLE1_SIGMA = np.array([[1.0, 0.25], [0.25, 1.0]])
TABLE1_LABELS = ("a11", "a21", "a12", "a22")


def _printed_deltas(phi, Sigma):
    p11, p12, p21, p22 = (float(x) for x in phi)
    s1, s2, s12 = float(Sigma[0, 0]), float(Sigma[1, 1]), float(Sigma[0, 1])
    return {
        1: p11 * s1 + p12 * s12,
        2: p21 * s1 + p22 * s12,
        # as typeset, these two reuse the first variance where the second belongs
        3: p11 * s12 + p12 * s1,
        4: p21 * s12 + p22 * s1,
        # as typeset, the cross term carries no factor two
        5: p11**2 * s1 + p12**2 * s2 + p11 * p12 * s12,
        6: p21**2 * s1 + p22**2 * s2 + p21 * p22 * s12,
        7: p11 * p21 * s1 + (p22 * p11 + p12 * p21) * s12 + p22 * p12 * s2,
        8: p11 * s1 + p12 * s12,
        9: p21 * s12 + p22 * s2,
    }


def printed_system(phi, Sigma=TABLE1_SIGMA):
    """The literal 4x4 system (matrix, rhs) in the unknowns ``(a11, a21, a12, a22)``."""
    Sigma = np.asarray(Sigma, dtype=float)
    d = _printed_deltas(phi, Sigma)
    s1, s12 = Sigma[0, 0], Sigma[0, 1]
    s2 = Sigma[1, 1]
    M = np.array(
        [
            [4 * s1, -2 * s12, 2 * d[1], -d[3]],
            # as typeset, the (2,2) entry uses the first variance
            [-2 * s12, 2 * s1, -d[2], d[4]],
            [2 * d[1], -d[2], 4 * d[5], -2 * d[7]],
            [-d[3], d[4], -2 * d[7], 2 * d[6]],
        ]
    )
    rhs = -2.0 * np.array([s1, s2, d[8], d[9]])
    return M, rhs


def printed_cost(theta, phi, Sigma=TABLE1_SIGMA) -> float:
    """The printed expected-cost expression in ``(a11, a21, a12, a22)``."""
    Sigma = np.asarray(Sigma, dtype=float)
    d = _printed_deltas(phi, Sigma)
    s1, s2, s12 = Sigma[0, 0], Sigma[1, 1], Sigma[0, 1]
    a11, a21, a12, a22 = (float(x) for x in theta)
    return float(
        2 * a11**2 * s1
        - 2 * a11 * a21 * s12
        + a21**2 * s2
        + 2 * a11 * a12 * d[1]
        - a21 * a12 * d[2]
        - a11 * a22 * d[3]
        + a22 * a21 * d[4]
        + 2 * a12**2 * d[5]
        - 2 * a12 * a22 * d[7]
        + a22**2 * d[6]
        + 2 * (a11 * s1 + a21 * s2)
        + 2 * (a12 * d[8] + a22 * d[9])
    )


def paper_faithful_table1(phi, Sigma=TABLE1_SIGMA, B=TABLE1_B, S=TABLE1_S) -> TeamSolution:
    """Solve the printed four-coefficient system exactly as typeset.

    This reproduces published numbers, typos included, and is *not* a correct
    solver; use :func:`dependent_randomness_solve` for the actual optimum.
    The printed system is specific to ``B = [[2,-1],[-1,1]]`` and ``S = I``.
    """
    if not (np.allclose(B, TABLE1_B, atol=0) and np.allclose(S, TABLE1_S, atol=0)):
        raise ModelError("the printed system is only defined for B=[[2,-1],[-1,1]] and S=I")
    if len(phi) != 4:
        raise ModelError("phi must hold four mixing weights (phi11, phi12, phi21, phi22)")
    Sigma = GaussianEnv(Sigma).covariance
    if Sigma.shape != (2, 2):
        raise ModelError("the printed system needs a 2x2 covariance")
    M, rhs = printed_system(phi, Sigma)
    if not any(float(p) for p in phi):
        # no randomness: only the two observation gains are unknown
        theta = np.zeros(4)
        theta[:2] = solve_dense(M[:2, :2], rhs[:2])
    else:
        theta = solve_dense(M, rhs)
    policy = LinearPolicy(theta, TABLE1_LABELS, (0, 1, 0, 1), ("obs", "obs", "rand", "rand"))
    return TeamSolution(policy, printed_cost(theta, phi, Sigma), residual_norm(M, theta, rhs), "paper-faithful")


def table1_spec(phi=None, Sigma=TABLE1_SIGMA) -> LqgTeamSpec:
    """The two-DM instance; ``phi=(p11,p12,p21,p22)`` adds ``omega_i = p_i1 xi_1 + p_i2 xi_2`` for DM ``i``."""
    rand = None
    if phi is not None:
        rand = Dependent(np.array([[phi[0], phi[1]], [phi[2], phi[3]]], dtype=float))
    return LqgTeamSpec.diagonal(TABLE1_B, TABLE1_S, Sigma, rand)


# -- observation mixing -------------------------------------------------------

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class Problem123Result:
    j1: float
    j2: float
    j3: float
    beta: float
    bound_holds: bool
    symmetric: bool
    symmetric_facts_hold: Optional[bool]


def problem123(base: LqgTeamSpec, beta: float, tol: float = 1e-9) -> Problem123Result:
    """Own observations, swapped observations, and a convex mix of the two.

    ``J1``: DM ``i`` sees ``y_i``.  ``J2``: DM ``i`` sees the other DM's
    observation.  ``J3``: DM ``i`` sees ``beta*y_i + (1-beta)*y_other``.
    When swapping leaves the problem unchanged, ``J1 = J2`` and ``J3 <= J1``
    are also checked.
    """
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise ModelError(f"beta must lie in the open interval (0, 1), got {beta}")
    if base.m != 2 or base.n != 2:
        raise ModelError("problem123 needs two decisions and a two-dimensional environment")
    B, S, Sigma = base.B, base.S, base.Sigma
    j1 = solve_team(LqgTeamSpec(B, S, Sigma, ((0,), (1,)))).value
    j2 = solve_team(LqgTeamSpec(B, S, Sigma, ((1,), (0,)))).value
    mix = ((beta, 1.0 - beta),), ((1.0 - beta, beta),)
    j3 = solve_team(LqgTeamSpec(B, S, Sigma, mix)).value
    bound = j3 <= beta * j1 + (1.0 - beta) * j2 + tol
    symmetric = bool(np.allclose(SWAP @ Sigma @ SWAP, Sigma, rtol=0, atol=1e-12) and np.allclose(S @ SWAP, S, rtol=0, atol=1e-12))
    facts = None
    if symmetric:
        facts = abs(j1 - j2) <= tol and j3 <= j1 + tol
    return Problem123Result(j1, j2, j3, beta, bool(bound), symmetric, facts)

