"""Team-vs-team zero-sum LQG game with three decision makers.

The environment is ``xi = (mu1, s1, s2)``.  The maximizing team is the single
decision ``u1 = a11*mu1``; the minimizing team is ``v1 = a21*s1 + b21*omega``
and ``v2 = a22*s2 + b22*omega``.  The payoff ``E[theta'B theta + 2 theta'S xi]``
with ``theta = (u1, v1, v2)`` uses

    B = [[-1, r11, r12], [r11, 1, q12], [r12, q12, 1]],   S = diag(1, -1, -1),

so it is concave in ``u1`` and, when ``|q12| < 1``, convex in ``(v1, v2)``.
The minimizing team may be handed randomness ``omega``:

* ``IndependentCommon(var)`` - independent of xi (value-neutral);
* ``Mole(phi11)``            - ``omega = phi11*mu1``, a leak of the opponent's observation;
* ``Consultant(phi21, phi22)`` - ``omega = phi21*s1 + phi22*s2``, a mix of the team's own data.

Coefficients are ordered ``(a11, a21, a22, b21, b22)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .env import GaussianEnv, induced_moments
from .errors import GameValidationError, ModelError, SingularSystemError
from .linalg import min_eigenvalue, require_negative_definite, require_positive_definite, residual_norm, solve_dense
from .quadratic import Feature, FeatureModel

ORIENTATION = "u1 maximizes the payoff; the team (v1, v2) minimizes it"
DEFAULT_SIGMA = np.array([[2.0, 0.25, 0.25], [0.25, 1.0, 0.5], [0.25, 0.5, 1.0]])
DEFAULT_FEEDS = ((0,), (1,), (2,))
S_MATRIX = np.diag([1.0, -1.0, -1.0])
MAXIMIZER = (0,)
MINIMIZERS = (1, 2)
LABELS = ("a11", "a21", "a22", "b21", "b22")
DEGENERATE_VAR = 1e-12


@dataclass(frozen=True)
class IndependentCommon:
    var: float

    def __post_init__(self):
        if not float(self.var) > 0:
            raise ModelError(f"independent randomness needs a positive variance, got {self.var}")


@dataclass(frozen=True)
class Mole:
    phi11: float


@dataclass(frozen=True)
class Consultant:
    phi21: float
    phi22: float


ZsRandomness = Union[None, IndependentCommon, Mole, Consultant]


@dataclass(frozen=True)
class ZsLqgSpec:
    r11: float
    r12: float
    q12: float
    Sigma: np.ndarray = field(default_factory=lambda: DEFAULT_SIGMA.copy())
    randomness: ZsRandomness = None
    feeds: tuple = DEFAULT_FEEDS

    def __post_init__(self):
        for name in ("r11", "r12", "q12"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ModelError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        Sigma = GaussianEnv(self.Sigma).covariance
        if Sigma.shape != (3, 3):
            raise ModelError(f"the environment (mu1, s1, s2) needs a 3x3 covariance, got {Sigma.shape}")
        object.__setattr__(self, "Sigma", Sigma)
        feeds = tuple(tuple(int(c) for c in f) for f in self.feeds)
        if len(feeds) != 3 or any(not 0 <= c < 3 for f in feeds for c in f):
            raise ModelError(f"feeds must list coordinates of (mu1, s1, s2) for three decisions, got {self.feeds!r}")
        object.__setattr__(self, "feeds", feeds)

    @property
    def B(self) -> np.ndarray:
        return np.array([[-1.0, self.r11, self.r12], [self.r11, 1.0, self.q12], [self.r12, self.q12, 1.0]])

    @property
    def S(self) -> np.ndarray:
        return S_MATRIX.copy()

    @property
    def standard_feeds(self) -> bool:
        return self.feeds == DEFAULT_FEEDS

    def with_randomness(self, randomness: ZsRandomness) -> "ZsLqgSpec":
        return replace(self, randomness=randomness)


REFERENCE_CASES = {1: (0.25, 0.25, 0.5), 2: (0.25, 0.5, 0.5)}


def reference_case(case: int, randomness: ZsRandomness = None) -> ZsLqgSpec:
    r11, r12, q12 = REFERENCE_CASES[case]
    return ZsLqgSpec(r11, r12, q12, randomness=randomness)


@dataclass(frozen=True)
class GameDiagnostics:
    valid: bool
    violations: tuple
    warnings: tuple


def validate_game(spec: ZsLqgSpec, raise_on_error: bool = True) -> GameDiagnostics:
    """Check concavity for the maximizer and convexity for the minimizing team."""
    B = spec.B
    violations = []
    warnings = []
    if not B[0, 0] < 0:
        violations.append("B00 < 0 (maximizer concavity)")
    if not 1.0 - spec.q12**2 > 0:
        violations.append("1 - q12^2 > 0 (minimizer convexity)")
    if not min_eigenvalue(B[1:, 1:]) > 0:
        violations.append("minimizer block [[1, q12], [q12, 1]] positive definite")
    if spec.r11 == 0 and spec.r12 == 0:
        warnings.append("r11 = r12 = 0: the teams are decoupled and the game reduces to a team decision problem")
    elif 0.0 in (spec.r11, spec.r12, spec.q12):
        warnings.append("a coupling coefficient is zero")
    diag = GameDiagnostics(not violations, tuple(violations), tuple(warnings))
    if violations and raise_on_error:
        raise GameValidationError(violations)
    return diag


def _omega_layout(spec: ZsLqgSpec):
    """(feature row over z, dimension of z, sigma_z) for the randomness ``omega``."""
    r = spec.randomness
    if r is None:
        return None, spec.Sigma
    if isinstance(r, IndependentCommon):
        sigma_z = np.zeros((4, 4))
        sigma_z[:3, :3] = spec.Sigma
        sigma_z[3, 3] = float(r.var)
        return np.array([0.0, 0.0, 0.0, 1.0]), sigma_z
    if isinstance(r, Mole):
        return np.array([float(r.phi11), 0.0, 0.0]), spec.Sigma
    if isinstance(r, Consultant):
        return np.array([0.0, float(r.phi21), float(r.phi22)]), spec.Sigma
    raise ModelError(f"unknown randomness {r!r}")


def feature_model(spec: ZsLqgSpec) -> FeatureModel:
    omega, sigma_z = _omega_layout(spec)
    d = sigma_z.shape[0]
    S_hat = np.zeros((3, d))
    S_hat[:, :3] = S_MATRIX
    feats = []
    names = ("a11", "a21", "a22")
    for dm, feed in enumerate(spec.feeds):
        for j, c in enumerate(feed):
            row = np.zeros(d)
            row[c] = 1.0
            label = names[dm] if spec.standard_feeds else f"{names[dm]}[{j}]"
            feats.append(Feature(dm, row, label, "obs"))
    if omega is not None:
        feats.append(Feature(1, omega, "b21", "rand"))
        feats.append(Feature(2, omega, "b22", "rand"))
    return FeatureModel(spec.B, S_hat, sigma_z, tuple(feats))


def omega_moments(spec: ZsLqgSpec):
    """``(var_omega, cov(mu1, omega), cov(s1, omega), cov(s2, omega))``."""
    r = spec.randomness
    if r is None:
        return 0.0, 0.0, 0.0, 0.0
    if isinstance(r, IndependentCommon):
        return float(r.var), 0.0, 0.0, 0.0
    phi, _ = _omega_layout(spec)
    mom = induced_moments(phi, spec.Sigma)
    return (mom.variance, *(float(x) for x in mom.cross))


def assemble_saddle_system(spec: ZsLqgSpec):
    """First-order conditions ``M theta = rhs`` (3x3 without randomness, 5x5 with)."""
    validate_game(spec)
    if spec.randomness is not None:
        var = omega_moments(spec)[0]
        if var <= DEGENERATE_VAR:
            raise SingularSystemError(f"randomness has variance {var:.3e}; the saddle system is singular")
    H, g, _ = feature_model(spec).assemble()
    return H, -g


def nex_cost(spec: ZsLqgSpec, theta) -> float:
    """Expected payoff written out in the moments of ``(mu1, s1, s2, omega)``.

    Only meaningful for the standard feeds; missing randomness gains count as 0.
    """
    if not spec.standard_feeds:
        raise ModelError("the expanded payoff assumes u1<-mu1, v1<-s1, v2<-s2")
    t = [float(x) for x in theta] + [0.0] * (5 - len(theta))
    a11, a21, a22, b21, b22 = t
    Sg = spec.Sigma
    sm, s1, s2 = Sg[0, 0], Sg[1, 1], Sg[2, 2]
    ms1, ms2, s12 = Sg[0, 1], Sg[0, 2], Sg[1, 2]
    sw, smw, s1w, s2w = omega_moments(spec)
    r11, r12, q12 = spec.r11, spec.r12, spec.q12
    return float(
        -(a11**2) * sm
        + a21**2 * s1
        + a22**2 * s2
        + 2 * r11 * a11 * a21 * ms1
        + 2 * r12 * a11 * a22 * ms2
        + 2 * q12 * a21 * a22 * s12
        + 2 * (r11 * a11 * b21 + r12 * a11 * b22) * smw
        + 2 * (a21 * b21 + q12 * a21 * b22) * s1w
        + 2 * (q12 * a22 * b21 + a22 * b22) * s2w
        + (b21**2 + 2 * q12 * b21 * b22 + b22**2) * sw
        + 2 * a11 * sm
        - 2 * a21 * s1
        - 2 * a22 * s2
        - 2 * b21 * s1w
        - 2 * b22 * s2w
    )


@dataclass(frozen=True)
class SaddleSolution:
    theta: np.ndarray
    labels: tuple
    value: float
    residual: float
    max_curvature: float  # largest eigenvalue of the maximizer block (< 0)
    min_block_eig: float  # smallest eigenvalue of the minimizer block (> 0)

    @property
    def second_order(self) -> tuple:
        return (self.max_curvature < 0, self.min_block_eig > 0)

    @property
    def alpha(self) -> np.ndarray:
        return np.array([t for t, l in zip(self.theta, self.labels) if l.startswith("a")])

    @property
    def beta(self) -> Optional[np.ndarray]:
        b = [t for t, l in zip(self.theta, self.labels) if l.startswith("b")]
        return np.array(b) if b else None

    def as_dict(self) -> dict:
        return {l: float(t) for l, t in zip(self.labels, self.theta)}


def evaluate(spec: ZsLqgSpec, theta) -> float:
    """Expected payoff of arbitrary gains (expanded form when the feeds are standard)."""
    if spec.standard_feeds:
        return nex_cost(spec, theta)
    return feature_model(spec).cost(theta)


def solve_saddle(spec: ZsLqgSpec) -> SaddleSolution:
    """Stationary point of the game with second-order saddle certificates."""
    M, rhs = assemble_saddle_system(spec)
    model = feature_model(spec)
    dms = np.array([f.dm for f in model.features], dtype=int)
    max_idx = np.flatnonzero(np.isin(dms, MAXIMIZER))
    min_idx = np.flatnonzero(np.isin(dms, MINIMIZERS))
    max_curv = require_negative_definite(M[np.ix_(max_idx, max_idx)], "maximizer curvature", 1e-10) if max_idx.size else -np.inf
    min_eig = require_positive_definite(M[np.ix_(min_idx, min_idx)], "minimizer curvature", 1e-10) if min_idx.size else np.inf
    theta = solve_dense(M, rhs) if M.size else np.zeros(0)
    res = residual_norm(M, theta, rhs) if M.size else 0.0
    return SaddleSolution(theta, model.labels, evaluate(spec, theta), res, float(max_curv), float(min_eig))


@dataclass(frozen=True)
class SaddleCheck:
    passed: bool
    trials: int
    counterexample: Optional[dict] = None


def verify_saddle(spec: ZsLqgSpec, sol: SaddleSolution, trials: int = 1000, seed: int = 0, scale: float = 1.0, tol: float = 1e-9) -> SaddleCheck:
    """Randomized test of the two saddle inequalities around ``sol``.

    Each trial perturbs the maximizer's gains alone (payoff must not rise)
    and the minimizing team's gains alone (payoff must not fall).
    """
    model = feature_model(spec)
    dms = np.array([f.dm for f in model.features], dtype=int)
    is_max = np.isin(dms, MAXIMIZER)
    theta = np.asarray(sol.theta, dtype=float)
    j_star = evaluate(spec, theta)
    slack = tol * (1.0 + abs(j_star))
    rng = np.random.default_rng(seed)
    for t in range(trials):
        eps = scale * rng.standard_normal(theta.size)
        up = theta + np.where(is_max, eps, 0.0)
        j_up = evaluate(spec, up)
        if j_up > j_star + slack:
            return SaddleCheck(False, t + 1, {"side": "maximizer", "theta": up.tolist(), "value": j_up, "reference": j_star})
        down = theta + np.where(is_max, 0.0, eps)
        j_down = evaluate(spec, down)
        if j_down < j_star - slack:
            return SaddleCheck(False, t + 1, {"side": "minimizer", "theta": down.tolist(), "value": j_down, "reference": j_star})
    return SaddleCheck(True, trials)


@dataclass(frozen=True)
class ValueOfInformation:
    v_a: float
    v_b: float
    monotone: bool


NULL_FEEDS = ((), (), ())


def null_information(spec: ZsLqgSpec) -> ZsLqgSpec:
    """Both teams keep only the prior: no observations and no randomness."""
    return replace(spec, feeds=NULL_FEEDS, randomness=None)


def value_of_information(spec_a: ZsLqgSpec, spec_b: ZsLqgSpec, team: str = "min", tol: float = 1e-9) -> ValueOfInformation:
    """Saddle values relative to the prior-only game for two information variants.

    ``spec_b`` should give ``team`` (``"min"`` or ``"max"``) more information
    than ``spec_a``.  With a zero-mean environment the prior-only saddle is the
    zero policy with value 0, so each value of information is the saddle value.
    """
    if team not in ("min", "max"):
        raise ModelError(f"team must be 'min' or 'max', got {team!r}")
    base = solve_saddle(null_information(spec_a)).value
    v_a = solve_saddle(spec_a).value - base
    v_b = solve_saddle(spec_b).value - base
    monotone = v_b <= v_a + tol if team == "min" else v_b >= v_a - tol
    return ValueOfInformation(v_a, v_b, bool(monotone))
