"""Independent ground truth for the analytic solvers.

* :func:`mc_estimate` - Monte Carlo expected cost with reproducible,
  partition-independent random streams;
* :func:`brute_force_optimum` - exhaustive search over raw action tables;
* :func:`exact_game_value` - matrix-game value by exact vertex enumeration;
* :func:`grid_refine` - nested grid search for small smooth objectives.

None of these reuse the solver code paths they are meant to check.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import EnumerationCapError, ModelError, NumericalError, SingularSystemError
from .linalg import solve_dense, symmetric_sqrt

BLOCK_SIZE = 1 << 16
BRUTE_FORCE_CAP = 10**6
SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n: int
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ModelError("an estimate needs at least one sample")
        if not self.stderr >= 0:
            raise ModelError("standard error must be non-negative")

    def agrees(self, exact: float, k: float = 4.0) -> bool:
        """``|mean - exact| <= k * stderr`` (exact match required when stderr is 0)."""
        return abs(self.mean - float(exact)) <= k * self.stderr + 1e-12 * max(1.0, abs(float(exact)))


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Counter-based stream for one block: Philox keyed by ``(seed, block)``."""
    return np.random.Generator(np.random.Philox(key=(int(seed) & SEED_MASK) | (int(block) << 64)))


@dataclass(frozen=True)
class _Moments:
    n: int
    mean: float
    m2: float

    def merge(self, other: "_Moments") -> "_Moments":
        if other.n == 0:
            return self
        if self.n == 0:
            return other
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        return _Moments(n, mean, m2)


def _block_moments(sample_costs, seed: int, block: int, size: int) -> _Moments:
    x = np.asarray(sample_costs(block_rng(seed, block), size), dtype=float)
    if x.shape != (size,):
        raise NumericalError(f"sampler returned shape {x.shape}, expected ({size},)")
    mean = float(x.mean())
    return _Moments(size, mean, float(((x - mean) ** 2).sum()))


def mc_estimate(problem, n: int, seed: int = 0, workers: int = 1, block_size: int = BLOCK_SIZE) -> McEstimate:
    """Sample-mean estimate of ``problem``'s expected cost from ``n`` draws.

    ``problem`` must provide ``sample_costs(rng, size)``.  Draws are split into
    fixed blocks, each with its own keyed stream, and the per-block moments are
    merged in block order, so the result does not depend on ``workers``.
    """
    n = int(n)
    if n < 1:
        raise ModelError("n must be at least 1")
    sizes = [block_size] * (n // block_size)
    if n % block_size:
        sizes.append(n % block_size)
    jobs = list(enumerate(sizes))
    run = lambda job: _block_moments(problem.sample_costs, seed, job[0], job[1])  # noqa: E731
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    total = _Moments(0, 0.0, 0.0)
    for part in parts:
        total = total.merge(part)
    var = total.m2 / (total.n - 1) if total.n > 1 else 0.0
    return McEstimate(total.mean, math.sqrt(max(var, 0.0) / total.n), total.n, int(seed))


@dataclass(frozen=True)
class FiniteProblem:
    """Cost of a full rule profile in a finite game, sampled over the environment."""

    game: object
    profile: Mapping

    def __post_init__(self):
        from .env import observe

        g = self.game
        outcomes = [s for s, _ in g.env.outcomes]
        costs = []
        for s in outcomes:
            actions = tuple(self.profile[dm](observe(s, g.maps, dm)) for dm in range(g.n_dms))
            costs.append(float(g.kernel.payoff(actions, s)) if g.env.prob(s) > 0 else 0.0)
        probs = np.array([float(p) for _, p in g.env.outcomes])
        object.__setattr__(self, "_costs", np.array(costs))
        object.__setattr__(self, "_cdf", np.cumsum(probs / probs.sum()))

    def sample_costs(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = np.searchsorted(self._cdf, rng.random(size), side="right")
        return self._costs[np.minimum(idx, self._costs.size - 1)]


@dataclass(frozen=True)
class QuadraticProblem:
    """Cost ``u'Bu + 2u'S_hat z`` with ``u = D z`` and ``z ~ N(0, Sigma_z)``."""

    B: np.ndarray
    S_hat: np.ndarray
    sigma_z: np.ndarray
    D: np.ndarray

    @classmethod
    def from_model(cls, model, theta) -> "QuadraticProblem":
        return cls(model.B, model.S_hat, model.sigma_z, model.policy_matrix(theta))

    def sample_costs(self, rng: np.random.Generator, size: int) -> np.ndarray:
        root = symmetric_sqrt(self.sigma_z)
        z = rng.standard_normal((size, root.shape[0])) @ root
        u = z @ self.D.T
        return np.einsum("ni,ij,nj->n", u, self.B, u) + 2.0 * np.einsum("ni,ij,nj->n", u, self.S_hat, z)


def brute_force_optimum(game, fixed: Optional[Mapping] = None, cap: int = BRUTE_FORCE_CAP):
    """Minimum expected cost over every combination of raw action tables.

    Enumerates the minimizing team's decision tables directly (no rule
    ordering, no profile labels) and evaluates each by summing over the
    environment support.  DMs outside the team use the rules in ``fixed``.
    """
    from .env import observe

    fixed = dict(fixed or {})
    team = list(game.minimizers)
    for dm in game.maximizers:
        if dm not in fixed:
            raise ModelError(f"DM {dm} is outside the team and needs a fixed rule")
    support = list(game.env.support)
    obs = {dm: [observe(s, game.maps, dm) for s, _ in support] for dm in team}
    alphabets = {dm: sorted(set(observe(s, game.maps, dm) for s, _ in game.env.outcomes), key=repr) for dm in team}
    count = 1
    for dm in team:
        count *= game.kernel.action_sizes[dm] ** len(alphabets[dm])
    if count > cap:
        raise EnumerationCapError(f"{count} joint tables exceed the cap {cap}")
    fixed_actions = [{dm: rule(observe(s, game.maps, dm)) for dm, rule in fixed.items()} for s, _ in support]
    per_dm = [list(itertools.product(range(game.kernel.action_sizes[dm]), repeat=len(alphabets[dm]))) for dm in team]
    best = None
    for tables in itertools.product(*per_dm):
        lookup = {dm: dict(zip(alphabets[dm], t)) for dm, t in zip(team, tables)}
        total = 0
        for k, (s, p) in enumerate(support):
            acts = dict(fixed_actions[k])
            for dm in team:
                acts[dm] = lookup[dm][obs[dm][k]]
            total += p * game.kernel.payoff(tuple(acts[d] for d in range(game.n_dms)), s)
        if best is None or total < best:
            best = total
    return best


def exact_game_value(entries: Sequence[Sequence]) -> tuple:
    """Value and a maximizer strategy of a matrix game with rows minimizing.

    Enumerates every vertex of the maximizer's polytope
    ``{(y, t): A y >= t, y >= 0, sum y = 1}`` in exact rational arithmetic.
    Intended for small matrices (the work grows combinatorially).
    """
    A = [[Fraction(x) for x in row] for row in entries]
    m, n = len(A), len(A[0])
    # inequality rows in the variables (y_1..y_n, t), all of the form a.x <= b
    cons = [([-a for a in A[i]] + [Fraction(1)], Fraction(0)) for i in range(m)]
    cons += [([Fraction(-1) if k == j else Fraction(0) for k in range(n)] + [Fraction(0)], Fraction(0)) for j in range(n)]
    best = None
    for active in itertools.combinations(range(len(cons)), n):
        rows = [cons[s][0] for s in active] + [[Fraction(1)] * n + [Fraction(0)]]
        rhs = [cons[s][1] for s in active] + [Fraction(1)]
        try:
            x = solve_dense(rows, rhs, exact=True)
        except SingularSystemError:
            continue
        if all(sum(a * v for a, v in zip(c, x)) <= b for c, b in cons):
            if best is None or x[-1] > best[0]:
                best = (x[-1], tuple(x[:-1]))
    if best is None:
        raise NumericalError("no feasible vertex found")
    return best


@dataclass(frozen=True)
class GridResult:
    theta: np.ndarray
    value: float
    evaluations: int


def grid_refine(f: Callable[[np.ndarray], np.ndarray], lo, hi, levels: int = 6, points: int = 11) -> GridResult:
    """Nested grid search; each level shrinks the box 5x around the incumbent.

    ``f`` maps an ``(N, k)`` array of candidates to ``N`` values.  If the first
    level's best point lies on the box boundary the optimum is presumably
    outside the box and ``NumericalError`` is raised.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if lo.shape != hi.shape or lo.ndim != 1 or not np.all(hi > lo):
        raise ModelError("box must be two equal-length vectors with hi > lo")
    if lo.size > 5:
        raise ModelError("grid refinement supports at most 5 coefficients")
    if levels < 1 or points < 3:
        raise ModelError("need levels >= 1 and at least 3 points per axis")
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    evals = 0
    best_theta, best_val = None, np.inf
    for level in range(levels):
        axes = [np.linspace(c - h, c + h, points) for c, h in zip(center, half)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, lo.size)
        vals = np.asarray(f(grid), dtype=float)
        evals += vals.size
        k = int(np.argmin(vals))
        if level == 0:
            on_edge = np.isclose(grid[k], lo) | np.isclose(grid[k], hi)
            if np.any(on_edge):
                raise NumericalError(f"grid optimum {grid[k]} lies on the box boundary")
        if vals[k] < best_val:
            best_val, best_theta = float(vals[k]), grid[k].copy()
        center = best_theta
        half = half / 5.0
    return GridResult(best_theta, best_val, evals)


def quadratic_objective(H, g, c: float = 0.0) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized ``theta'H theta + 2 g'theta + c``."""
    H = np.asarray(H, dtype=float)
    g = np.asarray(g, dtype=float)
    return lambda X: np.einsum("ni,ij,nj->n", X, H, X) + 2.0 * X @ g + c
