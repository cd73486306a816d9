"""Finite team games: pure decision rules, payoff matrices, security levels.

Conventions used throughout:

* a *rule* for a decision maker is a tuple of actions, one per symbol of its
  observation alphabet (alphabet sorted ascending);
* a *profile* of a team assigns one rule to each of its DMs, and profiles are
  enumerated with the first DM of the team varying fastest;
* payoff matrices have the minimizing team on the rows and the maximizing
  team on the columns.

Expected payoffs are exact ``Fraction`` values whenever the environment
probabilities and the kernel entries are rational.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .env import CoordinateSelect, FiniteEnv, ObservationMap, binary_chain_env, observe
from .errors import EnumerationCapError, ModelError, NumericalError

ENUMERATION_CAP = 4096
PROB_TOL = 1e-12
TIE_TOL = 1e-12
LP_GAP_TOL = 1e-9


@dataclass(frozen=True)
class PayoffKernel:
    """Payoff as a function of the joint action (and optionally the environment outcome).

    ``table`` maps ``actions`` (one action index per DM) to a payoff, or
    ``(actions, outcome)`` to a payoff when ``outcome_dependent`` is set.
    """

    action_sizes: tuple
    table: Mapping
    outcome_dependent: bool = False

    def __post_init__(self):
        object.__setattr__(self, "action_sizes", tuple(int(a) for a in self.action_sizes))
        if any(a < 1 for a in self.action_sizes):
            raise ModelError("every DM needs at least one action")
        table = dict(self.table)
        for key, val in table.items():
            try:
                ok = np.isfinite(float(val))
            except (TypeError, ValueError):
                ok = False
            if not ok:
                raise ModelError(f"payoff at {key} is not a finite number")
        if not self.outcome_dependent:
            for actions in itertools.product(*(range(a) for a in self.action_sizes)):
                if actions not in table:
                    raise ModelError(f"payoff missing for joint action {actions}")
        object.__setattr__(self, "table", table)

    @property
    def n_dms(self) -> int:
        return len(self.action_sizes)

    def payoff(self, actions: tuple, outcome: tuple = ()):
        key = (actions, outcome) if self.outcome_dependent else actions
        try:
            return self.table[key]
        except KeyError:
            raise ModelError(f"payoff kernel has no entry for {key}") from None

    def check_total(self, outcomes: Sequence[tuple]) -> None:
        if not self.outcome_dependent:
            return
        for actions in itertools.product(*(range(a) for a in self.action_sizes)):
            for o in outcomes:
                if (actions, tuple(o)) not in self.table:
                    raise ModelError(f"payoff missing for joint action {actions} at outcome {o}")

    @classmethod
    def constant(cls, action_sizes: Sequence[int], value) -> "PayoffKernel":
        return cls(tuple(action_sizes), {a: value for a in itertools.product(*(range(k) for k in action_sizes))})


@dataclass(frozen=True)
class PureRule:
    dm: int
    alphabet: tuple
    actions: tuple

    def __post_init__(self):
        if len(self.alphabet) != len(self.actions):
            raise ModelError(f"rule for DM {self.dm} must give one action per observation symbol")

    def __call__(self, symbol):
        try:
            return self.actions[self.alphabet.index(symbol)]
        except ValueError:
            raise ModelError(f"DM {self.dm} has no action for observation {symbol!r}") from None

    @property
    def table(self) -> dict:
        return dict(zip(self.alphabet, self.actions))


def enumerate_rules(k: int, m: int, cap: int = ENUMERATION_CAP, order: str = "standard") -> list:
    """All ``m**k`` maps from ``k`` observation symbols to ``m`` actions.

    ``order="lex"`` lists the action tables lexicographically.  The default
    ``"standard"`` order lists the non-constant tables lexicographically and
    then the constant ones, so for ``k = m = 2`` the rules are identity, swap,
    constant 0, constant 1.
    """
    if k < 1 or m < 1:
        raise ModelError("need at least one observation symbol and one action")
    if m**k > cap:
        raise EnumerationCapError(f"{m}^{k} = {m**k} rules exceed the cap {cap}")
    tables = list(itertools.product(range(m), repeat=k))
    if order == "lex":
        return tables
    if order != "standard":
        raise ModelError(f"unknown rule order {order!r}")
    if k == 1:
        return tables
    constant = [t for t in tables if len(set(t)) == 1]
    return [t for t in tables if len(set(t)) > 1] + constant


@dataclass(frozen=True)
class TeamGame:
    env: FiniteEnv
    maps: ObservationMap
    minimizers: tuple
    maximizers: tuple
    kernel: PayoffKernel
    names: Optional[tuple] = None
    rule_order: str = "standard"

    def __post_init__(self):
        n = len(self.maps)
        object.__setattr__(self, "minimizers", tuple(self.minimizers))
        object.__setattr__(self, "maximizers", tuple(self.maximizers))
        everyone = self.minimizers + self.maximizers
        if sorted(everyone) != list(range(n)):
            raise ModelError(f"teams {self.minimizers} / {self.maximizers} must partition DMs 0..{n - 1}")
        if self.kernel.n_dms != n:
            raise ModelError(f"kernel has {self.kernel.n_dms} DMs, observation map has {n}")
        self.maps.validate(self.env.arity)
        self.kernel.check_total([s for s, _ in self.env.support])
        if self.names is None:
            object.__setattr__(self, "names", tuple(f"dm{i}" for i in range(n)))
        elif len(self.names) != n:
            raise ModelError("one name per DM is required")

    @property
    def n_dms(self) -> int:
        return len(self.maps)

    def alphabet(self, dm: int) -> tuple:
        """Observation symbols of ``dm`` over every listed environment outcome."""
        return tuple(sorted({observe(s, self.maps, dm) for s, _ in self.env.outcomes}, key=repr))

    def rules(self, dm: int, cap: int = ENUMERATION_CAP) -> list:
        alpha = self.alphabet(dm)
        tables = enumerate_rules(len(alpha), self.kernel.action_sizes[dm], cap, self.rule_order)
        return [PureRule(dm, alpha, t) for t in tables]

    def profiles(self, team: Sequence[int], cap: int = ENUMERATION_CAP) -> list:
        """Rule profiles of ``team`` as dicts ``dm -> PureRule``, first DM varying fastest."""
        per_dm = [self.rules(dm, cap) for dm in team]
        count = int(np.prod([len(r) for r in per_dm])) if per_dm else 1
        if count > cap:
            raise EnumerationCapError(f"{count} profiles exceed the cap {cap}")
        out = []
        for combo in itertools.product(*reversed(per_dm)):
            out.append(dict(zip(team, reversed(combo))))
        return out

    def profile_index(self, team: Sequence[int], rule_indices: Sequence[int]) -> int:
        """Position of the profile whose DMs use the given (0-based) rule indices."""
        idx, stride = 0, 1
        for dm, r in zip(team, rule_indices):
            idx += r * stride
            stride *= len(self.rules(dm))
        return idx

    def label(self, profile: Mapping[int, PureRule], team: Sequence[int]) -> str:
        parts = []
        for dm in team:
            rules = [r.actions for r in self.rules(dm)]
            parts.append(f"{self.names[dm]}^{rules.index(profile[dm].actions) + 1}")
        return " ".join(parts)


def expected_payoff(game: TeamGame, profile: Mapping[int, PureRule]):
    """Expected payoff of a full profile: sum over the support of P(outcome) * kernel."""
    missing = [dm for dm in range(game.n_dms) if dm not in profile]
    if missing:
        raise ModelError(f"profile has no rule for DM(s) {missing}")
    total = Fraction(0) if game.env.exact else 0.0
    for outcome, p in game.env.support:
        actions = tuple(profile[dm](observe(outcome, game.maps, dm)) for dm in range(game.n_dms))
        total += p * game.kernel.payoff(actions, outcome)
    return total


@dataclass(frozen=True)
class PayoffMatrix:
    entries: tuple  # rows of exact or float payoffs
    row_labels: tuple = ()
    col_labels: tuple = ()
    row_shape: tuple = ()  # rule counts per minimizing DM (first varies fastest)
    col_shape: tuple = ()

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        if not rows or not rows[0]:
            raise ModelError("payoff matrix is empty")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ModelError("payoff matrix rows have different lengths")
        object.__setattr__(self, "entries", rows)
        if not self.row_labels:
            object.__setattr__(self, "row_labels", tuple(f"r{i}" for i in range(len(rows))))
        if not self.col_labels:
            object.__setattr__(self, "col_labels", tuple(f"c{j}" for j in range(len(rows[0]))))
        if not self.row_shape:
            object.__setattr__(self, "row_shape", (len(rows),))
        if not self.col_shape:
            object.__setattr__(self, "col_shape", (len(rows[0]),))
        if int(np.prod(self.row_shape)) != len(rows) or int(np.prod(self.col_shape)) != len(rows[0]):
            raise ModelError("row/column shapes do not match the matrix dimensions")

    @classmethod
    def from_array(cls, a, **kw) -> "PayoffMatrix":
        return cls(tuple(tuple(r) for r in a), **kw)

    @property
    def shape(self) -> tuple:
        return len(self.entries), len(self.entries[0])

    @property
    def array(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.entries])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]


def payoff_matrix(game: TeamGame, cap: int = ENUMERATION_CAP) -> PayoffMatrix:
    rows = game.profiles(game.minimizers, cap)
    cols = game.profiles(game.maximizers, cap)
    entries = tuple(tuple(expected_payoff(game, {**r, **c}) for c in cols) for r in rows)
    return PayoffMatrix(
        entries,
        tuple(game.label(r, game.minimizers) for r in rows),
        tuple(game.label(c, game.maximizers) for c in cols),
        tuple(len(game.rules(dm)) for dm in game.minimizers) or (1,),
        tuple(len(game.rules(dm)) for dm in game.maximizers) or (1,),
    )


def security_levels(matrix: PayoffMatrix) -> tuple:
    """``(lower, upper)`` = (max over columns of the column minimum, min over rows of the row maximum)."""
    M = matrix.entries
    n_cols = len(M[0])
    lower = max(min(row[j] for row in M) for j in range(n_cols))
    upper = min(max(row) for row in M)
    return lower, upper


def pure_saddle(matrix: PayoffMatrix, tol: float = TIE_TOL) -> Optional[tuple]:
    """First cell (row-major) that is both its row's maximum and its column's minimum."""
    lower, upper = security_levels(matrix)
    if upper - lower > tol:
        return None
    M = matrix.entries
    col_min = [min(row[j] for row in M) for j in range(len(M[0]))]
    for i, row in enumerate(M):
        row_max = max(row)
        for j, v in enumerate(row):
            if v >= row_max - tol and v <= col_min[j] + tol:
                return i, j, v
    return None


@dataclass(frozen=True)
class MixedTeamStrategy:
    """Randomized strategy of one team.

    ``kind="product"``: ``probs`` holds one distribution per DM of the team over
    its rules (independent private randomization).  ``kind="joint"``:
    ``probs`` is a single distribution over the team's profiles (common
    randomness).
    """

    side: str
    kind: str
    probs: tuple

    def __post_init__(self):
        if self.side not in ("min", "max"):
            raise ModelError(f"side must be 'min' or 'max', got {self.side!r}")
        if self.kind not in ("product", "joint"):
            raise ModelError(f"kind must be 'product' or 'joint', got {self.kind!r}")
        dists = self.probs if self.kind == "product" else (self.probs,)
        dists = tuple(tuple(d) for d in dists)
        for d in dists:
            if not d or any(float(x) < 0 for x in d) or abs(float(sum(d)) - 1.0) > PROB_TOL:
                raise ModelError(f"not a probability distribution: {d}")
        object.__setattr__(self, "probs", dists if self.kind == "product" else dists[0])

    @classmethod
    def pure(cls, side: str, index: int, size: int) -> "MixedTeamStrategy":
        return cls(side, "joint", tuple(Fraction(int(i == index)) for i in range(size)))

    def profile_distribution(self, shape: Sequence[int]) -> list:
        """Distribution over profiles (first DM fastest) implied by this strategy."""
        if self.kind == "joint":
            if len(self.probs) != int(np.prod(shape)):
                raise ModelError(f"joint strategy has {len(self.probs)} entries, team has {int(np.prod(shape))} profiles")
            return list(self.probs)
        if tuple(len(d) for d in self.probs) != tuple(shape):
            raise ModelError(f"product strategy sizes {[len(d) for d in self.probs]} do not match rule counts {list(shape)}")
        out = []
        for combo in itertools.product(*reversed(self.probs)):
            w = 1
            for x in combo:
                w = w * x
            out.append(w)
        return out


def _dist(matrix: PayoffMatrix, s: MixedTeamStrategy, side: str) -> list:
    if s.side != side:
        raise ModelError(f"expected a strategy for the {side} side, got {s.side}")
    return s.profile_distribution(matrix.row_shape if side == "min" else matrix.col_shape)


def mixed_payoff(matrix: PayoffMatrix, strategy_min: MixedTeamStrategy, strategy_max: MixedTeamStrategy):
    """Bilinear payoff ``x' M y``."""
    x = _dist(matrix, strategy_min, "min")
    y = _dist(matrix, strategy_max, "max")
    return sum(xi * sum(a * yj for a, yj in zip(row, y)) for xi, row in zip(x, matrix.entries) if xi)


@dataclass(frozen=True)
class BestResponse:
    index: int
    label: str
    value: object
    ties: tuple = field(default_factory=tuple)


def best_response(matrix: PayoffMatrix, fixed: MixedTeamStrategy, tol: float = TIE_TOL) -> BestResponse:
    """Pure best response of the other team; ties go to the lowest index."""
    M = matrix.entries
    if fixed.side == "max":
        y = _dist(matrix, fixed, "max")
        values = [sum(a * yj for a, yj in zip(row, y)) for row in M]
        best = min(values)
        ties = tuple(i for i, v in enumerate(values) if v <= best + tol)
        labels = matrix.row_labels
    else:
        x = _dist(matrix, fixed, "min")
        values = [sum(xi * M[i][j] for i, xi in enumerate(x)) for j in range(len(M[0]))]
        best = max(values)
        ties = tuple(j for j, v in enumerate(values) if v >= best - tol)
        labels = matrix.col_labels
    return BestResponse(ties[0], labels[ties[0]], values[ties[0]], ties)


@dataclass(frozen=True)
class MinimaxResult:
    value: float
    x: np.ndarray  # minimizer distribution over rows
    y: np.ndarray  # maximizer distribution over columns
    gap: float


def minimax_joint(matrix: PayoffMatrix, gap_tol: float = LP_GAP_TOL) -> MinimaxResult:
    """Value and optimal mixed strategies of the matrix game (rows minimize).

    Both players' linear programs are solved; the returned strategies are
    checked to guarantee values within ``gap_tol`` of each other.
    """
    A = matrix.array
    m, n = A.shape
    opts = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}
    # minimizer: min t  s.t.  A'x <= t, sum x = 1, x >= 0
    c = np.zeros(m + 1)
    c[-1] = 1.0
    res_x = linprog(
        c,
        A_ub=np.hstack([A.T, -np.ones((n, 1))]),
        b_ub=np.zeros(n),
        A_eq=np.hstack([np.ones((1, m)), np.zeros((1, 1))]),
        b_eq=[1.0],
        bounds=[(0, None)] * m + [(None, None)],
        method="highs",
        options=opts,
    )
    # maximizer: max s  s.t.  A y >= s, sum y = 1, y >= 0
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res_y = linprog(
        c,
        A_ub=np.hstack([-A, np.ones((m, 1))]),
        b_ub=np.zeros(m),
        A_eq=np.hstack([np.ones((1, n)), np.zeros((1, 1))]),
        b_eq=[1.0],
        bounds=[(0, None)] * n + [(None, None)],
        method="highs",
        options=opts,
    )
    if res_x.status != 0 or res_y.status != 0:
        raise NumericalError(f"linear program failed: {res_x.message} / {res_y.message}")
    x = np.clip(res_x.x[:m], 0.0, None)
    y = np.clip(res_y.x[:n], 0.0, None)
    x /= x.sum()
    y /= y.sum()
    upper = float(np.max(x @ A))
    lower = float(np.min(A @ y))
    gap = upper - lower
    if gap > gap_tol * max(1.0, float(np.max(np.abs(A)))):
        raise NumericalError(f"minimax strategies leave a gap of {gap:.3e}")
    return MinimaxResult(0.5 * (upper + lower), x, y, gap)


def profile_costs(game: TeamGame, fixed: Optional[Mapping[int, PureRule]] = None, cap: int = ENUMERATION_CAP) -> tuple:
    """(profiles, costs) of the minimizing team, with the other DMs' rules fixed."""
    fixed = dict(fixed or {})
    missing = [dm for dm in game.maximizers if dm not in fixed]
    if missing:
        raise ModelError(f"DM(s) {missing} outside the team need a fixed rule")
    profiles = game.profiles(game.minimizers, cap)
    return profiles, [expected_payoff(game, {**fixed, **p}) for p in profiles]


def team_optimum_pure(game: TeamGame, fixed: Optional[Mapping[int, PureRule]] = None, cap: int = ENUMERATION_CAP) -> tuple:
    """Exhaustive minimum over the minimizing team's profiles: ``(profile, label, value)``."""
    profiles, costs = profile_costs(game, fixed, cap)
    best = min(range(len(costs)), key=lambda i: (costs[i], i))
    return profiles[best], game.label(profiles[best], game.minimizers), costs[best]


def mixed_team_cost(game: TeamGame, strategy: MixedTeamStrategy, fixed: Optional[Mapping[int, PureRule]] = None):
    """Expected cost of a randomized minimizing team against fixed outside rules."""
    if strategy.side != "min":
        raise ModelError("the randomized team must be the minimizing team")
    _, costs = profile_costs(game, fixed)
    shape = tuple(len(game.rules(dm)) for dm in game.minimizers)
    dist = strategy.profile_distribution(shape)
    return sum(w * c for w, c in zip(dist, costs))


# -- the three-DM binary chain game ------------------------------------------

L, R = 0, 1
CHAIN_PAYOFFS = {
    # (u, v1, v2) -> payoff
    (L, L, L): 20, (L, L, R): 0, (L, R, L): 1, (L, R, R): 30,
    (R, L, L): 20, (R, L, R): 1, (R, R, L): 0, (R, R, R): 30,
}  # fmt: skip


def chain_game(p1="1/4", p="1/3", q="2/3") -> TeamGame:
    """Zero-sum game on ``(mu1, s1, s2)``: DM ``g`` sees mu1 and maximizes, ``d1``/``d2`` see s1/s2 and minimize."""
    env = binary_chain_env(p1, p, q)
    maps = ObservationMap((CoordinateSelect((0,)), CoordinateSelect((1,)), CoordinateSelect((2,))))
    kernel = PayoffKernel((2, 2, 2), CHAIN_PAYOFFS)
    return TeamGame(env, maps, minimizers=(1, 2), maximizers=(0,), kernel=kernel, names=("g", "d1", "d2"))
