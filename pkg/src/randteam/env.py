"""Random environments and the observation maps that feed each decision maker.

Environment coordinates are always indexed ``0..arity-1``; the three-symbol
instances use the order ``(mu1, s1, s2)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number, Rational
from typing import Any, Mapping, Sequence, Union

import numpy as np

from .errors import ModelError
from .linalg import min_eigenvalue, symmetric_sqrt

NULL_SYMBOL = 0
PROB_TOL = 1e-12


def as_number(x: Any):
    """Parse ``"1/4"``-style strings exactly; pass ints/Fractions through; floats stay floats."""
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ModelError(f"cannot parse number {x!r}") from exc
    if isinstance(x, bool):
        raise ModelError("booleans are not numbers here")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, Number):
        return float(x)
    raise ModelError(f"not a number: {x!r}")


def is_exact(x) -> bool:
    return isinstance(x, Fraction)


@dataclass(frozen=True)
class FiniteEnv:
    """Finite distribution over symbol vectors of a fixed length."""

    arity: int
    outcomes: tuple  # ((symbols, prob), ...)

    def __post_init__(self):
        outcomes = tuple((tuple(sym), as_number(p)) for sym, p in self.outcomes)
        object.__setattr__(self, "outcomes", outcomes)
        if not outcomes:
            raise ModelError("environment has no outcomes")
        seen = set()
        total = 0
        for sym, p in outcomes:
            if len(sym) != self.arity:
                raise ModelError(f"outcome {sym} has length {len(sym)}, expected {self.arity}")
            if sym in seen:
                raise ModelError(f"duplicate outcome {sym}")
            seen.add(sym)
            if not math.isfinite(float(p)) or p < 0:
                raise ModelError(f"probability of {sym} is {p}")
            total += p
        if abs(float(total) - 1.0) > PROB_TOL or (self.exact and total != 1):
            raise ModelError(f"probabilities sum to {float(total)!r}, not 1")

    @property
    def exact(self) -> bool:
        return all(is_exact(p) for _, p in self.outcomes)

    @property
    def support(self) -> tuple:
        return tuple((s, p) for s, p in self.outcomes if p > 0)

    def prob(self, symbols: Sequence) -> Union[Fraction, float]:
        symbols = tuple(symbols)
        for s, p in self.outcomes:
            if s == symbols:
                return p
        return Fraction(0) if self.exact else 0.0

    def marginal(self, coord: int) -> dict:
        out: dict = {}
        for s, p in self.outcomes:
            out[s[coord]] = out.get(s[coord], 0) + p
        return out

    @classmethod
    def point_mass(cls, symbols: Sequence) -> "FiniteEnv":
        symbols = tuple(symbols)
        return cls(len(symbols), ((symbols, Fraction(1)),))


@dataclass(frozen=True)
class GaussianEnv:
    """Zero-mean Gaussian environment described by its covariance."""

    covariance: np.ndarray

    def __post_init__(self):
        cov = np.array(self.covariance, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] == 0:
            raise ModelError(f"covariance must be a nonempty square matrix, got shape {cov.shape}")
        if not np.all(np.isfinite(cov)):
            raise ModelError("covariance has non-finite entries")
        if np.max(np.abs(cov - cov.T)) > 1e-10:
            raise ModelError("covariance is not symmetric")
        if min_eigenvalue(cov) < -1e-8:
            raise ModelError(f"covariance is not PSD (min eigenvalue {min_eigenvalue(cov):.3e})")
        cov.setflags(write=False)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self) -> int:
        return self.covariance.shape[0]

    def sqrt(self) -> np.ndarray:
        return symmetric_sqrt(self.covariance)


# -- observation maps -------------------------------------------------------


@dataclass(frozen=True)
class CoordinateSelect:
    indices: tuple

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if not self.indices:
            raise ModelError("CoordinateSelect needs at least one index")

    def apply(self, outcome):
        if len(self.indices) == 1:
            return outcome[self.indices[0]]
        return tuple(outcome[i] for i in self.indices)

    def max_index(self) -> int:
        return max(self.indices)


@dataclass(frozen=True)
class LinearMix:
    weights: tuple

    def __post_init__(self):
        w = tuple(as_number(x) if isinstance(x, str) else x for x in self.weights)
        if not all(math.isfinite(float(x)) for x in w):
            raise ModelError("LinearMix weights must be finite")
        object.__setattr__(self, "weights", w)

    def apply(self, outcome):
        return sum(w * x for w, x in zip(self.weights, outcome))

    def max_index(self) -> int:
        return len(self.weights) - 1

    def as_array(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])


@dataclass(frozen=True)
class Null:
    """Prior-only information: the observation never changes."""

    def apply(self, outcome):
        return NULL_SYMBOL

    def max_index(self) -> int:
        return -1


@dataclass(frozen=True)
class Garbled:
    """Post-processes another entry's observation through a relabelling.

    Symbols absent from ``mapping`` pass through unchanged, so merging two
    symbols is ``Garbled(base, {b: a})``.
    """

    base: Any
    mapping: tuple  # ((from, to), ...)

    def __post_init__(self):
        if isinstance(self.mapping, Mapping):
            object.__setattr__(self, "mapping", tuple(sorted(self.mapping.items())))

    def apply(self, outcome):
        y = self.base.apply(outcome)
        return dict(self.mapping).get(y, y)

    def max_index(self) -> int:
        return self.base.max_index()


@dataclass(frozen=True)
class ObservationMap:
    entries: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, dm: int):
        return self.entries[dm]

    def validate(self, arity: int) -> None:
        for dm, entry in enumerate(self.entries):
            if entry.max_index() >= arity:
                raise ModelError(f"observation map of DM {dm} reads coordinate {entry.max_index()} >= arity {arity}")
            if isinstance(entry, LinearMix) and len(entry.weights) != arity:
                raise ModelError(f"LinearMix of DM {dm} has {len(entry.weights)} weights, arity is {arity}")

    def replace(self, dm: int, entry) -> "ObservationMap":
        entries = list(self.entries)
        entries[dm] = entry
        return ObservationMap(tuple(entries))


def observe(outcome: Sequence, obs_map: ObservationMap, dm: int):
    """Observation of decision maker ``dm`` when the environment takes ``outcome``."""
    if not 0 <= dm < len(obs_map):
        raise IndexError(f"DM index {dm} out of range for a map with {len(obs_map)} entries")
    return obs_map[dm].apply(tuple(outcome))


def coarsen(obs_map: ObservationMap, dm: int, keep, drop) -> ObservationMap:
    """Merge observation symbol ``drop`` into ``keep`` for one decision maker."""
    return obs_map.replace(dm, Garbled(obs_map[dm], {drop: keep}))


def binary_chain_env(p1, p, q) -> FiniteEnv:
    """Joint law of ``(mu1, s1, s2)`` for the three-symbol chain.

    ``mu1 ~ Bern(p1)``; ``s1`` copies ``mu1`` with probability ``p`` and is 0
    otherwise; ``s2`` is ``1 - mu1`` with probability ``q`` and copies ``s1``
    otherwise.  All eight outcomes of ``{0,1}^3`` are listed, impossible ones
    with probability zero.  Rational inputs give an exact distribution.
    """
    p1, p, q = (as_number(x) for x in (p1, p, q))
    for name, v in (("p1", p1), ("p", p), ("q", q)):
        if not 0 <= v <= 1:
            raise ModelError(f"{name}={v} outside [0, 1]")
    if all(is_exact(v) for v in (p1, p, q)):
        zero = Fraction(0)
    else:
        zero = 0.0
        p1, p, q = float(p1), float(p), float(q)
    table = {
        (0, 0, 0): (1 - p1) * (1 - q),
        (0, 0, 1): (1 - p1) * q,
        (1, 0, 0): p1 * (1 - p),
        (1, 1, 0): p1 * p * q,
        (1, 1, 1): p1 * p * (1 - q),
    }
    outcomes = tuple((s, table.get(s, zero)) for s in itertools.product((0, 1), repeat=3))
    return FiniteEnv(3, outcomes)


@dataclass(frozen=True)
class InducedMoments:
    variance: float
    cross: np.ndarray  # cross[i] = E[xi_i * omega]


def induced_moments(phi, covariance) -> InducedMoments:
    """Moments of ``omega = phi . xi`` for zero-mean ``xi`` with the given covariance."""
    phi = np.asarray(phi, dtype=float)
    cov = np.asarray(covariance, dtype=float)
    if phi.ndim != 1 or cov.shape != (phi.size, phi.size):
        raise ModelError(f"mixing vector of length {phi.size} does not match covariance {cov.shape}")
    cross = cov @ phi
    return InducedMoments(float(phi @ cross), cross)
