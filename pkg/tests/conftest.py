"""Shared fixtures, random-instance generators, and the per-criterion summary."""

from __future__ import annotations

import itertools
from collections import defaultdict
from fractions import Fraction

import numpy as np
import pytest

from randteam.discrete import PayoffKernel, TeamGame
from randteam.env import CoordinateSelect, FiniteEnv, ObservationMap

# -- random instances -----------------------------------------------------------


def random_pd(rng: np.random.Generator, n: int, floor: float = 0.1) -> np.ndarray:
    A = rng.normal(size=(n, n))
    return A @ A.T + floor * np.eye(n)


def random_rational_dist(rng: np.random.Generator, k: int, denom: int = 24) -> list:
    """A random distribution on k points with rational weights (some may be 0)."""
    cuts = sorted(rng.integers(0, denom + 1, size=k - 1).tolist())
    edges = [0] + cuts + [denom]
    return [Fraction(b - a, denom) for a, b in zip(edges, edges[1:])]


def random_single_team_game(rng: np.random.Generator, sizes=(2, 2), n_dms: int = 2, actions: int = 2) -> TeamGame:
    """Minimizing team only; DM i observes coordinate i, whose alphabet has sizes[i] symbols.

    The kernel depends on the outcome, so information genuinely matters.
    """
    outcomes = list(itertools.product(*(range(s) for s in sizes)))
    probs = random_rational_dist(rng, len(outcomes))
    env = FiniteEnv(len(sizes), tuple(zip(outcomes, probs)))
    maps = ObservationMap(tuple(CoordinateSelect((i,)) for i in range(n_dms)))
    table = {}
    for acts in itertools.product(range(actions), repeat=n_dms):
        for o in outcomes:
            table[(acts, o)] = int(rng.integers(-10, 11))
    kernel = PayoffKernel((actions,) * n_dms, table, outcome_dependent=True)
    return TeamGame(env, maps, tuple(range(n_dms)), (), kernel)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance summary -------------------------------------------------------------

_CRITERIA: dict = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion this test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", m.args[0]))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[crit].append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_CRITERIA):
        results = _CRITERIA[crit]
        failed = [name for name, outcome in results if outcome != "passed"]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {crit}: {status} ({len(results) - len(failed)}/{len(results)} checks)"
        if failed:
            line += " failing: " + ", ".join(failed)
        tr.write_line(line)
