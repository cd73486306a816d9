"""Command-line entry point: ``randteam reproduce|solve|mc-check``.

Exit codes: 0 success, 1 invalid configuration, 2 numerical failure,
3 unexpected mismatch against reference values when ``--check`` is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import lqg_team, lqg_zerosum as zs
from .discrete import (
    CHAIN_PAYOFFS,
    PayoffKernel,
    TeamGame,
    minimax_joint,
    payoff_matrix,
    pure_saddle,
    security_levels,
)
from .env import CoordinateSelect, FiniteEnv, LinearMix, Null, ObservationMap, as_number, binary_chain_env
from .errors import ConfigError, ModelError, NumericalError, RandTeamError
from .experiments import reproduce
from .oracle import FiniteProblem, QuadraticProblem, mc_estimate
from .report import emit, has_unexpected_mismatch, make_record, matrix_markdown

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_MISMATCH = 0, 1, 2, 3


def _seed(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get("RANDTEAM_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"RANDTEAM_SEED must be an integer, got {env!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="random seed (default: $RANDTEAM_SEED or 0)")
    p.add_argument("--samples", type=lambda s: int(float(s)), default=100_000, help="Monte Carlo sample count")
    p.add_argument("--tol", type=float, default=5e-3, help="absolute tolerance against reference values")
    p.add_argument("--format", choices=("md", "csv", "json"), default="md")
    p.add_argument("--mode", choices=("corrected", "paper-faithful"), default="corrected")
    p.add_argument("--check", action="store_true", help="exit with status 3 on any unexpected mismatch")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="randteam", description="Team decision problems with external randomness.")
    sub = parser.add_subparsers(dest="command", required=True)

    rep = sub.add_parser("reproduce", help="recompute a reference table and compare")
    rep.add_argument("target", choices=("table1", "table3", "table4", "security", "zs"))
    rep.add_argument("--p1", default="1/4")
    rep.add_argument("--p", default="1/3")
    rep.add_argument("--q", default="2/3")
    rep.add_argument("--case", choices=("1", "2", "all"), default="all")
    rep.add_argument("--rand", choices=("none", "mole", "consultant", "all"), default="all")
    _common(rep)

    solve = sub.add_parser("solve", help="solve the problem described by a JSON config")
    solve.add_argument("--config", required=True)
    _common(solve)

    mc = sub.add_parser("mc-check", help="compare analytic values with Monte Carlo estimates")
    mc.add_argument("--config", required=True)
    _common(mc)
    return parser


# -- config parsing --------------------------------------------------------------


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict) or not ("kind" in cfg or isinstance(cfg.get("target"), dict)):
        raise ConfigError("config must be an object with a 'kind' field (or a 'target' object for mc-check)")
    return cfg


def _num(x):
    try:
        return as_number(x)
    except ModelError as exc:
        raise ConfigError(str(exc)) from exc


def _mat(x, name: str) -> np.ndarray:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise ConfigError(f"{name} must be a nested list (row-major matrix)")
    return np.array([[float(_num(v)) for v in row] for row in x])


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config is missing '{key}'")
    return cfg[key]


def _obs_entry(e):
    if e is None or e == "null":
        return Null()
    if isinstance(e, list):
        return CoordinateSelect(tuple(int(i) for i in e))
    if isinstance(e, dict) and "mix" in e:
        return LinearMix(tuple(_num(w) for w in e["mix"]))
    raise ConfigError(f"unknown observation entry {e!r}")


def discrete_game_from_config(cfg: dict) -> TeamGame:
    env_cfg = _require(cfg, "env")
    if {"p1", "p", "q"} <= set(env_cfg):
        env = binary_chain_env(*(_num(env_cfg[k]) for k in ("p1", "p", "q")))
    else:
        outcomes = tuple((tuple(o), _num(p)) for o, p in _require(env_cfg, "outcomes"))
        env = FiniteEnv(int(_require(env_cfg, "arity")), outcomes)
    maps = ObservationMap(tuple(_obs_entry(e) for e in cfg.get("maps", [[0], [1], [2]])))
    kern = cfg.get("kernel")
    if kern is None:
        kernel = PayoffKernel((2, 2, 2), CHAIN_PAYOFFS)
    else:
        table = {tuple(k): _num(v) for k, v in _require(kern, "table")}
        kernel = PayoffKernel(tuple(_require(kern, "action_sizes")), table)
    names = tuple(cfg["names"]) if "names" in cfg else None
    return TeamGame(env, maps, tuple(cfg.get("minimizers", (1, 2))), tuple(cfg.get("maximizers", (0,))), kernel, names)


def team_spec_from_config(cfg: dict) -> lqg_team.LqgTeamSpec:
    B, S, Sigma = (_mat(_require(cfg, k), k) for k in ("B", "S", "Sigma"))
    feeds = cfg.get("feeds")
    if feeds is None:
        feeds = [[i] for i in range(B.shape[0])]
    feeds = tuple(tuple(f if isinstance(f, int) else [float(_num(w)) for w in f] for f in feed) for feed in feeds)
    rnd = cfg.get("randomness")
    randomness = None
    if rnd:
        kind = _require(rnd, "kind")
        if kind == "private":
            randomness = lqg_team.PrivateIndep(_mat(_require(rnd, "cov"), "cov"))
        elif kind == "common":
            randomness = lqg_team.CommonIndep(_mat(_require(rnd, "cov"), "cov"))
        elif kind == "dependent":
            access = rnd.get("access")
            randomness = lqg_team.Dependent(_mat(_require(rnd, "phi"), "phi"), tuple(map(tuple, access)) if access else None)
        else:
            raise ConfigError(f"unknown team randomness kind {kind!r}")
    return lqg_team.LqgTeamSpec(B, S, Sigma, feeds, randomness)


def zs_spec_from_config(cfg: dict) -> zs.ZsLqgSpec:
    r11, r12, q12 = (float(_num(_require(cfg, k))) for k in ("r11", "r12", "q12"))
    Sigma = _mat(cfg["Sigma"], "Sigma") if "Sigma" in cfg else zs.DEFAULT_SIGMA
    rnd = cfg.get("randomness") or {"kind": "none"}
    kind = rnd.get("kind", "none")
    if kind == "none":
        randomness = None
    elif kind == "independent":
        randomness = zs.IndependentCommon(float(_num(_require(rnd, "var"))))
    elif kind == "mole":
        randomness = zs.Mole(float(_num(_require(rnd, "phi11"))))
    elif kind == "consultant":
        randomness = zs.Consultant(float(_num(_require(rnd, "phi21"))), float(_num(_require(rnd, "phi22"))))
    else:
        raise ConfigError(f"unknown zero-sum randomness kind {kind!r}")
    return zs.ZsLqgSpec(r11, r12, q12, Sigma, randomness)


# -- result tables ---------------------------------------------------------------


def _table(rows: Sequence[tuple], fmt: str, title: str = "") -> str:
    """Two-column ``name,value`` output for solve results."""
    if fmt == "json":
        return json.dumps({k: v for k, v in rows}, indent=2) + "\n"
    if fmt == "csv":
        return "name,value\n" + "".join(f"{k},{v}\n" for k, v in rows)
    lines = [f"### {title}", ""] if title else []
    lines += ["| quantity | value |", "|---|---|"] + [f"| {k} | {v} |" for k, v in rows]
    return "\n".join(lines) + "\n"


def _val(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    return float(x)


def run_solve(cfg: dict, args) -> str:
    kind = _require(cfg, "kind")
    if kind == "discrete":
        game = discrete_game_from_config(cfg)
        M = payoff_matrix(game)
        lower, upper = security_levels(M)
        saddle = pure_saddle(M)
        mm = minimax_joint(M)
        rows = [("lower_security", _val(lower)), ("upper_security", _val(upper))]
        rows.append(("pure_saddle", "none" if saddle is None else f"{M.row_labels[saddle[0]]} / {M.col_labels[saddle[1]]}"))
        rows.append(("mixed_value", mm.value))
        out = _table(rows, args.format, "finite zero-sum game")
        if args.format == "md":
            out += "\n" + matrix_markdown(M.entries, M.row_labels, M.col_labels)
        return out
    if kind == "lqg-team":
        mode = cfg.get("mode", args.mode)
        if mode == "paper-faithful":
            phi = [float(_num(x)) for x in _require(cfg, "phi")]
            sigma = _mat(cfg["Sigma"], "Sigma") if "Sigma" in cfg else lqg_team.TABLE1_SIGMA
            sol = lqg_team.paper_faithful_table1(phi, sigma)
        else:
            sol = lqg_team.solve_team(team_spec_from_config(cfg))
        rows = [(l, float(t)) for l, t in zip(sol.policy.labels, sol.theta)]
        rows += [("value", sol.value), ("residual", sol.residual), ("mode", sol.mode)]
        if sol.pruned:
            rows.append(("pruned", " ".join(sol.pruned)))
        return _table(rows, args.format, "LQG team solution")
    if kind == "lqg-zerosum":
        spec = zs_spec_from_config(cfg)
        diag = zs.validate_game(spec)
        sol = zs.solve_saddle(spec)
        check = zs.verify_saddle(spec, sol, trials=int(cfg.get("trials", 1000)), seed=_seed(args.seed))
        rows = [(l, float(t)) for l, t in sol.as_dict().items()]
        rows += [
            ("value", sol.value),
            ("orientation", zs.ORIENTATION),
            ("residual", sol.residual),
            ("maximizer_curvature", sol.max_curvature),
            ("minimizer_min_eigenvalue", sol.min_block_eig),
            ("saddle_verified", check.passed),
        ]
        rows += [(f"warning{i}", w) for i, w in enumerate(diag.warnings)]
        return _table(rows, args.format, "zero-sum LQG saddle point")
    raise ConfigError(f"unknown config kind {kind!r}")


def run_mc_check(cfg: dict, args) -> list:
    """One record per checked quantity: MC mean vs analytic value, match iff within 4 standard errors."""
    target = cfg.get("target", cfg)
    kind = target.get("kind")
    seed = _seed(args.seed if args.seed is not None else cfg.get("seed"))
    n = int(cfg.get("samples", args.samples))
    records = []

    def add(case, problem, exact):
        est = mc_estimate(problem, n, seed)
        records.append(make_record(case, f"n={n} seed={seed} stderr={est.stderr:.3e}", est.mean, exact, 4.0 * est.stderr))

    if kind == "discrete":
        game = discrete_game_from_config(target)
        M = payoff_matrix(game)
        rows, cols = game.profiles(game.minimizers), game.profiles(game.maximizers)
        for i, r in enumerate(rows):
            for j, c in enumerate(cols):
                add(f"mc/{M.row_labels[i]}/{M.col_labels[j]}", FiniteProblem(game, {**r, **c}), float(M[i, j]))
    elif kind == "lqg-team":
        spec = team_spec_from_config(target)
        sol = lqg_team.solve_team(spec)
        add("mc/lqg-team/value", QuadraticProblem.from_model(lqg_team.feature_model(spec), sol.theta), sol.value)
    elif kind == "lqg-zerosum":
        spec = zs_spec_from_config(target)
        sol = zs.solve_saddle(spec)
        add("mc/lqg-zerosum/value", QuadraticProblem.from_model(zs.feature_model(spec), sol.theta), sol.value)
    else:
        raise ConfigError(f"mc-check does not support kind {kind!r}")
    return records


TITLES = {
    "table1": "Static team costs with environment-dependent randomness",
    "table3": "Expected payoff matrix of the binary chain game",
    "table4": "Payoffs against the maximizer's private mixture",
    "security": "Security levels",
    "zs": "Zero-sum LQG saddle values",
}


def run_reproduce(args) -> tuple:
    kw = {"tol": args.tol}
    if args.target == "table1":
        kw["mode"] = args.mode
    elif args.target in ("table3", "security"):
        kw.update(p1=args.p1, p=args.p, q=args.q)
    elif args.target == "zs":
        kw["cases"] = (1, 2) if args.case == "all" else (int(args.case),)
        kw["rands"] = ("none", "mole", "consultant") if args.rand == "all" else (args.rand,)
    rep = reproduce(args.target, **kw)
    out = emit(rep.records, args.format, TITLES[args.target])
    if args.format == "md" and rep.extra:
        out += "\n" + rep.extra
    return out, rep.records


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        records: list = []
        if args.command == "reproduce":
            try:
                for v in (args.p1, args.p, args.q):
                    Fraction(v)
            except (ValueError, ZeroDivisionError):
                raise ConfigError("p1, p, q must be numbers or fractions like 1/4") from None
            out, records = run_reproduce(args)
        elif args.command == "solve":
            out = run_solve(load_config(args.config), args)
        else:
            records = run_mc_check(load_config(args.config), args)
            out = emit(records, args.format, "Monte Carlo agreement")
        sys.stdout.write(out)
    except (ConfigError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except RandTeamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.check and has_unexpected_mismatch(records):
        n_bad = sum(r.status == "mismatch" for r in records)
        print(f"{n_bad} value(s) disagree with their references", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK

