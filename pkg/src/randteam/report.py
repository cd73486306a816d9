"""Compatibility records against published reference values, and their serializations."""

from __future__ import annotations

import csv
import fnmatch
import io
import json
import math
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Iterable, Optional, Sequence

from .errors import ConfigError

STATUSES = ("match", "known-discrepancy", "mismatch")
CSV_COLUMNS = ("case", "param_set", "value", "paper_value", "abs_diff", "status")


@dataclass(frozen=True)
class CompatRecord:
    case: str
    param_set: str
    value: float
    paper_value: float
    abs_diff: float
    status: str

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")


@dataclass(frozen=True)
class LedgerEntry:
    pattern: str
    reason: str


def load_ledger(path: Optional[str] = None) -> tuple:
    """Known discrepancies: case-id glob patterns with the reason each is expected."""
    if path is None:
        text = resources.files("randteam").joinpath("data/known_discrepancies.json").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    try:
        raw = json.loads(text)
        return tuple(LedgerEntry(e["pattern"], e["reason"]) for e in raw["entries"])
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"malformed discrepancy ledger: {exc}") from exc


def ledger_reason(case: str, ledger: Sequence[LedgerEntry]) -> Optional[str]:
    for entry in ledger:
        if fnmatch.fnmatchcase(case, entry.pattern):
            return entry.reason
    return None


def make_record(case: str, param_set: str, value, paper_value, tol: float, ledger: Sequence[LedgerEntry] = (), crosscheck_ok: bool = True) -> CompatRecord:
    """Compare one computed value with its reference.

    A record is a ``match`` when within ``tol``.  Otherwise it is a
    ``known-discrepancy`` only if the case is in the ledger *and* the
    computed value passed its independent cross-check; anything else is a
    ``mismatch``.
    """
    value = float(value)
    paper_value = float(paper_value)
    diff = abs(value - paper_value)
    if diff <= tol:
        status = "match"
    elif crosscheck_ok and ledger_reason(case, ledger) is not None:
        status = "known-discrepancy"
    else:
        status = "mismatch"
    return CompatRecord(case, param_set, value, paper_value, diff, status)


def has_unexpected_mismatch(records: Iterable[CompatRecord]) -> bool:
    return any(r.status == "mismatch" for r in records)


# -- emitters -----------------------------------------------------------------


def _num(x: float) -> str:
    return repr(float(x))


def to_csv(records: Sequence[CompatRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([r.case, r.param_set, _num(r.value), _num(r.paper_value), _num(r.abs_diff), r.status])
    return buf.getvalue()


def to_json(records: Sequence[CompatRecord]) -> str:
    return json.dumps([asdict(r) for r in records], indent=2) + "\n"


def parse_json(text: str) -> list:
    return [CompatRecord(**d) for d in json.loads(text)]


def parse_csv(text: str) -> list:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [
        CompatRecord(d["case"], d["param_set"], float(d["value"]), float(d["paper_value"]), float(d["abs_diff"]), d["status"])
        for d in rows
    ]


def _fmt(x: float) -> str:
    if math.isfinite(x) and x == int(x) and abs(x) < 1e12:
        return str(int(x))
    return f"{x:.4f}"


def to_markdown(records: Sequence[CompatRecord], title: str = "") -> str:
    lines = []
    if title:
        lines += [f"### {title}", ""]
    lines.append("| case | parameters | computed | reference | abs diff | status |")
    lines.append("|---|---|---|---|---|---|")
    for r in records:
        lines.append(f"| {r.case} | {r.param_set} | {_fmt(r.value)} | {_fmt(r.paper_value)} | {r.abs_diff:.2e} | {r.status} |")
    counts = {s: sum(r.status == s for r in records) for s in STATUSES}
    lines += ["", ", ".join(f"{k}: {v}" for k, v in counts.items())]
    return "\n".join(lines) + "\n"


def matrix_markdown(entries, row_labels, col_labels, digits: int = 4) -> str:
    """Plain grid with row and column labels, entries rounded for display."""
    head = "| | " + " | ".join(col_labels) + " |"
    sep = "|---" * (len(col_labels) + 1) + "|"
    body = [f"| {rl} | " + " | ".join(f"{float(x):.{digits}f}" for x in row) + " |" for rl, row in zip(row_labels, entries)]
    return "\n".join([head, sep, *body]) + "\n"


def emit(records: Sequence[CompatRecord], fmt: str, title: str = "") -> str:
    if fmt == "csv":
        return to_csv(records)
    if fmt == "json":
        return to_json(records)
    if fmt == "md":
        return to_markdown(records, title)
    raise ConfigError(f"unknown format {fmt!r}")
