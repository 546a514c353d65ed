"""Campaign reports: named tables, inequality checks, JSON/CSV writers."""

from __future__ import annotations

import csv
import io
import json
import math
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

_RELATIONS = {
    "<=": operator.le,
    ">=": operator.ge,
    "==": operator.eq,
    "iff": lambda a, b: bool(a) == bool(b),
}


@dataclass
class Table:
    columns: list[str]
    rows: list[dict] = field(default_factory=list)

    def add(self, **row) -> dict:
        unknown = set(row) - set(self.columns)
        if unknown:
            raise KeyError(f"unknown columns {sorted(unknown)}")
        self.rows.append(row)
        return row


@dataclass
class Check:
    """``lhs relation rhs`` evaluated row by row on two columns of one table.

    Relation ``true`` is unary and needs ``lhs`` to be true.  Rows where a
    compared value is missing, or where the optional ``where`` column is false,
    are skipped.  Violating rows are listed by position in the table.
    """

    name: str
    table: str
    lhs: str
    relation: str
    rhs: str | None = None
    where: str | None = None
    checked: int = 0
    violations: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "check": self.name,
            "table": self.table,
            "lhs": self.lhs,
            "relation": self.relation,
            "rhs": self.rhs,
            "where": self.where,
            "checked": self.checked,
            "violations": len(self.violations),
            "violating_rows": self.violations[:20],
        }


@dataclass
class CampaignReport:
    campaign: str
    config: dict
    tables: dict[str, Table] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def table(self, name: str, columns: list[str]) -> Table:
        self.tables[name] = Table(list(columns))
        return self.tables[name]

    def require(self, name, table, lhs, relation, rhs=None, where=None) -> None:
        if relation != "true" and relation not in _RELATIONS:
            raise ValueError(f"unknown relation {relation!r}")
        if (relation == "true") != (rhs is None):
            raise ValueError("relation 'true' takes no right-hand side")
        self.checks.append(Check(name, table, lhs, relation, rhs, where))

    def evaluate(self) -> int:
        """Recompute every check from the stored columns; returns the violation count."""
        total = 0
        for chk in self.checks:
            chk.checked, chk.violations = 0, []
            for i, row in enumerate(self.tables[chk.table].rows):
                if chk.where is not None and not row.get(chk.where):
                    continue
                a = row.get(chk.lhs)
                if chk.relation == "true":
                    ok = a is True
                else:
                    b = row.get(chk.rhs)
                    if a is None or b is None:
                        continue
                    ok = _RELATIONS[chk.relation](a, b)
                chk.checked += 1
                if not ok:
                    chk.violations.append(i)
            total += len(chk.violations)
        return total

    @property
    def violations(self) -> int:
        return sum(len(c.violations) for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "campaign": self.campaign,
            "config": _jsonable(self.config),
            "summary": _jsonable(self.summary),
            "checks": [c.to_dict() for c in self.checks],
            "tables": {
                name: {"columns": t.columns,
                       "rows": [[_jsonable(r.get(c)) for c in t.columns] for r in t.rows]}
                for name, t in self.tables.items()
            },
        }


def format_value(x) -> str:
    """CSV cell text: rationals as ``p/q``, floats to 12 significant digits."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".12g")
    if hasattr(x, "item"):  # numpy scalar
        return format_value(x.item())
    return str(x)


def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return format_value(x)
        return float(format(x, ".12g"))
    if isinstance(x, int):
        return x
    if hasattr(x, "item"):
        return _jsonable(x.item())
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return str(x)


def table_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(row.get(c)) for c in table.columns])
    return buf.getvalue()


def checks_csv(report: CampaignReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = ["check", "table", "lhs", "relation", "rhs", "where", "checked", "violations"]
    writer.writerow(cols)
    for c in report.checks:
        d = c.to_dict()
        writer.writerow([format_value(d[k]) for k in cols])
    return buf.getvalue()


def emit_report(report: CampaignReport, fmt: str, path) -> list[Path]:
    """Write ``report`` and return the files produced.

    ``json`` writes one file.  ``csv`` writes the first table to ``path``, any
    further table to ``<stem>_<table>.csv`` and the check summary to
    ``<stem>_checks.csv``, all in the same directory.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path.write_text(json.dumps(report.to_dict(), indent=1) + "\n")
        return [path]
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    written = []
    for i, (name, table) in enumerate(report.tables.items()):
        target = path if i == 0 else path.with_name(f"{path.stem}_{name}.csv")
        target.write_text(table_csv(table))
        written.append(target)
    if not report.tables:
        path.write_text("")
        written.append(path)
    target = path.with_name(f"{path.stem}_checks.csv")
    target.write_text(checks_csv(report))
    written.append(target)
    return written
