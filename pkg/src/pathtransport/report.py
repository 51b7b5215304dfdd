"""Law reports: structured residual tables with deterministic JSON/CSV output."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class LawRow:
    """One checked instance of a law.

    ``s`` and ``t`` are the source and target parameters of the instance (or
    NaN when the law has no natural parameter pair). ``via`` holds any extra
    witness parameters, e.g. the intermediate point of a composition.
    Informational rows are recorded but never affect ``passed``.
    """

    law: str
    path: str
    s: float
    t: float
    residual: float
    tol: float
    via: tuple[float, ...] = ()
    informational: bool = False

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)


@dataclass
class LawSummary:
    law: str
    residual: float
    witness: LawRow | None
    passed: bool
    count: int


@dataclass
class LawReport:
    name: str
    rows: list[LawRow] = field(default_factory=list)

    def add(self, law: str, path: str, s: float, t: float, residual: float, tol: float,
            via: Sequence[float] = (), informational: bool = False) -> LawRow:
        row = LawRow(law, path, float(s), float(t), float(residual), float(tol),
                     tuple(float(v) for v in via), informational)
        self.rows.append(row)
        return row

    def extend(self, other: "LawReport") -> "LawReport":
        self.rows.extend(other.rows)
        return self

    @property
    def laws(self) -> list[str]:
        seen: dict[str, None] = {}
        for r in self.rows:
            seen.setdefault(r.law, None)
        return list(seen)

    def summary(self) -> list[LawSummary]:
        out = []
        for law in self.laws:
            rows = [r for r in self.rows if r.law == law]
            worst = max(rows, key=lambda r: _key(r.residual))
            informational = all(r.informational for r in rows)
            passed = informational or all(r.passed for r in rows if not r.informational)
            out.append(LawSummary(law, worst.residual, worst, passed, len(rows)))
        return out

    def residual(self, law: str | None = None) -> float:
        rows = [r for r in self.rows if law is None or r.law == law]
        if not rows:
            raise KeyError(f"no rows for law {law!r} in report {self.name!r}")
        return max((r.residual for r in rows), key=_key)

    def witness(self, law: str | None = None) -> LawRow:
        rows = [r for r in self.rows if law is None or r.law == law]
        return max(rows, key=lambda r: _key(r.residual))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows if not r.informational)

    def failing_laws(self) -> list[str]:
        return [s.law for s in self.summary() if not s.passed]

    def passed_law(self, law: str) -> bool:
        return all(r.passed for r in self.rows if r.law == law)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "report": self.name,
            "passed": self.passed,
            "laws": [
                {
                    "law": s.law,
                    "max_residual": s.residual,
                    "witness": _row_dict(s.witness) if s.witness else None,
                    "count": s.count,
                    "passed": s.passed,
                }
                for s in self.summary()
            ],
            "rows": [_row_dict(r) for r in self.rows],
        }


def _key(x: float) -> float:
    return math.inf if math.isnan(x) else x


def _row_dict(r: LawRow) -> dict:
    return {
        "law": r.law,
        "path": r.path,
        "s": r.s,
        "t": r.t,
        "via": list(r.via),
        "residual": r.residual,
        "tol": r.tol,
        "pass": r.passed,
        "informational": r.informational,
    }


def merge(name: str, reports: Iterable[LawReport]) -> LawReport:
    out = LawReport(name)
    for r in reports:
        out.extend(r)
    return out


# --------------------------------------------------------------------------
# Deterministic serialisation


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0:
        return "0.0"
    text = format(x, ".17g")
    # keep integral values recognisable as floats
    return text if any(c in text for c in ".en") else text + ".0"


def dumps(obj, indent: int = 2) -> str:
    """JSON with fixed key order (insertion order) and 17-significant-digit floats."""
    out: list[str] = []
    _emit(obj, out, 0, indent)
    return "".join(out) + "\n"


def _emit(obj, out: list[str], level: int, indent: int) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            out.append(f'{pad}"{k}": ')
            _emit(v, out, level + 1, indent)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            out.append("[" + ", ".join(format_float(float(v)) if isinstance(v, float) else str(v) for v in obj) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, out, level + 1, indent)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        if isinstance(obj, np.generic):
            _emit(obj.item(), out, level, indent)
            return
        raise TypeError(f"cannot serialise {type(obj).__name__}")


CSV_COLUMNS = ("law", "path", "s", "t", "residual", "pass")


def to_csv(reports: Iterable[LawReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rep in reports:
        for r in rep.rows:
            w.writerow([r.law, r.path, _csv_float(r.s), _csv_float(r.t), _csv_float(r.residual),
                        "true" if r.passed else "false"])
    return buf.getvalue()


def _csv_float(x: float) -> str:
    return format_float(x).strip('"')
