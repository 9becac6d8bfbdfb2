"""Result reports and their CSV / JSON serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any

from . import __version__


@dataclass
class Assertion:
    name: str
    expected: Any
    observed: Any
    tolerance: Any
    passed: bool
    provenance: str   # THEORY, DERIVED or TRIVIAL, plus a short pointer

    def row(self) -> dict:
        return {"name": self.name, "expected": self.expected, "observed": self.observed,
                "tolerance": self.tolerance, "pass": self.passed, "provenance": self.provenance}


@dataclass
class Report:
    command: str
    config: dict
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    assertions: list[Assertion] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    timestamp: str | None = None

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def stamp(self) -> None:
        self.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")


def _cell(value: Any) -> str:
    """CSV cell text: integers in full, floats with 6 decimals."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.6f}"
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (list, tuple)):
        return " ".join(_cell(v) for v in value)
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "value"):  # enums
        return value.value
    return str(value)


def emit(report: Report, fmt: str) -> bytes:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([_cell(row.get(c)) for c in report.columns])
        return buf.getvalue().encode("utf-8")
    if fmt == "json":
        obj = {"tool": "padic-cf", "version": __version__, "command": report.command,
               "config": _jsonable(report.config), "columns": report.columns,
               "rows": [_jsonable(r) for r in report.rows],
               "summary": _jsonable(report.summary),
               "assertions": [_jsonable(a.row()) for a in report.assertions],
               "passed": report.passed}
        if report.timestamp is not None:
            obj["timestamp"] = report.timestamp
        return (json.dumps(obj, indent=2) + "\n").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")
