"""Report assembly, JSON/CSV serialisation and the published report schema."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from typing import Any, Optional

import jsonschema

from .interval import Interval
from .logvalue import LogValue

SCHEMA_VERSION = 1

_LOG_OBJECT = {
    "type": "object",
    "required": ["ln"],
    "properties": {
        "ln": {"type": "string"},
        "exact_form": {"type": "array", "items": {"type": "array", "items": {"type": "integer"},
                                                    "minItems": 3, "maxItems": 3}},
        "const": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
    },
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "fastkhintchine report",
    "type": "object",
    "required": ["schema_version", "command", "config", "series", "summary",
                 "assertions", "provenance", "status"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"type": "string"},
        "config": {"type": "object"},
        "series": {"type": "array", "items": {"type": "object", "required": ["n"],
                                               "properties": {"n": {"type": "integer"}}}},
        "summary": {"type": "object"},
        "assertions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "passed"],
                "properties": {
                    "name": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "witness": {},
                    "reproducer": {"type": "object"},
                    "detail": {"type": "string"},
                },
                "if": {"properties": {"passed": {"const": False}}},
                "then": {"required": ["reproducer"]},
            },
        },
        "provenance": {"type": "object", "required": ["precision_bits"]},
        "status": {"enum": ["ok", "assertion-failed"]},
    },
    "$defs": {"logvalue": _LOG_OBJECT},
}


def to_jsonable(x: Any, digits: int = 30) -> Any:
    """Convert package values into plain JSON data.

    LogValues become ``{"ln": ..., "exact_form": ...}`` objects, intervals
    become ``[lo, hi]`` decimal strings, and rationals exact strings.
    """
    if isinstance(x, LogValue):
        r = x.rational
        if r is not None and r.denominator == 1 and r.numerator.bit_length() <= 53:
            return int(r)
        return x.describe(digits)
    if isinstance(x, Interval):
        return list(x.to_strings(min(digits, 20)))
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, bool) or x is None or isinstance(x, (str, int)):
        return x
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, dict):
        return {str(k): to_jsonable(v, digits) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v, digits) for v in x]
    return str(x)


class Report:
    """Mutable builder for one CLI/suite report."""

    def __init__(self, command: str, config: dict, precision_bits: int = 256):
        self.command = command
        self.config = dict(config)
        self.series: list[dict] = []
        self.summary: dict = {}
        self.assertions: list[dict] = []
        self.provenance: dict = {"precision_bits": precision_bits}
        # decimal digits printed for enclosures, capped to keep reports readable
        self.digits = max(8, min(40, int(precision_bits * 0.30103)))

    def check(self, name: str, passed: bool, witness=None, detail: Optional[str] = None,
              reproducer: Optional[dict] = None) -> bool:
        entry: dict = {"name": name, "passed": bool(passed)}
        if not passed:
            entry["witness"] = witness
            entry["reproducer"] = reproducer or {"command": self.command, "config": self.config,
                                                 "index": witness}
        if detail:
            entry["detail"] = detail
        self.assertions.append(entry)
        return bool(passed)

    def absorb(self, trace_props: list[dict], prefix: str = "", reproducer: Optional[dict] = None) -> None:
        for p in trace_props:
            self.check(prefix + p["name"], p["passed"], p.get("witness"), p.get("detail"), reproducer)

    @property
    def ok(self) -> bool:
        return all(a["passed"] for a in self.assertions)

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "series": self.series,
            "summary": self.summary,
            "assertions": self.assertions,
            "provenance": self.provenance,
            "status": "ok" if self.ok else "assertion-failed",
        }
        return to_jsonable(d, self.digits)


def dumps(report: Report) -> str:
    """Deterministic JSON text (sorted keys, fixed separators)."""
    return json.dumps(report.to_dict(), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def validate(data: dict) -> None:
    jsonschema.validate(data, REPORT_SCHEMA)


def series_csv(report: Report) -> str:
    """The report's per-index series as CSV; indices must be consecutive integers.

    Interval cells are split into ``<col>_lo`` and ``<col>_hi`` columns and
    log-domain values are written as their decimal ``ln``.
    """
    rows = [_flatten(r) for r in report.to_dict()["series"]]
    if not rows:
        return "n\n"
    idx = [r["n"] for r in rows]
    if idx != list(range(idx[0], idx[0] + len(idx))):
        raise ValueError("series indices must be strictly increasing without gaps")
    cols = ["n"] + sorted({k for r in rows for k in r} - {"n"})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow(["" if r.get(c) is None else r[c] for c in cols])
    return buf.getvalue()


def _flatten(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, list) and len(v) == 2 and all(isinstance(e, str) for e in v):
            out[k + "_lo"], out[k + "_hi"] = v
        elif isinstance(v, dict) and "ln" in v:
            out[k + "_ln"] = v["ln"]
        elif isinstance(v, (list, dict)):
            out[k] = json.dumps(v, sort_keys=True)
        else:
            out[k] = v
    return out
