"""Experiment result container with deterministic CSV and JSON output.

CSV carries the per-sample records and must be byte-identical across runs
with the same config: cells are written with round-trip ``repr`` of Python
scalars and RFC-4180 CRLF line endings. JSON carries the summary, the full
config echo (enough to reproduce the run bit-identically), the package
version, and wall-clock time; keys are sorted. Wall-clock lives only in
the JSON so it never breaks CSV determinism.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from ._version import __version__

__all__ = ["ExperimentReport", "five_number_summary"]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (np.bool_, bool)):
        return str(bool(value))
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    if isinstance(value, (np.integer, int)):
        return str(int(value))
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


@dataclass
class ExperimentReport:
    """Per-sample rows plus a summary, tagged with config and version."""

    name: str
    description: str
    config: dict
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    version: str = __version__
    wallclock_s: float = 0.0

    def add_row(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} cells, got {len(values)}")
        self.rows.append(tuple(values))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([_cell(v) for v in row])

    def json_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "config": _jsonable(self.config),
            "summary": _jsonable(self.summary),
            "columns": list(self.columns),
            "row_count": len(self.rows),
            "version": self.version,
            "wallclock_s": float(self.wallclock_s),
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def five_number_summary(values) -> dict:
    """min/q1/median/q3/max with linear-interpolation quartiles."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return {"min": None, "q1": None, "median": None, "q3": None, "max": None}
    q = np.percentile(arr, [0, 25, 50, 75, 100])
    return {"min": q[0], "q1": q[1], "median": q[2], "q3": q[3], "max": q[4]}
