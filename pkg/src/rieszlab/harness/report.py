"""Experiment reports with reproducible on-disk form.

`report.json` and the series CSV are the determinism contract: two runs with
the same config and seed must produce identical bytes.  Everything volatile
(wall-clock runtime, library versions) goes to the `run_meta.json` sidecar
instead.  Floats are serialized with `repr`, which is shortest-round-trip and
stable for a given platform.
"""
from __future__ import annotations

import csv
import json
import math
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

VERDICTS = ("bounded", "unbounded-trend", "vacuous", "inconclusive")


def trend_verdict(values, drift_tol: float = 0.25, min_scales: int = 4) -> str:
    """Classify a sequence of sup-type constants measured across scales.

    All-zero or empty evidence is vacuous.  A monotone increasing tail over
    at least `min_scales` scales that is still moving by `drift_tol` per step
    is an unbounded trend; a final step drifting less than `drift_tol` is
    bounded; anything else is inconclusive.  These are trend labels, not
    claims about limits.
    """
    vals = [float(v) for v in values]
    if not vals or all(v == 0.0 for v in vals):
        return "vacuous"
    if any(not math.isfinite(v) for v in vals):
        return "unbounded-trend" if not math.isfinite(vals[-1]) else "inconclusive"
    if len(vals) < 2:
        return "inconclusive"
    drift = abs(vals[-1] - vals[-2]) / max(abs(vals[-2]), 1e-300)
    tail = vals[-min_scales:]
    monotone = len(vals) >= min_scales and all(b > a for a, b in zip(tail, tail[1:]))
    if monotone and drift >= drift_tol:
        return "unbounded-trend"
    if drift < drift_tol:
        return "bounded"
    return "inconclusive"


def jsonable(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)
    return str(v)


@dataclass
class Series:
    """One named curve: x positions, values, and its constant param columns."""

    name: str
    xs: list
    values: list
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.xs) != len(self.values):
            raise ValueError("series xs and values must have equal length")


@dataclass
class ExperimentReport:
    experiment: str
    params: dict
    checks: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    series: list = field(default_factory=list)
    verdict: str = "inconclusive"
    notes: list = field(default_factory=list)
    expectation: Optional[str] = None
    runtime_seconds: float = 0.0

    def add_series(self, name: str, xs, values, **params) -> None:
        self.series.append(Series(name, list(xs), list(values), dict(params)))

    def add_check(self, name: str, passed: bool, constant=None, detail: str = "") -> None:
        self.checks.append({"name": name, "passed": bool(passed),
                            "constant": constant, "detail": detail})
        if not passed:
            self.notes.append(f"hypothesis check failed: {name} ({detail})")

    @property
    def verdict_matches(self) -> bool:
        return self.expectation is None or self.verdict == self.expectation

    def to_json_dict(self) -> dict:
        return jsonable({
            "experiment": self.experiment,
            "params": self.params,
            "checks": self.checks,
            "constants": self.constants,
            "series": [{"name": s.name, "params": s.params,
                        "points": [[x, v] for x, v in zip(s.xs, s.values)]}
                       for s in self.series],
            "verdict": self.verdict,
            "expectation": self.expectation,
            "verdict_matches": self.verdict_matches,
            "notes": self.notes,
        })

    def write(self, outdir) -> dict:
        """Write report.json, the series CSV, and the runtime sidecar.

        Returns {logical name: path} for everything written.
        """
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        written = {}

        report_path = outdir / "report.json"
        report_path.write_text(json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n")
        written["report"] = report_path

        csv_path = outdir / f"{self.experiment}_series.csv"
        self._write_series_csv(csv_path)
        written["series"] = csv_path

        meta_path = outdir / "run_meta.json"
        meta_path.write_text(json.dumps({
            "runtime_seconds": self.runtime_seconds,
            "python": platform.python_version(),
            "numpy": np.__version__,
        }, indent=2, sort_keys=True) + "\n")
        written["meta"] = meta_path
        return written

    def _write_series_csv(self, path) -> None:
        param_cols = sorted({k for s in self.series for k in s.params})
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["experiment", *param_cols, "series", "x", "value"])
            for s in self.series:
                fixed = [_cell(s.params.get(k)) for k in param_cols]
                for x, v in zip(s.xs, s.values):
                    writer.writerow([self.experiment, *fixed, s.name, _cell(x), _cell(v)])
