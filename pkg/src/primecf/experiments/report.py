"""Experiment reports and their CSV/JSON serialisation."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

VERDICTS = ("pass", "fail", "report-only")
CSV_HEADER = "experiment,statistic,n,trajectories,seed,value,reference,err_low,err_high,verdict"


@dataclass(frozen=True)
class Row:
    """One statistic.  ``err_low``/``err_high`` bound the acceptance band or
    interval the verdict was judged against (NaN when there is none)."""

    experiment: str
    statistic: str
    n: int
    trajectories: int
    seed: int
    value: float
    reference: float = math.nan
    err_low: float = math.nan
    err_high: float = math.nan
    verdict: str = "report-only"

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    rows: list[Row] = field(default_factory=list)
    version: str = ""
    wall_clock: float = math.nan  # seconds; kept out of files so reruns are byte-identical

    @property
    def failed(self) -> bool:
        return any(r.verdict == "fail" for r in self.rows)

    def row(self, statistic: str) -> Row:
        for r in self.rows:
            if r.statistic == statistic:
                return r
        raise KeyError(statistic)


def _num(x) -> str:
    if isinstance(x, float):
        return "" if math.isnan(x) else format(x, ".17g")
    return str(x)


def to_csv(report: ExperimentReport) -> str:
    lines = [CSV_HEADER]
    for r in report.rows:
        lines.append(",".join(_num(v) for v in asdict(r).values()))
    return "\n".join(lines) + "\n"


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def to_json(report: ExperimentReport) -> str:
    doc = {
        "experiment": report.experiment,
        "version": report.version,
        "config": report.config,
        "rows": [{k: _json_safe(v) for k, v in asdict(r).items()} for r in report.rows],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def write_report(report: ExperimentReport, path, fmt: str = "csv") -> Path:
    """Write ``report`` as CSV or JSON; I/O errors name the path."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    text = to_csv(report) if fmt == "csv" else to_json(report)
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return path
