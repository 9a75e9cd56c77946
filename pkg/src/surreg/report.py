"""Aggregation of evaluation runs into a delimited + rendered report.

Evaluation JSON files (one per trained model) are grouped by
(method, gamma); each group is summarized as mean and sample standard
deviation (ddof=1, zero for singleton groups).  ``write_report`` emits a
markdown table plus two sibling files next to it: the same aggregate as
CSV, and a rendered figure.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidSpec

__all__ = [
    "RunRecord",
    "AggregateRow",
    "load_eval_files",
    "aggregate",
    "render_markdown",
    "render_csv",
    "write_report",
]

_REQUIRED = ("method", "gamma", "clean_mse", "robust_mse")


@dataclass(frozen=True)
class RunRecord:
    method: str
    gamma: float
    norm: str
    clean_mse: float
    robust_mse: float


@dataclass(frozen=True)
class AggregateRow:
    method: str
    gamma: float
    runs: int
    clean_mean: float
    clean_sd: float
    robust_mean: float
    robust_sd: float


def load_eval_files(paths) -> list[RunRecord]:
    records = []
    for p in paths:
        with open(p) as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidSpec(f"{p}: not valid JSON ({exc})") from None
        missing = [k for k in _REQUIRED if k not in obj]
        if missing:
            raise InvalidSpec(f"{p}: missing keys {missing}")
        records.append(
            RunRecord(
                method=str(obj["method"]),
                gamma=float(obj["gamma"]),
                norm=str(obj.get("norm", "")),
                clean_mse=float(obj["clean_mse"]),
                robust_mse=float(obj["robust_mse"]),
            )
        )
    return records


def _mean_sd(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values)
    sd = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), sd


def aggregate(records: list[RunRecord]) -> list[AggregateRow]:
    if not records:
        raise InvalidSpec("no evaluation records to aggregate")
    groups: dict[tuple[str, float], list[RunRecord]] = {}
    for rec in records:
        groups.setdefault((rec.method, rec.gamma), []).append(rec)
    rows = []
    for (method, gamma), group in sorted(groups.items()):
        cm, cs = _mean_sd([g.clean_mse for g in group])
        rm, rs = _mean_sd([g.robust_mse for g in group])
        rows.append(AggregateRow(method, gamma, len(group), cm, cs, rm, rs))
    return rows


def render_markdown(rows: list[AggregateRow]) -> str:
    out = [
        "| method | gamma | runs | clean mse | worst-case mse |",
        "| --- | ---: | ---: | ---: | ---: |",
    ]
    for r in rows:
        out.append(
            f"| {r.method} | {r.gamma:g} | {r.runs} "
            f"| {r.clean_mean:.6g} ± {r.clean_sd:.3g} "
            f"| {r.robust_mean:.6g} ± {r.robust_sd:.3g} |"
        )
    return "\n".join(out) + "\n"


def render_csv(rows: list[AggregateRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["method", "gamma", "runs", "clean_mean", "clean_sd", "robust_mean", "robust_sd"]
    )
    for r in rows:
        writer.writerow(
            [r.method, repr(r.gamma), r.runs]
            + [repr(v) for v in (r.clean_mean, r.clean_sd, r.robust_mean, r.robust_sd)]
        )
    return buf.getvalue()


def write_report(rows: list[AggregateRow], out_path) -> list[str]:
    """Write markdown plus CSV and figure siblings; returns the paths written."""
    from .figures import comparison_figure, save_figure

    out = Path(out_path)
    csv_path = out.with_suffix(".csv")
    png_path = out.with_suffix(".png")
    out.write_text(render_markdown(rows))
    csv_path.write_text(render_csv(rows))
    save_figure(comparison_figure(rows), png_path)
    return [str(out), str(csv_path), str(png_path)]
