"""Commanded-vs-observed pose statistics.

Ingests pose-pair CSVs (motion-capture exports or synthetic data from the
workspace module) and computes the positioning-error report: L2 error mean
and spread, per-axis mean absolute errors, and the linear trend of error
against commanded radial distance from the Z axis.

CSV schema (header required, units mm):

    cx,cy,cz,ox,oy,oz[,tag]

Per-axis statistics are means of absolute errors (not RMS); the radial
trend is fitted on the commanded radial distance.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import TipPose
from .errors import EmptyFile, InsufficientData, MissingColumn, NonNumericField

_REQUIRED_COLUMNS = ("cx", "cy", "cz", "ox", "oy", "oz")

# External hardware measurement campaign for the reference build; shown in
# text reports for scale only -- the synthetic slop model is not fitted to
# reproduce these absolute values.
HARDWARE_REFERENCE = {
    "mean_l2": (2.93, 1.30),
    "x": (1.88, 1.10),
    "y": (1.79, 1.15),
    "z": (0.79, 0.61),
}


@dataclass(frozen=True)
class PosePairRecord:
    commanded: TipPose
    observed: TipPose
    tag: Optional[str] = None

    def __post_init__(self):
        values = self.commanded.as_tuple() + self.observed.as_tuple()
        if not all(math.isfinite(v) for v in values):
            raise ValueError("pose pair contains non-finite values")

    @property
    def l2_error(self) -> float:
        c, o = self.commanded, self.observed
        return math.dist(c.as_tuple(), o.as_tuple())

    @property
    def commanded_radius(self) -> float:
        return math.hypot(self.commanded.x, self.commanded.y)


@dataclass(frozen=True)
class ErrorReport:
    mean_l2: float
    std_l2: float
    x_mean: float
    x_std: float
    y_mean: float
    y_std: float
    z_mean: float
    z_std: float
    radial_trend_slope: float  # mm of L2 error per mm of radial distance
    radial_trend_r: float      # Pearson correlation of the trend
    n: int


def ingest_csv(path) -> list[PosePairRecord]:
    """Load pose pairs from a CSV file; reports bad rows by line number."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        for column in _REQUIRED_COLUMNS:
            if column not in header:
                raise MissingColumn(f"{path}: missing required column {column!r}")
        idx = {name: header.index(name) for name in _REQUIRED_COLUMNS}
        tag_idx = header.index("tag") if "tag" in header else None

        records = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                values = [float(row[idx[name]]) for name in _REQUIRED_COLUMNS]
            except (ValueError, IndexError):
                raise NonNumericField(
                    f"{path}: non-numeric or short row at line {line_no}",
                    row=line_no) from None
            tag = row[tag_idx].strip() if tag_idx is not None and tag_idx < len(row) else None
            records.append(PosePairRecord(
                commanded=TipPose(*values[:3]),
                observed=TipPose(*values[3:]),
                tag=tag or None,
            ))
    if not records:
        raise EmptyFile(f"{path}: no data rows")
    return records


def write_pose_pairs_csv(records: list[PosePairRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(_REQUIRED_COLUMNS) + ["tag"])
        for rec in records:
            c, o = rec.commanded, rec.observed
            writer.writerow([f"{v:.17g}" for v in
                             (c.x, c.y, c.z, o.x, o.y, o.z)] + [rec.tag or ""])


def error_report(records: list[PosePairRecord]) -> ErrorReport:
    """Positioning-error statistics over pose pairs (needs n >= 2)."""
    if len(records) < 2:
        raise InsufficientData(f"need at least 2 records, got {len(records)}")
    cmd = np.array([r.commanded.as_tuple() for r in records])
    obs = np.array([r.observed.as_tuple() for r in records])
    diff = cmd - obs
    l2 = np.linalg.norm(diff, axis=1)
    ax = np.abs(diff)
    radius = np.hypot(cmd[:, 0], cmd[:, 1])

    if float(np.ptp(radius)) > 0.0 and float(np.std(l2)) > 0.0:
        slope = float(np.polyfit(radius, l2, 1)[0])
        trend_r = float(np.corrcoef(radius, l2)[0, 1])
    else:
        slope, trend_r = 0.0, 0.0

    return ErrorReport(
        mean_l2=float(l2.mean()), std_l2=float(l2.std()),
        x_mean=float(ax[:, 0].mean()), x_std=float(ax[:, 0].std()),
        y_mean=float(ax[:, 1].mean()), y_std=float(ax[:, 1].std()),
        z_mean=float(ax[:, 2].mean()), z_std=float(ax[:, 2].std()),
        radial_trend_slope=slope, radial_trend_r=trend_r,
        n=len(records),
    )


def render_report(report: ErrorReport, format: str = "text") -> str:
    """Serialize a report. Formats: text (human table), json, csv.

    JSON schema: keys exactly {mean_l2, std_l2, x, y, z, slope, r, n};
    x/y/z map to {"mean": float, "std": float}.
    CSV schema: one header row
    mean_l2,std_l2,x_mean,x_std,y_mean,y_std,z_mean,z_std,slope,r,n
    followed by one data row.
    """
    if format == "json":
        doc = {
            "mean_l2": report.mean_l2,
            "std_l2": report.std_l2,
            "x": {"mean": report.x_mean, "std": report.x_std},
            "y": {"mean": report.y_mean, "std": report.y_std},
            "z": {"mean": report.z_mean, "std": report.z_std},
            "slope": report.radial_trend_slope,
            "r": report.radial_trend_r,
            "n": report.n,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["mean_l2", "std_l2", "x_mean", "x_std", "y_mean",
                         "y_std", "z_mean", "z_std", "slope", "r", "n"])
        writer.writerow([f"{v:.9g}" for v in (
            report.mean_l2, report.std_l2, report.x_mean, report.x_std,
            report.y_mean, report.y_std, report.z_mean, report.z_std,
            report.radial_trend_slope, report.radial_trend_r)] + [report.n])
        return buf.getvalue()
    if format == "text":
        ref = HARDWARE_REFERENCE
        lines = [
            f"positioning error over {report.n} pose pairs (mm)",
            f"  L2    {report.mean_l2:7.3f} +/- {report.std_l2:.3f}",
            f"  x     {report.x_mean:7.3f} +/- {report.x_std:.3f}",
            f"  y     {report.y_mean:7.3f} +/- {report.y_std:.3f}",
            f"  z     {report.z_mean:7.3f} +/- {report.z_std:.3f}",
            f"  radial trend: {report.radial_trend_slope:.4f} mm/mm "
            f"(pearson r = {report.radial_trend_r:.3f})",
            "  per-axis values are mean absolute errors; trend fitted on "
            "commanded radial distance",
            "  hardware reference row (external measurement, for scale only; "
            "synthetic model is not fitted to it):",
            f"  L2 {ref['mean_l2'][0]} +/- {ref['mean_l2'][1]}   "
            f"x {ref['x'][0]} +/- {ref['x'][1]}   "
            f"y {ref['y'][0]} +/- {ref['y'][1]}   "
            f"z {ref['z'][0]} +/- {ref['z'][1]}",
        ]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {format!r}")
