"""CSV emission for sweep results.

The main table always has exactly the columns in ``HEADER``. Phase-boundary
rows and figure annotations go to ``<stem>.boundary.csv`` and
``<stem>.annotations.csv`` next to it.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

from .sweep import SweepResult

HEADER = ("gamma", "T", "horizon", "min_pt_eig", "neg_avg", "verdict")
BOUNDARY_HEADER = ("gamma", "T_uc_numeric", "T_lc_numeric", "monotone", "T_lb",
                   "log_argument", "error")


def fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".9g")


def _write(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def sidecar(path: str | Path, kind: str) -> Path:
    p = Path(path)
    return p.with_name(f"{p.stem}.{kind}.csv")


def write_sweep_csv(result: SweepResult, path: str | Path) -> list[Path]:
    """Write the result table plus any boundary/annotation sidecars; return all paths."""
    path = Path(path)
    _write(path, HEADER, [
        (fmt(r.gamma), fmt(r.T), fmt(r.horizon), fmt(r.min_pt_eig), fmt(r.neg_avg), r.verdict)
        for r in result.rows
    ])
    written = [path]
    if result.boundaries:
        p = sidecar(path, "boundary")
        _write(p, BOUNDARY_HEADER, [
            (fmt(b.gamma), fmt(b.T_uc_numeric), fmt(b.T_lc_numeric), str(b.monotone).lower(),
             fmt(b.T_lb), fmt(b.log_argument), b.error)
            for b in result.boundaries
        ])
        written.append(p)
    if result.annotations:
        p = sidecar(path, "annotations")
        _write(p, ("name", "value"),
               [(k, fmt(v)) for k, v in sorted(result.annotations.items())])
        written.append(p)
    return written
