"""CSV and JSON artifacts: lattice samples, evaluation grids, estimates."""

from __future__ import annotations

import csv
import json

import numpy as np

from .errors import SampleParseError

SAMPLE_HEADER = ["site_row", "site_col", "y1", "y2"]


def write_sample_csv(path, sample: np.ndarray) -> None:
    """One row per site (1-based coordinates, row-major) with its point."""
    sample = np.asarray(sample, dtype=float)
    n1, n2, _ = sample.shape
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SAMPLE_HEADER)
        for a in range(n1):
            for b in range(n2):
                y = sample[a, b]
                w.writerow([a + 1, b + 1, repr(float(y[0])), repr(float(y[1]))])


def read_sample_csv(path) -> np.ndarray:
    """Parse a sample file back into an (n1, n2, 2) array."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != SAMPLE_HEADER:
        raise SampleParseError(f"expected header {','.join(SAMPLE_HEADER)}", row=1)
    sites, values = [], []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 4:
            raise SampleParseError(f"expected 4 fields, got {len(row)}", row=i)
        try:
            s = (int(row[0]), int(row[1]))
            y = (float(row[2]), float(row[3]))
        except ValueError as exc:
            raise SampleParseError(str(exc), row=i) from None
        if min(s) < 1 or not np.all(np.isfinite(y)):
            raise SampleParseError("site must be positive and values finite", row=i)
        sites.append(s)
        values.append(y)
    if not sites:
        raise SampleParseError("no data rows", row=2)
    sites = np.array(sites)
    n1, n2 = sites.max(axis=0)
    out = np.full((n1, n2, 2), np.nan)
    seen = np.zeros((n1, n2), dtype=bool)
    for r, (s, y) in enumerate(zip(sites, values), start=2):
        if seen[s[0] - 1, s[1] - 1]:
            raise SampleParseError(f"duplicate site {tuple(s)}", row=r)
        seen[s[0] - 1, s[1] - 1] = True
        out[s[0] - 1, s[1] - 1] = y
    if not seen.all():
        raise SampleParseError("sites do not fill a rectangular lattice")
    return out


def write_grid_csv(path, axes, values) -> None:
    """Rows (x1, x2, value) for a two-dimensional tensor grid."""
    x1, x2 = (np.asarray(a) for a in axes)
    values = np.asarray(values)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x1", "x2", "value"])
        for a, u in enumerate(x1):
            for b, v in enumerate(x2):
                w.writerow([f"{u:.6f}", f"{v:.6f}", f"{values[a, b]:.10g}"])


def write_json(path, data) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)
