"""Positive-part normalisation, integrated squared error and the validation criterion."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateEstimateError
from .estimators import DensityEstimate, as_points, linear_estimate, Decomposition


@dataclass(frozen=True)
class QuadratureGrid:
    """Midpoint rule on a box split into equal cells."""

    lo: tuple
    hi: tuple
    shape: tuple

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        object.__setattr__(self, "shape", tuple(int(v) for v in self.shape))
        if any(h <= l for l, h in zip(self.lo, self.hi)) or any(m < 1 for m in self.shape):
            raise ValueError("degenerate quadrature grid")

    @classmethod
    def default(cls, d: int = 2) -> "QuadratureGrid":
        return cls((-0.5,) * d, (1.5,) * d, (512,) * d)

    @property
    def d(self) -> int:
        return len(self.shape)

    @property
    def steps(self) -> np.ndarray:
        return (np.array(self.hi) - np.array(self.lo)) / np.array(self.shape)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.steps))

    @property
    def axes(self) -> list:
        return [l + (np.arange(m) + 0.5) * h for l, m, h in zip(self.lo, self.shape, self.steps)]

    @property
    def volume(self) -> float:
        return float(np.prod(np.array(self.hi) - np.array(self.lo)))

    def nodes(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.d)

    def integrate(self, values) -> float:
        return float(np.sum(values) * self.cell_volume)

    def extended_to(self, lo, hi) -> "QuadratureGrid":
        """Grow the box in whole cells until it contains [lo, hi]."""
        steps = self.steps
        new_lo, new_hi, shape = [], [], []
        for i in range(self.d):
            below = max(0, math.ceil((self.lo[i] - lo[i]) / steps[i] - 1e-9))
            above = max(0, math.ceil((hi[i] - self.hi[i]) / steps[i] - 1e-9))
            new_lo.append(self.lo[i] - below * steps[i])
            new_hi.append(self.hi[i] + above * steps[i])
            shape.append(self.shape[i] + below + above)
        return QuadratureGrid(tuple(new_lo), tuple(new_hi), tuple(shape))


def grid_for(estimate, grid: QuadratureGrid | None = None) -> QuadratureGrid:
    """Grid covering both the estimate's support and ``grid`` (default box)."""
    grid = grid or QuadratureGrid.default(estimate.d)
    lo, hi = estimate.support_box()
    return grid.extended_to(lo, hi)


def grid_values(estimate, grid: QuadratureGrid) -> np.ndarray:
    return estimate.evaluate_grid(grid.axes)


@dataclass
class NormalizedEstimate:
    """f_hat = max(f_tilde, 0) / S with S the integral of the positive part."""

    wrapped: DensityEstimate
    S: float
    grid: QuadratureGrid
    kind: str = "normalized"
    # normalised values on ``grid``, kept to avoid re-evaluation
    grid_cache: np.ndarray | None = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.wrapped.d

    @property
    def basis(self):
        return self.wrapped.basis

    def support_box(self):
        return self.wrapped.support_box()

    def evaluate(self, x):
        return np.maximum(self.wrapped.evaluate(x), 0.0) / self.S

    __call__ = evaluate

    def evaluate_grid(self, axes):
        if self.grid_cache is not None and _same_axes(axes, self.grid.axes):
            return self.grid_cache
        return np.maximum(self.wrapped.evaluate_grid(axes), 0.0) / self.S


def normalize(estimate, grid: QuadratureGrid | None = None, tol: float = 1e-12) -> NormalizedEstimate:
    """Positive part rescaled to integrate to one on the grid."""
    grid = grid_for(estimate, grid)
    pos = np.maximum(grid_values(estimate, grid), 0.0)
    S = grid.integrate(pos)
    if not S > tol:
        raise DegenerateEstimateError(f"positive part integrates to {S:g}")
    return NormalizedEstimate(estimate, S, grid, grid_cache=pos / S)


def _same_axes(a, b) -> bool:
    return len(a) == len(b) and all(x.shape == y.shape and np.array_equal(x, y) for x, y in zip(a, b))


def l2_norm_sq(estimate, grid: QuadratureGrid | None = None) -> float:
    """Squared L2 norm: Parseval for raw estimates, quadrature otherwise."""
    if isinstance(estimate, DensityEstimate) and grid is None:
        return estimate.coefficient_l2_sq()
    grid = grid_for(estimate, grid or getattr(estimate, "grid", None))
    return grid.integrate(grid_values(estimate, grid) ** 2)


def _pdf_on_grid(pdf, grid):
    return np.asarray(pdf(grid.nodes()), dtype=float).reshape(grid.shape)


def ise(estimate, pdf, grid: QuadratureGrid | None = None) -> float:
    """Integrated squared error against a density callable on (n, d) points."""
    grid = grid_for(estimate, grid)
    diff = grid_values(estimate, grid) - _pdf_on_grid(pdf, grid)
    return grid.integrate(diff**2)


def ver_exact(estimate, pdf, grid: QuadratureGrid | None = None) -> float:
    """Ver = int f_hat^2 - 2 int f_hat f, so that ise = ver + ||f||^2."""
    grid = grid_for(estimate, grid)
    v = grid_values(estimate, grid)
    return grid.integrate(v**2 - 2 * v * _pdf_on_grid(pdf, grid))


def ver_hat(estimate, validation, grid: QuadratureGrid | None = None) -> float:
    """int f_hat^2 - 2 * mean of f_hat over the validation points."""
    pts = as_points(validation)
    return l2_norm_sq(estimate, grid) - 2.0 * float(np.mean(estimate.evaluate(pts)))


def quadrant_regions(lo=(0.0, 0.0), hi=(1.0, 1.0)) -> list:
    """2 x 2 equal boxes of [lo, hi]; the outer ones extend to infinity."""
    mid = [(a + b) / 2 for a, b in zip(lo, hi)]
    cuts = [(-np.inf, m, np.inf) for m in mid]
    return [((cuts[0][a], cuts[1][b]), (cuts[0][a + 1], cuts[1][b + 1]))
            for a in range(2) for b in range(2)]


def _in_region(points, region):
    lo, hi = np.asarray(region[0]), np.asarray(region[1])
    return np.all((points >= lo) & (points < hi), axis=1)


def region_ver_hat(estimate, validation, region, grid: QuadratureGrid | None = None) -> float:
    """Validation criterion with both terms restricted to a box region."""
    grid = grid_for(estimate, grid)
    nodes = grid.nodes()
    vals = grid_values(estimate, grid).ravel()
    quad = float(np.sum(vals[_in_region(nodes, region)] ** 2) * grid.cell_volume)
    pts = as_points(validation)
    inside = pts[_in_region(pts, region)]
    hits = float(np.sum(estimate.evaluate(inside))) if inside.shape[0] else 0.0
    return quad - 2.0 * hits / pts.shape[0]


def select_primary_level(train, validation, basis, regions=None, levels=range(0, 5),
                         grid: QuadratureGrid | None = None, tol: float = 1e-12):
    """Primary level j* = min over regions of the per-region best linear level.

    Returns (j_star, per-region levels).  Ties within ``tol`` go to the
    smaller level.
    """
    levels = sorted(levels)
    if not levels:
        raise ValueError("no candidate levels")
    regions = regions if regions is not None else quadrant_regions()
    dec = Decomposition(train, basis)
    scores = np.empty((len(regions), len(levels)))
    for b, j in enumerate(levels):
        est = linear_estimate(dec, basis, j)
        g = grid_for(est, grid)
        for a, region in enumerate(regions):
            scores[a, b] = region_ver_hat(est, validation, region, g)
    per_region = []
    for row in scores:
        best = row.min()
        per_region.append(levels[int(np.nonzero(row <= best + tol)[0][0])])
    return min(per_region), per_region


@dataclass
class VerReport:
    """Mean and standard deviation of the validation criterion per configuration."""

    rows: dict = field(default_factory=dict)

    def add(self, sample_size, j, estimator, threshold, values):
        key = (int(sample_size), int(j), str(estimator), float(threshold))
        if key in self.rows:
            raise ValueError(f"duplicate configuration {key}")
        v = np.asarray(values, dtype=float)
        std = float(v.std(ddof=1)) if v.size > 1 else 0.0
        self.rows[key] = (float(v.mean()), std, int(v.size))

    def mean(self, sample_size, j, estimator, threshold=0.0) -> float:
        return self.rows[(sample_size, j, estimator, float(threshold))][0]

    def minima(self) -> set:
        """Keys attaining the smallest mean for each sample size (boldface cells)."""
        best = {}
        for key, (m, _, _) in self.rows.items():
            col = key[0]
            if col not in best or m < best[col][1]:
                best[col] = (key, m)
        return {k for k, _ in best.values()}

    def argmin_level(self, sample_size, estimator="linear", threshold=0.0) -> int:
        cands = [(m, k[1]) for k, (m, _, _) in self.rows.items()
                 if k[0] == sample_size and k[2] == estimator and k[3] == threshold]
        return min(cands)[1]

    def write_csv(self, path):
        marks = self.minima()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sample_size", "j", "estimator", "threshold", "mean", "std", "is_min"])
            for key in sorted(self.rows):
                m, s, _ = self.rows[key]
                w.writerow([key[0], key[1], key[2], f"{key[3]:g}", f"{m:.6f}", f"{s:.6f}",
                            int(key in marks)])
