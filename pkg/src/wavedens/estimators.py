"""Linear and thresholded wavelet density estimators from lattice samples.

Coefficients are stored per (pattern, level) as dense arrays over the
window of translations that the sample actually touches.  The window is
data dependent, so unbounded samples are handled without a fixed domain.
Accumulation scatters each point into the L^d translations whose support
contains it, which costs O(n L^d) per level and pattern.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .wavelets import WaveletBasis, tensor_basis


@dataclass
class CoefArray:
    """Coefficients c[gamma] for gamma in origin + [0, values.shape)."""

    origin: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.origin = np.asarray(self.origin, dtype=np.int64)

    def get(self, gamma) -> float:
        idx = np.asarray(gamma, dtype=np.int64) - self.origin
        if np.any(idx < 0) or np.any(idx >= self.values.shape):
            return 0.0
        return float(self.values[tuple(idx)])

    def items(self):
        for idx in zip(*np.nonzero(self.values)):
            yield tuple(int(v) for v in np.asarray(idx) + self.origin), float(self.values[idx])

    def as_dict(self) -> dict:
        return dict(self.items())

    def sq_sum(self) -> float:
        return float(np.sum(self.values**2))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def map(self, fn) -> "CoefArray":
        return CoefArray(self.origin.copy(), fn(self.values))


def as_points(sample) -> np.ndarray:
    """Flatten a lattice sample (n1, ..., nN, d) or list of points to shape (n, d)."""
    pts = np.asarray(sample, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    elif pts.ndim > 2:
        pts = pts.reshape(-1, pts.shape[-1])
    if pts.shape[0] == 0:
        raise ValueError("sample is empty")
    return pts


def _coverings(points, basis, j):
    tops, vals = [], []
    for i in range(basis.d):
        t, v = basis.covering(points[:, i], j)
        tops.append(t)
        vals.append(v)
    return tops, vals


def empirical_level(sample, basis: WaveletBasis, j: int, patterns=None, weights=None) -> dict:
    """Empirical coefficients n^-1 sum_s b(Z(s)) for every pattern at level j.

    With ``weights`` the sum becomes sum_i w_i b(x_i), which turns the
    same scatter loop into a quadrature rule.  Returns {pattern:
    CoefArray}; pattern (0,...,0) is the father.
    """
    if j < 0:
        raise ValueError("level must be non-negative")
    pts = as_points(sample)
    n, d = pts.shape
    # unit weights and one division at the end keep counts exact
    w0 = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    norm = float(n) if weights is None else 1.0
    if d != basis.d:
        raise ValueError(f"sample dimension {d} does not match basis dimension {basis.d}")
    if patterns is None:
        patterns = [(0,) * d] + basis.mothers
    tops, vals = _coverings(pts, basis, j)
    width = max(basis.L, 1)
    origin = np.array([t.min() - (width - 1) for t in tops])
    shape = tuple(int(t.max() - o + 1) for t, o in zip(tops, origin))
    out = {}
    for pattern in patterns:
        acc = np.zeros(int(np.prod(shape)))
        for m in itertools.product(range(width), repeat=d):
            w = w0
            for i in range(d):
                w = w * vals[i][pattern[i], :, m[i]]
            flat = np.ravel_multi_index(tuple(tops[i] - m[i] - origin[i] for i in range(d)), shape)
            acc += np.bincount(flat, weights=w, minlength=acc.size)
        out[tuple(pattern)] = CoefArray(origin.copy(), (acc / norm).reshape(shape))
    return out


def project_density(pdf, basis: WaveletBasis, j: int, box, order: int = 4, refine: int = 1) -> dict:
    """Coefficients <f, b> at level j by tensor Gauss-Legendre quadrature.

    Cells have side 2^-(j+refine) aligned with the dyadic grid, so Haar
    pieces never straddle a cell and the rule is exact for polynomial f
    of degree below 2 * order on each cell.  ``box`` bounds supp f.
    """
    lo, hi = (np.broadcast_to(np.asarray(v, dtype=float), (basis.d,)) for v in box)
    h = 2.0 ** -(j + refine)
    t, wt = np.polynomial.legendre.leggauss(order)
    axes, weights = [], []
    for a, b in zip(lo, hi):
        edges = np.arange(math.floor(a / h), math.ceil(b / h)) * h
        axes.append((edges[:, None] + h * (t[None, :] + 1) / 2).ravel())
        weights.append(np.tile(wt * h / 2, edges.size))
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, basis.d)
    w = functools.reduce(np.multiply.outer, weights).ravel()
    return empirical_level(mesh, basis, j, weights=w * np.asarray(pdf(mesh), dtype=float))


def empirical_father_coeffs(sample, basis, j) -> CoefArray:
    d = basis.d
    return empirical_level(sample, basis, j, [(0,) * d])[(0,) * d]


def empirical_mother_coeffs(sample, basis, k, j) -> CoefArray:
    pattern = basis.mother_pattern(k)
    return empirical_level(sample, basis, j, [pattern])[pattern]


class Decomposition:
    """Empirical coefficients of one sample, computed lazily per level."""

    def __init__(self, sample, basis: WaveletBasis):
        self.points = as_points(sample)
        self.basis = basis
        self._levels = {}

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def level(self, j: int) -> dict:
        if j not in self._levels:
            self._levels[j] = empirical_level(self.points, self.basis, j)
        return self._levels[j]

    def father(self, j: int) -> CoefArray:
        return self.level(j)[(0,) * self.basis.d]

    def details(self, j: int) -> dict:
        return {p: c for p, c in self.level(j).items() if any(p)}


@dataclass
class DensityEstimate:
    """Sum of coefficient arrays times basis functions.

    ``terms`` is a list of (pattern, level, CoefArray); the terms must
    belong to one orthonormal system (a father level plus mother levels at
    or above it), which makes the squared L2 norm the sum of squared
    coefficients.
    """

    basis: WaveletBasis
    terms: list
    kind: str = "linear"
    params: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.basis.d

    @property
    def max_level(self) -> int:
        return max(j for _, j, _ in self.terms)

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """Value at one point (shape (d,)) or many points (n, d)."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1 and x.shape[0] == self.d
        pts = np.atleast_2d(x) if single else as_points(x)
        out = np.zeros(pts.shape[0])
        width = max(self.basis.L, 1)
        cache = {}
        for pattern, j, coef in self.terms:
            if j not in cache:
                cache[j] = _coverings(pts, self.basis, j)
            tops, vals = cache[j]
            shape = np.array(coef.values.shape)
            for m in itertools.product(range(width), repeat=self.d):
                idx = np.stack([tops[i] - m[i] - coef.origin[i] for i in range(self.d)])
                ok = np.all((idx >= 0) & (idx < shape[:, None]), axis=0)
                if not ok.any():
                    continue
                w = np.ones(int(ok.sum()))
                for i in range(self.d):
                    w = w * vals[i][pattern[i], ok, m[i]]
                out[ok] += w * coef.values[tuple(idx[:, ok])]
        return float(out[0]) if single else out

    def evaluate_grid(self, axes) -> np.ndarray:
        """Values on the tensor grid axes[0] x ... x axes[d-1] (separable products)."""
        axes = [np.asarray(a, dtype=float) for a in axes]
        if self.d == 2:
            return self._evaluate_grid_2d(axes)
        out = np.zeros(tuple(a.size for a in axes))
        for pattern, j, coef in self.terms:
            mats = [_basis_matrix(self.basis, axes[i], j, pattern[i], coef.origin[i],
                                  coef.values.shape[i]) for i in range(self.d)]
            block = coef.values
            for i, A in enumerate(mats):
                # contract axis i of the coefficient block with the matrix
                block = np.moveaxis(np.tensordot(A, block, axes=([1], [i])), 0, i)
            out += block
        return out

    def _evaluate_grid_2d(self, axes):
        # all terms as one product [A_1 .. A_T] blockdiag(C_t) [B_1 .. B_T]^T
        left, right, blocks = [], [], []
        for pattern, j, coef in self.terms:
            w0, w1 = coef.values.shape
            left.append(_basis_matrix(self.basis, axes[0], j, pattern[0], coef.origin[0], w0))
            right.append(_basis_matrix(self.basis, axes[1], j, pattern[1], coef.origin[1], w1))
            blocks.append(coef.values)
        if not blocks:
            return np.zeros((axes[0].size, axes[1].size))
        return (np.hstack(left) @ block_diag(*blocks)) @ np.hstack(right).T

    def coefficient_l2_sq(self) -> float:
        return float(sum(c.sq_sum() for _, _, c in self.terms))

    def support_box(self):
        """Bounding box of the supports of all nonzero terms."""
        lo = np.full(self.d, np.inf)
        hi = np.full(self.d, -np.inf)
        for _, j, coef in self.terms:
            nz = np.nonzero(coef.values)
            if not nz[0].size:
                continue
            g_lo = np.array([a.min() for a in nz]) + coef.origin
            g_hi = np.array([a.max() for a in nz]) + coef.origin
            lo = np.minimum(lo, g_lo / 2.0**j)
            hi = np.maximum(hi, (g_hi + self.basis.L) / 2.0**j)
        if not np.all(np.isfinite(lo)):
            return np.zeros(self.d), np.zeros(self.d)
        return lo, hi

    def kept_count(self) -> int:
        return int(sum(np.count_nonzero(c.values) for p, _, c in self.terms if any(p)))

    def to_dict(self) -> dict:
        terms = []
        for pattern, j, coef in self.terms:
            k = 0 if not any(pattern) else self.basis.mother_index(pattern)
            for gamma, value in coef.items():
                terms.append({"k": k, "j": j, "gamma": list(gamma), "value": value})
        return {"basis": self.basis.descriptor(), "kind": self.kind,
                "params": self.params, "coefficients": terms}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "DensityEstimate":
        b = data["basis"]
        basis = tensor_basis(b["wavelet"], b["d"], depth=b.get("depth", 12))
        groups = {}
        for t in data["coefficients"]:
            pattern = (0,) * basis.d if t["k"] == 0 else basis.mother_pattern(t["k"])
            groups.setdefault((pattern, t["j"]), []).append((tuple(t["gamma"]), t["value"]))
        terms = []
        for (pattern, j), entries in groups.items():
            g = np.array([e[0] for e in entries])
            origin = g.min(axis=0)
            vals = np.zeros(tuple(g.max(axis=0) - origin + 1))
            for gamma, v in entries:
                vals[tuple(np.array(gamma) - origin)] = v
            terms.append((pattern, j, CoefArray(origin, vals)))
        return cls(basis, terms, data.get("kind", "linear"), data.get("params", {}))


def _basis_matrix(basis, x, j, e, origin, width):
    """A[a, c] = 2^{j/2} xi_e(2^j x[a] - (origin + c))."""
    top, vals = basis.covering(x, j)
    A = np.zeros((x.size, width))
    rows = np.arange(x.size)
    for m in range(vals.shape[2]):
        col = top - m - origin
        ok = (col >= 0) & (col < width)
        A[rows[ok], col[ok]] = vals[e, ok, m]
    return A


def _decomposition(sample, basis):
    return sample if isinstance(sample, Decomposition) else Decomposition(sample, basis)


def linear_estimate(sample, basis, j: int) -> DensityEstimate:
    """Projection estimate sum_gamma theta_hat[j, gamma] Phi_{j, gamma}."""
    dec = _decomposition(sample, basis)
    return DensityEstimate(dec.basis, [((0,) * dec.basis.d, j, dec.father(j))],
                           "linear", {"j": j})


def relative_thresholds(sample, basis, multiple: float, j_lo: int, j_hi: int,
                        scope: str = "level") -> dict:
    """Thresholds as a multiple of the largest empirical detail magnitude.

    With ``scope="level"`` the maximum is taken separately on every level
    j_lo <= j < j_hi; ``scope="global"`` uses one maximum over all of them.
    """
    if multiple < 0:
        raise ValueError("threshold multiple must be non-negative")
    dec = _decomposition(sample, basis)
    peaks = {j: max(c.max_abs() for c in dec.details(j).values()) for j in range(j_lo, j_hi)}
    if scope == "global" and peaks:
        top = max(peaks.values())
        peaks = {j: top for j in peaks}
    elif scope != "level" and scope != "global":
        raise ValueError(f"unknown threshold scope {scope!r}")
    return {j: multiple * p for j, p in peaks.items()}


def _shrunk_estimate(dec, j0, j1, shrink, kind, params):
    if j0 > j1:
        raise ValueError(f"need j0 <= j1, got j0={j0}, j1={j1}")
    if j0 < 0:
        raise ValueError("levels must be non-negative")
    terms = [((0,) * dec.basis.d, j0, dec.father(j0))]
    for j in range(j0, j1):
        for pattern, coef in dec.details(j).items():
            terms.append((pattern, j, coef.map(lambda v, j=j: shrink(v, j))))
    return DensityEstimate(dec.basis, terms, kind, params)


def hard_threshold_estimate(sample, basis, j0: int, j1: int, thresholds) -> DensityEstimate:
    """Coarse projection at j0 plus details with |v| > lambda_j for j0 <= j < j1.

    ``thresholds`` maps level to lambda_j, or is a single number used on
    every level.  Ties are dropped (strict inequality).
    """
    dec = _decomposition(sample, basis)
    lam = thresholds if isinstance(thresholds, dict) else {j: float(thresholds) for j in range(j0, j1)}
    missing = [j for j in range(j0, j1) if j not in lam]
    if missing:
        raise ValueError(f"no threshold for levels {missing}")
    return _shrunk_estimate(dec, j0, j1, lambda v, j: np.where(np.abs(v) > lam[j], v, 0.0),
                            "hard", {"j0": j0, "j1": j1,
                                     "thresholds": {str(j): float(lam[j]) for j in range(j0, j1)}})


def relative_hard_estimate(sample, basis, j0: int, j1: int, multiple: float,
                           scope: str = "level") -> DensityEstimate:
    dec = _decomposition(sample, basis)
    lam = relative_thresholds(dec, basis, multiple, j0, j1, scope)
    est = hard_threshold_estimate(dec, basis, j0, j1, lam)
    est.params.update(multiple=multiple, scope=scope)
    return est


def soft_threshold(v, delta):
    return np.sign(v) * np.maximum(np.abs(v) - delta, 0.0)


def soft_threshold_estimate(sample, basis, j0: int, j1: int, delta: float) -> DensityEstimate:
    if delta < 0:
        raise ValueError("soft threshold must be non-negative")
    dec = _decomposition(sample, basis)
    return _shrunk_estimate(dec, j0, j1, lambda v, j: soft_threshold(v, delta),
                            "soft", {"j0": j0, "j1": j1, "delta": delta})


def evaluate(estimate, x):
    return estimate.evaluate(x)


def evaluate_grid(estimate, axes):
    return estimate.evaluate_grid(axes)
