"""Besov sequence norms and the level / threshold formulas of the rate theory."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateEstimateError, HypothesisError
from .wavelets import as_dilation

INF = math.inf


@dataclass(frozen=True)
class BesovParams:
    """Smoothness s, integrability p and q, norm bound K, support box A (None if unbounded)."""

    s: float
    p: float = 2.0
    q: float = 2.0
    K: float = 1.0
    A: tuple | None = None

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError("smoothness s must be positive")
        for name in ("p", "q"):
            if not getattr(self, name) >= 1:
                raise ValueError(f"{name} must lie in [1, inf]")
        if self.K < 0:
            raise ValueError("norm bound K must be non-negative")

    def check_estimation(self):
        """Raise unless s > 1/p, the standing assumption of the estimation results."""
        if self.s <= 1.0 / self.p:
            raise HypothesisError(f"need s > 1/p, got s={self.s}, p={self.p}")


def _lp(values, p):
    v = np.abs(np.ravel(values))
    if not v.size:
        return 0.0
    if math.isinf(p):
        return float(v.max())
    return float(np.sum(v**p) ** (1.0 / p))


def _collect(coeffs):
    """Return (father arrays, {(pattern, j): array}) from an estimate or term list."""
    terms = getattr(coeffs, "terms", coeffs)
    fathers, details = [], {}
    for pattern, j, c in terms:
        vals = getattr(c, "values", c)
        if any(pattern):
            details.setdefault((tuple(pattern), j), []).append(np.ravel(vals))
        else:
            fathers.append(np.ravel(vals))
    details = {key: np.concatenate(v) for key, v in details.items()}
    return fathers, details


def besov_seq_norm(coeffs, params: BesovParams, dilation=2, J: int | None = None) -> float:
    """Sequence norm ||theta||_lp + (sum_{k,j} |M|^{j(s+1/2-1/p)q} ||upsilon_{k,j}||_lp^q)^{1/q}.

    ``coeffs`` is a DensityEstimate or a list of (pattern, j, values)
    terms.  Levels above ``J`` are ignored; by default all stored levels
    are used.  Infinite p or q switch to sup norms.
    """
    fathers, details = _collect(coeffs)
    if not fathers and not details:
        warnings.warn("empty coefficient set, norm is zero", stacklevel=2)
        return 0.0
    M = as_dilation(dilation, params_dim(coeffs, details))
    s, p, q = params.s, params.p, params.q
    coarse = _lp(np.concatenate(fathers), p) if fathers else 0.0
    expo = s + 0.5 - (0.0 if math.isinf(p) else 1.0 / p)
    parts = [M.det ** (j * expo) * _lp(v, p)
             for (pattern, j), v in details.items() if J is None or j <= J]
    if not parts:
        return coarse
    parts = np.array(parts)
    fine = parts.max() if math.isinf(q) else float(np.sum(parts**q) ** (1.0 / q))
    return coarse + float(fine)


def params_dim(coeffs, details) -> int:
    basis = getattr(coeffs, "basis", None)
    if basis is not None:
        return basis.d
    if details:
        return len(next(iter(details))[0])
    return 1


def holder_embedding_s(r: float, d: int, dilation=2) -> float:
    """Besov smoothness reached by an r-Hoelder function: r ln(zeta_min) / (d ln(zeta_max))."""
    if not 0 < r <= 1:
        raise ValueError("Hoelder exponent must lie in (0, 1]")
    M = as_dilation(dilation, d)
    return r * math.log(M.zeta_min) / (d * math.log(M.zeta_max))


@dataclass(frozen=True)
class RateParams:
    p_prime: float
    s_prime: float
    eps: float
    alpha: float
    j0: int
    j1: int
    K0: float
    n: int
    det: int
    lambda_bar: dict = field(default_factory=dict)

    def threshold(self, j: int) -> float:
        return self.K0 * math.sqrt(j / self.n)


def effective_smoothness(s, p, p_prime) -> float:
    return s + min(1.0 / p_prime - 1.0 / p, 0.0)


def rate_exponent(s, p, p_prime) -> tuple:
    """(eps, alpha) with eps = sp - (p'-p)/2 deciding the regime."""
    eps = s * p - (p_prime - p) / 2.0
    if eps >= 0:
        alpha = s / (2 * s + 1)
    else:
        alpha = effective_smoothness(s, p, p_prime) / (2 * s + 1 - 2.0 / p)
    return eps, alpha


def floor_level(target: float, det: int) -> int:
    """Largest j >= 0 with det^j <= target."""
    if target < 1:
        return 0
    j = int(math.floor(math.log(target) / math.log(det)))
    # correct float rounding at exact powers
    while det ** (j + 1) <= target * (1 + 1e-12):
        j += 1
    while j > 0 and det**j > target * (1 + 1e-12):
        j -= 1
    return j


def rate_params(bp: BesovParams, p_prime: float, n: int, dilation=2, d: int = 2) -> RateParams:
    """Levels j0 <= j1, threshold constant K0 and thresholds for the hard estimator."""
    bp.check_estimation()
    if n < 2:
        raise ValueError("need at least two observations")
    M = as_dilation(dilation, d)
    s_prime = effective_smoothness(bp.s, bp.p, p_prime)
    eps, alpha = rate_exponent(bp.s, bp.p, p_prime)
    if alpha >= 0.5:
        raise DegenerateEstimateError(f"alpha={alpha} >= 1/2 leaves K0 undefined")
    j0 = floor_level(n ** (1 - 2 * alpha), M.det)
    j1 = max(j0, floor_level(n ** (alpha / s_prime), M.det))
    K0 = math.sqrt(p_prime * math.log(M.det) / (1 - 2 * alpha))
    lam = {j: K0 * math.sqrt(j / n) for j in range(j0, j1)}
    return RateParams(p_prime, s_prime, eps, alpha, j0, j1, K0, n, M.det, lam)


def linear_level(s_prime: float, n: int, dilation=2, d: int = 2) -> int:
    """Level j with |M|^j <= n^{1/(2s'+1)} < |M|^{j+1}."""
    if s_prime <= 0:
        raise ValueError("effective smoothness must be positive")
    M = as_dilation(dilation, d)
    return floor_level(n ** (1.0 / (2 * s_prime + 1)), M.det)


def differentiable_level(n: int, d: int = 2, dilation=2, j_offset: int = 0) -> int:
    """Level for densities with bounded gradient: offset + floor(ln n / (2 ln zmin + d ln zmax))."""
    if n < 1:
        raise ValueError("need n >= 1")
    M = as_dilation(dilation, d)
    denom = 2 * math.log(M.zeta_min) + d * math.log(M.zeta_max)
    return j_offset + int(math.floor(math.log(n) / denom + 1e-12))
