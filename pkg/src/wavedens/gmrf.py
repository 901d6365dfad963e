"""Conclique-based Gibbs sampling of coupled Gaussian Markov random fields.

Each component Z_i lives on the same planar lattice and has the
conditional law

    Z(s) | Z(-s) ~ N(alpha + eta * sum_{t in Ne(s)} (Z(t) - alpha), var(s))

with var(s) chosen so that every marginal is standard normal.  A sweep
updates the even checkerboard given the odd one and then the odd one
given the new even values.  The five components share one correlated
Gaussian innovation per site and half-sweep (a Gaussian copula), which is
what couples them.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import multivariate_normal, norm

from .errors import InadmissibleEtaError, InvalidShapeError, UnsupportedError
from .lattice import LatticeShape, adjacency_matrix, as_shape, parity_mask

PAPER_ETA = (0.2, -0.1, -0.22, 0.2, 0.22)


def adjacency_eigen_bounds(shape, torus: bool = False) -> tuple:
    """Smallest and largest eigenvalue of the four-neighbour adjacency matrix.

    The free n1 x n2 grid is the Cartesian product of two paths, whose
    spectra are 2 cos(pi k / (n + 1)); the torus uses cycles,
    2 cos(2 pi k / n).
    """
    shape = as_shape(shape)
    if shape.N != 2:
        raise UnsupportedError("eigen bounds are implemented for planar lattices")
    lo = hi = 0.0
    for n in shape.dims:
        if torus and n > 2:
            ev = 2 * np.cos(2 * np.pi * np.arange(n) / n)
        elif torus:
            # a 2-cycle degenerates to a single edge
            ev = np.array([-1.0, 1.0]) if n == 2 else np.array([0.0])
        else:
            ev = 2 * np.cos(np.pi * np.arange(1, n + 1) / (n + 1))
        lo += ev.min()
        hi += ev.max()
    return float(lo), float(hi)


def admissible_eta_range(h0: float, hm: float) -> tuple:
    """Open interval (1/h0, 1/hm) on which I - eta*H stays invertible."""
    if not (h0 < 0 < hm):
        raise ValueError(f"need h0 < 0 < hm for a bipartite lattice, got ({h0}, {hm})")
    return 1.0 / h0, 1.0 / hm


def check_eta(shape, eta: float) -> None:
    lo, hi = admissible_eta_range(*adjacency_eigen_bounds(shape))
    if not lo < eta < hi:
        raise InadmissibleEtaError(eta, (lo, hi))


def _block_cg(A, B, tol=1e-12, maxiter=2000):
    """Conjugate gradients for the SPD system A X = B, all columns at once."""
    X = np.zeros_like(B)
    R = B - A @ X
    P = R.copy()
    rs = np.einsum("ij,ij->j", R, R)
    target = tol**2 * np.einsum("ij,ij->j", B, B)
    for _ in range(maxiter):
        if np.all(rs <= target):
            break
        AP = A @ P
        step = rs / np.einsum("ij,ij->j", P, AP)
        X += P * step
        R -= AP * step
        rs_new = np.einsum("ij,ij->j", R, R)
        P = R + P * (rs_new / np.where(rs > 0, rs, 1.0))
        rs = rs_new
    return X


def _path_eigen(n: int):
    """Orthonormal eigenvectors (columns) and eigenvalues of the path graph on n nodes."""
    k = np.arange(1, n + 1)
    vecs = np.sqrt(2.0 / (n + 1)) * np.sin(np.pi * np.outer(k, k) / (n + 1))
    return vecs, 2 * np.cos(np.pi * k / (n + 1))


def _inverse_diagonal(dims: tuple, eta: float, method: str) -> np.ndarray:
    shape = LatticeShape(dims)
    n = shape.size
    if method == "spectral":
        (u1, l1), (u2, l2) = (_path_eigen(m) for m in dims)
        weights = 1.0 / (1.0 - eta * (l1[:, None] + l2[None, :]))
        return (u1**2) @ weights @ (u2**2).T
    H = adjacency_matrix(shape)
    if method == "dense":
        return np.diag(np.linalg.inv(np.eye(n) - eta * H.toarray())).reshape(dims)
    if method == "cg":
        import scipy.sparse as sp

        A = (sp.identity(n, format="csr") - eta * H).tocsr()
        diag = np.empty(n)
        for start in range(0, n, 512):
            stop = min(n, start + 512)
            cols = np.arange(stop - start)
            E = np.zeros((n, stop - start))
            E[start + cols, cols] = 1.0
            diag[start:stop] = _block_cg(A, E)[start + cols, cols]
        return diag.reshape(dims)
    raise ValueError(f"unknown method {method!r}")


@functools.lru_cache(maxsize=64)
def _conditional_variances(dims: tuple, eta: float, method: str) -> np.ndarray:
    check_eta(LatticeShape(dims), eta)
    if eta == 0.0:
        return np.ones(dims)
    return 1.0 / _inverse_diagonal(dims, eta, method)


def conditional_variances(shape, eta: float, method: str = "spectral") -> np.ndarray:
    """Per-site variances 1 / [(I - eta H)^{-1}]_ss, shaped like the lattice.

    ``method`` picks how the diagonal of the inverse is obtained:
    "spectral" uses the sine eigenbasis of the free grid (exact, O(n^2)),
    "dense" inverts the full matrix, "cg" runs block conjugate gradients
    on the sparse system.  Results are cached and read-only.
    """
    shape = as_shape(shape)
    if shape.N != 2:
        raise UnsupportedError("conditional variances are implemented for planar lattices")
    out = _conditional_variances(shape.dims, float(eta), method)
    out.setflags(write=False)
    return out


def conditional_update(neighbor_values, eta: float, cond_var: float, u: float,
                       mean: float = 0.0, neighbor_means=None) -> float:
    """Draw Z(s) given its neighbours, using the uniform u through the normal quantile."""
    nb = np.asarray(neighbor_values, dtype=float)
    nb_mean = mean if neighbor_means is None else np.asarray(neighbor_means, dtype=float)
    loc = mean + eta * float(np.sum(nb - nb_mean))
    return float(loc + np.sqrt(cond_var) * norm.ppf(u))


def copula_coupled_uniforms(R, g) -> np.ndarray:
    """Map standard normal draws g (..., k) to uniforms with Gaussian copula R."""
    L = np.linalg.cholesky(np.asarray(R, dtype=float))
    return norm.cdf(np.asarray(g, dtype=float) @ L.T)


def default_copula(rho12: float = 0.1, rho34: float = 0.1) -> np.ndarray:
    R = np.eye(5)
    R[0, 1] = R[1, 0] = rho12
    R[2, 3] = R[3, 2] = rho34
    return R


@dataclass
class GmrfSpec:
    """One component: constant mean and dependence parameter eta on a lattice."""

    shape: LatticeShape
    eta: float
    mean: float = 0.0

    def __post_init__(self):
        self.shape = as_shape(self.shape)
        check_eta(self.shape, self.eta)

    @property
    def cond_var(self) -> np.ndarray:
        return conditional_variances(self.shape, self.eta)


@dataclass
class MultiField:
    """Several coupled lattice fields; ``values`` has shape (k, n1, n2)."""

    specs: list
    R: np.ndarray
    values: np.ndarray = field(default=None)

    def __post_init__(self):
        self.R = np.asarray(self.R, dtype=float)
        k = len(self.specs)
        if self.R.shape != (k, k):
            raise ValueError(f"copula matrix must be {k}x{k}")
        if not np.allclose(self.R, self.R.T) or not np.allclose(np.diag(self.R), 1.0):
            raise ValueError("copula matrix must be symmetric with unit diagonal")
        try:
            self.chol = np.linalg.cholesky(self.R)
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError("copula matrix is not positive definite") from exc
        dims = {s.shape.dims for s in self.specs}
        if len(dims) != 1:
            raise InvalidShapeError("all components must share one lattice")
        if self.shape.N != 2:
            raise UnsupportedError("the conclique sampler needs a planar lattice")

    @property
    def shape(self) -> LatticeShape:
        return self.specs[0].shape

    @property
    def eta(self) -> np.ndarray:
        return np.array([s.eta for s in self.specs])

    def copy(self) -> "MultiField":
        out = MultiField(self.specs, self.R.copy())
        out.values = None if self.values is None else self.values.copy()
        return out


def make_multifield(shape, eta=PAPER_ETA, R=None, mean=0.0) -> MultiField:
    shape = as_shape(shape)
    specs = [GmrfSpec(shape, float(e), mean) for e in eta]
    if R is None:
        R = default_copula() if len(specs) == 5 else np.eye(len(specs))
    return MultiField(specs, R)


def _neighbor_sum(z: np.ndarray) -> np.ndarray:
    """Sum over the free-boundary four-neighbourhood for arrays (k, n1, n2)."""
    nb = np.zeros_like(z)
    nb[:, 1:, :] += z[:, :-1, :]
    nb[:, :-1, :] += z[:, 1:, :]
    nb[:, :, 1:] += z[:, :, :-1]
    nb[:, :, :-1] += z[:, :, 1:]
    return nb


def _degree(dims) -> np.ndarray:
    return _neighbor_sum(np.ones((1,) + tuple(dims)))[0]


def run_chain(multi: MultiField, iterations: int, rng, init: bool = True) -> MultiField:
    """Run conclique sweeps and return a new MultiField with the final state.

    Random stream layout, fixed so that runs are reproducible: when
    ``init`` is true (or no state exists) the initial field is drawn as
    ``standard_normal((k, n1, n2))``; each half-sweep then draws
    ``standard_normal((|C|, k))`` for the sites of conclique C in
    row-major order.
    """
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    rng = np.random.default_rng(rng)
    out = multi.copy()
    dims = multi.shape.dims
    k = len(multi.specs)
    if init or out.values is None:
        out.values = rng.standard_normal((k,) + dims)
    z = out.values
    eta = multi.eta[:, None]
    means = np.array([s.mean for s in multi.specs])[:, None]
    sd = np.stack([np.sqrt(s.cond_var) for s in multi.specs])
    deg = _degree(dims)
    masks = [parity_mask(multi.shape), ~parity_mask(multi.shape)]
    sd_m = [sd[:, m] for m in masks]
    deg_m = [deg[m] for m in masks]
    L = multi.chol
    for _ in range(iterations):
        for m, sdc, dgc in zip(masks, sd_m, deg_m):
            innov = rng.standard_normal((int(m.sum()), k)) @ L.T
            nb = _neighbor_sum(z)[:, m]
            loc = means + eta * (nb - dgc * means)
            z[:, m] = loc + sdc * innov.T
    return out


def iid_reference(shape, R, rng, k: int = None) -> np.ndarray:
    """Independent-in-space sample with cross-component correlation R, shape (k, n1, n2)."""
    shape = as_shape(shape)
    R = np.asarray(R, dtype=float)
    k = R.shape[0] if k is None else k
    L = np.linalg.cholesky(R)
    g = np.random.default_rng(rng).standard_normal((shape.size, k)) @ L.T
    return g.T.reshape((k,) + shape.dims)


def transform_to_target(z: np.ndarray) -> np.ndarray:
    """Map five standard normal fields to mixture draws Y, shape (n1, n2, 2).

    S = 1{Phi(Z5) > 1/2} selects between U = (Phi(Z1), Phi(Z2)) and
    X = 0.5 + 0.2 (Z3, Z4).
    """
    z = np.asarray(z, dtype=float)
    s = norm.cdf(z[4]) > 0.5
    u = norm.cdf(z[0:2])
    x = 0.5 + 0.2 * z[2:4]
    y = np.where(s[None], x, u)
    return np.moveaxis(y, 0, -1)


def target_pdf(x, rho: float = 0.1) -> np.ndarray:
    """Density 0.5 * 1_[0,1]^2 + 0.5 * N((0.5, 0.5), 0.04 [[1, rho], [rho, 1]])."""
    if not abs(rho) < 1:
        raise ValueError(f"correlation must satisfy |rho| < 1, got {rho}")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    inside = np.all((x >= 0) & (x <= 1), axis=-1)
    cov = 0.04 * np.array([[1.0, rho], [rho, 1.0]])
    g = multivariate_normal(mean=[0.5, 0.5], cov=cov).pdf(x)
    out = 0.5 * inside + 0.5 * np.reshape(g, inside.shape)
    return float(out[0]) if single else out


def target_l2_norm_sq(rho: float = 0.1) -> float:
    """Closed form of the squared L2 norm of ``target_pdf``."""
    cov = 0.04 * np.array([[1.0, rho], [rho, 1.0]])
    cdf = multivariate_normal(mean=[0.5, 0.5], cov=cov).cdf
    mass = cdf([1, 1]) - cdf([0, 1]) - cdf([1, 0]) + cdf([0, 0])
    gauss_sq = 1.0 / (4 * np.pi * np.sqrt(np.linalg.det(cov)))
    return 0.25 + 0.5 * mass + 0.25 * gauss_sq


def simulate_target(shape, rng, eta=PAPER_ETA, R=None, iterations: int = 1000,
                    iid: bool = False) -> np.ndarray:
    """Draw one lattice of mixture points, shape (n1, n2, 2)."""
    shape = as_shape(shape)
    R = default_copula() if R is None else np.asarray(R, dtype=float)
    if iid:
        z = iid_reference(shape, R, rng)
    else:
        z = run_chain(make_multifield(shape, eta, R), iterations, rng).values
    return transform_to_target(z)
