"""Rectangular index sets on Z^N with the four-nearest-neighbour graph.

Sites use 1-based coordinates and are always enumerated in row-major
order; the samplers and the estimators rely on that order for
reproducible random streams.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSplitError, InvalidShapeError, UnsupportedError

Site = tuple


@dataclass(frozen=True)
class LatticeShape:
    """Box I_n = {s : 1 <= s_i <= n_i} in Z^N."""

    dims: tuple

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if not dims or any(n < 1 for n in dims):
            raise InvalidShapeError(f"lattice dimensions must be positive, got {self.dims!r}")
        object.__setattr__(self, "dims", dims)

    @property
    def N(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    def contains(self, s) -> bool:
        return len(s) == self.N and all(1 <= si <= ni for si, ni in zip(s, self.dims))

    def check_ratio(self, c_prime: float) -> bool:
        """Warn when min(n_i) < c_prime * max(n_i); returns whether the ratio holds."""
        ok = min(self.dims) >= c_prime * max(self.dims)
        if not ok:
            warnings.warn(f"lattice {self.dims} violates side ratio {c_prime}", stacklevel=2)
        return ok


def as_shape(shape) -> LatticeShape:
    if isinstance(shape, LatticeShape):
        return shape
    if isinstance(shape, (int, np.integer)):
        return LatticeShape((int(shape),))
    return LatticeShape(tuple(shape))


def build_index_set(shape) -> list:
    """All sites of the box in row-major order."""
    shape = as_shape(shape)
    return list(itertools.product(*(range(1, n + 1) for n in shape.dims)))


def four_neighbors(s, shape) -> set:
    """Sites at L1 distance one inside the box (free boundary)."""
    shape = as_shape(shape)
    s = tuple(int(v) for v in s)
    if not shape.contains(s):
        raise IndexError(f"site {s} outside lattice {shape.dims}")
    out = set()
    for axis in range(shape.N):
        for step in (-1, 1):
            t = list(s)
            t[axis] += step
            if 1 <= t[axis] <= shape.dims[axis]:
                out.add(tuple(t))
    return out


def parity_mask(shape) -> np.ndarray:
    """Boolean array, True on sites with even coordinate sum (first conclique)."""
    shape = as_shape(shape)
    grids = np.indices(shape.dims).sum(axis=0)
    # 0-based index sum has the same parity as the 1-based coordinate sum for N=2
    return (grids + shape.N) % 2 == 0


@dataclass(frozen=True)
class ConcliquePair:
    c1: frozenset
    c2: frozenset


def concliques(shape) -> ConcliquePair:
    """Checkerboard split of a planar lattice into two concliques."""
    shape = as_shape(shape)
    if shape.N != 2:
        raise UnsupportedError("concliques are implemented for two-dimensional lattices only")
    sites = build_index_set(shape)
    c1 = frozenset(s for s in sites if sum(s) % 2 == 0)
    c2 = frozenset(s for s in sites if sum(s) % 2 == 1)
    return ConcliquePair(c1, c2)


def train_extent(shape, fraction: float = 0.9) -> tuple:
    """Per-axis side length floor(fraction * n_i) of the training block."""
    shape = as_shape(shape)
    if not 0 < fraction < 1:
        raise DegenerateSplitError(f"fraction must lie in (0, 1), got {fraction}")
    # tolerance guards against 0.9*20 = 17.999...
    ext = tuple(int(math.floor(fraction * n + 1e-9)) for n in shape.dims)
    if any(e < 1 for e in ext) or ext == shape.dims:
        raise DegenerateSplitError(
            f"fraction {fraction} on {shape.dims} leaves an empty training or validation set")
    return ext


def partition_train_validate(shape, fraction: float = 0.9):
    """Split into the lower rectangular block and its L-shaped complement.

    Returns two lists of sites in row-major order.
    """
    ext = train_extent(shape, fraction)
    train, validate = [], []
    for s in build_index_set(shape):
        (train if all(si <= e for si, e in zip(s, ext)) else validate).append(s)
    return train, validate


def train_mask(shape, fraction: float = 0.9) -> np.ndarray:
    """Boolean array over the box marking the training block."""
    shape = as_shape(shape)
    ext = train_extent(shape, fraction)
    mask = np.zeros(shape.dims, dtype=bool)
    mask[tuple(slice(0, e) for e in ext)] = True
    return mask


def adjacency_matrix(shape, torus: bool = False):
    """Sparse four-neighbour adjacency H in row-major site order."""
    import scipy.sparse as sp

    shape = as_shape(shape)
    eyes = [sp.identity(n, format="csr") for n in shape.dims]
    H = None
    for axis, n in enumerate(shape.dims):
        path = sp.diags([np.ones(n - 1), np.ones(n - 1)], [-1, 1], shape=(n, n), format="lil")
        if torus and n > 2:
            path[0, n - 1] = 1
            path[n - 1, 0] = 1
        factors = [eyes[a] if a != axis else path.tocsr() for a in range(shape.N)]
        term = factors[0]
        for f in factors[1:]:
            term = sp.kron(term, f, format="csr")
        H = term if H is None else H + term
    return H.tocsr()
