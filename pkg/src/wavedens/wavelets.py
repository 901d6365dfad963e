"""Tensor-product wavelet bases on R^d with dilation matrix 2I.

One-dimensional filters follow the convention

    phi(x) = sqrt(2) * sum_g h[g] phi(2x - g)
    psi(x) = sqrt(2) * sum_g g[g] phi(2x - g),   g[k] = (-1)^k h[N-1-k]

so supp phi = supp psi = [0, L] with L = N - 1 for an N-tap filter.  The
d-dimensional father is the d-fold product of phi; mother k (1 <= k < 2^d)
is the product whose factor i is psi when bit i of k (most significant
first) is set and phi otherwise.  For d = 2 this gives k=1: phi x psi,
k=2: psi x phi, k=3: psi x psi.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .errors import UnsupportedError


@dataclass(frozen=True)
class FilterBank:
    name: str
    h: np.ndarray
    g: np.ndarray = field(default=None)

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        object.__setattr__(self, "h", h)
        if self.g is None:
            n = len(h)
            g = np.array([(-1) ** k * h[n - 1 - k] for k in range(n)])
            object.__setattr__(self, "g", g)
        else:
            object.__setattr__(self, "g", np.asarray(self.g, dtype=float))

    @property
    def L(self) -> int:
        """Support length: supp phi is contained in [0, L]."""
        return len(self.h) - 1


def haar_filters() -> FilterBank:
    return FilterBank("haar", np.array([1.0, 1.0]) / math.sqrt(2))


def daubechies4_filters() -> FilterBank:
    """Four-tap Daubechies filter (two vanishing moments, 'D4' / 'db2')."""
    r3 = math.sqrt(3)
    h = np.array([1 + r3, 3 + r3, 3 - r3, 1 - r3]) / (4 * math.sqrt(2))
    return FilterBank("d4", h)


FILTERS = {"haar": haar_filters, "d4": daubechies4_filters}


@dataclass(frozen=True)
class DilationMatrix:
    """Integer expanding matrix preserving Z^d."""

    M: np.ndarray

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.M))
        if M.shape[0] != M.shape[1]:
            raise ValueError("dilation matrix must be square")
        if not np.all(M == np.round(M)):
            raise ValueError("dilation matrix must have integer entries")
        ev = np.abs(np.linalg.eigvals(M.astype(float)))
        if np.any(ev <= 1):
            raise ValueError("dilation matrix must be strictly expanding")
        object.__setattr__(self, "M", M.astype(int))

    @classmethod
    def isotropic(cls, d: int, factor: int = 2) -> "DilationMatrix":
        return cls(factor * np.eye(d, dtype=int))

    @classmethod
    def diagonal(cls, *entries) -> "DilationMatrix":
        return cls(np.diag(entries))

    @property
    def d(self) -> int:
        return self.M.shape[0]

    @property
    def det(self) -> int:
        return int(round(abs(np.linalg.det(self.M))))

    @property
    def zeta_min(self) -> float:
        return float(np.abs(np.linalg.eigvals(self.M.astype(float))).min())

    @property
    def zeta_max(self) -> float:
        return float(np.abs(np.linalg.eigvals(self.M.astype(float))).max())

    def is_diagonal(self) -> bool:
        return bool(np.all(self.M == np.diag(np.diag(self.M))))


def as_dilation(M, d: int = None) -> DilationMatrix:
    if isinstance(M, DilationMatrix):
        return M
    if np.isscalar(M):
        return DilationMatrix.isotropic(d or 1, int(M))
    return DilationMatrix(np.asarray(M))


def cascade_tables(fb: FilterBank, depth: int = 12):
    """Values of phi and psi on the dyadic grid k / 2^depth over [0, L].

    Integer values of phi come from the eigenvector of the refinement
    operator (normalised to sum one); each further level applies the
    refinement equation once, so every table entry is exact up to
    rounding.
    """
    if depth < 1:
        raise ValueError("cascade depth must be at least 1")
    h, g, L = fb.h, fb.g, fb.L
    s2 = math.sqrt(2)
    A = np.zeros((L + 1, L + 1))
    for n in range(L + 1):
        for m in range(L + 1):
            if 0 <= 2 * n - m <= L:
                A[n, m] = s2 * h[2 * n - m]
    w, V = np.linalg.eig(A)
    v = np.real(V[:, np.argmin(np.abs(w - 1))])
    phi = v / v.sum()

    def refine(prev, r, taps):
        # prev holds values at resolution r - 1; returns resolution r
        out = np.zeros(L * 2**r + 1)
        idx = np.arange(out.size)
        step = 2 ** (r - 1)
        for k, c in enumerate(taps):
            src = idx - k * step
            ok = (src >= 0) & (src < prev.size)
            out[ok] += s2 * c * prev[src[ok]]
        return out

    for r in range(1, depth + 1):
        phi_prev = phi
        phi = refine(phi_prev, r, h)
    psi = refine(phi_prev, depth, g)
    x = np.arange(phi.size) / 2**depth
    return x, phi, psi


class WaveletBasis:
    """Isotropic tensor-product basis with dilation 2I on R^d.

    Haar is evaluated in closed form; other filters through cascade
    tables at resolution 2^-depth with linear interpolation.
    """

    def __init__(self, filters: FilterBank, d: int, depth: int = 12, dilation=None):
        self.filters = filters
        self.d = int(d)
        if self.d < 1:
            raise ValueError("dimension must be positive")
        self.dilation = DilationMatrix.isotropic(self.d) if dilation is None else as_dilation(dilation)
        if not np.array_equal(self.dilation.M, 2 * np.eye(self.d, dtype=int)):
            raise UnsupportedError("evaluation is implemented for the dilation matrix 2I only")
        self.L = filters.L
        self.depth = int(depth)
        self.closed_form = filters.name == "haar"
        if not self.closed_form:
            self.grid, self.phi_table, self.psi_table = cascade_tables(filters, self.depth)
        self.mothers = [k for k in itertools.product((0, 1), repeat=self.d) if any(k)]

    @property
    def name(self) -> str:
        return self.filters.name

    @property
    def det(self) -> int:
        return 2**self.d

    def __repr__(self):
        return f"WaveletBasis({self.name!r}, d={self.d})"

    def descriptor(self) -> dict:
        return {"wavelet": self.name, "d": self.d, "depth": self.depth,
                "dilation": self.dilation.M.tolist()}

    # one-dimensional generators ------------------------------------------

    def _lookup(self, table, x):
        t = np.asarray(x, dtype=float) * 2**self.depth
        out = np.zeros(t.shape)
        ok = (t >= 0) & (t < table.size - 1)
        i = np.floor(t[ok]).astype(np.int64)
        frac = t[ok] - i
        out[ok] = table[i] * (1 - frac) + table[i + 1] * frac
        return out

    def phi(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.closed_form:
            return ((x >= 0) & (x < 1)).astype(float)
        return self._lookup(self.phi_table, x)

    def psi(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.closed_form:
            return ((x >= 0) & (x < 0.5)).astype(float) - ((x >= 0.5) & (x < 1)).astype(float)
        return self._lookup(self.psi_table, x)

    def xi(self, e: int, x) -> np.ndarray:
        return self.psi(x) if e else self.phi(x)

    # d-dimensional evaluation --------------------------------------------

    def mother_pattern(self, k) -> tuple:
        """Factor pattern in {0,1}^d for mother index k (int 1..|M|-1 or tuple)."""
        if isinstance(k, (tuple, list)):
            k = tuple(int(v) for v in k)
            if k not in self.mothers:
                raise IndexError(f"invalid mother pattern {k}")
            return k
        k = int(k)
        if not 1 <= k <= self.det - 1:
            raise IndexError(f"mother index {k} outside 1..{self.det - 1}")
        return self.mothers[k - 1]

    def mother_index(self, pattern) -> int:
        return self.mothers.index(tuple(pattern)) + 1

    def _eval(self, pattern, j, gamma, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        gamma = np.broadcast_to(np.asarray(gamma, dtype=float), (self.d,))
        scale = 2.0 ** j
        out = np.full(x.shape[0], float(self.det) ** (j / 2))
        for i, e in enumerate(pattern):
            out *= self.xi(e, scale * x[:, i] - gamma[i])
        return float(out[0]) if single else out

    def eval_father(self, j, gamma, x):
        """|M|^{j/2} Phi(2^j x - gamma) at one point (shape (d,)) or many (n, d)."""
        return self._eval((0,) * self.d, j, gamma, x)

    def eval_mother(self, k, j, gamma, x):
        return self._eval(self.mother_pattern(k), j, gamma, x)

    def covering(self, x, j: int):
        """Translations whose support contains each coordinate, with values.

        For a 1-D array ``x`` returns ``(top, vals)`` where translation
        ``top - m`` (m = 0..L-1) is the m-th candidate, and
        ``vals[e, :, m] = 2^{j/2} xi_e(2^j x - (top - m))``.
        """
        y = np.asarray(x, dtype=float) * 2.0**j
        top = np.floor(y).astype(np.int64)
        width = max(self.L, 1)
        m = np.arange(width)
        arg = (y - top)[:, None] + m[None, :]
        s = 2.0 ** (j / 2)
        vals = np.stack([s * self.phi(arg), s * self.psi(arg)])
        return top, vals

    def support_translations(self, j: int, box) -> list:
        """All gamma whose scaled support 2^-j([0,L]^d + gamma) meets the half-open box."""
        lo, hi = _box(box, self.d)
        ranges = []
        for a, b in zip(lo, hi):
            first = math.ceil(2.0**j * a - self.L)
            last = math.ceil(2.0**j * b) - 1
            ranges.append(range(first, last + 1))
        return list(itertools.product(*ranges))

    # inner products ------------------------------------------------------

    def _inner_1d(self, e1, j1, g1, e2, j2, g2, resolution):
        """<xi_{e1,j1,g1}, xi_{e2,j2,g2}> on the line by quadrature.

        Computed in the coordinates of the coarser level so that equal
        levels need no irrational scale factor.
        """
        if j1 > j2:
            e1, j1, g1, e2, j2, g2 = e2, j2, g2, e1, j1, g1
        dj = j2 - j1
        # substitute y = 2^j1 x: factor 2^{(j1+j2)/2} 2^{-j1} = 2^{dj/2}
        a = max(g1, (g2) / 2**dj)
        b = min(g1 + self.L, (g2 + self.L) / 2**dj)
        if b <= a:
            return 0.0
        if self.closed_form:
            # products of Haar pieces are constant on cells of 2^-(dj+1)
            n = 2 ** (dj + 1) * max(1, math.ceil(b - a))
            y = a + (np.arange(n) + 0.5) * (b - a) / n
            vals = self.xi(e1, y - g1) * self.xi(e2, 2**dj * y - g2)
            integral = vals.sum() * (b - a) / n
        else:
            n = int(math.ceil((b - a) * 2**resolution))
            y = np.linspace(a, b, n + 1)
            vals = self.xi(e1, y - g1) * self.xi(e2, 2**dj * y - g2)
            integral = trapezoid(vals, y)
        return integral * 2.0 ** (dj / 2) if dj else integral

    def inner_product(self, u, v, resolution: int = None) -> float:
        """Inner product of two basis functions given as (k, j, gamma); k = 0 is the father."""
        resolution = self.depth if resolution is None else resolution
        (k1, j1, g1), (k2, j2, g2) = u, v
        p1 = (0,) * self.d if k1 == 0 else self.mother_pattern(k1)
        p2 = (0,) * self.d if k2 == 0 else self.mother_pattern(k2)
        g1 = np.broadcast_to(np.asarray(g1), (self.d,))
        g2 = np.broadcast_to(np.asarray(g2), (self.d,))
        out = 1.0
        for i in range(self.d):
            out *= self._inner_1d(p1[i], j1, int(g1[i]), p2[i], j2, int(g2[i]), resolution)
            if out == 0.0:
                break
        return out

    def orthonormality_report(self, pairs, resolution: int = None) -> float:
        """Largest |<b_u, b_v> - delta(u, v)| over the given index pairs."""
        worst = 0.0
        for u, v in pairs:
            same = (u[0] == v[0] and u[1] == v[1]
                    and tuple(np.atleast_1d(u[2])) == tuple(np.atleast_1d(v[2])))
            ip = self.inner_product(u, v, resolution)
            worst = max(worst, abs(ip - (1.0 if same else 0.0)))
        return worst


def _box(box, d):
    lo, hi = box
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (d,))
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (d,))
    return lo, hi


def tensor_basis(fb, d: int, depth: int = 12) -> WaveletBasis:
    if isinstance(fb, str):
        fb = FILTERS[fb]()
    return WaveletBasis(fb, d, depth=depth)


def verify_filter_conditions(families, M) -> dict:
    """Check the orthogonality and normalisation conditions on filter families.

    ``families`` is a sequence of |M| arrays, each d-dimensional and
    indexed by gamma >= 0 (family k at index gamma holds a_k(gamma)).
    Tests sum_{g'} a_j(g') a_k(M g + g') = |M| delta(j,k) delta(g,0) for
    every gamma where the shifted supports can overlap, and
    sum a_0 = |M|.  Returns residuals and a pass flag.
    """
    dil = as_dilation(M, np.ndim(families[0]) or 1)
    Mm = dil.M
    det = dil.det
    fams = [np.atleast_1d(np.asarray(a, dtype=float)) for a in families]
    d = fams[0].ndim
    size = np.array(fams[0].shape)
    support = [np.array(idx) for idx in itertools.product(*(range(n) for n in size))]
    # M gamma must land within (-size, size) for any overlap
    reach = [range(-int(n), int(n) + 1) for n in size]
    worst_orth = 0.0
    for gamma in itertools.product(*reach):
        gamma = np.array(gamma)
        shift = Mm @ gamma
        if np.any(np.abs(shift) >= size):
            continue
        for j, aj in enumerate(fams):
            for k, ak in enumerate(fams):
                total = 0.0
                for gp in support:
                    idx = shift + gp
                    if np.all(idx >= 0) and np.all(idx < size):
                        total += aj[tuple(gp)] * ak[tuple(idx)]
                want = det if (j == k and not gamma.any()) else 0.0
                worst_orth = max(worst_orth, abs(total - want))
    sum_res = abs(fams[0].sum() - det)
    return {"orthogonality_residual": worst_orth, "sum_residual": sum_res,
            "passed": bool(worst_orth < 1e-10 and sum_res < 1e-10), "d": d}


def tensor_filter_families(fb: FilterBank, d: int) -> list:
    """Families a_k = 2^{d/2} (tensor of h/g) in the ordering father, mothers."""
    one_d = [math.sqrt(2) * fb.h, math.sqrt(2) * fb.g]
    return [functools.reduce(np.multiply.outer, [one_d[e] for e in k])
            for k in itertools.product((0, 1), repeat=d)]
