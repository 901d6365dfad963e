"""Replicated simulation studies: validation tables and rate studies.

Every replication draws from its own generator seeded by
(seed, lattice side, replication index), so results do not depend on
the order in which replications run or on the worker count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import norm

from . import gmrf
from .besov import holder_embedding_s, linear_level
from .estimators import Decomposition, linear_estimate, relative_hard_estimate
from .lattice import train_mask
from .postprocess import QuadratureGrid, VerReport, ise, normalize, ver_hat
from .wavelets import tensor_basis


@dataclass
class ExperimentConfig:
    sizes: list = field(default_factory=lambda: [20, 35, 50, 65])
    reps: int = 100
    wavelet: str = "haar"
    levels: list = field(default_factory=lambda: [0, 1, 2, 3, 4])
    j0: int = 0
    multiples: list = field(default_factory=lambda: [0.1, 0.2, 0.3])
    eta: list = field(default_factory=lambda: list(gmrf.PAPER_ETA))
    rho12: float = 0.1
    rho34: float = 0.1
    seed: int = 0
    iid: bool = False
    iterations: int = 1000
    fraction: float = 0.9
    normalized: bool = True
    scope: str = "level"
    workers: int = 1
    out: str = "out"

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if not self.sizes or any(int(n) < 2 for n in self.sizes):
            raise ValueError("lattice sizes must be at least 2")
        if any(m < 0 for m in self.multiples):
            raise ValueError("threshold multiples must be non-negative")
        if self.wavelet not in ("haar", "d4"):
            raise ValueError(f"unknown wavelet {self.wavelet!r}")
        if len(self.eta) != 5:
            raise ValueError("eta needs five entries, one per field")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        self.sizes = [int(n) for n in self.sizes]
        self.levels = [int(j) for j in self.levels]

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def copula(self) -> np.ndarray:
        return gmrf.default_copula(self.rho12, self.rho34)

    def check(self) -> None:
        """Raise InadmissibleEtaError for any eta outside the admissible interval."""
        for n in self.sizes:
            for e in self.eta:
                gmrf.check_eta((n, n), e)


def replication_rng(seed: int, size: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(size), int(rep)]))


def simulate_replication(cfg: ExperimentConfig, size: int, rep: int) -> np.ndarray:
    rng = replication_rng(cfg.seed, size, rep)
    return gmrf.simulate_target((size, size), rng, cfg.eta, cfg.copula(),
                                cfg.iterations, iid=cfg.iid)


def split_sample(sample: np.ndarray, fraction: float = 0.9):
    """Training block and L-shaped validation points of an (n1, n2, d) sample."""
    mask = train_mask(sample.shape[:2], fraction)
    return sample[mask], sample[~mask]


def _criterion(est, validation, normalized):
    if normalized:
        est = normalize(est)
    return ver_hat(est, validation)


def table_cells(cfg: ExperimentConfig, size: int) -> list:
    """(j, estimator, multiple) cells of one table block."""
    cells = [(j, "linear", 0.0) for j in cfg.levels]
    cells += [(j, "hard", m) for j in cfg.levels if j > cfg.j0 for m in cfg.multiples]
    return cells


def table_replication(cfg: ExperimentConfig, size: int, rep: int, sample=None) -> dict:
    """Validation criterion of every table cell for one replication."""
    if sample is None:
        sample = simulate_replication(cfg, size, rep)
    train, validation = split_sample(sample, cfg.fraction)
    basis = tensor_basis(cfg.wavelet, 2)
    dec = Decomposition(train, basis)
    out = {}
    for j, kind, mult in table_cells(cfg, size):
        if kind == "linear":
            est = linear_estimate(dec, basis, j)
        else:
            est = relative_hard_estimate(dec, basis, cfg.j0, j, mult, cfg.scope)
        out[(j, kind, mult)] = _criterion(est, validation, cfg.normalized)
    return out


def _table_job(args):
    cfg, size, rep = args
    return table_replication(cfg, size, rep)


def _map(fn, jobs, workers):
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


@dataclass
class RunArtifact:
    config: dict
    values: dict
    report: VerReport
    seconds: float


def run_table(cfg: ExperimentConfig) -> RunArtifact:
    """Replicated validation criterion for every (size, cell)."""
    start = time.perf_counter()
    report = VerReport()
    values = {}
    for size in cfg.sizes:
        reps = _map(_table_job, [(cfg, size, r) for r in range(cfg.reps)], cfg.workers)
        for cell in table_cells(cfg, size):
            vals = [r[cell] for r in reps]
            values[(size * size,) + cell] = vals
            report.add(size * size, cell[0], cell[1], cell[2], vals)
    return RunArtifact(cfg.to_dict(), values, report, time.perf_counter() - start)


# rate studies ---------------------------------------------------------------

def tent_pdf(x) -> np.ndarray:
    """Product of triangular densities on [0, 1]; Lipschitz with r = 1."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    t = np.clip(np.minimum(x, 1 - x), 0, None)
    return np.prod(4 * t, axis=-1)


def tent_quantile(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return np.where(u < 0.5, np.sqrt(u / 2), 1 - np.sqrt((1 - u) / 2))


def uniform_pdf(x) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return np.all((x >= 0) & (x < 1), axis=-1).astype(float)


RATE_TARGETS = {
    "tent": (tent_pdf, tent_quantile, 1.0),
    "uniform": (uniform_pdf, lambda u: u, 1.0),
}


def rate_sample(cfg: ExperimentConfig, size: int, rep: int, target: str) -> np.ndarray:
    """Two dependent uniform fields pushed through the target's quantile function."""
    _, quantile, _ = RATE_TARGETS[target]
    rng = replication_rng(cfg.seed, size, rep)
    R = np.eye(2)
    if cfg.iid:
        z = gmrf.iid_reference((size, size), R, rng)
    else:
        field_ = gmrf.make_multifield((size, size), cfg.eta[:2], R)
        z = gmrf.run_chain(field_, cfg.iterations, rng).values
    return np.moveaxis(quantile(norm.cdf(z)), 0, -1)


def _rate_job(args):
    cfg, size, rep, target, j = args
    sample = rate_sample(cfg, size, rep, target)
    basis = tensor_basis(cfg.wavelet, 2)
    grid = QuadratureGrid((0.0, 0.0), (1.0, 1.0), (256, 256))
    return ise(linear_estimate(sample, basis, j), RATE_TARGETS[target][0], grid)


def run_rates(cfg: ExperimentConfig, target: str = "tent") -> dict:
    """Mean ISE of the linear estimator at the theory level for each size.

    The level comes from the Hoelder embedding s' = r / d with r the
    target's Lipschitz exponent.  Returns sizes, levels, mean ISE, their
    standard errors and the least-squares log-log slope.
    """
    if target not in RATE_TARGETS:
        raise ValueError(f"unknown rate target {target!r}")
    s_prime = holder_embedding_s(RATE_TARGETS[target][2], 2)
    ns, levels, means, ses = [], [], [], []
    for size in cfg.sizes:
        n = size * size
        j = linear_level(s_prime, n)
        vals = np.array(_map(_rate_job, [(cfg, size, r, target, j) for r in range(cfg.reps)],
                             cfg.workers))
        ns.append(n)
        levels.append(j)
        means.append(float(vals.mean()))
        ses.append(float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0)
    slope = float(np.polyfit(np.log(ns), np.log(means), 1)[0]) if len(ns) > 1 else float("nan")
    return {"n": ns, "j": levels, "mean_ise": means, "se": ses, "slope": slope,
            "s_prime": s_prime, "predicted_slope": -2 * s_prime / (2 * s_prime + 1)}
