import csv

import numpy as np
import pytest

from wavedens import gmrf
from wavedens.errors import DegenerateEstimateError
from wavedens.estimators import (CoefArray, DensityEstimate, linear_estimate,
                                 relative_hard_estimate)
from wavedens.postprocess import (QuadratureGrid, VerReport, ise, l2_norm_sq, normalize,
                                  quadrant_regions, region_ver_hat, select_primary_level,
                                  ver_exact, ver_hat)
from wavedens.wavelets import tensor_basis

HAAR1 = tensor_basis("haar", 1)
HAAR2 = tensor_basis("haar", 2)
D4_2 = tensor_basis("d4", 2)


def constant_square(value=1.0):
    return DensityEstimate(HAAR2, [((0, 0), 0, CoefArray([0, 0], np.array([[value]])))])


def uniform_pdf(x):
    return np.all((x >= 0) & (x < 1), axis=-1).astype(float)


def step_pdf(x):
    return np.where(x[:, 0] < 0.5, 1.5, 0.5) * uniform_pdf(x)


def test_grid_basics():
    g = QuadratureGrid.default(2)
    assert g.shape == (512, 512) and g.volume == 4.0
    assert g.cell_volume * np.prod(g.shape) == pytest.approx(g.volume)
    big = g.extended_to((-1.0, -0.5), (1.5, 2.2))
    assert big.lo[0] == pytest.approx(-1.0) and big.hi[1] >= 2.2
    np.testing.assert_allclose(big.steps, g.steps)
    with pytest.raises(ValueError):
        QuadratureGrid((0,), (0,), (4,))


def test_normalize_examples():
    est = constant_square()
    norm = normalize(est)
    assert norm.S == pytest.approx(1.0, abs=1e-14)
    # 0.5 + psi is 1.5 on [0, 1/2) and -0.5 on [1/2, 1)
    f = DensityEstimate(HAAR1, [((0,), 0, CoefArray([0], np.array([0.5]))),
                               ((1,), 0, CoefArray([0], np.array([1.0])))])
    nf = normalize(f)
    assert nf.S == pytest.approx(0.75, abs=1e-14)
    np.testing.assert_allclose(nf.evaluate(np.array([[0.2], [0.7]])), [2.0, 0.0])
    assert l2_norm_sq(nf) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(DegenerateEstimateError):
        normalize(constant_square(-1.0))


def test_normalized_is_density_on_grid():
    y = gmrf.simulate_target((30, 30), 1, iid=True)
    for basis in (HAAR2, D4_2):
        est = normalize(relative_hard_estimate(y, basis, 0, 3, 0.1))
        vals = est.evaluate_grid(est.grid.axes)
        assert vals.min() >= 0
        assert est.grid.integrate(vals) == pytest.approx(1.0, abs=1e-8)


def test_ise_examples():
    y = gmrf.simulate_target((20, 20), 2, iid=True)
    est = linear_estimate(y, HAAR2, 2)
    assert ise(est, est.evaluate) == 0
    assert ise(constant_square(), uniform_pdf) == 0
    assert ise(constant_square(0.0), uniform_pdf) == pytest.approx(1.0, abs=1e-14)


def test_ise_equals_ver_plus_norm():
    fine = QuadratureGrid((-0.5, -0.5), (1.5, 1.5), (1024, 1024))
    y = gmrf.simulate_target((25, 25), 3, iid=True)
    pairs = [
        (constant_square(0.8), uniform_pdf, 1.0, None),
        (linear_estimate(y, HAAR2, 3), gmrf.target_pdf, gmrf.target_l2_norm_sq(), fine),
        (relative_hard_estimate(y, D4_2, 0, 2, 0.1), step_pdf, 1.25, None),
    ]
    for est, pdf, norm_sq, grid in pairs:
        assert ise(est, pdf, grid) == pytest.approx(ver_exact(est, pdf, grid) + norm_sq, abs=1e-6)


def test_ver_hat_constant():
    val = np.random.default_rng(0).uniform(0.05, 0.95, (40, 2))
    assert ver_hat(constant_square(), val) == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        ver_hat(constant_square(), np.zeros((0, 2)))


def test_ver_hat_tracks_ver():
    # with many validation points ver_hat approaches the exact criterion
    train = gmrf.simulate_target((30, 30), 5, iid=True)
    val = gmrf.simulate_target((150, 150), 6, iid=True)
    est = linear_estimate(train, HAAR2, 2)
    assert ver_hat(est, val) == pytest.approx(ver_exact(est, gmrf.target_pdf), abs=0.02)


def test_l2_examples():
    assert l2_norm_sq(constant_square()) == 1.0
    est = DensityEstimate(HAAR2, [((0, 0), 0, CoefArray([0, 0], np.array([[1.0]]))),
                                  ((1, 1), 0, CoefArray([0, 0], np.array([[0.5]])))])
    assert l2_norm_sq(est) == 1.25


def test_parseval_matches_quadrature():
    y = gmrf.simulate_target((20, 20), 7, iid=True)
    for est in (linear_estimate(y, HAAR2, 3), relative_hard_estimate(y, HAAR2, 0, 4, 0.2)):
        quad = l2_norm_sq(est, QuadratureGrid.default(2))
        assert quad == pytest.approx(l2_norm_sq(est), abs=1e-3)
        assert quad == pytest.approx(l2_norm_sq(est), abs=1e-10)


def test_primary_level_selection():
    y = gmrf.simulate_target((30, 30), 8, iid=True)
    train, val = y[:27, :27].reshape(-1, 2), y[27:].reshape(-1, 2)
    whole = [((-np.inf, -np.inf), (np.inf, np.inf))]
    j_star, per = select_primary_level(train, val, HAAR2, whole, range(5))
    scores = [ver_hat(linear_estimate(train, HAAR2, j), val) for j in range(5)]
    assert per == [int(np.argmin(scores))] and j_star == per[0]
    j_star, per = select_primary_level(train, val, HAAR2, quadrant_regions(), range(5))
    assert len(per) == 4 and j_star == min(per)
    for region, j in zip(quadrant_regions(), per):
        vals = [region_ver_hat(linear_estimate(train, HAAR2, k), val, region) for k in range(5)]
        assert vals[j] == pytest.approx(min(vals))


def test_primary_level_ties_go_low():
    y = np.random.default_rng(1).random((50, 2))
    far = [((5.0, 5.0), (6.0, 6.0))]
    assert select_primary_level(y, y[:5], HAAR2, far, [3, 1, 2]) == (1, [1])
    assert select_primary_level(y, y[:5], HAAR2, far, [2, 3]) == (2, [2])


def test_ver_report_csv(tmp_path):
    rep = VerReport()
    rep.add(400, 0, "linear", 0, [-0.9, -0.95])
    rep.add(400, 2, "linear", 0, [-1.0, -1.1])
    rep.add(400, 2, "hard", 0.1, [-1.1, -1.1])
    rep.add(1225, 2, "linear", 0, [-1.0])
    with pytest.raises(ValueError):
        rep.add(400, 0, "linear", 0, [0.0])
    path = tmp_path / "t.csv"
    rep.write_csv(path)
    rows = list(csv.DictReader(open(path)))
    assert list(rows[0]) == ["sample_size", "j", "estimator", "threshold", "mean", "std", "is_min"]
    marks = {(r["sample_size"], r["j"], r["estimator"]): r["is_min"] for r in rows}
    assert marks[("400", "2", "hard")] == "1" and marks[("400", "2", "linear")] == "0"
    assert marks[("1225", "2", "linear")] == "1"
    assert all(float(r["std"]) >= 0 for r in rows)
    assert rep.argmin_level(400) == 2


def test_positive_part_mass_approaches_one():
    def mean_gap(size):
        gaps = []
        for r in range(10):
            y = gmrf.simulate_target((size, size), 40 + r, iid=True)
            gaps.append(abs(normalize(linear_estimate(y, D4_2, 2)).S - 1))
        return np.mean(gaps)

    assert mean_gap(50) <= mean_gap(20)
