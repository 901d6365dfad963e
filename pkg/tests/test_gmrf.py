import numpy as np
import pytest
from scipy import integrate, stats

from wavedens import gmrf
from wavedens.errors import InadmissibleEtaError
from wavedens.lattice import adjacency_matrix, build_index_set, four_neighbors, parity_mask


def brute_bounds(dims, torus=False):
    ev = np.linalg.eigvalsh(adjacency_matrix(dims, torus=torus).toarray())
    return ev[0], ev[-1]


@pytest.mark.parametrize("dims", [(2, 2), (3, 5), (20, 20), (7, 4)])
def test_eigen_bounds_against_eigensolver(dims):
    np.testing.assert_allclose(gmrf.adjacency_eigen_bounds(dims), brute_bounds(dims), atol=1e-10)


def test_eigen_bound_examples():
    assert gmrf.adjacency_eigen_bounds((2, 2)) == pytest.approx((-2, 2))
    h0, hm = gmrf.adjacency_eigen_bounds((20, 20))
    # closed form 2 cos(pi/21) per axis; the eigensolver test above confirms it
    assert hm == pytest.approx(4 * np.cos(np.pi / 21), abs=1e-12) and h0 == pytest.approx(-hm)
    assert gmrf.adjacency_eigen_bounds((40, 40), torus=True) == pytest.approx((-4, 4))
    np.testing.assert_allclose(gmrf.adjacency_eigen_bounds((6, 8), torus=True),
                               brute_bounds((6, 8), torus=True), atol=1e-10)


def test_eta_range():
    assert gmrf.admissible_eta_range(-4, 4) == pytest.approx((-0.25, 0.25))
    assert gmrf.admissible_eta_range(-2, 2) == pytest.approx((-0.5, 0.5))
    assert gmrf.admissible_eta_range(-3.9777, 3.9777) == pytest.approx((-0.2514, 0.2514), abs=1e-4)
    with pytest.raises(ValueError):
        gmrf.admissible_eta_range(0.5, 3)
    with pytest.raises(InadmissibleEtaError) as info:
        gmrf.check_eta((20, 20), 0.3)
    assert "0.25" in str(info.value)


def test_conditional_variances_oracle():
    assert np.all(gmrf.conditional_variances((5, 5), 0.0) == 1)
    dims = (2, 2)
    H = adjacency_matrix(dims).toarray()
    ref = 1 / np.diag(np.linalg.inv(np.eye(4) - 0.2 * H))
    got = gmrf.conditional_variances(dims, 0.2).ravel()
    np.testing.assert_allclose(got, ref, rtol=1e-13)
    assert np.ptp(got) < 1e-14
    for method in ("dense", "cg"):
        np.testing.assert_allclose(gmrf.conditional_variances((9, 6), -0.22, method),
                                   gmrf.conditional_variances((9, 6), -0.22), rtol=1e-10)
    v = gmrf.conditional_variances((30, 30), 0.22)
    assert np.all((v > 0) & (v <= 1))
    with pytest.raises(InadmissibleEtaError):
        gmrf.conditional_variances((5, 5), 0.6)


def test_unit_marginal_variance():
    dims = (6, 7)
    H = adjacency_matrix(dims).toarray()
    D = np.diag(gmrf.conditional_variances(dims, 0.2).ravel())
    cov = np.linalg.solve(np.eye(H.shape[0]) - 0.2 * H, D)
    np.testing.assert_allclose(np.diag(cov), 1.0, rtol=1e-12)


def test_conditional_update_examples():
    assert gmrf.conditional_update([], 0.0, 1.0, 0.5) == 0.0
    assert gmrf.conditional_update([1, -1], 0.2, 1.0, 0.5) == pytest.approx(0.0)
    assert gmrf.conditional_update([1, 1], 0.2, 0.81, 0.8413) == pytest.approx(1.3, abs=1e-3)


def test_copula_uniforms():
    assert np.allclose(gmrf.copula_coupled_uniforms(np.eye(5), np.zeros(5)), 0.5)
    g = np.random.default_rng(0).standard_normal((10, 5))
    np.testing.assert_allclose(gmrf.copula_coupled_uniforms(np.eye(5), g), stats.norm.cdf(g))
    g = np.random.default_rng(1).standard_normal((100_000, 5))
    u = gmrf.copula_coupled_uniforms(gmrf.default_copula(), g)
    z = stats.norm.ppf(u)
    assert np.corrcoef(z[:, 0], z[:, 1])[0, 1] == pytest.approx(0.1, abs=0.01)
    assert abs(np.corrcoef(z[:, 0], z[:, 2])[0, 1]) < 0.01
    with pytest.raises(np.linalg.LinAlgError):
        gmrf.copula_coupled_uniforms(np.array([[1, 2], [2, 1]]), np.zeros(2))


def scalar_chain(multi, iterations, seed):
    """Site-by-site sweep through conditional_update with the documented stream."""
    rng = np.random.default_rng(seed)
    dims = multi.shape.dims
    k = len(multi.specs)
    z = rng.standard_normal((k,) + dims)
    L = np.linalg.cholesky(multi.R)
    even = parity_mask(dims)
    sites = build_index_set(dims)
    for _ in range(iterations):
        for mask in (even, ~even):
            chosen = [s for s in sites if mask[s[0] - 1, s[1] - 1]]
            innov = rng.standard_normal((len(chosen), k)) @ L.T
            u = stats.norm.cdf(innov)
            for row, s in enumerate(chosen):
                for c, spec in enumerate(multi.specs):
                    nb = [z[c, t[0] - 1, t[1] - 1] for t in four_neighbors(s, dims)]
                    var = spec.cond_var[s[0] - 1, s[1] - 1]
                    z[c, s[0] - 1, s[1] - 1] = gmrf.conditional_update(
                        nb, spec.eta, var, u[row, c], spec.mean, [spec.mean] * len(nb))
    return z


def test_vectorised_sweep_matches_scalar_oracle():
    multi = gmrf.make_multifield((5, 6), gmrf.PAPER_ETA, mean=0.3)
    fast = gmrf.run_chain(multi, 3, 11).values
    np.testing.assert_allclose(fast, scalar_chain(multi, 3, 11), atol=1e-8)


def test_zero_iterations_and_no_init():
    multi = gmrf.make_multifield((4, 4))
    first = gmrf.run_chain(multi, 0, 3)
    np.testing.assert_array_equal(first.values, np.random.default_rng(3).standard_normal((5, 4, 4)))
    again = gmrf.run_chain(first, 0, 99, init=False)
    np.testing.assert_array_equal(again.values, first.values)


def test_eta_zero_bitwise_iid():
    dims = (7, 6)
    R = gmrf.default_copula()
    multi = gmrf.make_multifield(dims, (0.0,) * 5, R)
    got = gmrf.run_chain(multi, 1, 5).values
    rng = np.random.default_rng(5)
    rng.standard_normal((5,) + dims)
    L = np.linalg.cholesky(R)
    ref = np.empty((5,) + dims)
    for mask in (parity_mask(dims), ~parity_mask(dims)):
        ref[:, mask] = (rng.standard_normal((int(mask.sum()), 5)) @ L.T).T
    assert np.array_equal(got, ref)


def test_eta_zero_ks():
    z = gmrf.run_chain(gmrf.make_multifield((40, 40), (0.0,) * 5, np.eye(5)), 1, 8).values
    for comp in z:
        assert stats.kstest(comp.ravel(), "norm").pvalue > 0.01


def test_dependence_sign_and_copula():
    z = gmrf.run_chain(gmrf.make_multifield((50, 50)), 300, 2).values
    for comp, eta in zip(z, gmrf.PAPER_ETA):
        r = np.corrcoef(comp[:, :-1].ravel(), comp[:, 1:].ravel())[0, 1]
        assert np.sign(r) == np.sign(eta)
    flat = z.reshape(5, -1)
    assert np.corrcoef(flat[0], flat[1])[0, 1] > 0.03
    assert np.corrcoef(flat[2], flat[3])[0, 1] > 0.03


def test_transform_examples():
    def one(z5, z1=0, z2=0, z3=0, z4=0):
        z = np.array([z1, z2, z3, z4, z5], dtype=float).reshape(5, 1, 1)
        return gmrf.transform_to_target(z)[0, 0]

    np.testing.assert_allclose(one(-1), [0.5, 0.5])
    np.testing.assert_allclose(one(1), [0.5, 0.5])
    np.testing.assert_allclose(one(1, z3=1, z4=-1), [0.7, 0.3])
    y = gmrf.simulate_target((30, 30), 4, iid=True)
    assert np.mean(np.all((y >= 0) & (y <= 1), axis=-1)) >= 0.5


def test_target_pdf():
    assert gmrf.target_pdf([-1, -1]) < 1e-12
    assert gmrf.target_pdf([0.5, 0.5], 0.0) == pytest.approx(0.5 + 0.5 / (2 * np.pi * 0.04))
    ref = 0.5 + 0.5 / (2 * np.pi * 0.04 * np.sqrt(1 - 0.01))
    assert gmrf.target_pdf([0.5, 0.5], 0.1) == pytest.approx(ref)
    assert ref == pytest.approx(2.4995, abs=1e-4)
    with pytest.raises(ValueError):
        gmrf.target_pdf([0, 0], 1.0)


def test_target_integrates_to_one():
    # split at the uniform block's edges so the quadrature sees smooth pieces
    total = 0.0
    cuts = [-2, 0, 1, 3]
    for a, b in zip(cuts[:-1], cuts[1:]):
        for c, d in zip(cuts[:-1], cuts[1:]):
            total += integrate.dblquad(lambda y, x: gmrf.target_pdf([x, y]), a, b, c, d,
                                       epsabs=1e-11)[0]
    assert total == pytest.approx(1.0, abs=1e-6)


def test_target_norm_closed_form():
    x = np.linspace(-1.5, 2.5, 2001)
    mesh = np.stack(np.meshgrid(x, x, indexing="ij"), -1).reshape(-1, 2)
    vals = gmrf.target_pdf(mesh) ** 2
    quad = vals.sum() * (x[1] - x[0]) ** 2
    assert gmrf.target_l2_norm_sq() == pytest.approx(quad, rel=2e-3)
