import math

import numpy as np
import pytest

from conftest import small_spec
from mdeptest.errors import ConfigError, DimensionError, NotPositiveDefiniteError
from mdeptest.numeric import RngStream, cholesky
from mdeptest.simgen import (
    CATALOG,
    FactorModelSpec,
    autocov_matrix,
    build_mixing,
    default_factor_dim,
    generate,
    generate_batch,
    innovation_covariance,
    model_spec,
    omega,
    sample_mean_scenario,
    tr_omega,
    tr_omega_sq,
    tr_product,
    true_autocov,
    two_sample_specs,
)


def test_mixing_zero_phi():
    assert all(not A.any() for A in build_mixing(4, 6, 2, 0.0, 0.8))


def test_mixing_hand_example():
    (A0,) = build_mixing(2, 3, 0, 1.0, 1.0, "reciprocal-h")
    np.testing.assert_allclose(A0, [[1, 1, 0.25], [1, 1, 1]])


@pytest.mark.parametrize("variant,scales", [("reciprocal-h", [1, 1 / 2, 1 / 3]), ("linear-h", [1, 2, 3])])
def test_mixing_lag_scaling(variant, scales):
    A = build_mixing(5, 7, 2, 0.6, 0.8, variant)
    for h, c in enumerate(scales):
        np.testing.assert_allclose(A[h], c * A[0])


def test_mixing_band_exhaustive():
    p, w = 10, 0.5
    for A in build_mixing(p, 12, 3, 0.6, w):
        for i in range(p):
            for j in range(12):
                if abs(i - j) > p * w:
                    assert A[i, j] == 0.0
                else:
                    assert A[i, j] > 0.0


@pytest.mark.parametrize("kwargs", [dict(w=0.0), dict(w=-0.3), dict(w=1.2), dict(m=4), dict(m=3)])
def test_mixing_errors(kwargs):
    args = dict(p=4, m=6, M=1, phi1=0.5, w=0.5)
    args.update(kwargs)
    with pytest.raises(ConfigError):
        build_mixing(**args)


def test_innovation_zero_phi():
    sigma = np.array([1.0, 2.0, 0.5, 3.0])
    S, L = innovation_covariance(4, 3, 0.0, 0.9, sigma)
    np.testing.assert_array_equal(S, np.diag(sigma))


def test_innovation_entries():
    S, L = innovation_covariance(12, 10, 0.3, 0.9)
    assert S[3, 4] == pytest.approx(0.3)
    assert S[3, 5] == pytest.approx(0.075)
    assert S[0, 9] == pytest.approx(0.3 / 81)
    assert S[0, 10] == 0.0  # |i - j| = 10 > p w = 9
    np.testing.assert_allclose(L @ L.T, S, atol=1e-12)


def test_innovation_sigma_profile():
    sigma = np.linspace(0.5, 2.0, 6)
    S, _ = innovation_covariance(6, 5, 0.4, 1.0, sigma)
    assert S[1, 3] == pytest.approx(math.sqrt(sigma[1] * sigma[3]) * 0.4 / 4)


def test_innovation_not_pd():
    with pytest.raises(NotPositiveDefiniteError):
        innovation_covariance(40, 40, 3.0, 1.0)


@pytest.mark.slow
@pytest.mark.parametrize("phi2", [0.3, 0.4, 0.5, 0.6])
def test_innovation_pd_sweep(phi2):
    for p in (8, 40, 100, 200, 400):
        m = min(default_factor_dim(p), 500)
        for w in (0.5, 0.8, 0.9, 1.0):
            innovation_covariance(m, min(p, m - 1), phi2, w)  # raises if not PD


def test_catalog_dimensions():
    for name, entry in CATALOG.items():
        spec = model_spec(name, 20)
        assert spec.p == entry.ratio * 20
        assert spec.m == default_factor_dim(spec.p) > spec.p
        assert spec.M == entry.M
        assert spec.gamma0_is_pd()


def test_two_sample_dimensions():
    s1, s2 = two_sample_specs(2, 10)
    assert s1.p == s2.p == 40 and s1.M == s2.M == 2


def test_autocov_identity_mixing():
    p = 3
    spec = FactorModelSpec((np.eye(p), np.eye(p)), np.eye(p))
    np.testing.assert_array_equal(true_autocov(spec, 0)[0], 2 * np.eye(p))
    np.testing.assert_array_equal(true_autocov(spec, 1)[0], np.eye(p))
    assert true_autocov(spec, 1)[1] == 3.0


def test_autocov_m0():
    A = np.random.default_rng(0).standard_normal((3, 5))
    spec = FactorModelSpec((A,), np.eye(5))
    np.testing.assert_allclose(true_autocov(spec, 0)[0], A @ A.T)


def test_autocov_lag_errors():
    spec = small_spec(2, 3, 1)
    with pytest.raises(DimensionError):
        true_autocov(spec, 2)
    with pytest.raises(DimensionError):
        true_autocov(spec, -1)


def test_negative_lag_is_transpose():
    spec = small_spec(3, 4, 2, seed=4)
    np.testing.assert_array_equal(autocov_matrix(spec, -2), autocov_matrix(spec, 2).T)


def test_oracle_quantities_consistent():
    spec = small_spec(3, 5, 2, seed=5)
    n = 30
    W = sum((1 - abs(h) / n) * autocov_matrix(spec, h) for h in range(-2, 3))
    np.testing.assert_allclose(omega(spec, n), W, atol=1e-12)
    assert tr_omega(spec, n) == pytest.approx(np.trace(W))
    assert tr_omega_sq(spec, n) == pytest.approx(np.trace(W @ W))
    assert tr_product(spec, 1, -2) == pytest.approx(
        np.trace(autocov_matrix(spec, 1) @ autocov_matrix(spec, -2)))
    assert tr_product(spec, 3, 0) == 0.0


def test_zero_mixing_rows_equal_mean():
    mu = np.array([1.0, -2.0, 0.5])
    spec = FactorModelSpec((np.zeros((3, 4)),) * 2, np.eye(4), mu)
    X = generate(spec, 7, RngStream(1))
    np.testing.assert_array_equal(X, np.tile(mu, (7, 1)))


def test_generate_deterministic():
    spec = model_spec("II", 10)
    a = generate(spec, 10, RngStream(3, 1, 2))
    b = generate(spec, 10, RngStream(3, 1, 2))
    assert a.tobytes() == b.tobytes()


def test_batch_matches_generate_layout():
    spec = small_spec(3, 4, 1, seed=2)
    batch = generate_batch(spec, 6, 3, RngStream(8))
    # the first replicate uses the first (n + M) m draws
    np.testing.assert_allclose(batch[0], generate(spec, 6, RngStream(8)), atol=1e-12)


def test_with_mean_keeps_process():
    spec = small_spec(3, 4, 1, seed=1)
    mu = np.array([0.1, 0.2, 0.3])
    X0 = generate(spec, 5, RngStream(2))
    X1 = generate(spec.with_mean(mu), 5, RngStream(2))
    np.testing.assert_allclose(X1 - X0, np.tile(mu, (5, 1)), atol=1e-12)


@pytest.mark.slow
def test_sample_mean_of_many_rows():
    mu = np.array([1.0, -0.5, 2.0])
    spec = small_spec(3, 4, 2, seed=9, mu=mu)
    X = generate(spec, 10**6, RngStream(44))
    # long-run variance governs the SE of the mean of an M-dependent series
    se = np.sqrt(np.diag(omega(spec, 10**6)) / 10**6)
    assert np.all(np.abs(X.mean(axis=0) - mu) < 4 * se)


@pytest.mark.slow
def test_empirical_autocov_matches_gamma():
    spec = small_spec(4, 6, 2, seed=7)
    N = 10**6
    X = generate(spec, N, RngStream(45))
    for h in range(3):
        prod = X[: N - h, :, None] * X[h:, None, :]  # X_t X_{t+h}'
        est = prod.mean(axis=0)
        # the products are (2M)-dependent; batch means give an honest SE
        blocks = prod[: (N - h) // 1000 * 1000].reshape(1000, -1, 4, 4).mean(axis=1)
        se = blocks.std(axis=0, ddof=1) / math.sqrt(1000)
        assert np.all(np.abs(est - autocov_matrix(spec, h)) < 4 * se)


def test_m_dependence_beyond_order():
    # lag M+1 sample covariance is near zero while lag M is not
    spec = small_spec(2, 3, 1, seed=3)
    X = generate(spec, 200_000, RngStream(46))
    c1 = (X[:-1, :, None] * X[1:, None, :]).mean(axis=0)
    c2 = (X[:-2, :, None] * X[2:, None, :]).mean(axis=0)
    assert np.abs(c2).max() < 0.05 * np.abs(c1).max() + 0.02


def test_mean_scenarios():
    s = RngStream(1, 2, 3)
    np.testing.assert_array_equal(sample_mean_scenario("null", 16, s), np.zeros(16))
    m1 = sample_mean_scenario("power1", 16, s)
    assert m1.min() >= 0.5 and m1.max() <= 0.75
    m2 = sample_mean_scenario("power2", 16, s)
    assert m2.min() >= 1.0 and m2.max() <= 1.5
    t1 = sample_mean_scenario("two-sample-1", 16, s)
    assert t1.min() >= 0.25 and t1.max() <= 0.5
    with pytest.raises(ConfigError):
        sample_mean_scenario("bogus", 4, s)


def test_spec_validation():
    with pytest.raises(ConfigError):
        FactorModelSpec((np.ones((2, 3)), np.ones((2, 4))), np.eye(3))
    with pytest.raises(ConfigError):
        FactorModelSpec((np.ones((2, 3)),), np.ones((3, 3)))
    with pytest.raises(ConfigError):
        FactorModelSpec((np.ones((2, 3)),), np.eye(3), mu=np.zeros(3))
    L = cholesky(np.eye(3))
    assert FactorModelSpec((np.ones((2, 3)),), L).p == 2
