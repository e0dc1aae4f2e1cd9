import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdeptest.errors import DomainError, NotPositiveDefiniteError
from mdeptest.numeric import (
    RngStream,
    cholesky,
    gaussian_draws,
    normal_cdf,
    normal_quantile,
    normal_sf,
    uniform_draws,
)


def _quad_cdf(x):
    # independent route: adaptive quadrature of the density at 30 digits
    with mpmath.workdps(30):
        dens = lambda u: mpmath.exp(-u * u / 2) / mpmath.sqrt(2 * mpmath.pi)
        return float(mpmath.mpf("0.5") + mpmath.quad(dens, [0, x]))


def test_cdf_at_zero():
    assert normal_cdf(0.0) == 0.5


@pytest.mark.parametrize("x", [1.96, -1.96, 0.3, -4.2, 7.5, -8.0, 8.0])
def test_cdf_against_quadrature(x):
    assert abs(normal_cdf(x) - _quad_cdf(x)) <= 1e-10


def test_cdf_grid_absolute_error():
    xs = np.linspace(-8, 8, 161)
    worst = max(abs(normal_cdf(float(x)) - _quad_cdf(float(x))) for x in xs)
    assert worst <= 1e-10


def test_cdf_symmetry_identity():
    rng = np.random.default_rng(11)
    xs = rng.uniform(-8, 8, size=1000)
    for x in xs:
        assert abs(normal_cdf(x) + normal_cdf(-x) - 1.0) <= 1e-12


def test_cdf_array_matches_scalar():
    xs = np.linspace(-6, 6, 25)
    np.testing.assert_allclose(normal_cdf(xs), [normal_cdf(float(x)) for x in xs], atol=1e-15)


@pytest.mark.parametrize("x", [math.inf, -math.inf, 40.0, -40.0])
def test_cdf_clamped(x):
    v = normal_cdf(x)
    assert 0.0 <= v <= 1.0


def test_cdf_nan_raises():
    with pytest.raises(DomainError):
        normal_cdf(float("nan"))
    with pytest.raises(DomainError):
        normal_cdf(np.array([0.0, np.nan]))
    with pytest.raises(DomainError):
        normal_sf(float("nan"))


def test_sf_tail_precision():
    # the upper tail far out has no cancellation
    assert normal_sf(10.0) == pytest.approx(7.619853024160527e-24, rel=1e-12)


def test_quantile_at_half():
    assert normal_quantile(0.5) == 0.0


def test_quantile_inverse_grid():
    qs = np.arange(1, 1000) / 1000.0
    for q in qs:
        assert abs(normal_cdf(normal_quantile(q)) - q) <= 1e-8


def _bisect(q, lo=-10.0, hi=10.0):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.mark.parametrize("q", [0.95, 0.975, 0.05, 0.999])
def test_quantile_against_bisection(q):
    assert abs(normal_quantile(q) - _bisect(q)) <= 1e-8


@pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_quantile_domain(q):
    with pytest.raises(DomainError):
        normal_quantile(q)


@given(st.floats(min_value=1e-12, max_value=1 - 1e-12))
def test_quantile_roundtrip_property(q):
    assert abs(normal_cdf(normal_quantile(q)) - q) <= 1e-8


def test_cholesky_identity():
    np.testing.assert_array_equal(cholesky(np.eye(5)), np.eye(5))


def test_cholesky_diagonal():
    np.testing.assert_allclose(cholesky(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))


def test_cholesky_reconstruction():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((50, 50))
    S = A.T @ A + np.eye(50)
    L = cholesky(S)
    assert np.allclose(L, np.tril(L))
    assert np.abs(L @ L.T - S).max() <= 1e-9 * np.abs(S).max()


def test_cholesky_reports_minor():
    S = np.diag([1.0, 2.0, -1.0, 4.0])
    with pytest.raises(NotPositiveDefiniteError) as info:
        cholesky(S)
    assert info.value.minor == 3


def test_cholesky_rejects_asymmetric():
    with pytest.raises(DomainError):
        cholesky(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_draws_deterministic():
    s = RngStream(123, 4, 7)
    np.testing.assert_array_equal(gaussian_draws(s, 1000), gaussian_draws(RngStream(123, 4, 7), 1000))


@pytest.mark.parametrize("key", [(1, 0, 1), (1, 1, 0), (2, 0, 0)])
def test_distinct_keys_differ(key):
    a = gaussian_draws(RngStream(1, 0, 0), 64)
    b = gaussian_draws(RngStream(*key), 64)
    assert not np.array_equal(a, b)


@pytest.mark.parametrize("start", [0, 1, 3, 4, 5, 17, 1000])
def test_window_regeneration(start):
    s = RngStream(9, 2, 1)
    full = gaussian_draws(s, start + 20)
    np.testing.assert_array_equal(gaussian_draws(s, 20, start=start), full[start:])


def test_uniforms_open_interval():
    u = uniform_draws(RngStream(5), 100_000)
    assert u.min() > 0.0 and u.max() < 1.0


def test_gaussian_moments():
    z = gaussian_draws(RngStream(2024, 1, 0), 10**6)
    assert abs(z.mean()) < 4 / math.sqrt(1e6)
    assert abs(z.var() - 1.0) < 4 * math.sqrt(2 / 1e6)


def test_gaussian_lag1_autocorrelation():
    z = gaussian_draws(RngStream(2024, 2, 0), 10**6)
    zc = z - z.mean()
    r1 = np.dot(zc[:-1], zc[1:]) / np.dot(zc, zc)
    assert abs(r1) < 4 / math.sqrt(1e6)


def test_child_stream_keeps_seed_and_index():
    s = RngStream(10, 0, 5).child(3)
    assert (s.seed, s.domain, s.index) == (10, 3, 5)


@settings(max_examples=25)
@given(st.integers(0, 2**64 - 1), st.integers(0, 2**32), st.integers(0, 10**6))
def test_any_key_reproducible(seed, domain, index):
    s = RngStream(seed, domain, index)
    np.testing.assert_array_equal(gaussian_draws(s, 8), gaussian_draws(s, 8))
