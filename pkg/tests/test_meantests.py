import math

import numpy as np
import pytest
from scipy import stats

from mdeptest.debias import debias_system
from mdeptest.errors import ConfigError, DegenerateVarianceError, DimensionError
from mdeptest.meantests import (
    TwoSampleInput,
    _decide,
    m_statistic,
    test_bs as run_bs,
    test_one_sample as run_one,
    test_two_sample as run_two,
    theoretical_power,
    theoretical_power_two_sample,
)
from mdeptest.numeric import RngStream, gaussian_draws, normal_quantile
from mdeptest.simgen import generate, model_spec, omega


def test_m_statistic_zero_data():
    assert m_statistic(np.zeros((10, 4)), debias_system(10, 1)) == 0.0


def test_m_statistic_size_mismatch():
    with pytest.raises(ConfigError):
        m_statistic(np.zeros((10, 4)), debias_system(11, 1))


def test_zero_numerator_gives_half():
    res = _decide(0.0, 2.5, 0.05, {})
    assert res.statistic == 0.0 and res.p_value == 0.5 and not res.reject


@pytest.mark.parametrize("variance", [0.0, -1e-3])
def test_degenerate_variance(variance):
    with pytest.raises(DegenerateVarianceError):
        _decide(1.0, variance, 0.05, {})


def test_constant_data_is_degenerate():
    with pytest.raises(DegenerateVarianceError):
        run_one(np.ones((20, 3)), 1)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 2.0])
def test_alpha_validated(alpha):
    X = np.random.default_rng(0).standard_normal((20, 3))
    with pytest.raises(ConfigError):
        run_one(X, 0, alpha)


def test_too_small_for_order():
    X = np.random.default_rng(0).standard_normal((13, 3))
    with pytest.raises(DimensionError):
        run_one(X, 2)


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("alpha", [0.01, 0.05, 0.2])
def test_decision_consistency(seed, alpha):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((30, 12)) + rng.uniform(0, 0.4)
    res = run_one(X, 1, alpha)
    assert 0.0 <= res.p_value <= 1.0
    assert res.variance > 0
    assert res.reject == (res.statistic > normal_quantile(1 - alpha)) == (res.p_value < alpha)


def test_one_sample_statistic_composition():
    X = np.random.default_rng(3).standard_normal((25, 8))
    res = run_one(X, 1)
    assert res.statistic == pytest.approx(res.numerator / math.sqrt(res.variance))
    assert res.numerator == pytest.approx(m_statistic(X, debias_system(25, 1)))


def test_one_sample_sign_and_permutation_invariance():
    X = np.random.default_rng(4).standard_normal((22, 6))
    base = run_one(X, 1)
    assert run_one(-X, 1).statistic == pytest.approx(base.statistic, rel=1e-12)
    perm = np.random.default_rng(5).permutation(6)
    assert run_one(X[:, perm], 1).statistic == pytest.approx(base.statistic, rel=1e-12)


def test_one_sample_orthogonal_invariance():
    X = np.random.default_rng(6).standard_normal((22, 5))
    Q, _ = np.linalg.qr(np.random.default_rng(7).standard_normal((5, 5)))
    assert run_one(X @ Q, 1).statistic == pytest.approx(run_one(X, 1).statistic, rel=1e-10)


def test_monotone_in_mean_shift():
    # shifting along the sample mean grows Xbar'Xbar; the trace estimate is shift invariant
    X = np.random.default_rng(8).standard_normal((30, 10))
    direction = X.mean(axis=0) / np.linalg.norm(X.mean(axis=0))
    stats_ = [run_one(X + c * direction, 0).numerator for c in (0.0, 0.5, 1.0, 2.0)]
    assert all(a < b for a, b in zip(stats_, stats_[1:]))


def test_two_sample_identical_samples():
    X = np.random.default_rng(9).standard_normal((20, 6))
    res = run_two(TwoSampleInput(X, X.copy(), 1))
    sys = debias_system(20, 1)
    from mdeptest.autocov import trace_autocov
    from mdeptest.debias import tr_omega_hat

    tr_hat = tr_omega_hat(trace_autocov(X, 1), sys)
    assert res.numerator == pytest.approx(-2 * tr_hat / 20, rel=1e-10)


def test_two_sample_symmetric_in_samples():
    rng = np.random.default_rng(10)
    X1, X2 = rng.standard_normal((20, 6)), rng.standard_normal((24, 6))
    a = run_two(TwoSampleInput(X1, X2, 1))
    b = run_two(TwoSampleInput(X2, X1, 1))
    assert a.statistic == pytest.approx(b.statistic, rel=1e-10)


def test_two_sample_input_validation():
    rng = np.random.default_rng(11)
    with pytest.raises(DimensionError):
        TwoSampleInput(rng.standard_normal((20, 3)), rng.standard_normal((20, 4)), 1)
    with pytest.raises(DimensionError):
        TwoSampleInput(rng.standard_normal((20, 3)), rng.standard_normal((9, 3)), 1)


def test_bs_trace_oracle():
    X = 3.0 * np.eye(12)[:10] + np.random.default_rng(12).standard_normal((10, 12)) * 0.1
    res = run_bs(X)
    S = np.cov(X, rowvar=False)
    assert res.diagnostics["tr_S"] == pytest.approx(np.trace(S), rel=1e-8)
    assert res.diagnostics["tr_S2"] == pytest.approx(np.trace(S @ S), rel=1e-8)


@pytest.mark.parametrize("p", [1, 7, 50])
def test_bs_trace_oracle_sizes(p):
    X = np.random.default_rng(p).standard_normal((15, p))
    res = run_bs(X)
    S = np.cov(X, rowvar=False).reshape(p, p)
    assert res.diagnostics["tr_S"] == pytest.approx(np.trace(S), rel=1e-8)
    assert res.diagnostics["tr_S2"] == pytest.approx(np.trace(S @ S), rel=1e-8)


def test_bs_needs_four_rows():
    with pytest.raises(DimensionError):
        run_bs(np.random.default_rng(0).standard_normal((3, 5)))


def test_power_at_zero_shift():
    assert theoretical_power(0.0, 4.0, 50, 0.05) == pytest.approx(0.05, abs=1e-12)


def test_power_monotone_and_limit():
    vals = [theoretical_power(d, 10.0, 100) for d in np.linspace(0, 0.2, 21)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert theoretical_power(100.0, 1.0, 100) == pytest.approx(1.0)


def test_power_requires_positive_trace():
    with pytest.raises(ConfigError):
        theoretical_power(1.0, 0.0, 10)


def test_two_sample_power_reduces():
    W = np.diag([1.0, 2.0, 3.0])
    got = theoretical_power_two_sample(0.3, W, W, 20, 20)
    ref = theoretical_power(0.3, float(np.trace((W / 10) @ (W / 10))), 1)
    assert got == pytest.approx(ref)


@pytest.mark.slow
def test_m_statistic_unbiased_iid():
    n, p, R = 50, 20, 100_000
    sys = debias_system(n, 0)
    for shift, target in ((0.0, 0.0), (1.0, 1.0)):
        mu = np.full(p, shift / math.sqrt(p))  # mu'mu = shift^2
        vals = np.empty(R)
        chunk = 5000
        for k in range(R // chunk):
            Z = gaussian_draws(RngStream(70, int(shift), k), chunk * n * p).reshape(chunk, n, p) + mu
            xbar = Z.mean(axis=1)
            s2 = Z.var(axis=1, ddof=1).sum(axis=1)
            vals[k * chunk:(k + 1) * chunk] = (xbar**2).sum(axis=1) - sys.beta[0] * s2 * (n - 1) / n / n
        assert abs(vals.mean() - target) < 4 * vals.std(ddof=1) / math.sqrt(R)


@pytest.mark.slow
def test_m_statistic_matches_vectorised_route():
    # the vectorised route above relies on this identity for M = 0
    X = np.random.default_rng(13).standard_normal((50, 20)) + 0.2
    sys = debias_system(50, 0)
    direct = (X.mean(0) ** 2).sum() - sys.beta[0] * X.var(axis=0, ddof=1).sum() * 49 / 50 / 50
    assert m_statistic(X, sys) == pytest.approx(direct, rel=1e-10)


def _limit_statistic(spec, n, size, seed):
    """Draws of the standardised quadratic form with exact Omega_n."""
    ev = np.linalg.eigvalsh(omega(spec, n))
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((size, ev.size))
    return ((z**2 - 1) @ ev) / math.sqrt(2 * (ev**2).sum())


@pytest.mark.slow
def test_pvalues_follow_limit_model_two():
    # at p = n = 100 the quadratic form is still visibly skewed, so the
    # reference is its exact-Omega limit rather than N(0, 1)
    spec = model_spec("II", 100)
    R = 2000
    T = np.array([run_one(generate(spec, 100, RngStream(71, 0, r)), 1).statistic for r in range(R)])
    ref = _limit_statistic(spec, 100, 200_000, seed=1)
    assert stats.ks_2samp(T, ref).statistic < 0.05
    rate = (T > normal_quantile(0.95)).mean()
    assert 0.03 <= rate <= 0.09
