"""Exact debiasing of the trace of the long-run covariance.

For an M-dependent stationary process with ``gamma[j] = tr Gamma(j)`` the
expected traces of the biased sample autocovariances are linear in
``gamma``: ``E[gamma_hat] = Theta @ gamma``.  Solving ``Theta' beta = b``
with ``b' gamma = tr(Omega_n)`` gives the exactly unbiased estimator
``beta' gamma_hat``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .autocov import check_lag_order
from .errors import ConfigError, SingularSystemError


def _lag_counts(n, M):
    """``counts[u, j] = #{s in 1..n : |s - u| = j}`` for u = 1..n, j = 0..M."""
    u = np.arange(1, n + 1)[:, None]
    j = np.arange(M + 1)[None, :]
    below = (u - j >= 1).astype(float)
    above = (u + j <= n).astype(float)
    return np.where(j == 0, 1.0, below + above)


def theta_matrix(n, M):
    """Coefficient matrix of ``tr Gamma(j)`` in ``E[tr Gamma_hat(h)]``.

    Derived from
    ``E[(X_t - Xbar)'(X_{t+h} - Xbar)] = gamma(h) - (1/n) sum_s gamma(t+h-s)
    - (1/n) sum_s gamma(s-t) + (1/n^2) sum_{s,s'} gamma(s-s')``
    folded onto non-negative lags and truncated beyond M.
    """
    check_lag_order(n, M)
    counts = _lag_counts(n, M)
    j = np.arange(M + 1)
    # sum_{s,s'} gamma(s - s') coefficients
    double_sum = np.where(j == 0, float(n), 2.0 * (n - j)) / n**2
    theta = np.empty((M + 1, M + 1))
    for h in range(M + 1):
        m = n - h
        row = -(counts[h : h + m].sum(axis=0) + counts[:m].sum(axis=0)) / n
        row += m * double_sum
        row[h] += m
        theta[h] = row / n
    return theta


def b_vector(n, M):
    """Weights with ``b' gamma = tr Gamma(0) + 2 sum_h (1 - h/n) tr Gamma(h)``."""
    check_lag_order(n, M)
    b = 2.0 * (1.0 - np.arange(M + 1) / n)
    b[0] = 1.0
    return b


@dataclass(frozen=True)
class DebiasSystem:
    n: int
    M: int
    theta: np.ndarray
    b: np.ndarray
    beta: np.ndarray
    chi_n: float


def chi(n, M):
    h = np.arange(1, M + 1)
    return float(np.sum((1.0 - h / n) ** 2) / n)


def debias_system(n, M):
    theta = theta_matrix(n, M)
    b = b_vector(n, M)
    lu, piv = lu_factor(theta.T, check_finite=True)
    if np.abs(np.diag(lu)).min() < 1e-12 * np.abs(theta).max():
        raise SingularSystemError(f"debiasing matrix is singular for n={n}, M={M}")
    beta = lu_solve((lu, piv), b)
    for arr in (theta, b, beta):
        arr.setflags(write=False)
    return DebiasSystem(n=n, M=M, theta=theta, b=b, beta=beta, chi_n=chi(n, M))


def tr_omega_hat(gamma_hat, sys):
    """Unbiased estimate of ``tr(Omega_n)`` from sample autocovariance traces."""
    if (gamma_hat.n, gamma_hat.M) != (sys.n, sys.M):
        raise ConfigError(
            f"autocovariances built for (n={gamma_hat.n}, M={gamma_hat.M}) "
            f"but debias system is for (n={sys.n}, M={sys.M})"
        )
    return float(sys.beta @ gamma_hat.gamma_hat)
