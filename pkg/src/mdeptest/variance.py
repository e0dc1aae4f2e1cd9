"""Variance of the debiased numerator.

The variance of ``M_n`` is ``2 sum_{a,b} xi(a,b) tr(Gamma(a) Gamma(b))`` over
the full lag grid ``[-M, M]^2``.  Each trace product is estimated from
pairs ``(t, s)`` that are more than M apart, with a local mean taken over
observations independent of the four observations in the summand.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .autocov import check_lag_order, gram
from .dataio import as_array
from .debias import chi
from .errors import ConfigError, DimensionError, EmptyIndexSetError


@dataclass(frozen=True)
class XiWeights:
    """Weights on the lag grid; ``xi[a + M, b + M]`` is the weight of (a, b)."""

    xi: np.ndarray
    n: int
    M: int
    include_chi: bool = True

    def at(self, a, b):
        return float(self.xi[a + self.M, b + self.M])


@dataclass(frozen=True)
class TraceProductTable:
    """Estimates of ``tr(Gamma(a) Gamma(b))``; index ``[a + M, b + M]``."""

    est: np.ndarray
    counts: np.ndarray
    n: int
    M: int
    min_local: int

    def at(self, a, b):
        return float(self.est[a + self.M, b + self.M])


def min_sample_size(M):
    return 4 * (M + 1) + 2


def xi_weights(n, M, include_chi=True):
    check_lag_order(n, M)
    lags = np.arange(-M, M + 1)
    w = 1.0 - np.abs(lags) / n
    factor = (1.0 + chi(n, M)) if include_chi else 1.0
    xi = factor * np.outer(w, w) / n**2
    return XiWeights(xi=xi, n=n, M=M, include_chi=include_chi)


def _valid_range(n, lag):
    return range(max(0, -lag), min(n, n - lag))


def index_set_A(n, M, a, b):
    """Pairs ``(t, s)`` (1-based) entering the estimate of ``tr(Gamma(a)Gamma(b))``.

    Both ``t, t + a`` and ``s, s + b`` must lie in ``1..n``, with
    ``|t - s| > M`` and ``|t + a - s - b| > M``.
    """
    if not (-M <= a <= M and -M <= b <= M):
        raise DimensionError(f"lags ({a}, {b}) outside [-{M}, {M}]")
    pairs = [
        (t + 1, s + 1)
        for t in _valid_range(n, a)
        for s in _valid_range(n, b)
        if abs(t - s) > M and abs(t + a - s - b) > M
    ]
    if not pairs:
        raise EmptyIndexSetError(f"n={n} too small for M={M}: no pairs for lags ({a}, {b})")
    return pairs


def local_index_set(n, t, s, a, b, M):
    """Indices ``i`` (1-based) with ``min(|i-t|, |i-s|, |i-t-a|, |i-s-b|) > M``."""
    excluded = set()
    for c in (t, s, t + a, s + b):
        excluded.update(range(max(1, c - M), min(n, c + M) + 1))
    return [i for i in range(1, n + 1) if i not in excluded]


def local_mean_excluding(gm, t, s, a, b, M):
    """Local mean size and inner products of the local mean with every row.

    Parameters
    ----------
    gm : GramMatrix
    t, s, a, b, M : int
        1-based pair ``(t, s)`` and lags.

    Returns
    -------
    m_b : int
        Number of observations averaged.
    inner : ndarray (n,)
        ``inner[u - 1]`` is ``Xbar_*' X_u``.
    """
    n = gm.n
    kept = np.array(local_index_set(n, t, s, a, b, M), dtype=int) - 1
    m_b = kept.size
    if m_b == 0:
        raise EmptyIndexSetError(f"n={n} too small for M={M}: empty local set at (t={t}, s={s})")
    excluded = np.setdiff1d(np.arange(n), kept)
    inner = (gm.row_sums - gm.g[excluded].sum(axis=0)) / m_b
    return m_b, inner


def _check_size(n, M, label="sample"):
    check_lag_order(n, M)
    if n < min_sample_size(M):
        raise DimensionError(
            f"{label} size n={n} too small for M={M}; need n >= {min_sample_size(M)}"
        )


def _table(est, counts, min_local, n, M):
    if counts.min() == 0 or min_local <= 0:
        raise EmptyIndexSetError(f"n={n} too small for M={M}: empty gapped index set")
    return TraceProductTable(est=est, counts=counts, n=n, M=M, min_local=min_local)


def trace_product_table(X, M, gm=None):
    """Estimates of ``tr(Gamma(a) Gamma(b))`` for all ``-M <= a, b <= M``."""
    values = as_array(X)
    n = values.shape[0]
    _check_size(n, M)
    if gm is None:
        gm = gram(values)
    est, counts, min_local = kernels.trace_product_grid(gm.g, M)
    return _table(est, counts, min_local, n, M)


def cross_trace_table(X1, X2, M):
    """Estimates of ``tr(Gamma1(a) Gamma2(b))`` for two independent samples."""
    v1 = as_array(X1)
    v2 = as_array(X2)
    if v1.shape[1] != v2.shape[1]:
        raise DimensionError(f"dimension mismatch: p1={v1.shape[1]}, p2={v2.shape[1]}")
    _check_size(v1.shape[0], M, "first sample")
    _check_size(v2.shape[0], M, "second sample")
    est, counts, min_local = kernels.cross_trace_grid(v1 @ v2.T, M)
    return _table(est, counts, min_local, min(v1.shape[0], v2.shape[0]), M)


def variance_estimate(table, xi):
    """``2 * sum_{a,b} xi(a,b) * table(a,b)``; may be non-positive."""
    if (table.n, table.M) != (xi.n, xi.M):
        raise ConfigError(
            f"trace table for (n={table.n}, M={table.M}) does not match weights "
            f"for (n={xi.n}, M={xi.M})"
        )
    return float(2.0 * np.sum(xi.xi * table.est))


def cross_variance_term(table, n1, n2):
    """``(4 / (n1 n2)) * sum_{a,b} (1-|a|/n1)(1-|b|/n2) tr_hat(Gamma1(a) Gamma2(b))``."""
    lags = np.arange(-table.M, table.M + 1)
    w1 = 1.0 - np.abs(lags) / n1
    w2 = 1.0 - np.abs(lags) / n2
    return float(4.0 / (n1 * n2) * (w1 @ table.est @ w2))
