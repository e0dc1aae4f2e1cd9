"""Sample mean, Gram matrix and traces of sample autocovariances.

Everything downstream needs only inner products ``X_t'X_s``, so the
p x p autocovariance matrices are never formed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataio import as_array
from .errors import DimensionError


@dataclass(frozen=True)
class GramMatrix:
    g: np.ndarray
    row_sums: np.ndarray
    total: float

    @property
    def n(self):
        return self.g.shape[0]


@dataclass(frozen=True)
class TraceAutocovVector:
    """``gamma_hat[h]`` is the trace of the lag-h sample autocovariance."""

    gamma_hat: np.ndarray
    n: int
    M: int


def sample_mean(X):
    return as_array(X).mean(axis=0)


def _symmetric_product(A, B=None):
    g = A @ (A if B is None else B).T
    if B is None:
        # mirror the upper triangle so g is exactly symmetric
        iu = np.triu_indices(g.shape[0], 1)
        g[(iu[1], iu[0])] = g[iu]
    return g


def gram(X):
    """Gram matrix ``g[t, s] = X_t'X_s`` with its row sums and total."""
    values = np.atleast_2d(np.asarray(X.values if hasattr(X, "values") else X, dtype=float))
    g = _symmetric_product(values)
    row_sums = g.sum(axis=1)
    return GramMatrix(g=g, row_sums=row_sums, total=float(row_sums.sum()))


def centered_gram(gm):
    """Inner products of the mean-centred observations, from a Gram matrix."""
    n = gm.n
    r = gm.row_sums / n
    gc = gm.g - r[:, None] - r[None, :] + gm.total / n**2
    return gc


def check_lag_order(n, M):
    if M < 0:
        raise DimensionError(f"lag order must be non-negative, got M={M}")
    if M > n - 2:
        raise DimensionError(f"lag order M={M} needs at least M+2 observations, got n={n}")


def trace_autocov_from_gram(gm, M):
    n = gm.n
    check_lag_order(n, M)
    gc = centered_gram(gm)
    gamma = np.array([np.trace(gc, offset=h) for h in range(M + 1)]) / n
    return TraceAutocovVector(gamma_hat=gamma, n=n, M=M)


def trace_autocov(X, M):
    """Traces of the biased lag-h sample autocovariances, h = 0..M.

    Entry ``h`` is ``(1/n) sum_{t=1}^{n-h} (X_t - Xbar)'(X_{t+h} - Xbar)``
    with the global mean ``Xbar`` used at every lag.
    """
    values = as_array(X)
    check_lag_order(values.shape[0], M)
    return trace_autocov_from_gram(gram(values), M)


def trace_autocov_batch(X, M):
    """Vectorised :func:`trace_autocov` over a stack of samples.

    Parameters
    ----------
    X : ndarray, shape (R, n, p)
    M : int

    Returns
    -------
    ndarray, shape (R, M + 1)
    """
    X = np.asarray(X, dtype=float)
    R, n, p = X.shape
    check_lag_order(n, M)
    Xc = X - X.mean(axis=1, keepdims=True)
    out = np.empty((R, M + 1))
    for h in range(M + 1):
        out[:, h] = np.einsum("rtj,rtj->r", Xc[:, : n - h], Xc[:, h:]) / n
    return out
