"""NumPy implementation of the trace-product kernels.

Used when the compiled ``_kernels`` extension is not available.  Both
implementations share the conventions below.

Indices are 0-based.  ``prefix[u, k]`` is ``sum_{w < k} g[u, w]``, so the
sum of ``g[u, w]`` over ``w`` in ``[lo, hi]`` is
``prefix[u, hi + 1] - prefix[u, lo]``.

The local mean for a pair ``(t, s)`` at lags ``(a, b)`` excludes every
index within M of ``t``, ``t + a``, ``s`` or ``s + b``.  Since ``|a| <= M``
the neighbourhoods of ``t`` and ``t + a`` overlap and form the single
interval ``[t + min(a, 0) - M, t + max(a, 0) + M]``; likewise for ``s`` and
``s + b``.  The exclusion set is therefore the union of two clipped
intervals, handled by inclusion-exclusion.
"""
from __future__ import annotations

import numpy as np


def row_prefix(g):
    n_rows, n_cols = g.shape
    prefix = np.zeros((n_rows, n_cols + 1))
    np.cumsum(g, axis=1, out=prefix[:, 1:])
    return prefix


def _interval(centre, lag, M, n):
    lo = np.maximum(centre + min(lag, 0) - M, 0)
    hi = np.minimum(centre + max(lag, 0) + M, n - 1)
    return lo, hi


def _span_sum(prefix, rows, lo, hi):
    return prefix[rows, hi + 1] - prefix[rows, lo]


def trace_product_grid(g, M):
    """One-sample trace-product estimates on the lag grid ``[-M, M]^2``.

    Returns
    -------
    est : ndarray (2M+1, 2M+1)
    counts : ndarray (2M+1, 2M+1) of int
        Pair counts ``n_{a,b}``.
    min_local : int
        Smallest local-mean set size encountered (0 signals an empty set).
    """
    g = np.ascontiguousarray(g, dtype=float)
    n = g.shape[0]
    prefix = row_prefix(g)
    totals = prefix[:, n]
    size = 2 * M + 1
    est = np.zeros((size, size))
    counts = np.zeros((size, size), dtype=np.int64)
    min_local = n
    idx = np.arange(n)
    for a in range(-M, M + 1):
        t = idx[(idx + a >= 0) & (idx + a < n)]
        for b in range(-M, M + 1):
            s = idx[(idx + b >= 0) & (idx + b < n)]
            T, S = np.meshgrid(t, s, indexing="ij")
            keep = (np.abs(T - S) > M) & (np.abs(T + a - S - b) > M)
            T = T[keep]
            S = S[keep]
            counts[a + M, b + M] = T.size
            if T.size == 0:
                min_local = 0
                continue
            lt, ht = _interval(T, a, M, n)
            ls, hs = _interval(S, b, M, n)
            li = np.maximum(lt, ls)
            hi = np.minimum(ht, hs)
            overlap = li <= hi
            li = np.where(overlap, li, 0)
            hi = np.where(overlap, hi, -1)
            excluded = (ht - lt + 1) + (hs - ls + 1) - (hi - li + 1)
            sum_s = _span_sum(prefix, S, lt, ht) + _span_sum(prefix, S, ls, hs) - _span_sum(prefix, S, li, hi)
            sum_t = _span_sum(prefix, T, lt, ht) + _span_sum(prefix, T, ls, hs) - _span_sum(prefix, T, li, hi)
            m_b = n - excluded
            min_local = min(min_local, int(m_b.min()))
            # pairs with an empty local set are dropped, as in the compiled kernel
            ok = m_b > 0
            T, S, sum_s, sum_t, m_b = T[ok], S[ok], sum_s[ok], sum_t[ok], m_b[ok]
            left = g[T + a, S] - (totals[S] - sum_s) / m_b
            right = g[S + b, T] - (totals[T] - sum_t) / m_b
            est[a + M, b + M] = np.dot(left, right) / ok.size
    return est, counts, min_local


def cross_trace_grid(g12, M):
    """Cross-sample trace-product estimates on ``[-M, M]^2``.

    ``g12[t, s] = X1_t' X2_s``.  The local mean of sample 1 excludes the
    neighbourhoods of ``t`` and ``t + a``; that of sample 2 the
    neighbourhoods of ``s`` and ``s + b``.
    """
    g12 = np.ascontiguousarray(g12, dtype=float)
    n1, n2 = g12.shape
    pre1 = row_prefix(np.ascontiguousarray(g12.T))  # pre1[s, k] = sum_{w<k} g12[w, s]
    pre2 = row_prefix(g12)  # pre2[t, k] = sum_{w<k} g12[t, w]
    size = 2 * M + 1
    est = np.zeros((size, size))
    counts = np.zeros((size, size), dtype=np.int64)
    min_local = min(n1, n2)
    r1 = np.arange(n1)
    r2 = np.arange(n2)
    for a in range(-M, M + 1):
        t = r1[(r1 + a >= 0) & (r1 + a < n1)]
        for b in range(-M, M + 1):
            s = r2[(r2 + b >= 0) & (r2 + b < n2)]
            T, S = np.meshgrid(t, s, indexing="ij")
            T = T.ravel()
            S = S.ravel()
            counts[a + M, b + M] = T.size
            lt, ht = _interval(T, a, M, n1)
            ls, hs = _interval(S, b, M, n2)
            m1 = n1 - (ht - lt + 1)
            m2 = n2 - (hs - ls + 1)
            min_local = min(min_local, int(m1.min()), int(m2.min()))
            ok = (m1 > 0) & (m2 > 0)
            total = T.size
            T, S, lt, ht, ls, hs, m1, m2 = (v[ok] for v in (T, S, lt, ht, ls, hs, m1, m2))
            left = g12[T + a, S] - (pre1[S, n1] - _span_sum(pre1, S, lt, ht)) / m1
            right = g12[T, S + b] - (pre2[T, n2] - _span_sum(pre2, T, ls, hs)) / m2
            est[a + M, b + M] = np.dot(left, right) / total
    return est, counts, min_local
