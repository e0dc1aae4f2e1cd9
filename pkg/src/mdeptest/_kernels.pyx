# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trace-product kernels.

Same contract and conventions as ``_kernels_py``; see that module for the
prefix-sum layout and the two-interval exclusion sets.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def row_prefix(g):
    g = np.ascontiguousarray(g, dtype=np.float64)
    prefix = np.zeros((g.shape[0], g.shape[1] + 1))
    np.cumsum(g, axis=1, out=prefix[:, 1:])
    return prefix


cdef inline Py_ssize_t _lo(Py_ssize_t v) noexcept nogil:
    return 0 if v < 0 else v


cdef inline Py_ssize_t _hi(Py_ssize_t v, Py_ssize_t n) noexcept nogil:
    return n - 1 if v > n - 1 else v


def trace_product_grid(g_in, Py_ssize_t M):
    g_arr = np.ascontiguousarray(g_in, dtype=np.float64)
    cdef const double[:, ::1] g = g_arr
    cdef Py_ssize_t n = g.shape[0]
    prefix_arr = row_prefix(g_arr)
    cdef const double[:, ::1] pre = prefix_arr
    cdef Py_ssize_t size = 2 * M + 1
    est_arr = np.zeros((size, size))
    counts_arr = np.zeros((size, size), dtype=np.int64)
    cdef double[:, ::1] est = est_arr
    cdef long long[:, ::1] counts = counts_arr
    cdef Py_ssize_t a, b, t, s, t_lo, t_hi, s_lo, s_hi, d
    cdef Py_ssize_t lt, ht, ls, hs, li, hi, ex, m_b
    cdef Py_ssize_t a_lo, a_hi, b_lo, b_hi
    cdef Py_ssize_t min_local = n
    cdef double acc, sum_s, sum_t, left, right, tot_t
    cdef long long cnt
    with nogil:
        for a in range(-M, M + 1):
            t_lo = -a if a < 0 else 0
            t_hi = n - a if a > 0 else n
            a_lo = a if a < 0 else 0
            a_hi = a if a > 0 else 0
            for b in range(-M, M + 1):
                s_lo = -b if b < 0 else 0
                s_hi = n - b if b > 0 else n
                b_lo = b if b < 0 else 0
                b_hi = b if b > 0 else 0
                acc = 0.0
                cnt = 0
                for t in range(t_lo, t_hi):
                    # neighbourhood of t and t + a is one interval
                    lt = _lo(t + a_lo - M)
                    ht = _hi(t + a_hi + M, n)
                    tot_t = pre[t, n]
                    for s in range(s_lo, s_hi):
                        d = t - s
                        if d <= M and d >= -M:
                            continue
                        d = t + a - s - b
                        if d <= M and d >= -M:
                            continue
                        cnt += 1
                        ls = _lo(s + b_lo - M)
                        hs = _hi(s + b_hi + M, n)
                        ex = (ht - lt + 1) + (hs - ls + 1)
                        sum_s = (pre[s, ht + 1] - pre[s, lt]) + (pre[s, hs + 1] - pre[s, ls])
                        sum_t = (pre[t, ht + 1] - pre[t, lt]) + (pre[t, hs + 1] - pre[t, ls])
                        li = lt if lt > ls else ls
                        hi = ht if ht < hs else hs
                        if li <= hi:
                            ex -= hi - li + 1
                            sum_s -= pre[s, hi + 1] - pre[s, li]
                            sum_t -= pre[t, hi + 1] - pre[t, li]
                        m_b = n - ex
                        if m_b < min_local:
                            min_local = m_b
                        if m_b <= 0:
                            continue
                        left = g[t + a, s] - (pre[s, n] - sum_s) / m_b
                        right = g[s + b, t] - (tot_t - sum_t) / m_b
                        acc += left * right
                counts[a + M, b + M] = cnt
                if cnt == 0:
                    min_local = 0
                else:
                    est[a + M, b + M] = acc / cnt
    return est_arr, counts_arr, int(min_local)


def cross_trace_grid(g12_in, Py_ssize_t M):
    g12_arr = np.ascontiguousarray(g12_in, dtype=np.float64)
    cdef const double[:, ::1] g12 = g12_arr
    cdef Py_ssize_t n1 = g12.shape[0]
    cdef Py_ssize_t n2 = g12.shape[1]
    pre1_arr = row_prefix(g12_arr.T)
    pre2_arr = row_prefix(g12_arr)
    cdef const double[:, ::1] pre1 = pre1_arr
    cdef const double[:, ::1] pre2 = pre2_arr
    cdef Py_ssize_t size = 2 * M + 1
    est_arr = np.zeros((size, size))
    counts_arr = np.zeros((size, size), dtype=np.int64)
    cdef double[:, ::1] est = est_arr
    cdef long long[:, ::1] counts = counts_arr
    cdef Py_ssize_t a, b, t, s, t_lo, t_hi, s_lo, s_hi, m1, m2
    cdef Py_ssize_t lt, ht, ls, hs, a_lo, a_hi, b_lo, b_hi
    cdef Py_ssize_t min_local = n1 if n1 < n2 else n2
    cdef double acc, left, right, inner2
    cdef long long cnt
    with nogil:
        for a in range(-M, M + 1):
            t_lo = -a if a < 0 else 0
            t_hi = n1 - a if a > 0 else n1
            a_lo = a if a < 0 else 0
            a_hi = a if a > 0 else 0
            for b in range(-M, M + 1):
                s_lo = -b if b < 0 else 0
                s_hi = n2 - b if b > 0 else n2
                b_lo = b if b < 0 else 0
                b_hi = b if b > 0 else 0
                acc = 0.0
                cnt = 0
                for t in range(t_lo, t_hi):
                    lt = _lo(t + a_lo - M)
                    ht = _hi(t + a_hi + M, n1)
                    m1 = n1 - (ht - lt + 1)
                    if m1 < min_local:
                        min_local = m1
                    for s in range(s_lo, s_hi):
                        cnt += 1
                        ls = _lo(s + b_lo - M)
                        hs = _hi(s + b_hi + M, n2)
                        m2 = n2 - (hs - ls + 1)
                        if m2 < min_local:
                            min_local = m2
                        if m1 <= 0 or m2 <= 0:
                            continue
                        left = g12[t + a, s] - (pre1[s, n1] - pre1[s, ht + 1] + pre1[s, lt]) / m1
                        inner2 = pre2[t, n2] - pre2[t, hs + 1] + pre2[t, ls]
                        right = g12[t, s + b] - inner2 / m2
                        acc += left * right
                counts[a + M, b + M] = cnt
                if cnt > 0:
                    est[a + M, b + M] = acc / cnt
    return est_arr, counts_arr, int(min_local)
