# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Signatures mirror :mod:`wboot._fallback` exactly."""

import numpy as np

from libc.math cimport fabs


def sup_abs_prefix(const double[:, ::1] W, const long long[::1] order,
                   const long long[::1] ends):
    """Row-wise max over group ends of |cumsum(W[r, order] - 1/n)|, floored at 0."""
    cdef Py_ssize_t r = W.shape[0], n = W.shape[1], g = ends.shape[0]
    cdef Py_ssize_t i, j, e
    cdef double inv_n = 1.0 / n, acc, best, a
    out = np.zeros(r, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(r):
            acc = 0.0
            best = 0.0
            j = 0
            for e in range(g):
                while j <= ends[e]:
                    acc = acc + (W[i, order[j]] - inv_n)
                    j += 1
                a = fabs(acc)
                if a > best:
                    best = a
            o[i] = best
    return out


cdef inline void _tree_add(double* s, double* mx, double* mn, Py_ssize_t size,
                           Py_ssize_t leaf, double c) noexcept nogil:
    cdef Py_ssize_t p = leaf + size, lc, rc
    s[p] += c
    mx[p] = s[p]
    mn[p] = s[p]
    p >>= 1
    while p >= 1:
        lc = 2 * p
        rc = lc + 1
        s[p] = s[lc] + s[rc]
        mx[p] = mx[lc] if mx[lc] > s[lc] + mx[rc] else s[lc] + mx[rc]
        mn[p] = mn[lc] if mn[lc] < s[lc] + mn[rc] else s[lc] + mn[rc]
        p >>= 1


def partial_sum_max(const long long[::1] ranks, const double[:, ::1] C,
                    Py_ssize_t n_groups):
    """Row-wise max_k sup_t |sum_{i<=k} C[r, i] 1{rank_i <= t}| via a prefix-extrema segment tree."""
    cdef Py_ssize_t r = C.shape[0], n = C.shape[1]
    cdef Py_ssize_t size = 1, i, k
    cdef double best, a
    while size < n_groups:
        size <<= 1
    s_arr = np.zeros(2 * size, dtype=np.float64)
    mx_arr = np.zeros(2 * size, dtype=np.float64)
    mn_arr = np.zeros(2 * size, dtype=np.float64)
    cdef double[::1] s = s_arr, mx = mx_arr, mn = mn_arr
    out = np.zeros(r, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(r):
            for k in range(2 * size):
                s[k] = 0.0
                mx[k] = 0.0
                mn[k] = 0.0
            best = 0.0
            for k in range(n):
                _tree_add(&s[0], &mx[0], &mn[0], size, ranks[k], C[i, k])
                a = mx[1]
                if a > best:
                    best = a
                a = -mn[1]
                if a > best:
                    best = a
            o[i] = best
    return out


def window_range_max(const double[::1] v, Py_ssize_t L):
    """max over i of (max - min) of v[i:i+L+1], using monotone deques."""
    cdef Py_ssize_t m = v.shape[0], j
    cdef Py_ssize_t qh_head = 0, qh_tail = 0, ql_head = 0, ql_tail = 0
    cdef double best = 0.0, d
    hi_arr = np.empty(m, dtype=np.int64)
    lo_arr = np.empty(m, dtype=np.int64)
    cdef long long[::1] qh = hi_arr, ql = lo_arr
    if m == 0:
        return 0.0
    with nogil:
        for j in range(m):
            while qh_tail > qh_head and v[qh[qh_tail - 1]] <= v[j]:
                qh_tail -= 1
            qh[qh_tail] = j
            qh_tail += 1
            while ql_tail > ql_head and v[ql[ql_tail - 1]] >= v[j]:
                ql_tail -= 1
            ql[ql_tail] = j
            ql_tail += 1
            while qh[qh_head] < j - L:
                qh_head += 1
            while ql[ql_head] < j - L:
                ql_head += 1
            d = v[qh[qh_head]] - v[ql[ql_head]]
            if d > best:
                best = d
    return best
