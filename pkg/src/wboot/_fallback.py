"""Pure numpy/Python implementations of the hot loops.

Used when the compiled extension is unavailable or when ``WBOOT_PURE_PYTHON``
is set. Every function here has the same signature and semantics as its
counterpart in ``_kernels.pyx``.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d

_RESCAN_CELLS = 1 << 22


def sup_abs_prefix(W, order, ends):
    W = np.asarray(W, dtype=np.float64)
    n = W.shape[1]
    D = np.cumsum(W[:, order] - 1.0 / n, axis=1)[:, ends]
    return np.maximum(np.abs(D).max(axis=1), 0.0)


def partial_sum_max_rescan(ranks, C, n_groups):
    """O(n * n_groups) rescan; recomputes every prefix profile from scratch per k."""
    C = np.asarray(C, dtype=np.float64)
    r, n = C.shape
    out = np.zeros(r)
    block = max(1, _RESCAN_CELLS // max(n_groups, 1))
    for row in range(r):
        acc = np.zeros(n_groups)
        best = 0.0
        for start in range(0, n, block):
            stop = min(n, start + block)
            m = np.zeros((stop - start, n_groups))
            m[np.arange(stop - start), ranks[start:stop]] = C[row, start:stop]
            prof = np.cumsum(np.cumsum(m, axis=0) + acc, axis=1)
            best = max(best, float(np.abs(prof).max()))
            acc = acc + m.sum(axis=0)
        out[row] = best
    return out


def partial_sum_max_tree(ranks, C, n_groups):
    """Incremental prefix-extrema segment tree, O(n log n) per row."""
    C = np.asarray(C, dtype=np.float64)
    r, n = C.shape
    size = 1
    while size < n_groups:
        size <<= 1
    out = np.zeros(r)
    rank_list = [int(x) for x in ranks]
    for row in range(r):
        s = [0.0] * (2 * size)
        mx = [0.0] * (2 * size)
        mn = [0.0] * (2 * size)
        best = 0.0
        for k, c in enumerate(C[row].tolist()):
            p = rank_list[k] + size
            s[p] += c
            mx[p] = mn[p] = s[p]
            p >>= 1
            while p:
                lc, rc = 2 * p, 2 * p + 1
                sl = s[lc]
                s[p] = sl + s[rc]
                mx[p] = max(mx[lc], sl + mx[rc])
                mn[p] = min(mn[lc], sl + mn[rc])
                p >>= 1
            best = max(best, mx[1], -mn[1])
        out[row] = best
    return out


def partial_sum_max(ranks, C, n_groups):
    C = np.asarray(C, dtype=np.float64)
    if C.shape[1] <= 1000:
        return partial_sum_max_rescan(ranks, C, n_groups)
    return partial_sum_max_tree(ranks, C, n_groups)


def window_range_max(v, L):
    v = np.asarray(v, dtype=np.float64)
    if v.size == 0:
        return 0.0
    # filters are centred; shift so each window is v[i:i+L+1]
    size = L + 1
    origin = -(size // 2)
    hi = maximum_filter1d(v, size=size, origin=origin, mode="nearest")
    lo = minimum_filter1d(v, size=size, origin=origin, mode="nearest")
    return float((hi - lo).max())
