"""Empirical and weighted-bootstrap distribution functions and their sup statistics.

All statistics are exact: ``F_n`` and ``F*_n`` jump at the same locations, so
the supremum over the real line of ``|F*_n - F_n|`` is attained at a jump
point or at its left limit, and nothing is evaluated on a grid.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from . import _backend, _fallback
from .weights import WeightVector

CdfFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Sample:
    """Observations sorted ascending, remembering the original draw order.

    ``perm[j]`` is the original index of the ``j``-th smallest value. Ties are
    kept; ``group_ends`` holds the last sorted position of each distinct value
    and ``ranks[i]`` the distinct-value index of original observation ``i``.
    """

    values: np.ndarray
    perm: np.ndarray
    distinct: np.ndarray = field(repr=False)
    group_ends: np.ndarray = field(repr=False)
    ranks: np.ndarray = field(repr=False)

    @classmethod
    def from_values(cls, x) -> Sample:
        x = np.asarray(x, dtype=np.float64).ravel()
        if x.size == 0:
            raise ValueError("sample must contain at least one observation")
        if not np.all(np.isfinite(x)):
            raise ValueError("sample values must be finite")
        perm = np.argsort(x, kind="stable").astype(np.int64)
        values = x[perm]
        new_group = np.empty(values.size, dtype=bool)
        new_group[0] = True
        new_group[1:] = values[1:] != values[:-1]
        starts = np.flatnonzero(new_group)
        group_ends = np.append(starts[1:] - 1, values.size - 1).astype(np.int64)
        sorted_rank = np.cumsum(new_group) - 1
        ranks = np.empty(values.size, dtype=np.int64)
        ranks[perm] = sorted_rank
        return cls(values, perm, values[starts], group_ends, ranks)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def original(self) -> np.ndarray:
        """Observations in draw order."""
        out = np.empty_like(self.values)
        out[self.perm] = self.values
        return out


def as_sample(x) -> Sample:
    return x if isinstance(x, Sample) else Sample.from_values(x)


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function.

    Equal to ``base`` left of ``jump_points[0]`` and to ``cum_values[k]`` on
    ``[jump_points[k], jump_points[k+1])``.
    """

    jump_points: np.ndarray
    cum_values: np.ndarray
    base: float = 0.0

    def __post_init__(self):
        jp = np.asarray(self.jump_points, dtype=np.float64)
        cv = np.asarray(self.cum_values, dtype=np.float64)
        if jp.shape != cv.shape or jp.ndim != 1:
            raise ValueError("jump_points and cum_values must be 1-d arrays of equal length")
        if jp.size > 1 and not np.all(np.diff(jp) > 0):
            raise ValueError("jump_points must be strictly increasing")
        object.__setattr__(self, "jump_points", jp)
        object.__setattr__(self, "cum_values", cv)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        idx = np.searchsorted(self.jump_points, t, side="right")
        return np.where(idx == 0, self.base, self.cum_values[np.maximum(idx - 1, 0)])

    def left_limit(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        idx = np.searchsorted(self.jump_points, t, side="left")
        return np.where(idx == 0, self.base, self.cum_values[np.maximum(idx - 1, 0)])

    def is_cdf(self, tol: float = 1e-12) -> bool:
        cv = self.cum_values
        return (self.base == 0.0 and cv.size > 0 and bool(np.all(np.diff(cv) >= -tol))
                and cv[0] >= -tol and abs(cv[-1] - 1.0) <= tol)


def ecdf(sample) -> StepFunction:
    """Empirical distribution function, with mass aggregated at tied values."""
    s = as_sample(sample)
    return StepFunction(s.distinct, (s.group_ends + 1) / s.n)


def _check_weights(s: Sample, weights) -> np.ndarray:
    w = weights.weights if isinstance(weights, WeightVector) else np.asarray(weights, dtype=np.float64)
    if w.shape != (s.n,):
        raise ValueError(f"weights have length {w.size}, sample has {s.n} observations")
    return w


def weighted_ecdf(sample, weights) -> StepFunction:
    """``t -> sum_i w_i 1{X_i <= t}`` with weights given in original draw order."""
    s = as_sample(sample)
    w = _check_weights(s, weights)
    return StepFunction(s.distinct, np.cumsum(w[s.perm])[s.group_ends])


def sup_process_distance(sample, weights) -> float:
    """Exact ``sup_t sqrt(n) |F*_n(t) - F_n(t)|``."""
    s = as_sample(sample)
    w = _check_weights(s, weights)
    W = np.ascontiguousarray(w[None, :])
    return float(np.sqrt(s.n) * _backend.sup_abs_prefix(W, s.perm, s.group_ends)[0])


def sup_process_distances(sample, W: np.ndarray) -> np.ndarray:
    """Row-wise :func:`sup_process_distance` for a ``(reps, n)`` weight matrix."""
    s = as_sample(sample)
    W = np.ascontiguousarray(W, dtype=np.float64)
    if W.ndim != 2 or W.shape[1] != s.n:
        raise ValueError(f"weight matrix must have shape (reps, {s.n}), got {W.shape}")
    return np.sqrt(s.n) * _backend.sup_abs_prefix(W, s.perm, s.group_ends)


def _sorted_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 1:
        raise ValueError("grid must be 1-d")
    if g.size > 1 and np.any(np.diff(g) < 0):
        raise ValueError("grid must be sorted ascending")
    return g


def process_on_grid(sample, weights, grid) -> np.ndarray:
    """The bootstrapped process ``sqrt(n) (F*_n - F_n)`` at each grid point."""
    s = as_sample(sample)
    g = _sorted_grid(grid)
    return np.sqrt(s.n) * (weighted_ecdf(s, weights)(g) - ecdf(s)(g))


def _eval_cdf(true_cdf: CdfFunction, t: np.ndarray) -> np.ndarray:
    v = np.asarray(true_cdf(t), dtype=np.float64)
    if np.any(v < 0.0) | np.any(v > 1.0) | np.any(np.isnan(v)):
        raise ValueError("true_cdf returned values outside [0, 1]")
    return v


def classical_process_on_grid(sample, true_cdf: CdfFunction, grid) -> np.ndarray:
    """``sqrt(n) (F_n - F)`` at each grid point, for a known ``F``."""
    s = as_sample(sample)
    g = _sorted_grid(grid)
    return np.sqrt(s.n) * (ecdf(s)(g) - _eval_cdf(true_cdf, g))


def sup_classical_distance(sample, true_cdf: CdfFunction) -> float:
    """Exact ``sup_t sqrt(n) |F_n(t) - F(t)|`` for continuous ``F``.

    Evaluated at each distinct jump point and its left limit.
    """
    s = as_sample(sample)
    fx = _eval_cdf(true_cdf, s.distinct)
    upper = (s.group_ends + 1) / s.n
    lower = np.concatenate(([0.0], upper[:-1]))
    return float(np.sqrt(s.n) * max(np.max(upper - fx), np.max(fx - lower), 0.0))


def decomposition_residual(sample, weights: WeightVector, true_cdf: CdfFunction, grid) -> float:
    """Max over ``grid`` of the gap between the two sides of

    ``sqrt(n)(F*_n - F_n) = (n/T_n) n^{-1/2} (sum_i Z_i 1{X_i<=t} - F T_n + (F - F_n) T_n)``.

    The identity is algebraic, so the residual is a floating-point self-check.
    """
    if not isinstance(weights, WeightVector) or weights.raw is None or weights.raw_sum is None:
        raise ValueError("decomposition_residual needs multiplier weights carrying Z and T_n; "
                         "efron and bare weight arrays are unsupported")
    s = as_sample(sample)
    g = _sorted_grid(grid)
    n = s.n
    lhs = process_on_grid(s, weights, g)
    t_n = weights.raw_sum
    z_sorted_cum = np.cumsum(weights.raw[s.perm])
    idx = np.searchsorted(s.values, g, side="right")
    z_below = np.where(idx == 0, 0.0, z_sorted_cum[np.maximum(idx - 1, 0)])
    f = _eval_cdf(true_cdf, g)
    fn = ecdf(s)(g)
    # (F - F_n) T_n expanded as F T_n - F_n T_n; with a shared F T_n the two
    # brackets cancel exactly whenever z_below == F_n T_n (e.g. n = 1)
    ft = f * t_n
    rhs = (n / t_n) * ((z_below - ft) + (ft - fn * t_n)) / np.sqrt(n)
    return float(np.max(np.abs(lhs - rhs))) if g.size else 0.0


def partial_sum_process_max(sample, weights, method: str = "auto") -> float:
    """Exact ``max_k sup_t |sum_{i<=k} (w_i - 1/n) 1{X_i <= t}|`` over draw order ``i``.

    ``method`` selects the incremental segment tree (``"tree"``), the
    quadratic rescan (``"rescan"``), or the backend default (``"auto"``).
    """
    s = as_sample(sample)
    w = _check_weights(s, weights)
    C = np.ascontiguousarray((w - 1.0 / s.n)[None, :])
    return float(_partial_sum_kernel(method)(s.ranks, C, s.distinct.size)[0])


def partial_sum_process_maxes(sample, W: np.ndarray, method: str = "auto") -> np.ndarray:
    """Row-wise :func:`partial_sum_process_max` for a ``(reps, n)`` weight matrix."""
    s = as_sample(sample)
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2 or W.shape[1] != s.n:
        raise ValueError(f"weight matrix must have shape (reps, {s.n}), got {W.shape}")
    C = np.ascontiguousarray(W - 1.0 / s.n)
    return _partial_sum_kernel(method)(s.ranks, C, s.distinct.size)


def _partial_sum_kernel(method: str):
    if method == "auto":
        return _backend.partial_sum_max
    if method == "rescan":
        return _fallback.partial_sum_max_rescan
    if method == "tree":
        if _backend.BACKEND == "cython":
            return _backend.partial_sum_max
        return _fallback.partial_sum_max_tree
    raise ValueError(f"unknown method {method!r}; expected 'auto', 'tree' or 'rescan'")
