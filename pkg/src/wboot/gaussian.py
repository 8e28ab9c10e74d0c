"""Brownian bridges, Kiefer fields and the Kolmogorov distribution.

Bridges are built as ``B(t) = W(t) - t W(1)`` from exact Gaussian increments
of a Brownian motion on the grid, so finite-dimensional laws on the grid are
exact. A Kiefer field row ``k`` is the sum of ``k`` independent bridges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend

DEFAULT_BRIDGE_POINTS = 2**12 + 1
DEFAULT_MODULUS_POINTS = 2**16 + 1

# Series constants (implementation constants, not statistical ones).
_SERIES_TERM_FLOOR = 1e-16
_SERIES_MAX_TERMS = 100
_DEGENERATE_X = 0.02
_SMALL_X_SWITCH = 1.0
_QUANTILE_BRACKET = (0.02, 5.0)
_QUANTILE_TOL = 1e-10


@dataclass(frozen=True)
class BridgePath:
    grid: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class KieferField:
    """``values[k-1, j]`` is ``K(grid[j], k)`` for ``k = 1..k_max``."""

    grid: np.ndarray
    k_max: int
    values: np.ndarray


def uniform_grid(points: int = DEFAULT_BRIDGE_POINTS) -> np.ndarray:
    if points < 2:
        raise ValueError("a grid needs at least 2 points")
    return np.linspace(0.0, 1.0, points)


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 1 or g.size < 2:
        raise ValueError("grid must be a 1-d array with at least 2 points")
    if g[0] != 0.0 or g[-1] != 1.0:
        raise ValueError("grid must start at 0 and end at 1")
    if np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing")
    return g


def sample_bridges(grid, reps: int, stream: np.random.Generator) -> np.ndarray:
    """``(reps, len(grid))`` array of independent bridge paths."""
    g = _check_grid(grid)
    dt = np.diff(g)
    w = np.zeros((reps, g.size))
    np.cumsum(stream.standard_normal((reps, g.size - 1)) * np.sqrt(dt), axis=1, out=w[:, 1:])
    b = w - g * w[:, -1:]
    b[:, 0] = 0.0
    b[:, -1] = 0.0
    return b


def sample_bridge(grid, stream: np.random.Generator) -> BridgePath:
    """One Brownian bridge with ``Cov(B(s), B(t)) = min(s, t) - s t`` on ``grid``."""
    g = _check_grid(grid)
    return BridgePath(g, sample_bridges(g, 1, stream)[0])


def sample_kiefer(grid, k_max: int, stream: np.random.Generator) -> KieferField:
    """Kiefer field with ``Cov(K(s, j), K(t, k)) = (min(s, t) - s t) min(j, k)``."""
    if int(k_max) < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    g = _check_grid(grid)
    rows = sample_bridges(g, int(k_max), stream)
    return KieferField(g, int(k_max), np.cumsum(rows, axis=0))


def kiefer_sup_max(grid, k_max: int, stream: np.random.Generator) -> float:
    """``max_{k <= k_max} sup_t |K(t, k)|`` of one Kiefer field, without storing it."""
    g = _check_grid(grid)
    acc = np.zeros(g.size)
    best = 0.0
    block = max(1, (1 << 20) // g.size)
    for start in range(0, int(k_max), block):
        rows = sample_bridges(g, min(block, int(k_max) - start), stream)
        cum = np.cumsum(rows, axis=0) + acc
        best = max(best, float(np.abs(cum).max()))
        acc = cum[-1]
    return best


def _kolmogorov_alternating(x: float) -> float:
    total = 0.0
    for k in range(1, _SERIES_MAX_TERMS + 1):
        term = math.exp(-2.0 * k * k * x * x)
        total += term if k % 2 else -term
        if term < _SERIES_TERM_FLOOR:
            break
    return 1.0 - 2.0 * total


def _kolmogorov_theta(x: float) -> float:
    # Jacobi-transformed series; converges fast where the alternating one cancels badly.
    c = math.pi * math.pi / (8.0 * x * x)
    total = 0.0
    for j in range(1, _SERIES_MAX_TERMS + 1):
        term = math.exp(-(2 * j - 1) ** 2 * c)
        total += term
        if term < _SERIES_TERM_FLOOR * total or term == 0.0:
            break
    return math.sqrt(2.0 * math.pi) / x * total


def kolmogorov_cdf(x: float) -> float:
    """``P(sup_{0<=t<=1} |B(t)| <= x)``."""
    x = float(x)
    if x < 0 or math.isnan(x):
        raise ValueError(f"kolmogorov_cdf needs x >= 0, got {x}")
    if x <= _DEGENERATE_X:
        return 0.0
    v = _kolmogorov_theta(x) if x < _SMALL_X_SWITCH else _kolmogorov_alternating(x)
    return min(1.0, max(0.0, v))


def kolmogorov_cdf_array(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.vectorize(kolmogorov_cdf, otypes=[np.float64])(x) if x.size else x.copy()


def kolmogorov_quantile(p: float) -> float:
    """Inverse of :func:`kolmogorov_cdf` by bisection on ``[0.02, 5]``."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    lo, hi = _QUANTILE_BRACKET
    while hi - lo > _QUANTILE_TOL:
        mid = 0.5 * (lo + hi)
        if kolmogorov_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def compose_with_cdf(path: BridgePath, true_cdf, t_grid, max_gap: float | None = None) -> np.ndarray:
    """``B(F(t))`` by linear interpolation of the path at ``F(t)``."""
    t = np.asarray(t_grid, dtype=np.float64)
    if t.size > 1 and np.any(np.diff(t) < 0):
        raise ValueError("t_grid must be sorted ascending")
    if max_gap is not None and np.max(np.diff(path.grid)) > max_gap:
        raise ValueError(f"path grid gap {np.max(np.diff(path.grid)):.3g} exceeds {max_gap:.3g}")
    u = np.asarray(true_cdf(t), dtype=np.float64)
    if np.any((u < 0) | (u > 1)):
        raise ValueError("true_cdf returned values outside [0, 1]")
    out = np.interp(u, path.grid, path.values)
    out[(u == 0.0) | (u == 1.0)] = 0.0
    return out


def modulus_statistic(path: BridgePath, delta: float) -> float:
    """``sup_{|u-v| <= delta} |B(u) - B(v)| / sqrt(2 delta log(1/delta))`` over grid pairs.

    The grid must be uniform with spacing at most ``delta / 16``.
    """
    delta = float(delta)
    if not 0.0 < delta < 0.5 + 1e-12:
        raise ValueError(f"delta must lie in (0, 1/2], got {delta}")
    g = np.asarray(path.grid, dtype=np.float64)
    steps = np.diff(g)
    spacing = (g[-1] - g[0]) / (g.size - 1)
    if not np.allclose(steps, spacing, rtol=1e-9, atol=0.0):
        raise ValueError("modulus_statistic needs a uniform grid")
    if spacing > delta / 16.0 * (1 + 1e-12):
        raise ValueError(f"grid spacing {spacing:.3g} too coarse for delta={delta:.3g} (need <= delta/16)")
    window = int(math.floor(delta / spacing + 1e-9))
    v = np.ascontiguousarray(path.values, dtype=np.float64)
    return float(_backend.window_range_max(v, window)) / math.sqrt(2.0 * delta * math.log(1.0 / delta))
