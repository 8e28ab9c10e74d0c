"""Bootstrap confidence bands for a distribution function and for a density.

The band radius is the smallest ``z`` with ``(1/N) #{j : psi_j <= z} >= 1 - alpha``,
where ``psi_j`` is the exact sup-norm of the ``j``-th bootstrapped process.
That minimizer is the ``ceil(N (1 - alpha))``-th order statistic; no
interpolation is applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .empirical import StepFunction, as_sample, ecdf, sup_classical_distance, sup_process_distances
from .kde import BandwidthRule, KernelSpec, kde_estimate, sup_gamma_star
from .streams import derive_substream, map_blocks, parallel_map
from .weights import WeightScheme, draw_weight_matrix

# Bootstrap replicates are drawn in fixed-size blocks, one substream per block,
# so results do not depend on the number of workers.
BLOCK = 128


@dataclass(frozen=True)
class BandEstimate:
    radius: float
    alpha: float
    n_boot: int
    psi: np.ndarray


@dataclass(frozen=True)
class CdfBand:
    lower: StepFunction
    upper: StepFunction
    radius: float
    n: int


def order_statistic_index(n_boot: int, alpha: float) -> int:
    """0-based index of ``ceil(N (1 - alpha))``-th smallest value."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if n_boot < 1:
        raise ValueError(f"need at least one bootstrap replicate, got N={n_boot}")
    # guard against 0.95 * 1000 = 949.9999999999999
    k = math.ceil(n_boot * (1.0 - alpha) - 1e-9)
    return min(max(k, 1), n_boot) - 1


def radius_from_psi(psi, alpha: float) -> BandEstimate:
    psi = np.sort(np.asarray(psi, dtype=np.float64))
    return BandEstimate(float(psi[order_statistic_index(psi.size, alpha)]), float(alpha), psi.size, psi)


def _blocked(n_boot: int, fn, labels: tuple[int, ...], seed: int) -> np.ndarray:
    return np.concatenate(map_blocks(n_boot, BLOCK, lambda rng, _start, size: fn(rng, size), seed, labels))


def bootstrap_sup_statistics(sample, scheme: WeightScheme, n_boot: int, seed: int,
                             labels: tuple[int, ...] = (0,)) -> np.ndarray:
    """``psi_1..psi_N`` in replicate order, from substreams ``labels + (block,)``."""
    s = as_sample(sample)
    return _blocked(n_boot, lambda rng, r: sup_process_distances(s, draw_weight_matrix(scheme, s.n, r, rng)),
                    tuple(labels), seed)


def estimate_band_radius(sample, scheme: WeightScheme, n_boot: int, alpha: float, seed: int,
                         labels: tuple[int, ...] = (0,)) -> BandEstimate:
    """Bootstrap estimate of the ``1 - alpha`` quantile of ``sup |B(F(t))|``."""
    order_statistic_index(n_boot, alpha)
    return radius_from_psi(bootstrap_sup_statistics(sample, scheme, n_boot, seed, labels), alpha)


def cdf_confidence_band(sample, radius: float) -> CdfBand:
    """``F_n +/- radius / sqrt(n)`` clipped to ``[0, 1]``."""
    if radius < 0 or math.isnan(radius):
        raise ValueError(f"radius must be nonnegative, got {radius}")
    s = as_sample(sample)
    fn = ecdf(s)
    half = radius / math.sqrt(s.n)
    lower = StepFunction(fn.jump_points, np.clip(fn.cum_values - half, 0.0, 1.0), base=0.0)
    upper = StepFunction(fn.jump_points, np.clip(fn.cum_values + half, 0.0, 1.0), base=min(half, 1.0))
    return CdfBand(lower, upper, float(radius), s.n)


def band_table(sample, band: CdfBand) -> np.ndarray:
    """Rows ``(t, lower, F_n, upper)`` at each jump point."""
    fn = ecdf(sample)
    t = fn.jump_points
    return np.column_stack([t, band.lower(t), fn(t), band.upper(t)])


@dataclass(frozen=True)
class CoverageReport:
    coverage: float
    se: float
    reps: int
    covered: int
    radii: np.ndarray
    distances: np.ndarray

    def as_dict(self) -> dict:
        return {"coverage": self.coverage, "se": self.se, "reps": self.reps, "covered": self.covered,
                "mean_radius": float(self.radii.mean())}


def coverage_experiment(true_cdf, sampler, n: int, scheme: WeightScheme, n_boot: int, alpha: float,
                        reps: int, seed: int, radius_override: float | None = None) -> CoverageReport:
    """Empirical coverage of the bootstrap band for a known continuous ``F``.

    ``sampler(rng, n)`` draws a sample from ``F``. Replicate ``r`` uses
    substream ``(1, r)`` for the data and ``(2, r, block)`` for its bootstrap.
    ``radius_override`` skips the bootstrap (diagnostics).
    """
    if reps < 100:
        raise ValueError(f"coverage needs reps >= 100, got {reps}")

    def one(r):
        x = sampler(derive_substream(seed, (1, r)), n)
        s = as_sample(x)
        if radius_override is None:
            radius = estimate_band_radius(s, scheme, n_boot, alpha, seed, labels=(2, r)).radius
        else:
            radius = float(radius_override)
        return radius, sup_classical_distance(s, true_cdf)

    res = parallel_map(one, range(reps))
    radii = np.array([r for r, _ in res])
    dist = np.array([d for _, d in res])
    covered = int(np.sum(dist <= radii))
    cov = covered / reps
    return CoverageReport(cov, math.sqrt(max(cov * (1 - cov), 1e-300) / reps), reps, covered, radii, dist)


@dataclass(frozen=True)
class KdeBand:
    x: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    f: np.ndarray
    radius: float
    h: float
    estimate: BandEstimate


def kde_confidence_band(sample, kernel: KernelSpec, bandwidth: BandwidthRule | float, scheme: WeightScheme,
                        n_boot: int, alpha: float, x_grid, seed: int,
                        labels: tuple[int, ...] = (0,), uniform_weights: bool = False) -> KdeBand:
    """Band ``f_{n,h} +/- radius / sqrt(n h^2)`` floored at zero.

    The radius is the order statistic of ``sup_x |gamma*(x)|`` over ``N``
    weight draws; the sup is taken over ``x_grid``. ``uniform_weights`` is a
    diagnostic that replaces every draw by ``1/n``.
    """
    s = as_sample(sample)
    h = bandwidth(s.n) if isinstance(bandwidth, BandwidthRule) else float(bandwidth)
    x = np.asarray(x_grid, dtype=np.float64)
    order_statistic_index(n_boot, alpha)

    def block(rng, r):
        W = np.full((r, s.n), 1.0 / s.n) if uniform_weights else draw_weight_matrix(scheme, s.n, r, rng)
        return sup_gamma_star(s, W, kernel, h, x)

    est = radius_from_psi(_blocked(n_boot, block, tuple(labels), seed), alpha)
    f = kde_estimate(s, kernel, h, x)
    half = est.radius / math.sqrt(s.n * h * h)
    return KdeBand(x, np.maximum(f - half, 0.0), f + half, f, est.radius, h, est)
