"""Monte Carlo harness checking the distributional consequences of the approximations.

The couplings behind the rate statements are existence results, so the
harness compares laws instead of paths: for each sample size it simulates the
bootstrap statistic and reports its exact Kolmogorov-Smirnov distance to the
reference law next to the theoretical rate envelope.

Sup statistics of the bootstrapped process depend on the data only through
their ranks, so the default data distribution (standard uniform) is no loss
of generality for continuous ``F``.
"""

from __future__ import annotations

import json
import math
from collections.abc import Callable
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
from scipy.special import ndtr

from . import __version__
from .bands import band_table, cdf_confidence_band, coverage_experiment, estimate_band_radius, kde_confidence_band
from .empirical import Sample, partial_sum_process_maxes, sup_process_distances
from .gaussian import kiefer_sup_max, kolmogorov_cdf_array, sample_bridges, uniform_grid
from .kde import (
    BandwidthRule,
    bootstrap_kde,
    gamma_star,
    get_kernel,
    modulus_envelope,
    smoothed_bridges,
    sup_gamma_star,
    sup_grid,
)
from .streams import derive_substream, map_blocks
from .weights import WeightScheme, draw_weight_matrix, draw_weight_vector

EXPERIMENTS = ("rates", "kiefer-rates", "kde-rates", "coverage", "band", "kde-band", "simulate")
RATE_EXPERIMENTS = ("rates", "kiefer-rates", "kde-rates")
STATISTICS = ("sup-alpha", "partial-sum", "sup-gamma", "bridge-sup", "kiefer-sup")
QUANTILES = (0.5, 0.9, 0.95, 0.99)
BLOCK = 50

# First substream label of each experiment; part of the reproducibility contract.
_CODES = {"rates": 1, "kiefer-rates": 2, "kde-rates": 3, "coverage": 4, "band": 5, "kde-band": 6, "simulate": 7}


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


@dataclass(frozen=True)
class Distribution:
    name: str
    sampler: Callable[[np.random.Generator, int], np.ndarray]
    cdf: Callable[[np.ndarray], np.ndarray]
    density_bound: float


DISTRIBUTIONS = {
    "uniform": Distribution("uniform", lambda rng, n: rng.random(n),
                            lambda t: np.clip(np.asarray(t, dtype=np.float64), 0.0, 1.0), 1.0),
    "normal": Distribution("normal", lambda rng, n: rng.standard_normal(n), ndtr, 1.0 / math.sqrt(2 * math.pi)),
    "exponential": Distribution("exponential", lambda rng, n: rng.standard_exponential(n),
                                lambda t: -np.expm1(-np.maximum(np.asarray(t, dtype=np.float64), 0.0)), 1.0),
}


@dataclass
class ExperimentConfig:
    experiment: str
    n_grid: list[int] = field(default_factory=lambda: [100, 400, 1600, 6400])
    reps: int = 1000
    seed: int = 0
    scheme: dict = field(default_factory=lambda: {"kind": "exp-bayesian"})
    distribution: str = "uniform"
    kernel: str = "epanechnikov"
    bandwidth: dict = field(default_factory=lambda: {"c": 1.0, "gamma": 0.2})
    grid_per_bandwidth: int = 32
    kiefer_grid: int = 128
    sheet_reference: bool = True
    smoothed_bridge_reference: bool = False
    n: int = 500
    n_boot: int = 999
    alpha: float = 0.05
    statistic: str = "sup-alpha"
    data: str | None = None
    header: bool = False
    grid_points: int = 201
    out: str | None = None
    summary: str | None = None

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ExperimentConfig:
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in d:
            raise ConfigError("config must name an 'experiment'")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        ns = [int(x) for x in self.n_grid]
        if not ns or any(x < 1 for x in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigError(f"n_grid must be strictly increasing positive integers, got {self.n_grid}")
        self.n_grid = ns
        if self.experiment in RATE_EXPERIMENTS:
            if self.reps < 100:
                raise ConfigError(f"rate experiments need reps >= 100, got {self.reps}")
            if ns[0] < 2:
                raise ConfigError("rate experiments need n >= 2 (the log n envelope vanishes at n = 1)")
        if self.experiment == "coverage" and self.reps < 100:
            raise ConfigError(f"coverage needs reps >= 100, got {self.reps}")
        if self.reps < 1 or self.n < 1 or self.n_boot < 1:
            raise ConfigError("reps, n and n_boot must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.distribution not in DISTRIBUTIONS:
            raise ConfigError(f"unknown distribution {self.distribution!r}; expected one of {sorted(DISTRIBUTIONS)}")
        if self.statistic not in STATISTICS:
            raise ConfigError(f"unknown statistic {self.statistic!r}; expected one of {STATISTICS}")
        if self.kiefer_grid < 1 or self.grid_per_bandwidth < 1 or self.grid_points < 2:
            raise ConfigError("kiefer_grid, grid_per_bandwidth must be >= 1 and grid_points >= 2")
        try:
            self.weight_scheme()
            self.kernel_spec()
            self.bandwidth_rule()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def weight_scheme(self) -> WeightScheme:
        return WeightScheme.from_config(self.scheme)

    def kernel_spec(self):
        return get_kernel(self.kernel)

    def bandwidth_rule(self) -> BandwidthRule:
        b = dict(self.bandwidth)
        if b.get("h") is not None:
            return BandwidthRule(h=float(b["h"]))
        return BandwidthRule(c=float(b.get("c", 1.0)), gamma=float(b.get("gamma", 0.2)))

    @property
    def dist(self) -> Distribution:
        return DISTRIBUTIONS[self.distribution]


def ks_distance(values, cdf) -> float:
    """Exact sup distance between the empirical CDF of ``values`` and a continuous ``cdf``."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    r = v.size
    f = np.asarray(cdf(v), dtype=np.float64)
    i = np.arange(1, r + 1)
    return float(max(np.max(i / r - f), np.max(f - (i - 1) / r), 0.0))


def ks_2samp_distance(a, b) -> float:
    """Exact sup distance between two empirical CDFs."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    z = np.concatenate([a, b])
    fa = np.searchsorted(a, z, side="right") / a.size
    fb = np.searchsorted(b, z, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_se(reps: int, reps_other: int | None = None) -> float:
    """Binomial standard-error scale ``0.5 / sqrt(R)`` for a KS distance (two-sample if given)."""
    if reps_other is None:
        return 0.5 / math.sqrt(reps)
    return 0.5 * math.sqrt(1.0 / reps + 1.0 / reps_other)


def non_increasing_within(d: list[float], se: list[float], k: float = 2.0) -> bool:
    """``d[i+1] <= d[i] + k * sqrt(se[i]^2 + se[i+1]^2)`` for every consecutive pair."""
    return all(d[i + 1] <= d[i] + k * math.hypot(se[i], se[i + 1]) for i in range(len(d) - 1))


def _law_summary(x: np.ndarray) -> dict[str, Any]:
    q = np.quantile(x, QUANTILES)
    return {"mean": float(np.mean(x)), "sd": float(np.std(x, ddof=1)) if x.size > 1 else 0.0,
            "quantiles": {str(p): float(v) for p, v in zip(QUANTILES, q)}}


def _replicates(cfg: ExperimentConfig, n_index: int, stream_kind: int, one) -> np.ndarray:
    """``cfg.reps`` values of ``one(rng)``, blocked onto substreams."""
    def block(rng, _start, size):
        return np.array([one(rng) for _ in range(size)], dtype=np.float64)

    labels = (_CODES[cfg.experiment], n_index, stream_kind)
    return np.concatenate(map_blocks(cfg.reps, BLOCK, block, cfg.seed, labels))


def _report(cfg: ExperimentConfig, reference: str, results: list, summary: dict) -> dict[str, Any]:
    return {"experiment": cfg.experiment, "package_version": __version__, "seed": cfg.seed,
            "config": cfg.to_dict(), "reference": reference, "results": results, "summary": summary}


def sup_alpha_replicate(cfg: ExperimentConfig, n: int):
    scheme, dist = cfg.weight_scheme(), cfg.dist

    def one(rng):
        s = Sample.from_values(dist.sampler(rng, n))
        return sup_process_distances(s, draw_weight_matrix(scheme, n, 1, rng))[0]
    return one


def partial_sum_replicate(cfg: ExperimentConfig, n: int):
    scheme, dist = cfg.weight_scheme(), cfg.dist

    def one(rng):
        s = Sample.from_values(dist.sampler(rng, n))
        return partial_sum_process_maxes(s, draw_weight_matrix(scheme, n, 1, rng))[0]
    return one


def kiefer_replicate(cfg: ExperimentConfig, n: int):
    grid = uniform_grid(min(n, cfg.kiefer_grid) + 1)
    return lambda rng: kiefer_sup_max(grid, n, rng)


def pinned_sheet_replicate(cfg: ExperimentConfig, n: int):
    """``max sup |W(k/n, u) - (k/n) u W(1, 1)|`` for a Brownian sheet ``W`` on the Kiefer grid."""
    m = min(n, cfg.kiefer_grid)
    s = (np.arange(1, n + 1) / n)[:, None]
    u = (np.arange(1, m + 1) / m)[None, :]

    def one(rng):
        w = np.cumsum(np.cumsum(rng.standard_normal((n, m)), axis=0), axis=1) / math.sqrt(n * m)
        return float(np.abs(w - s * u * w[-1, -1]).max())
    return one


def sup_gamma_replicate(cfg: ExperimentConfig, n: int):
    scheme, dist, kernel = cfg.weight_scheme(), cfg.dist, cfg.kernel_spec()
    h = cfg.bandwidth_rule()(n)

    def one(rng):
        s = Sample.from_values(dist.sampler(rng, n))
        W = draw_weight_matrix(scheme, n, 1, rng)
        return sup_gamma_star(s, W, kernel, h, sup_grid(s, kernel, h, cfg.grid_per_bandwidth))[0]
    return one


def smoothed_bridge_replicate(cfg: ExperimentConfig, n: int):
    """``sup_x |int B(F(x - t h)) dK(t)|`` with ``B`` on a grid of gap at most ``h/64``."""
    dist, kernel = cfg.dist, cfg.kernel_spec()
    h = cfg.bandwidth_rule()(n)
    bgrid = uniform_grid(int(math.ceil(64.0 / h)) + 1)
    lo, hi = _support_quantiles(dist)
    span = kernel.half_width * h
    x = np.linspace(lo - span, hi + span, max(2, int(math.ceil((hi - lo + 2 * span) / (h / cfg.grid_per_bandwidth))) + 1))

    def one(rng):
        path = sample_bridges(bgrid, 1, rng)
        return float(np.abs(smoothed_bridges(path, bgrid, dist.cdf, kernel, h, x)).max())
    return one


def _support_quantiles(dist: Distribution) -> tuple[float, float]:
    return {"uniform": (0.0, 1.0), "normal": (-4.5, 4.5), "exponential": (0.0, 12.0)}[dist.name]


def bridge_sup_replicate(cfg: ExperimentConfig, n: int):
    grid = uniform_grid(n + 1)
    return lambda rng: float(np.abs(sample_bridges(grid, 1, rng)).max())


def run_rate_experiment(cfg: ExperimentConfig) -> dict[str, Any]:
    """Law of ``sup |alpha*_n|`` against the Kolmogorov law, with envelope ``log n / sqrt n``."""
    results, ds, ses, ratios = [], [], [], []
    for i, n in enumerate(cfg.n_grid):
        stats = _replicates(cfg, i, 0, sup_alpha_replicate(cfg, n))
        d = ks_distance(stats, kolmogorov_cdf_array)
        env = math.log(n) / math.sqrt(n)
        results.append({"n": n, "reps": int(stats.size), "statistic": _law_summary(stats), "ks_distance": d,
                        "ks_se": ks_se(stats.size), "envelope": env, "ratio": d / env})
        ds.append(d)
        ses.append(ks_se(stats.size))
        ratios.append(d / env)
    summary = {"non_increasing_within_2se": non_increasing_within(ds, ses),
               "ratio_max_over_min": max(ratios) / min(ratios) if min(ratios) > 0 else None}
    return _report(cfg, "kolmogorov", results, summary)


def run_kiefer_rate_experiment(cfg: ExperimentConfig) -> dict[str, Any]:
    """Partial-sum statistic against its Kiefer-field counterpart.

    Raw laws: ``max_k sup_t |sum_{i<=k}(w_i - 1/n) 1{X_i <= t}|`` and
    ``max_k sup_u |K(u, k)|``. Normalized laws multiply the first by
    ``sqrt n`` and divide the second by ``sqrt n``; the KS distance compares
    the normalized laws. With ``sheet_reference`` the report also gives the
    distance to a Brownian sheet pinned at ``(1, 1)``.
    """
    results, ds, ses = [], [], []
    for i, n in enumerate(cfg.n_grid):
        boot = _replicates(cfg, i, 0, partial_sum_replicate(cfg, n))
        kief = _replicates(cfg, i, 1, kiefer_replicate(cfg, n))
        boot_norm, kief_norm = boot * math.sqrt(n), kief / math.sqrt(n)
        d = ks_2samp_distance(boot_norm, kief_norm)
        env = n ** 0.25 * math.sqrt(math.log(n))
        row = {"n": n, "reps": int(boot.size), "kiefer_grid_points": min(n, cfg.kiefer_grid) + 1,
               "bootstrap_raw": _law_summary(boot), "kiefer_raw": _law_summary(kief),
               "bootstrap_normalized": _law_summary(boot_norm), "kiefer_normalized": _law_summary(kief_norm),
               "ks_distance": d, "ks_se": ks_se(boot.size, kief.size),
               "envelope": env, "envelope_normalized": env / math.sqrt(n) / math.sqrt(n)}
        if cfg.sheet_reference:
            sheet = _replicates(cfg, i, 2, pinned_sheet_replicate(cfg, n))
            row["pinned_sheet_normalized"] = _law_summary(sheet)
            row["pinned_sheet_ks_distance"] = ks_2samp_distance(boot_norm, sheet)
        results.append(row)
        ds.append(d)
        ses.append(row["ks_se"])
    summary = {"non_increasing_within_2se": non_increasing_within(ds, ses)}
    return _report(cfg, "kiefer", results, summary)


def run_kde_rate_experiment(cfg: ExperimentConfig) -> dict[str, Any]:
    """Law of ``sup_x |gamma*_n(x)|`` against the Kolmogorov law.

    The envelope is ``log n / sqrt n + h sqrt(log 1/h)``; both parts are
    reported. With ``smoothed_bridge_reference`` the report also gives the
    distance to the law of ``sup_x |int K((x - s)/h) dB(F(s))|``.
    """
    results, ds, ses, ratios = [], [], [], []
    rule = cfg.bandwidth_rule()
    for i, n in enumerate(cfg.n_grid):
        h = rule(n)
        stats = _replicates(cfg, i, 0, sup_gamma_replicate(cfg, n))
        d = ks_distance(stats, kolmogorov_cdf_array)
        comp = modulus_envelope(n, h, cfg.dist.density_bound)
        env = comp["kmt_term"] + comp["modulus_term"]
        row = {"n": n, "reps": int(stats.size), "h": h, "statistic": _law_summary(stats), "ks_distance": d,
               "ks_se": ks_se(stats.size), "envelope": env, "envelope_components": comp, "ratio": d / env}
        if cfg.smoothed_bridge_reference:
            ref = _replicates(cfg, i, 1, smoothed_bridge_replicate(cfg, n))
            row["smoothed_bridge"] = _law_summary(ref)
            row["smoothed_bridge_ks_distance"] = ks_2samp_distance(stats, ref)
        results.append(row)
        ds.append(d)
        ses.append(ks_se(stats.size))
        ratios.append(d / env)
    summary = {"non_increasing_within_2se": non_increasing_within(ds, ses),
               "ratio_max_over_min": max(ratios) / min(ratios) if min(ratios) > 0 else None}
    return _report(cfg, "kolmogorov", results, summary)


def run_coverage_experiment(cfg: ExperimentConfig, radius_override: float | None = None) -> dict[str, Any]:
    dist = cfg.dist
    rep = coverage_experiment(dist.cdf, dist.sampler, cfg.n, cfg.weight_scheme(), cfg.n_boot, cfg.alpha,
                              cfg.reps, cfg.seed, radius_override=radius_override)
    res = rep.as_dict()
    res.update(n=cfg.n, n_boot=cfg.n_boot, alpha=cfg.alpha, nominal=1.0 - cfg.alpha)
    return _report(cfg, "true-cdf", [res], {"coverage": rep.coverage, "se": rep.se})


def _load_data(cfg: ExperimentConfig) -> np.ndarray:
    from .io import read_sample_csv

    if not cfg.data:
        raise ConfigError(f"{cfg.experiment} requires --data (a single-column CSV)")
    try:
        return read_sample_csv(cfg.data, header=cfg.header)
    except OSError as exc:
        raise ConfigError(f"cannot read data file: {exc}") from exc


def run_band(cfg: ExperimentConfig) -> tuple[dict[str, Any], np.ndarray]:
    """CDF band for the data in ``cfg.data``; returns the report and ``(t, lower, fn, upper)`` rows."""
    s = Sample.from_values(_load_data(cfg))
    est = estimate_band_radius(s, cfg.weight_scheme(), cfg.n_boot, cfg.alpha, cfg.seed, labels=(_CODES["band"],))
    table = band_table(s, cdf_confidence_band(s, est.radius))
    summary = {"radius": est.radius, "alpha": cfg.alpha, "N": cfg.n_boot, "n": s.n, "seed": cfg.seed}
    return _report(cfg, "bootstrap", [], summary), table


def run_kde_band(cfg: ExperimentConfig) -> tuple[dict[str, Any], np.ndarray, np.ndarray]:
    """KDE band on a uniform grid over the padded data range.

    Returns the report, ``(x, lower, upper, f)`` rows, and ``(x, f, f_star,
    gamma_star)`` rows for one bootstrap draw.
    """
    s = Sample.from_values(_load_data(cfg))
    kernel, scheme = cfg.kernel_spec(), cfg.weight_scheme()
    h = cfg.bandwidth_rule()(s.n)
    span = kernel.half_width * h
    x = np.linspace(s.values[0] - span, s.values[-1] + span, cfg.grid_points)
    band = kde_confidence_band(s, kernel, h, scheme, cfg.n_boot, cfg.alpha, x, cfg.seed,
                               labels=(_CODES["kde-band"], 0))
    wv = draw_weight_vector(scheme, s.n, derive_substream(cfg.seed, (_CODES["kde-band"], 1)))
    f_star = bootstrap_kde(s, wv, kernel, h, x)
    g = gamma_star(s, wv, kernel, h, x)
    summary = {"radius": band.radius, "alpha": cfg.alpha, "N": cfg.n_boot, "n": s.n, "seed": cfg.seed,
               "h": h, "kernel": kernel.name, "normalization": "sqrt(n h^2)"}
    return (_report(cfg, "bootstrap", [], summary),
            np.column_stack([x, band.lower, band.upper, band.f]),
            np.column_stack([x, band.f, f_star, g]))


_SIMULATORS = {
    "sup-alpha": sup_alpha_replicate,
    "partial-sum": partial_sum_replicate,
    "sup-gamma": sup_gamma_replicate,
    "bridge-sup": bridge_sup_replicate,
    "kiefer-sup": kiefer_replicate,
}


def simulate(cfg: ExperimentConfig) -> list[tuple[int, int, float]]:
    """Raw per-replicate statistics as ``(n, rep, value)`` rows."""
    rows = []
    for i, n in enumerate(cfg.n_grid):
        vals = _replicates(cfg, i, 0, _SIMULATORS[cfg.statistic](cfg, n))
        rows.extend((n, r, float(v)) for r, v in enumerate(vals))
    return rows


RUNNERS = {
    "rates": run_rate_experiment,
    "kiefer-rates": run_kiefer_rate_experiment,
    "kde-rates": run_kde_rate_experiment,
    "coverage": run_coverage_experiment,
}


def dump_report(report: dict[str, Any]) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


__all__ = [
    "ConfigError", "DISTRIBUTIONS", "ExperimentConfig", "derive_substream", "dump_report", "ks_distance",
    "ks_2samp_distance", "run_coverage_experiment", "run_kde_rate_experiment", "run_kiefer_rate_experiment",
    "run_rate_experiment", "simulate",
]
