"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test prints one ``PASS``/``FAIL`` line. Seeds are fixed up front and
were not tuned to make any criterion pass.
"""

import math
import time

import numpy as np
import pytest
from oracles import dense_grid_sup, kolmogorov_series

from wboot import derive_substream
from wboot.empirical import decomposition_residual, sup_process_distance
from wboot.experiments import (
    ExperimentConfig,
    dump_report,
    run_band,
    run_coverage_experiment,
    run_kde_rate_experiment,
    run_kiefer_rate_experiment,
    run_rate_experiment,
    simulate,
)
from wboot.gaussian import (
    DEFAULT_MODULUS_POINTS,
    BridgePath,
    kolmogorov_cdf,
    kolmogorov_quantile,
    modulus_statistic,
    sample_bridges,
    uniform_grid,
)
from wboot.weights import WeightScheme, draw_weight_matrix, draw_weight_vector

SEED = 20240601


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail, elapsed, budget):
        ok = bool(ok) and elapsed < budget
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail} "
                  f"[{elapsed:.1f}s / budget {budget:.0f}s]")
        assert ok, f"criterion {number} failed: {detail} in {elapsed:.1f}s"
    return emit


def test_01_weight_law(verdict):
    t0 = time.perf_counter()
    z = WeightScheme.exp_bayesian().draw_z(derive_substream(SEED, (1, 0)), 100_000)
    m1, m2 = z.mean(), (z**2).mean()
    se1, se2 = z.std(ddof=1) / math.sqrt(z.size), (z**2).std(ddof=1) / math.sqrt(z.size)
    rng = derive_substream(SEED, (1, 1))
    worst = 0.0
    for _ in range(10_000):
        w = draw_weight_vector(WeightScheme.exp_bayesian(), int(rng.integers(1, 1001)), rng).weights
        worst = max(worst, abs(w.sum() - 1.0))
    ok = abs(m1 - 1) <= 4 * se1 and abs(m2 - 2) <= 4 * se2 and worst <= 1e-12
    verdict(1, "weight law", ok, f"mean={m1:.4f} (4se {4 * se1:.4f}), E Z^2={m2:.4f} (4se {4 * se2:.4f}), "
            f"max |sum-1|={worst:.1e}", time.perf_counter() - t0, 5)


def test_02_exact_sup_oracle(verdict):
    t0 = time.perf_counter()
    rng = derive_substream(SEED, (2,))
    worst = 0.0
    for case in range(100):
        n = int(rng.integers(1, 51))
        x = np.round(rng.normal(size=n), 1) if case % 4 == 0 else rng.normal(size=n)
        w = draw_weight_vector(WeightScheme.exp_bayesian(), n, rng).weights
        worst = max(worst, abs(sup_process_distance(x, w) - dense_grid_sup(x, w, 100_000)))
    verdict(2, "exact sup vs dense-grid oracle", worst <= 1e-12, f"max abs diff {worst:.1e}",
            time.perf_counter() - t0, 10)


def test_03_decomposition_identity(verdict):
    t0 = time.perf_counter()
    rng = derive_substream(SEED, (3,))
    grid = np.linspace(-0.1, 1.1, 101)
    cdf = lambda t: np.clip(t, 0.0, 1.0)  # noqa: E731
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 201))
        w = draw_weight_vector(WeightScheme.exp_bayesian(), n, rng)
        worst = max(worst, decomposition_residual(rng.random(n), w, cdf, grid))
    verdict(3, "decomposition identity", worst <= 1e-9, f"max residual {worst:.1e}",
            time.perf_counter() - t0, 5)


def test_04_limit_law(verdict):
    t0 = time.perf_counter()
    r = run_rate_experiment(ExperimentConfig.from_dict(
        {"experiment": "rates", "n_grid": [2000], "reps": 10_000, "seed": SEED}))
    d = r["results"][0]["ks_distance"]
    verdict(4, "limit law at n=2000", d <= 0.02, f"KS distance {d:.4f} (target <= 0.02, MC se "
            f"{r['results'][0]['ks_se']:.4f})", time.perf_counter() - t0, 120)


def test_05_rate_trend(verdict):
    t0 = time.perf_counter()
    r = run_rate_experiment(ExperimentConfig.from_dict(
        {"experiment": "rates", "n_grid": [100, 400, 1600, 6400], "reps": 2000, "seed": SEED}))
    ds = [row["ks_distance"] for row in r["results"]]
    ratio = r["summary"]["ratio_max_over_min"]
    ok = r["summary"]["non_increasing_within_2se"] and ratio is not None and ratio <= 3
    verdict(5, "rate trend", ok, f"d_n={[round(d, 4) for d in ds]}, max/min ratio={ratio:.3f}",
            time.perf_counter() - t0, 300)


def test_06_band_coverage(verdict):
    t0 = time.perf_counter()
    r = run_coverage_experiment(ExperimentConfig.from_dict(
        {"experiment": "coverage", "n": 500, "n_boot": 999, "alpha": 0.1, "reps": 1000, "seed": SEED}))
    cov = r["summary"]["coverage"]
    verdict(6, "band coverage (nominal 0.90)", 0.87 <= cov <= 0.93, f"coverage {cov:.3f} "
            f"(se {r['summary']['se']:.3f})", time.perf_counter() - t0, 180)


def test_07_kolmogorov_reference(verdict):
    t0 = time.perf_counter()
    c, q = kolmogorov_cdf(0.5), kolmogorov_quantile(0.95)
    oracle_c = kolmogorov_series(0.5, terms=4)
    ok = abs(c - 0.036055) <= 1e-5 and abs(c - oracle_c) <= 1e-5 and abs(q - 1.35810) <= 1e-4
    verdict(7, "Kolmogorov reference", ok, f"cdf(0.5)={c:.6f} (oracle {oracle_c:.6f}), q(0.95)={q:.5f}",
            time.perf_counter() - t0, 1)


def test_08_kde_limit(verdict):
    t0 = time.perf_counter()
    r = run_kde_rate_experiment(ExperimentConfig.from_dict(
        {"experiment": "kde-rates", "n_grid": [10_000], "reps": 2000, "seed": SEED, "kernel": "epanechnikov"}))
    q95 = r["results"][0]["statistic"]["quantiles"]["0.95"]
    verdict(8, "KDE limit at n=1e4", abs(q95 - 1.3581) <= 0.12, f"95th percentile of sup|gamma*| = {q95:.4f} "
            f"(target 1.3581 +/- 0.12)", time.perf_counter() - t0, 300)


def test_09_modulus_statistic(verdict):
    t0 = time.perf_counter()
    grid = uniform_grid(DEFAULT_MODULUS_POINTS)
    rng = derive_substream(SEED, (9,))
    vals = []
    for _ in range(20):
        for path in sample_bridges(grid, 10, rng):
            vals.append(modulus_statistic(BridgePath(grid, path), 2.0**-10))
    m = float(np.mean(vals))
    verdict(9, "modulus statistic", 0.75 <= m <= 1.25, f"mean over {len(vals)} bridges {m:.4f}",
            time.perf_counter() - t0, 120)


def _all_reports(tmp_path):
    data = tmp_path / "x.csv"
    data.write_text("\n".join(repr(float(v)) for v in derive_substream(SEED, (10,)).random(200)) + "\n")
    base = {"seed": SEED, "reps": 100}
    out = {
        "rates": dump_report(run_rate_experiment(ExperimentConfig.from_dict(
            {**base, "experiment": "rates", "n_grid": [50, 200]}))),
        "kiefer-rates": dump_report(run_kiefer_rate_experiment(ExperimentConfig.from_dict(
            {**base, "experiment": "kiefer-rates", "n_grid": [16, 64]}))),
        "kde-rates": dump_report(run_kde_rate_experiment(ExperimentConfig.from_dict(
            {**base, "experiment": "kde-rates", "n_grid": [100, 400], "smoothed_bridge_reference": True}))),
        "coverage": dump_report(run_coverage_experiment(ExperimentConfig.from_dict(
            {**base, "experiment": "coverage", "n": 100, "n_boot": 199}))),
        "simulate": repr(simulate(ExperimentConfig.from_dict(
            {**base, "experiment": "simulate", "n_grid": [30], "statistic": "partial-sum"}))),
    }
    rep, table = run_band(ExperimentConfig.from_dict({"experiment": "band", "data": str(data), "seed": SEED}))
    out["band"] = dump_report(rep) + repr(table.tolist())
    return out


def test_10_determinism(verdict, monkeypatch, tmp_path):
    t0 = time.perf_counter()
    monkeypatch.setenv("WBOOT_THREADS", "1")
    one = _all_reports(tmp_path)
    monkeypatch.setenv("WBOOT_THREADS", "4")
    four = _all_reports(tmp_path)
    differing = [k for k in one if one[k] != four[k]]
    verdict(10, "determinism across WBOOT_THREADS 1/4", not differing,
            f"{len(one)} experiment kinds compared, differing: {differing or 'none'}", time.perf_counter() - t0, 60)
