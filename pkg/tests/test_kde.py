import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wboot import derive_substream
from wboot.gaussian import BridgePath, compose_with_cdf, sample_bridge, sample_bridges, uniform_grid
from wboot.kde import (
    BandwidthRule,
    KernelSpec,
    bootstrap_kde,
    gamma_limit,
    gamma_star,
    get_kernel,
    kde_estimate,
    kernel_total_variation,
    modulus_envelope,
    smoothed_bridge,
    stieltjes_integral,
    sup_gamma_star,
    sup_grid,
)
from wboot.weights import WeightScheme, WeightVector, draw_weight_matrix, draw_weight_vector

uniform_cdf = lambda t: np.clip(t, 0.0, 1.0)  # noqa: E731
KERNELS = ["epanechnikov", "triangular", "uniform", "biweight"]


@pytest.mark.parametrize("name,tv", [("epanechnikov", 1.5), ("uniform", 2.0), ("triangular", 2.0),
                                     ("biweight", 1.875)])
def test_total_variation(name, tv):
    k = get_kernel(name)
    assert kernel_total_variation(k) == pytest.approx(tv, abs=1e-9)
    assert k.integral == pytest.approx(1.0, abs=1e-9)


def test_kernel_validation():
    with pytest.raises(ValueError, match="integrates"):
        KernelSpec("half", 1.0, lambda u: np.where(np.abs(u) <= 1, 0.25, 0.0), ((-1.0, 1.0, np.zeros_like),))
    with pytest.raises(ValueError, match="total variation"):
        KernelSpec("tri", 1.0, lambda u: np.where(np.abs(u) <= 1, 1 - np.abs(u), 0.0),
                   ((-1.0, 0.0, np.ones_like), (0.0, 1.0, lambda u: -np.ones_like(u))), total_variation=3.0)
    with pytest.raises(ValueError):
        get_kernel("gaussian")


def test_bandwidth_rule():
    assert BandwidthRule()(32) == pytest.approx(0.5)
    assert BandwidthRule(h=0.3)(10_000) == 0.3
    with pytest.raises(ValueError):
        BandwidthRule(gamma=1.5)


def test_kde_point_values():
    assert kde_estimate([0.0], get_kernel("uniform"), 1.0, [0.0])[0] == 1.0
    assert kde_estimate([0.0], get_kernel("epanechnikov"), 1.0, [0.0])[0] == 0.75
    assert bootstrap_kde([0.0], WeightVector(np.array([1.0]), "exp-bayesian"), get_kernel("epanechnikov"),
                         2.0, [0.0])[0] == 0.375


def test_zero_weight_kills_isolated_point():
    w = WeightVector(np.array([1.0, 0.0]), "efron")
    assert bootstrap_kde([0.0, 10.0], w, get_kernel("uniform"), 1.0, [10.0])[0] == 0.0


@pytest.mark.parametrize("name", KERNELS)
def test_mass_conservation(name):
    k = get_kernel(name)
    rng = derive_substream(1, (1,))
    x = rng.normal(size=200)
    h = 0.3
    grid = np.linspace(x.min() - k.half_width * h, x.max() + k.half_width * h, 40_001)
    for scheme in (WeightScheme.exp_bayesian(), WeightScheme.efron()):
        w = draw_weight_vector(scheme, 200, rng)
        f = bootstrap_kde(x, w, k, h, grid)
        assert np.trapezoid(f, grid) == pytest.approx(1.0, abs=1e-3)
        assert np.all(f >= 0)


def test_uniform_weights_degenerate():
    x = derive_substream(2, (1,)).random(50)
    k = get_kernel()
    grid = np.linspace(-0.5, 1.5, 101)
    u = WeightVector.uniform(50)
    np.testing.assert_allclose(bootstrap_kde(x, u, k, 0.2, grid), kde_estimate(x, k, 0.2, grid), atol=1e-15)
    assert np.max(np.abs(gamma_star(x, u, k, 0.2, grid))) < 1e-13


def test_gamma_star_vanishes_far_away():
    x = derive_substream(3, (1,)).random(40)
    w = draw_weight_vector(WeightScheme.exp_bayesian(), 40, derive_substream(3, (2,)))
    assert np.all(gamma_star(x, w, get_kernel(), 0.1, [-5.0, 7.0]) == 0.0)


def test_gamma_star_direct_vs_stieltjes():
    rng = derive_substream(4, (1,))
    k = get_kernel("epanechnikov")
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 30))
        x = rng.normal(size=n)
        h = float(rng.uniform(0.1, 1.0))
        w = draw_weight_vector(WeightScheme.exp_bayesian(), n, rng)
        grid = np.sort(rng.uniform(x.min() - h, x.max() + h, 5))
        d = gamma_star(x, w, k, h, grid)
        s = gamma_star(x, w, k, h, grid, method="stieltjes")
        worst = max(worst, float(np.max(np.abs(d - s))))
    assert worst <= 1e-6


@pytest.mark.parametrize("name", ["uniform", "triangular", "biweight"])
def test_stieltjes_other_kernels(name):
    rng = derive_substream(5, (1,))
    k = get_kernel(name)
    x = rng.normal(size=15)
    w = draw_weight_vector(WeightScheme.exp_bayesian(), 15, rng)
    grid = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(gamma_star(x, w, k, 0.5, grid, method="stieltjes"),
                               gamma_star(x, w, k, 0.5, grid), atol=1e-6)


def test_stieltjes_integral_of_identity():
    # int t dK(t) = -int K = -1 by parts
    for name in KERNELS:
        assert stieltjes_integral(lambda t: t, get_kernel(name)) == pytest.approx(-1.0, abs=1e-12)


def test_smoothed_bridge_zero_path():
    g = uniform_grid(1025)
    out = smoothed_bridge(BridgePath(g, np.zeros(g.size)), uniform_cdf, get_kernel(), 0.1, [0.2, 0.5])
    assert np.all(out == 0.0)


def test_smoothed_bridge_uniform_kernel_is_two_atoms():
    g = uniform_grid(4097)
    path = sample_bridge(g, derive_substream(6, (1,)))
    h = 0.2
    x = np.linspace(0.0, 1.0, 11)
    expected = (compose_with_cdf(path, uniform_cdf, x + h / 2) - compose_with_cdf(path, uniform_cdf, x - h / 2))
    np.testing.assert_allclose(smoothed_bridge(path, uniform_cdf, get_kernel("uniform"), h, x), expected,
                               atol=1e-14)


def test_smoothed_bridge_small_window_vanishes():
    # K integrates dK to zero, so a window over which F is almost constant gives almost nothing
    g = uniform_grid(6401)
    path = sample_bridge(g, derive_substream(7, (1,)))
    flat_cdf = lambda t: np.clip(0.5 + 1e-4 * np.asarray(t), 0.0, 1.0)  # noqa: E731
    out = smoothed_bridge(path, flat_cdf, get_kernel(), 0.01, [-1.0, 0.0, 1.0])
    assert np.max(np.abs(out)) <= 1e-3


def test_smoothed_bridge_rejects_coarse_grid():
    g = uniform_grid(65)
    with pytest.raises(ValueError):
        smoothed_bridge(BridgePath(g, np.zeros(65)), uniform_cdf, get_kernel(), 0.1, [0.5])


def test_smoothed_bridge_matches_direct_stieltjes():
    g = uniform_grid(4097)
    path = sample_bridge(g, derive_substream(8, (1,)))
    k = get_kernel("biweight")
    x = np.array([0.3, 0.55])

    def integrand(t, xx):
        pts = xx - t * 0.25
        order = np.argsort(pts)
        out = np.empty_like(pts)
        out[order] = compose_with_cdf(path, uniform_cdf, pts[order])
        return out

    direct = [stieltjes_integral(lambda t, xx=xx: integrand(t, xx), k) for xx in x]
    np.testing.assert_allclose(smoothed_bridge(path, uniform_cdf, k, 0.25, x), direct, atol=1e-12)


def test_gamma_limit_equals_composition():
    g = uniform_grid(513)
    path = sample_bridge(g, derive_substream(9, (1,)))
    x = np.linspace(-0.5, 1.5, 41)
    k = get_kernel()
    np.testing.assert_allclose(gamma_limit(path, uniform_cdf, k, x), compose_with_cdf(path, uniform_cdf, x) * k.integral)
    assert gamma_limit(path, uniform_cdf, k, [-1.0])[0] == 0.0


def test_gamma_limit_variance_at_median():
    g = np.array([0.0, 0.5, 1.0])
    b = sample_bridges(g, 10_000, derive_substream(10, (1,)))
    k = get_kernel()
    vals = np.array([gamma_limit(BridgePath(g, row), uniform_cdf, k, [0.5])[0] for row in b])
    assert vals.var() == pytest.approx(0.25, abs=0.015)


def test_envelope_components():
    h = 6400 ** -0.2
    comp = modulus_envelope(6400, h, density_bound=1.0)
    assert comp["modulus_term"] == pytest.approx(0.2294201225103025, rel=1e-12)
    assert comp["kmt_term"] == pytest.approx(math.log(6400) / 80)
    assert comp["m_h"] == pytest.approx(h)


def test_sup_gamma_star_matches_rowwise():
    rng = derive_substream(11, (1,))
    x = rng.random(60)
    k = get_kernel()
    W = draw_weight_matrix(WeightScheme.exp_bayesian(), 60, 5, rng)
    grid = sup_grid(x, k, 0.2)
    assert np.max(np.diff(grid)) <= 0.2 / 32 + 1e-15
    expected = [np.max(np.abs(gamma_star(x, w, k, 0.2, grid))) for w in W]
    np.testing.assert_allclose(sup_gamma_star(x, W, k, 0.2, grid), expected, rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.floats(-50, 50), st.floats(0.2, 5.0), st.sampled_from(KERNELS))
def test_shift_and_scale_equivariance(seed, b, a, name):
    rng = derive_substream(seed, (1,))
    x = rng.normal(size=30)
    w = draw_weight_vector(WeightScheme.exp_bayesian(), 30, rng)
    k = get_kernel(name)
    grid = np.linspace(-3, 3, 31)
    f = bootstrap_kde(x, w, k, 0.4, grid)
    np.testing.assert_allclose(bootstrap_kde(x + b, w, k, 0.4, grid + b), f, atol=1e-9)
    np.testing.assert_allclose(bootstrap_kde(a * x, w, k, a * 0.4, a * grid), f / a, atol=1e-9)
    np.testing.assert_allclose(gamma_star(x + b, w, k, 0.4, grid + b), gamma_star(x, w, k, 0.4, grid), atol=1e-9)
