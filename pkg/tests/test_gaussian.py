import math

import numpy as np
import pytest
from oracles import bisect, kolmogorov_series, ks_one_sample_bruteforce

from wboot import derive_substream
from wboot.experiments import ks_distance
from wboot.gaussian import (
    BridgePath,
    compose_with_cdf,
    kiefer_sup_max,
    kolmogorov_cdf,
    kolmogorov_cdf_array,
    kolmogorov_quantile,
    modulus_statistic,
    sample_bridge,
    sample_bridges,
    sample_kiefer,
    uniform_grid,
)

# 30-digit values of 1 - 2 sum (-1)^(k-1) exp(-2 k^2 x^2), computed once with mpmath
KOLMOGOROV_AT_HALF = 0.0360547563351249056
KOLMOGOROV_AT_ONE = 0.7300003283226454788
KOLMOGOROV_Q95 = 1.3580986393225504408
KOLMOGOROV_Q90 = 1.2238478702170824337
KOLMOGOROV_Q99 = 1.6276236115189502101


def test_bridge_endpoints_pinned():
    b = sample_bridges(uniform_grid(65), 50, derive_substream(0, (1,)))
    assert np.all(b[:, 0] == 0.0) and np.all(b[:, -1] == 0.0)


def test_bridge_variance_at_midpoint():
    b = sample_bridges([0.0, 0.5, 1.0], 10_000, derive_substream(1, (1,)))
    assert abs(b[:, 1].var() - 0.25) <= 3 * 0.25 * math.sqrt(2) / 100


def test_bridge_covariance():
    b = sample_bridges([0.0, 0.25, 0.75, 1.0], 10_000, derive_substream(2, (1,)))
    assert np.cov(b[:, 1], b[:, 2])[0, 1] == pytest.approx(0.0625, abs=0.01)


def test_bridge_deterministic():
    g = uniform_grid(33)
    a = sample_bridge(g, derive_substream(5, (1,)))
    b = sample_bridge(g, derive_substream(5, (1,)))
    np.testing.assert_array_equal(a.values, b.values)


def test_bridge_grid_validation():
    with pytest.raises(ValueError):
        sample_bridge([0.1, 1.0], derive_substream(0, (1,)))
    with pytest.raises(ValueError):
        sample_bridge([0.0, 0.6, 0.5, 1.0], derive_substream(0, (1,)))


def test_bridge_sup_law_close_to_kolmogorov():
    b = sample_bridges(uniform_grid(), 10_000, derive_substream(3, (1,)))
    assert ks_distance(np.abs(b).max(axis=1), kolmogorov_cdf_array) <= 0.03


def test_kiefer_first_row_is_a_bridge():
    g = uniform_grid(17)
    k = sample_kiefer(g, 1, derive_substream(4, (1,)))
    b = sample_bridge(g, derive_substream(4, (1,)))
    np.testing.assert_array_equal(k.values[0], b.values)


def test_kiefer_variance_and_independent_increments():
    g = np.array([0.0, 0.5, 1.0])
    rng = derive_substream(6, (1,))
    vals = np.array([sample_kiefer(g, 4, rng).values[:, 1] for _ in range(10_000)])
    assert vals[:, 3].var() == pytest.approx(1.0, abs=0.06)
    assert np.corrcoef(vals[:, 1] - vals[:, 0], vals[:, 0])[0, 1] == pytest.approx(0.0, abs=0.03)
    # K(., 3) - K(., 1) behaves like K(., 2)
    assert (vals[:, 2] - vals[:, 0]).var() == pytest.approx(0.5, abs=0.04)


def test_kiefer_sup_max_matches_stored_field():
    g = uniform_grid(9)
    a = kiefer_sup_max(g, 30, derive_substream(8, (1,)))
    f = sample_kiefer(g, 30, derive_substream(8, (1,)))
    assert a == pytest.approx(np.abs(f.values).max(), rel=1e-14)


def test_kiefer_rejects_zero_rows():
    with pytest.raises(ValueError):
        sample_kiefer(uniform_grid(5), 0, derive_substream(0, (1,)))


def test_kolmogorov_reference_values():
    assert kolmogorov_cdf(0.0) == 0.0
    assert kolmogorov_cdf(0.5) == pytest.approx(KOLMOGOROV_AT_HALF, abs=1e-12)
    assert kolmogorov_cdf(1.0) == pytest.approx(KOLMOGOROV_AT_ONE, abs=1e-12)
    assert abs(kolmogorov_cdf(5.0) - 1.0) <= 1e-15


def test_kolmogorov_against_four_term_series():
    for x in np.linspace(0.3, 3.0, 28):
        assert kolmogorov_cdf(x) == pytest.approx(kolmogorov_series(x, terms=40), abs=1e-10)
    assert kolmogorov_series(0.5) == pytest.approx(0.036055, abs=1e-5)


def test_kolmogorov_monotone_in_unit_interval():
    v = kolmogorov_cdf_array(np.linspace(0, 4, 1000))
    assert np.all(np.diff(v) >= 0)
    assert v.min() >= 0 and v.max() <= 1


def test_kolmogorov_rejects_negative():
    with pytest.raises(ValueError):
        kolmogorov_cdf(-0.1)


def test_quantiles():
    assert kolmogorov_quantile(0.95) == pytest.approx(KOLMOGOROV_Q95, abs=1e-9)
    assert kolmogorov_quantile(0.90) == pytest.approx(KOLMOGOROV_Q90, abs=1e-9)
    assert kolmogorov_quantile(0.99) == pytest.approx(KOLMOGOROV_Q99, abs=1e-9)
    oracle = bisect(lambda x: kolmogorov_series(x, 4), 0.95, 0.5, 3.0)
    assert kolmogorov_quantile(0.95) == pytest.approx(oracle, abs=1e-4)
    assert kolmogorov_quantile(0.90) < kolmogorov_quantile(0.95) < kolmogorov_quantile(0.99)


@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
def test_quantile_round_trip(p):
    assert kolmogorov_cdf(kolmogorov_quantile(p)) == pytest.approx(p, abs=1e-9)


def test_compose_below_support_and_identity():
    g = uniform_grid(129)
    path = sample_bridge(g, derive_substream(9, (1,)))
    cdf = lambda t: np.clip(t, 0, 1)  # noqa: E731
    assert compose_with_cdf(path, cdf, [-3.0, -1.0]).tolist() == [0.0, 0.0]
    np.testing.assert_allclose(compose_with_cdf(path, cdf, g), path.values, atol=1e-15)


def test_compose_rejects_unsorted_grid():
    path = sample_bridge(uniform_grid(9), derive_substream(0, (1,)))
    with pytest.raises(ValueError):
        compose_with_cdf(path, lambda t: np.clip(t, 0, 1), [0.5, 0.2])


def test_modulus_of_zero_path():
    g = uniform_grid(257)
    assert modulus_statistic(BridgePath(g, np.zeros(257)), 0.25) == 0.0


def test_modulus_half_window_hand_value():
    g = uniform_grid(33)
    v = np.zeros(33)
    v[10], v[20] = 0.8, -0.3
    expected = 1.1 / math.sqrt(2 * 0.5 * math.log(2))
    assert modulus_statistic(BridgePath(g, v), 0.5) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(1.3212346496650949, rel=1e-14)


def test_modulus_rejects_coarse_grid():
    with pytest.raises(ValueError):
        modulus_statistic(BridgePath(uniform_grid(9), np.zeros(9)), 0.25)


def test_ks_distance_matches_bruteforce():
    rng = derive_substream(10, (1,))
    v = rng.random(500)
    cdf = lambda t: np.clip(t, 0, 1)  # noqa: E731
    assert ks_distance(v, cdf) == pytest.approx(ks_one_sample_bruteforce(v, cdf), abs=1e-15)
