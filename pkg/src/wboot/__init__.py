"""Generalized (weighted) bootstrap of empirical processes."""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .bands import (  # noqa: E402
    BandEstimate,
    CdfBand,
    cdf_confidence_band,
    coverage_experiment,
    estimate_band_radius,
    kde_confidence_band,
)
from .empirical import (  # noqa: E402
    Sample,
    StepFunction,
    classical_process_on_grid,
    decomposition_residual,
    ecdf,
    partial_sum_process_max,
    process_on_grid,
    sup_process_distance,
    weighted_ecdf,
)
from .gaussian import (  # noqa: E402
    BridgePath,
    KieferField,
    compose_with_cdf,
    kolmogorov_cdf,
    kolmogorov_quantile,
    modulus_statistic,
    sample_bridge,
    sample_kiefer,
)
from .kde import (  # noqa: E402
    BandwidthRule,
    KernelSpec,
    bootstrap_kde,
    gamma_limit,
    gamma_star,
    get_kernel,
    kde_estimate,
    kernel_total_variation,
    smoothed_bridge,
)
from .streams import derive_substream  # noqa: E402
from .weights import (  # noqa: E402
    WeightScheme,
    WeightVector,
    draw_efron_weights,
    draw_weight_vector,
    validate_scheme_moments,
)

__all__ = [
    "BACKEND", "BandEstimate", "BandwidthRule", "BridgePath", "CdfBand", "KernelSpec", "KieferField",
    "Sample", "StepFunction", "WeightScheme", "WeightVector", "bootstrap_kde", "cdf_confidence_band",
    "classical_process_on_grid", "compose_with_cdf", "coverage_experiment", "decomposition_residual",
    "derive_substream", "draw_efron_weights", "draw_weight_vector", "ecdf", "estimate_band_radius",
    "gamma_limit", "gamma_star", "get_kernel", "kde_confidence_band", "kde_estimate",
    "kernel_total_variation", "kolmogorov_cdf", "kolmogorov_quantile", "modulus_statistic",
    "partial_sum_process_max", "process_on_grid", "sample_bridge", "sample_kiefer", "smoothed_bridge",
    "sup_process_distance", "validate_scheme_moments", "weighted_ecdf",
]
