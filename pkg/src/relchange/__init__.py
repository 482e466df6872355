"""Relevant change point detection for functional time series.

Two-step procedure: binary segmentation over a functional CUSUM locates
candidate changes; a block multiplier bootstrap then tests, per candidate,
whether the sup-norm of the mean change exceeds a user threshold.
"""

__version__ = "0.1.0"

from .binseg import ChangePointSet, binseg, default_xi
from .cusum import CusumEvaluation, cusum, cusum_argmax_l2, cusum_supnorm_at
from .diagnostics import Variogram, autocorr_surface, variogram
from .fda import (
    Curve,
    FunctionalSeries,
    Grid,
    SegmentMap,
    l2_norm,
    rescale,
    segment_mean,
    sup_norm,
)
from .relevance import (
    BootstrapConfig,
    Detector,
    ExtremalSets,
    MultivariateResult,
    RelevanceReport,
    bootstrap_quantile,
    bootstrap_replicate,
    detect_relevant,
    detect_relevant_multivariate,
    detector,
    extremal_sets,
)
from .simulate import (
    FmaParams,
    SimScenario,
    bump_delta_j,
    gen_fma1,
    gen_series,
    scenario_mean,
    three_change_scenario,
    two_change_scenario,
)
from .tuning import TuningDefaults, select_block_length, select_delta

__all__ = [
    "__version__",
    "Grid",
    "Curve",
    "FunctionalSeries",
    "SegmentMap",
    "sup_norm",
    "l2_norm",
    "segment_mean",
    "rescale",
    "CusumEvaluation",
    "cusum",
    "cusum_argmax_l2",
    "cusum_supnorm_at",
    "ChangePointSet",
    "binseg",
    "default_xi",
    "Detector",
    "ExtremalSets",
    "BootstrapConfig",
    "RelevanceReport",
    "MultivariateResult",
    "detector",
    "extremal_sets",
    "bootstrap_replicate",
    "bootstrap_quantile",
    "detect_relevant",
    "detect_relevant_multivariate",
    "TuningDefaults",
    "select_delta",
    "select_block_length",
    "SimScenario",
    "FmaParams",
    "bump_delta_j",
    "scenario_mean",
    "gen_fma1",
    "gen_series",
    "two_change_scenario",
    "three_change_scenario",
    "Variogram",
    "autocorr_surface",
    "variogram",
]
