"""Change point detection in the pairwise extremal dependence of multivariate series."""

from ._core import (
    ChangePoint,
    DetectorTrace,
    MopedError,
    MopedResult,
    NullStatistics,
    TpdmEstimate,
    bottom_up_merge,
    compute_radii,
    covering_metric,
    detector_trace,
    estimate_segment_tpdms,
    estimate_tpdm,
    generate_scenario,
    merge_over_bandwidths,
    merge_over_ranks,
    moped,
    p_value,
    permutation_null,
    qhat_distribution,
    random_correlation,
    rank_transform_pareto2,
    select_changes,
    v_measure,
)

__all__ = [
    "ChangePoint",
    "DetectorTrace",
    "MopedError",
    "MopedResult",
    "NullStatistics",
    "TpdmEstimate",
    "bottom_up_merge",
    "compute_radii",
    "covering_metric",
    "detector_trace",
    "estimate_segment_tpdms",
    "estimate_tpdm",
    "generate_scenario",
    "merge_over_bandwidths",
    "merge_over_ranks",
    "moped",
    "p_value",
    "permutation_null",
    "qhat_distribution",
    "random_correlation",
    "rank_transform_pareto2",
    "select_changes",
    "v_measure",
]
