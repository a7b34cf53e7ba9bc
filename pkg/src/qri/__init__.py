"""Quantile ratio index of relative inequality, its decompositions and inference."""

from importlib.metadata import version

from loguru import logger

from ._distributions import (
    DistributionSpec,
    Family,
    SeededRng,
    lognormal_I,
    lognormal_Ik,
    lognormal_partial_integral,
    normal_cdf,
    normal_quantile,
    parse_distribution,
    quantile,
    sample,
    sample_with,
)
from ._estimation import (
    BandwidthPolicy,
    DecompositionEstimate,
    Diagnostics,
    QriEstimate,
    SortedSample,
    cov_r_hat,
    difference_z,
    exact_i,
    exact_ik,
    i_hat_grid,
    ik_hat_grid,
    ingest,
    quantile_density_hat,
    quantile_type8,
    r_hat,
)
from ._exceptions import (
    ConfigurationError,
    CutOutOfRange,
    DegenerateWindow,
    DistributionError,
    EmptyTable,
    FileError,
    GroupedDataError,
    InvalidParameter,
    InversionFailure,
    NegativeIncome,
    NoOpenBin,
    NonFiniteIncome,
    NonIncreasingCuts,
    NonIntegerBlockBoundary,
    NotARefinement,
    OpenBinNotLast,
    OpenBinTooLarge,
    OverlappingBins,
    ParseError,
    PartitionError,
    PartitionTooLarge,
    ProbabilityOutOfRange,
    QRIError,
    QuadratureNonConvergence,
    SampleError,
    TooFewObservations,
    ZeroDenominator,
    ZeroK,
    ZeroMassTooLarge,
)
from ._grouped import (
    BUNDLED_TABLES,
    Bin,
    GroupedBins,
    PercentileTable,
    SynthConfig,
    bins_from_frame,
    kde_bandwidth,
    kde_export,
    load_bundled_bins,
    parse_bins,
    percentile_table,
    read_bins,
    subsample,
    synth_population,
    tail_scale,
)
from ._partitions import (
    SymmetricPartition,
    coarsen,
    equi_partition,
    make_partition,
    parse_partition,
)
from ._json import serialize_json, to_json_value
from ._reader import parse_incomes, read_incomes
from ._simulation import (
    DESK_SCALE_FAMILIES,
    REFERENCE_FAMILIES,
    ComponentCoverage,
    CoverageReport,
    coverage_experiment,
    coverage_table,
    resolve_workers,
)
from ._theory import (
    QuadratureConfig,
    equi_limit_check,
    ratio_curves,
    true_I,
    true_Ik,
    true_R,
    true_Rk,
)
from ._writer import atomic_replace, frame_to_csv, write_csv, write_json

__version__ = version("qri-python")

logger.disable("qri")

__all__ = [
    "BUNDLED_TABLES",
    "DESK_SCALE_FAMILIES",
    "REFERENCE_FAMILIES",
    "BandwidthPolicy",
    "Bin",
    "ComponentCoverage",
    "ConfigurationError",
    "CoverageReport",
    "CutOutOfRange",
    "DecompositionEstimate",
    "DegenerateWindow",
    "Diagnostics",
    "DistributionError",
    "DistributionSpec",
    "EmptyTable",
    "Family",
    "FileError",
    "GroupedBins",
    "GroupedDataError",
    "InvalidParameter",
    "InversionFailure",
    "NegativeIncome",
    "NoOpenBin",
    "NonFiniteIncome",
    "NonIncreasingCuts",
    "NonIntegerBlockBoundary",
    "NotARefinement",
    "OpenBinNotLast",
    "OpenBinTooLarge",
    "OverlappingBins",
    "ParseError",
    "PartitionError",
    "PartitionTooLarge",
    "PercentileTable",
    "ProbabilityOutOfRange",
    "QRIError",
    "QriEstimate",
    "QuadratureConfig",
    "QuadratureNonConvergence",
    "SampleError",
    "SeededRng",
    "SortedSample",
    "SymmetricPartition",
    "SynthConfig",
    "TooFewObservations",
    "ZeroDenominator",
    "ZeroK",
    "ZeroMassTooLarge",
    "__version__",
    "atomic_replace",
    "bins_from_frame",
    "coarsen",
    "cov_r_hat",
    "coverage_experiment",
    "coverage_table",
    "difference_z",
    "equi_limit_check",
    "equi_partition",
    "exact_i",
    "exact_ik",
    "frame_to_csv",
    "i_hat_grid",
    "ik_hat_grid",
    "ingest",
    "kde_bandwidth",
    "kde_export",
    "load_bundled_bins",
    "lognormal_I",
    "lognormal_Ik",
    "lognormal_partial_integral",
    "make_partition",
    "normal_cdf",
    "normal_quantile",
    "parse_bins",
    "parse_distribution",
    "parse_incomes",
    "parse_partition",
    "percentile_table",
    "quantile",
    "quantile_density_hat",
    "quantile_type8",
    "r_hat",
    "ratio_curves",
    "read_bins",
    "read_incomes",
    "resolve_workers",
    "sample",
    "sample_with",
    "serialize_json",
    "subsample",
    "synth_population",
    "tail_scale",
    "to_json_value",
    "true_I",
    "true_Ik",
    "true_R",
    "true_Rk",
    "write_csv",
    "write_json",
]
