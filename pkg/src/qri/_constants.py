"""Constants defining estimator defaults, numerical tolerances and limits.

These values are the defaults used throughout the library and the command
line tool. Every public entry point accepts an override.
"""

from typing import Final

DEFAULT_GRID_SIZE: Final[int] = 100
"""Default number of grid points J for the grid estimators."""

MIN_GRID_SIZE: Final[int] = 2
"""Smallest accepted grid size."""

DEFAULT_ALPHA: Final[float] = 0.05
"""Default nominal error rate; confidence intervals have coverage 1 - alpha."""

DEFAULT_BANDWIDTH_COEFFICIENT: Final[float] = 0.5
"""Coefficient c of the quantile-density bandwidth h = c * n ** (-1/5)."""

BANDWIDTH_EXPONENT: Final[float] = -0.2
"""Exponent of the sample size in the quantile-density bandwidth."""

MIN_WINDOW_SPACINGS: Final[float] = 2.0
"""Smallest locally scaled half-width, in units of 1/(n + 1)."""

CUT_TOLERANCE: Final[float] = 1e-12
"""Absolute tolerance used when matching partition cut points."""

WEIGHT_TOLERANCE: Final[float] = 1e-12
"""Absolute tolerance on the partition weights summing to one."""

MAX_PARTITION_MEMBERS: Final[int] = 10_000
"""Soft cap on the number of members K of a symmetric partition.

The variance machinery is quadratic in the grid size for each member, so
accidental huge partitions are rejected early.
"""

BLOCK_BOUNDARY_TOLERANCE: Final[float] = 1e-9
"""Tolerance for treating n * p_k as an integer block boundary."""

DEFAULT_QUAD_ABS_TOL: Final[float] = 1e-8
"""Default absolute tolerance for distribution-level quadrature."""

DEFAULT_QUAD_MAX_SUBDIVISIONS: Final[int] = 200
"""Default subdivision limit for the adaptive quadrature."""

QUAD_METHOD: Final[str] = "quadpack-qags"
"""Identifier of the adaptive Gauss-Kronrod scheme used for quadrature."""

RNG_ALGORITHM: Final[str] = "PCG64"
"""Identifier of the bit generator behind every seeded stream."""

MAX_SEED: Final[int] = 2**64 - 1
"""Largest accepted seed (seeds are 64-bit unsigned integers)."""

DEFAULT_TAIL_SHAPE: Final[float] = 4.0
"""Default Pareto shape for the open top bin of grouped tables."""

DEFAULT_COUNT_SCALE: Final[int] = 10
"""Default number of synthesized persons per table unit."""

DEFAULT_PERCENTILES: Final[tuple[float, ...]] = (
    0.05,
    0.10,
    0.20,
    0.25,
    0.50,
    0.75,
    0.80,
    0.90,
    0.95,
)
"""Percentile probabilities reported for synthesized populations."""

DEFAULT_KDE_POINTS: Final[int] = 512
"""Default number of grid points for kernel density export."""

MIN_SIMULATION_SAMPLE: Final[int] = 20
"""Smallest sample size accepted by the coverage experiments."""

THREADS_ENV_VAR: Final[str] = "QRI_THREADS"
"""Environment variable capping the number of simulation worker threads."""

DISPLAY_DECIMALS: Final[int] = 4
"""Number of decimals used for human-readable output."""
