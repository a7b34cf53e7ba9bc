"""Sample estimators of the quantile ratio index and its decomposition.

Two estimator families are provided:

- Grid estimators average 1 - R(p) over a midpoint grid of J probabilities,
  with R estimated from Type 8 sample quantiles. Their standard errors come
  from the delta method applied to the joint asymptotic distribution of the
  sample quantiles, with quantile densities estimated by central differences.
- Exact estimators average 1 - x_j / x_{n-j+1} over the order statistics and
  decompose exactly over partitions whose block boundaries n * p_k are
  integers.
"""

import math
from dataclasses import dataclass
from itertools import pairwise
from typing import TYPE_CHECKING, Any

import numpy as np
from loguru import logger

from ._constants import (
    BANDWIDTH_EXPONENT,
    BLOCK_BOUNDARY_TOLERANCE,
    DEFAULT_ALPHA,
    DEFAULT_BANDWIDTH_COEFFICIENT,
    DEFAULT_GRID_SIZE,
    MIN_GRID_SIZE,
    MIN_WINDOW_SPACINGS,
)
from ._distributions import normal_quantile
from ._exceptions import (
    ConfigurationError,
    DegenerateWindow,
    NegativeIncome,
    NonFiniteIncome,
    NonIntegerBlockBoundary,
    ProbabilityOutOfRange,
    TooFewObservations,
    ZeroDenominator,
    ZeroMassTooLarge,
)

if TYPE_CHECKING:
    from ._partitions import SymmetricPartition
    from ._types import (
        ArrayLikeFloat,
        EdgeMode,
        EstimationMethod,
        FloatArray,
        WindowScaling,
    )

__all__ = [
    "BandwidthPolicy",
    "DecompositionEstimate",
    "Diagnostics",
    "QriEstimate",
    "SortedSample",
    "cov_r_hat",
    "difference_z",
    "exact_i",
    "exact_ik",
    "i_hat_grid",
    "ik_hat_grid",
    "ingest",
    "quantile_density_hat",
    "quantile_type8",
    "r_hat",
]


# Samples


@dataclass(frozen=True, slots=True, eq=False)
class SortedSample:
    """A validated, sorted, read-only sample of nonnegative incomes.

    Build instances with ingest.

    Attributes:
        values: The incomes in ascending order.
    """

    values: "FloatArray"

    @property
    def n(self) -> int:
        """Number of observations."""
        return int(self.values.size)

    @property
    def zero_fraction(self) -> float:
        """Proportion of observations that are exactly zero."""
        return float(np.count_nonzero(self.values == 0.0)) / self.n

    def __len__(self) -> int:
        """Return the number of observations."""
        return self.n


def ingest(raw: "ArrayLikeFloat") -> SortedSample:
    """Validate and sort a sample of incomes.

    Negative incomes are rejected rather than clipped; callers that follow
    the convention of assigning zero to losses must clip first.

    Args:
        raw: A one-dimensional sequence of incomes.

    Returns:
        A sorted, read-only copy.

    Raises:
        NonFiniteIncome: If a value is NaN or infinite.
        NegativeIncome: If a value is negative.
        TooFewObservations: If there are fewer than two values.
        ZeroMassTooLarge: If half or more of the values are zero.
    """
    values = np.sort(np.asarray(raw, dtype=np.float64).ravel())
    if not bool(np.all(np.isfinite(values))):
        msg = "sample contains NaN or infinite values"
        raise NonFiniteIncome(msg)
    if values.size < 2:  # noqa: PLR2004
        msg = f"sample needs at least 2 observations, got {values.size}"
        raise TooFewObservations(msg)
    if values[0] < 0:
        msg = f"sample contains a negative income ({values[0]})"
        raise NegativeIncome(msg)
    zeros = int(np.count_nonzero(values == 0.0))
    if 2 * zeros >= values.size:
        msg = f"{zeros} of {values.size} observations are zero (at least half)"
        raise ZeroMassTooLarge(msg)
    values.flags.writeable = False
    return SortedSample(values)


# Quantiles and quantile densities


def _type8(x: "FloatArray", p: "FloatArray") -> "FloatArray":
    n = x.size
    h = np.clip((n + 1.0 / 3.0) * p + 1.0 / 3.0, 1.0, float(n))
    j = np.floor(h).astype(np.intp)
    # 0-based positions of x_j and x_{j+1}; at h = n both are x_n
    lower = x[j - 1]
    upper = x[np.minimum(j, n - 1)]
    return lower + (h - j) * (upper - lower)


def quantile_type8(s: SortedSample, p: float) -> float:
    """Type 8 (median-unbiased) sample quantile.

    With h = (n + 1/3) p + 1/3 clamped to [1, n] and j = floor(h), returns
    x_j + (h - j)(x_{j+1} - x_j). Probabilities whose h falls outside [1, n]
    give the sample minimum or maximum.

    Raises:
        ProbabilityOutOfRange: If p is not in [0, 1].

    Example:
        >>> quantile_type8(ingest([1, 2, 3, 4]), 0.5)
        2.5
    """
    if not 0.0 <= p <= 1.0:
        msg = f"sample quantile needs p in [0, 1], got {p}"
        raise ProbabilityOutOfRange(msg)
    return float(_type8(s.values, np.asarray([p], dtype=np.float64))[0])


@dataclass(frozen=True, slots=True)
class BandwidthPolicy:
    """Bandwidth rule h = coefficient * n ** (-1/5) and edge handling.

    With ``window="local"`` the half-width at probability p is
    h * 2 min(p, 1 - p), bounded below by MIN_WINDOW_SPACINGS / (n + 1)
    and above by h, so the window tracks the curvature of Q near 0 and 1.

    Attributes:
        coefficient: The bandwidth coefficient c.
        edge: ``clip`` shrinks the window symmetrically near the sample edges;
            ``shift`` truncates it on the side that would leave the sample.
        window: ``local`` narrows the window in the tails; ``fixed`` uses h
            everywhere.
    """

    coefficient: float = DEFAULT_BANDWIDTH_COEFFICIENT
    edge: "EdgeMode" = "shift"
    window: "WindowScaling" = "local"

    def __post_init__(self) -> None:
        """Validate the coefficient, edge mode and window scaling.

        Raises:
            ConfigurationError: If the coefficient is not positive or the
                edge mode or window scaling is unknown.
        """
        if not (math.isfinite(self.coefficient) and self.coefficient > 0):
            msg = f"bandwidth coefficient must be positive, got {self.coefficient}"
            raise ConfigurationError(msg)
        if self.edge not in {"clip", "shift"}:
            msg = f"unknown edge mode {self.edge!r}"
            raise ConfigurationError(msg)
        if self.window not in {"local", "fixed"}:
            msg = f"unknown window scaling {self.window!r}"
            raise ConfigurationError(msg)

    def bandwidth(self, n: int) -> float:
        """Return the half-width h for a sample of size n."""
        return self.coefficient * n**BANDWIDTH_EXPONENT

    def half_widths(self, n: int, p: "FloatArray") -> "FloatArray":
        """Return the half-width used at each probability in p."""
        h = self.bandwidth(n)
        if self.window == "fixed":
            return np.full_like(p, h)
        floor = MIN_WINDOW_SPACINGS / (n + 1)
        local = np.maximum(h * 2.0 * np.minimum(p, 1.0 - p), floor)
        return np.minimum(local, h)


def _density(
    x: "FloatArray", p: "FloatArray", h: "float | FloatArray", edge: "EdgeMode"
) -> "FloatArray":
    n = x.size
    floor, ceiling = 1.0 / (n + 1), n / (n + 1)
    if edge == "clip":
        half = np.minimum(h, np.minimum(p - floor, ceiling - p))
        lower, upper = p - half, p + half
    else:
        lower, upper = np.maximum(p - h, floor), np.minimum(p + h, ceiling)
    width = upper - lower
    if bool(np.any(width <= 0)):
        msg = f"quantile-density window is empty for n={n}, h={np.max(h):g}"
        raise DegenerateWindow(msg)
    return (_type8(x, upper) - _type8(x, lower)) / width


def quantile_density_hat(s: SortedSample, p: float, h: float) -> float:
    """Central-difference estimate of the quantile density q(p) = Q'(p).

    The half-width is clipped symmetrically so that p - h and p + h stay in
    [1/(n+1), n/(n+1)].

    Raises:
        ProbabilityOutOfRange: If p is not in (0, 1).
        DegenerateWindow: If the clipped half-width is not positive.
    """
    if not 0.0 < p < 1.0:
        msg = f"quantile density needs p in (0, 1), got {p}"
        raise ProbabilityOutOfRange(msg)
    return float(_density(s.values, np.asarray([p], dtype=np.float64), h, "clip")[0])


def _symmetric_quantiles(
    s: SortedSample, p: "FloatArray"
) -> tuple["FloatArray", "FloatArray"]:
    lower = _type8(s.values, p / 2.0)
    upper = _type8(s.values, 1.0 - p / 2.0)
    if bool(np.any(upper <= 0)):
        msg = "upper symmetric sample quantile is zero"
        raise ZeroDenominator(msg)
    return lower, upper


def r_hat(s: SortedSample, p: float) -> float:
    """Estimate R(p) by the ratio of Type 8 quantiles at p/2 and 1 - p/2.

    Raises:
        ProbabilityOutOfRange: If p is not in (0, 1].
        ZeroDenominator: If the upper quantile is zero.
    """
    if not 0.0 < p <= 1.0:
        msg = f"ratio estimate needs p in (0, 1], got {p}"
        raise ProbabilityOutOfRange(msg)
    lower, upper = _symmetric_quantiles(s, np.asarray([p], dtype=np.float64))
    return float(lower[0] / upper[0])


# Delta-method covariance


@dataclass(slots=True)
class Diagnostics:
    """Mutable counters collected while estimating variances."""

    variance_clamps: int = 0


def _gradient(
    s: SortedSample, p: "FloatArray", policy: BandwidthPolicy
) -> tuple["FloatArray", "FloatArray"]:
    """Return stacked probabilities (a, b) and gradient-weighted densities.

    R = Q(a) / Q(b), so dR/dQ(a) = 1/Q(b) and dR/dQ(b) = -Q(a)/Q(b)^2.
    """
    a = p / 2.0
    b = 1.0 - p / 2.0
    qa, qb = _symmetric_quantiles(s, p)
    h = policy.half_widths(s.n, a)
    density_a = _density(s.values, a, h, policy.edge)
    density_b = _density(s.values, b, h, policy.edge)
    weighted = np.concatenate((density_a / qb, -qa * density_b / qb**2))
    return np.concatenate((a, b)), weighted


def _bridge(u: "FloatArray", v: "FloatArray") -> "FloatArray":
    # Cov of the uniform quantile process: min(u, v)(1 - max(u, v))
    return np.minimum.outer(u, v) * (1.0 - np.maximum.outer(u, v))


def cov_r_hat(
    s: SortedSample,
    p: float,
    p_prime: float,
    policy: BandwidthPolicy | None = None,
    diagnostics: Diagnostics | None = None,
) -> float:
    """Delta-method covariance of R-hat(p) and R-hat(p').

    Uses Cov(Q-hat(u), Q-hat(v)) ~ min(u, v)(1 - max(u, v)) q(u) q(v) / n
    with q estimated by central differences. A negative variance (p = p')
    is clamped to zero and counted in ``diagnostics``.

    Raises:
        ProbabilityOutOfRange: If p or p' is not in (0, 1].
        DegenerateWindow: If a quantile-density window is empty.
        ZeroDenominator: If an upper quantile is zero.
    """
    policy = policy or BandwidthPolicy()
    for value in (p, p_prime):
        if not 0.0 < value <= 1.0:
            msg = f"covariance needs probabilities in (0, 1], got {value}"
            raise ProbabilityOutOfRange(msg)
    u, g = _gradient(s, np.asarray([p], dtype=np.float64), policy)
    v, g_prime = _gradient(s, np.asarray([p_prime], dtype=np.float64), policy)
    covariance = float(g @ _bridge(u, v) @ g_prime) / s.n
    if p == p_prime and covariance < 0:
        logger.debug("clamped negative variance {:.3e} at p={}", covariance, p)
        if diagnostics is not None:
            diagnostics.variance_clamps += 1
        return 0.0
    return covariance


# Estimates


@dataclass(frozen=True, slots=True)
class QriEstimate:
    """A point estimate with optional standard error and confidence interval.

    The raw interval bounds are kept unclipped for coverage bookkeeping;
    ``ci_low`` and ``ci_high`` are clipped to [0, 1] for display.

    Attributes:
        value: The point estimate.
        se: The standard error, or None when not computed.
        raw_low: Unclipped lower bound value - z se, or None.
        raw_high: Unclipped upper bound value + z se, or None.
        alpha: Nominal error rate of the interval.
        method: ``grid`` or ``exact``.
        grid_size: Grid size J of the estimator (or of the borrowed standard
            error); None for an exact estimate without standard error.
        se_borrowed: Whether the standard error comes from the grid
            estimator rather than from the estimator itself.
        variance_clamps: Number of negative variances clamped to zero.
    """

    value: float
    se: float | None
    raw_low: float | None
    raw_high: float | None
    alpha: float
    method: "EstimationMethod"
    grid_size: int | None = None
    se_borrowed: bool = False
    variance_clamps: int = 0

    @property
    def ci_low(self) -> float | None:
        """Lower confidence bound clipped to [0, 1]."""
        return None if self.raw_low is None else min(max(self.raw_low, 0.0), 1.0)

    @property
    def ci_high(self) -> float | None:
        """Upper confidence bound clipped to [0, 1]."""
        return None if self.raw_high is None else min(max(self.raw_high, 0.0), 1.0)

    def covers(self, true_value: float) -> bool:
        """Whether the unclipped interval contains ``true_value``.

        Raises:
            ConfigurationError: If the estimate has no interval.
        """
        if self.raw_low is None or self.raw_high is None:
            msg = "estimate has no confidence interval"
            raise ConfigurationError(msg)
        return self.raw_low <= true_value <= self.raw_high

    def as_dict(self) -> dict[str, Any]:
        """Return a JSON-ready mapping of the estimate."""
        return {
            "value": self.value,
            "se": self.se,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "raw_ci_low": self.raw_low,
            "raw_ci_high": self.raw_high,
            "alpha": self.alpha,
            "method": self.method,
            "grid_size": self.grid_size,
            "se_borrowed": self.se_borrowed,
            "variance_clamps": self.variance_clamps,
        }


@dataclass(frozen=True, slots=True)
class DecompositionEstimate:
    """Component estimates over a symmetric partition plus the total.

    Attributes:
        partition: The partition.
        components: One estimate per member.
        total: The estimate of the whole index.
        method: ``grid`` or ``exact``.
        block_sizes: Order statistics per member (exact method only).
    """

    partition: "SymmetricPartition"
    components: tuple[QriEstimate, ...]
    total: QriEstimate
    method: "EstimationMethod"
    block_sizes: tuple[int, ...] | None = None

    @property
    def contributions(self) -> tuple[float, ...]:
        """Weighted components w_k I_k."""
        return tuple(
            w * c.value
            for w, c in zip(self.partition.weights, self.components, strict=True)
        )

    @property
    def shares(self) -> tuple[float, ...]:
        """Contributions as fractions of their sum (zeros if the sum is zero)."""
        contributions = self.contributions
        total = math.fsum(contributions)
        if total == 0:
            return tuple(0.0 for _ in contributions)
        return tuple(c / total for c in contributions)

    def as_dict(self) -> dict[str, Any]:
        """Return a JSON-ready mapping of the decomposition."""
        return {
            "method": self.method,
            "cuts": list(self.partition.cuts),
            "weights": list(self.partition.weights),
            "total": self.total.as_dict(),
            "components": [
                {"k": k, **c.as_dict(), "contribution": contribution, "share": share}
                for k, (c, contribution, share) in enumerate(
                    zip(self.components, self.contributions, self.shares, strict=True),
                    start=1,
                )
            ],
            "block_sizes": (
                None if self.block_sizes is None else list(self.block_sizes)
            ),
        }


def _check_run(grid_size: int, alpha: float) -> None:
    if grid_size < MIN_GRID_SIZE:
        msg = f"grid size must be at least {MIN_GRID_SIZE}, got {grid_size}"
        raise ConfigurationError(msg)
    if not 0.0 < alpha < 1.0:
        msg = f"alpha must be in (0, 1), got {alpha}"
        raise ConfigurationError(msg)


def _midpoints(grid_size: int) -> "FloatArray":
    return (np.arange(1, grid_size + 1, dtype=np.float64) - 0.5) / grid_size


def _with_interval(
    value: float,
    variance: float,
    alpha: float,
    method: "EstimationMethod",
    grid_size: int,
    *,
    borrowed: bool = False,
) -> QriEstimate:
    clamps = 0
    if variance < 0:
        logger.debug("clamped negative variance {:.3e}", variance)
        variance = 0.0
        clamps = 1
    se = math.sqrt(variance)
    half_width = normal_quantile(1.0 - alpha / 2.0) * se
    return QriEstimate(
        value=value,
        se=se,
        raw_low=value - half_width,
        raw_high=value + half_width,
        alpha=alpha,
        method=method,
        grid_size=grid_size,
        se_borrowed=borrowed,
        variance_clamps=clamps,
    )


def _grid_value_and_variance(
    s: SortedSample, grid: "FloatArray", policy: BandwidthPolicy
) -> tuple[float, float]:
    lower, upper = _symmetric_quantiles(s, grid)
    value = float(np.mean(1.0 - lower / upper))
    u, g = _gradient(s, grid, policy)
    variance = float(g @ _bridge(u, u) @ g) / (s.n * grid.size**2)
    return value, variance


def i_hat_grid(
    s: SortedSample,
    grid_size: int = DEFAULT_GRID_SIZE,
    alpha: float = DEFAULT_ALPHA,
    policy: BandwidthPolicy | None = None,
) -> QriEstimate:
    """Grid estimate of I: the mean of 1 - R-hat over p_j = (j - 1/2) / J.

    Args:
        s: The sample.
        grid_size: Grid size J, at least 2.
        alpha: Nominal error rate of the confidence interval.
        policy: Quantile-density bandwidth policy.

    Returns:
        The estimate with delta-method standard error and interval.

    Raises:
        ConfigurationError: If J < 2 or alpha is not in (0, 1).
        ZeroDenominator: If an upper quantile is zero.
        DegenerateWindow: If a quantile-density window is empty.
    """
    _check_run(grid_size, alpha)
    policy = policy or BandwidthPolicy()
    value, variance = _grid_value_and_variance(s, _midpoints(grid_size), policy)
    return _with_interval(value, variance, alpha, "grid", grid_size)


def ik_hat_grid(
    s: SortedSample,
    partition: "SymmetricPartition",
    grid_size: int = DEFAULT_GRID_SIZE,
    alpha: float = DEFAULT_ALPHA,
    policy: BandwidthPolicy | None = None,
) -> DecompositionEstimate:
    """Grid estimates of the conditional indices I_k.

    Component k averages 1 - R-hat over p_{kj} = 2 p_{k-1} + w_k (j - 1/2) / J,
    so each component is a mean over its own subinterval and stays in [0, 1].
    The total is i_hat_grid on the same sample.

    Raises:
        ConfigurationError: If J < 2 or alpha is not in (0, 1).
        ZeroDenominator: If an upper quantile is zero.
        DegenerateWindow: If a quantile-density window is empty.
    """
    _check_run(grid_size, alpha)
    policy = policy or BandwidthPolicy()
    midpoints = _midpoints(grid_size)
    components: list[QriEstimate] = []
    for lower, _, weight in partition.members():
        grid = 2.0 * lower + weight * midpoints
        value, variance = _grid_value_and_variance(s, grid, policy)
        components.append(_with_interval(value, variance, alpha, "grid", grid_size))
    total = i_hat_grid(s, grid_size, alpha, policy)
    return DecompositionEstimate(partition, tuple(components), total, "grid")


def _exact_terms(s: SortedSample) -> "FloatArray":
    half = s.n // 2
    bottom = s.values[:half]
    top = s.values[::-1][:half]
    if bool(np.any(top <= 0)):
        msg = "an upper order statistic used as a denominator is zero"
        raise ZeroDenominator(msg)
    return 1.0 - bottom / top


def _exact_estimate(value: float, borrowed: QriEstimate | None) -> QriEstimate:
    if borrowed is None or borrowed.se is None:
        return QriEstimate(
            value=value,
            se=None,
            raw_low=None,
            raw_high=None,
            alpha=DEFAULT_ALPHA if borrowed is None else borrowed.alpha,
            method="exact",
        )
    half_width = normal_quantile(1.0 - borrowed.alpha / 2.0) * borrowed.se
    return QriEstimate(
        value=value,
        se=borrowed.se,
        raw_low=value - half_width,
        raw_high=value + half_width,
        alpha=borrowed.alpha,
        method="exact",
        grid_size=borrowed.grid_size,
        se_borrowed=True,
        variance_clamps=borrowed.variance_clamps,
    )


def exact_i(
    s: SortedSample,
    *,
    with_se: bool = False,
    grid_size: int = DEFAULT_GRID_SIZE,
    alpha: float = DEFAULT_ALPHA,
    policy: BandwidthPolicy | None = None,
) -> QriEstimate:
    """Exact estimate I_n = (2/n) sum_{j <= n/2} (1 - x_j / x_{n-j+1}).

    For odd n the middle observation does not enter.

    Args:
        s: The sample.
        with_se: Borrow the standard error of the grid estimator with grid
            size ``grid_size`` and build an interval around the exact value.
        grid_size: Grid size used for the borrowed standard error.
        alpha: Nominal error rate of the borrowed interval.
        policy: Bandwidth policy for the borrowed standard error.

    Raises:
        ZeroDenominator: If an upper order statistic is zero.

    Example:
        >>> round(exact_i(ingest([1, 2, 3, 4])).value, 6)
        0.541667
    """
    value = 2.0 / s.n * math.fsum(_exact_terms(s))
    borrowed = i_hat_grid(s, grid_size, alpha, policy) if with_se else None
    return _exact_estimate(value, borrowed)


def _block_boundary(n: int, cut: float) -> int:
    boundary = n * cut
    nearest = round(boundary)
    if abs(boundary - nearest) > BLOCK_BOUNDARY_TOLERANCE:
        msg = f"block boundary n * p = {n} * {cut} = {boundary:g} is not an integer"
        raise NonIntegerBlockBoundary(msg, boundary)
    return int(nearest)


def exact_ik(
    s: SortedSample,
    partition: "SymmetricPartition",
    *,
    with_se: bool = False,
    grid_size: int = DEFAULT_GRID_SIZE,
    alpha: float = DEFAULT_ALPHA,
    policy: BandwidthPolicy | None = None,
) -> DecompositionEstimate:
    """Exact decomposition over blocks B_k = {n_{k-1} + 1, ..., n_k}.

    Component k is the mean of 1 - x_j / x_{n-j+1} over B_k, with
    n_k = n p_k. The components satisfy sum_k (2 m_k / n) I_k = exact_i(s),
    where m_k is the size of B_k.

    Raises:
        NonIntegerBlockBoundary: If some n p_k (including n/2) is not an
            integer; ik_hat_grid has no such restriction.
        ZeroDenominator: If an upper order statistic is zero.
    """
    boundaries = [_block_boundary(s.n, cut) for cut in partition.cuts]
    terms = _exact_terms(s)
    values = [
        math.fsum(terms[start:stop]) / (stop - start)
        for start, stop in pairwise(boundaries)
    ]
    grid = ik_hat_grid(s, partition, grid_size, alpha, policy) if with_se else None
    components = tuple(
        _exact_estimate(value, None if grid is None else grid.components[k])
        for k, value in enumerate(values)
    )
    total = _exact_estimate(
        2.0 / s.n * math.fsum(terms), None if grid is None else grid.total
    )
    sizes = tuple(stop - start for start, stop in pairwise(boundaries))
    return DecompositionEstimate(partition, components, total, "exact", sizes)


def difference_z(a: QriEstimate, b: QriEstimate) -> float:
    """Standardized difference |a - b| / sqrt(se_a^2 + se_b^2).

    Treats the two estimates as independent, e.g. two survey years.

    Raises:
        ConfigurationError: If either estimate has no standard error.
    """
    if a.se is None or b.se is None:
        msg = "both estimates need a standard error"
        raise ConfigurationError(msg)
    gap = abs(a.value - b.value)
    scale = math.hypot(a.se, b.se)
    if scale == 0:
        return 0.0 if gap == 0 else math.inf
    return gap / scale
