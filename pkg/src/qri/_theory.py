"""Distribution-level quantile ratio quantities by numerical quadrature."""

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd
from loguru import logger
from scipy import integrate

from ._constants import (
    DEFAULT_QUAD_ABS_TOL,
    DEFAULT_QUAD_MAX_SUBDIVISIONS,
    QUAD_METHOD,
)
from ._exceptions import (
    ConfigurationError,
    ProbabilityOutOfRange,
    QuadratureNonConvergence,
    ZeroDenominator,
)
from ._partitions import equi_partition

if TYPE_CHECKING:
    from collections.abc import Callable

    from ._distributions import DistributionSpec
    from ._partitions import SymmetricPartition
    from ._types import FloatArray

__all__ = [
    "QuadratureConfig",
    "equi_limit_check",
    "ratio_curves",
    "true_I",
    "true_Ik",
    "true_R",
    "true_Rk",
]


@dataclass(frozen=True, slots=True)
class QuadratureConfig:
    """Settings for the adaptive quadrature.

    Attributes:
        method: Identifier of the adaptive scheme (informational).
        abs_tol: Absolute and relative error target passed to QUADPACK.
        max_subdivisions: Maximum number of interval bisections.
    """

    method: str = QUAD_METHOD
    abs_tol: float = DEFAULT_QUAD_ABS_TOL
    max_subdivisions: int = DEFAULT_QUAD_MAX_SUBDIVISIONS

    def __post_init__(self) -> None:
        """Validate the tolerance and subdivision limit.

        Raises:
            ConfigurationError: If abs_tol or max_subdivisions is not positive.
        """
        if not self.abs_tol > 0:
            msg = f"abs_tol must be positive, got {self.abs_tol}"
            raise ConfigurationError(msg)
        if self.max_subdivisions < 1:
            msg = f"max_subdivisions must be positive, got {self.max_subdivisions}"
            raise ConfigurationError(msg)


def _ratio_array(d: "DistributionSpec", p: "FloatArray") -> "FloatArray":
    lower = d.quantile_array(p / 2.0)
    upper = d.quantile_array(1.0 - p / 2.0)
    if bool(np.any(upper <= 0)):
        msg = f"upper symmetric quantile of {d.literal()} is zero"
        raise ZeroDenominator(msg)
    return lower / upper


def true_R(d: "DistributionSpec", p: float) -> float:
    """Evaluate the quantile ratio curve R(p) = Q(p/2) / Q(1 - p/2).

    Args:
        d: The distribution.
        p: A probability in (0, 1].

    Returns:
        The ratio, in [0, 1]. R(1) = 1 whenever Q is continuous at 1/2.

    Raises:
        ProbabilityOutOfRange: If p is not in (0, 1].
        ZeroDenominator: If Q(1 - p/2) is zero.
    """
    if not 0.0 < p <= 1.0:
        msg = f"ratio curve needs p in (0, 1], got {p}"
        raise ProbabilityOutOfRange(msg)
    return float(_ratio_array(d, np.asarray([p], dtype=np.float64))[0])


def true_Rk(
    d: "DistributionSpec", partition: "SymmetricPartition", k: int, p: float
) -> float:
    """Evaluate the conditional ratio curve R_k(p) = R(2 p_{k-1} + w_k p).

    Raises:
        IndexError: If k is not a member index of the partition.
        ProbabilityOutOfRange: If p is not in (0, 1].
    """
    lower, _ = partition.bounds(k)
    if not 0.0 < p <= 1.0:
        msg = f"conditional ratio curve needs p in (0, 1], got {p}"
        raise ProbabilityOutOfRange(msg)
    u = min(2.0 * lower + partition.weights[k - 1] * p, 1.0)
    return true_R(d, u)


def _integrate(
    integrand: "Callable[[float], float]",
    lower: float,
    upper: float,
    cfg: QuadratureConfig,
    tolerance: float,
) -> float:
    result = integrate.quad(
        integrand,
        lower,
        upper,
        epsabs=tolerance,
        epsrel=tolerance,
        limit=cfg.max_subdivisions,
        full_output=1,
    )
    # QUADPACK appends a message only when it could not converge
    if len(result) > 3:  # noqa: PLR2004
        msg = f"quadrature over [{lower}, {upper}] did not converge: {result[3]}"
        raise QuadratureNonConvergence(msg)
    value, error, info = result[0], result[1], result[2]
    logger.trace(
        "quad [{:.6g}, {:.6g}] = {:.10g} (err {:.2e}, {} evaluations)",
        lower,
        upper,
        value,
        error,
        info["neval"],
    )
    return float(value)


def _shortfall(d: "DistributionSpec") -> "Callable[[float], float]":
    def integrand(u: float) -> float:
        return 1.0 - float(_ratio_array(d, np.asarray([u], dtype=np.float64))[0])

    return integrand


def true_I(d: "DistributionSpec", cfg: QuadratureConfig | None = None) -> float:
    """Quantile ratio index I = integral over (0, 1) of 1 - R(p).

    Raises:
        QuadratureNonConvergence: If the quadrature misses its tolerance.
    """
    cfg = cfg or QuadratureConfig()
    return _integrate(_shortfall(d), 0.0, 1.0, cfg, cfg.abs_tol)


def _component(
    d: "DistributionSpec",
    lower: float,
    upper: float,
    weight: float,
    cfg: QuadratureConfig,
    tolerance: float,
) -> float:
    return _integrate(_shortfall(d), 2.0 * lower, 2.0 * upper, cfg, tolerance) / weight


def true_Ik(
    d: "DistributionSpec",
    partition: "SymmetricPartition",
    cfg: QuadratureConfig | None = None,
) -> list[float]:
    """Conditional indices I_k, the mean of 1 - R over [2 p_{k-1}, 2 p_k].

    Each member integral gets an equal share of the tolerance, so the
    weighted mean of the results matches true_I to within 2 * abs_tol.

    Raises:
        QuadratureNonConvergence: If any member integral misses its tolerance.
    """
    cfg = cfg or QuadratureConfig()
    tolerance = cfg.abs_tol / len(partition)
    return [
        _component(d, lower, upper, weight, cfg, tolerance)
        for lower, upper, weight in partition.members()
    ]


def equi_limit_check(
    d: "DistributionSpec",
    k: int,
    p: float,
    cfg: QuadratureConfig | None = None,
) -> tuple[float, float]:
    """Compare I_k of the equi-K-partition with the limit value 1 - R(p).

    Member k = ceil(pK) of the equi-K-partition covers [(k-1)/K, k/K], the
    cell containing p, so I_k approaches 1 - R(p) as K grows.

    Returns:
        The pair (I_k, 1 - R(p)).
    """
    cfg = cfg or QuadratureConfig()
    partition = equi_partition(k)
    member = min(k, max(1, math.ceil(round(p * k, 9))))
    lower, upper = partition.bounds(member)
    conditional = _component(
        d, lower, upper, partition.weights[member - 1], cfg, cfg.abs_tol
    )
    return conditional, 1.0 - true_R(d, p)


def ratio_curves(
    d: "DistributionSpec", partition: "SymmetricPartition", points: int
) -> pd.DataFrame:
    """Tabulate R(p) and every conditional curve R_k(p) on a midpoint grid.

    Args:
        d: The distribution.
        partition: The partition whose conditional curves are included.
        points: Number of grid points p_j = (j - 1/2) / points.

    Returns:
        A frame with columns ``p``, ``R`` and ``R_1`` .. ``R_K``.

    Raises:
        ConfigurationError: If points is less than one.
    """
    if points < 1:
        msg = f"curve needs at least one point, got {points}"
        raise ConfigurationError(msg)
    grid = (np.arange(1, points + 1, dtype=np.float64) - 0.5) / points
    columns: dict[str, FloatArray] = {"p": grid, "R": _ratio_array(d, grid)}
    for k, (lower, _, weight) in enumerate(partition.members(), start=1):
        columns[f"R_{k}"] = _ratio_array(d, 2.0 * lower + weight * grid)
    return pd.DataFrame(columns)
