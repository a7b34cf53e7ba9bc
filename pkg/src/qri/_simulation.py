"""Monte-Carlo coverage experiments for the grid confidence intervals.

Each trial draws a sample from a parametric distribution, estimates the
conditional indices with their intervals, and records whether each interval
covers the true value. Trials run on a thread pool; trial i always uses the
stream seed XOR i, so reports do not depend on the number of workers.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Final

import pandas as pd
from loguru import logger

from ._constants import (
    DEFAULT_ALPHA,
    DEFAULT_GRID_SIZE,
    MIN_GRID_SIZE,
    MIN_SIMULATION_SAMPLE,
    THREADS_ENV_VAR,
)
from ._distributions import (
    DistributionSpec,
    Family,
    SeededRng,
    lognormal_I,
    lognormal_Ik,
    sample_with,
)
from ._estimation import BandwidthPolicy, ik_hat_grid, ingest
from ._exceptions import ConfigurationError, QRIError
from ._theory import true_I, true_Ik

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from ._partitions import SymmetricPartition

__all__ = [
    "DESK_SCALE_FAMILIES",
    "REFERENCE_FAMILIES",
    "ComponentCoverage",
    "CoverageReport",
    "coverage_experiment",
    "coverage_table",
    "resolve_workers",
]

REFERENCE_FAMILIES: Final[dict[str, DistributionSpec]] = {
    "Lognormal": DistributionSpec.lognormal(0.0, 1.0),
    "Beta(0.1,0.1)": DistributionSpec.beta(0.1, 0.1),
    "Beta(0.5,0.5)": DistributionSpec.beta(0.5, 0.5),
    "Beta(1,1)": DistributionSpec.beta(1.0, 1.0),
    "Beta(10,10)": DistributionSpec.beta(10.0, 10.0),
    "ChiSq(1)": DistributionSpec.chisq(1.0),
    "ChiSq(4)": DistributionSpec.chisq(4.0),
    "ChiSq(25)": DistributionSpec.chisq(25.0),
    "Pareto(1)": DistributionSpec.pareto2(1.0),
    "Pareto(2)": DistributionSpec.pareto2(2.0),
    "Pareto(100)": DistributionSpec.pareto2(100.0),
    "Exp(1)": DistributionSpec.exponential(1.0),
    "Weibull(0.5)": DistributionSpec.weibull(0.5),
    "Weibull(2)": DistributionSpec.weibull(2.0),
    "Weibull(10)": DistributionSpec.weibull(10.0),
    "LN-Frechet": DistributionSpec.lnfrechet(1.0, 2.0),
}
"""The standard income distributions of the coverage studies, by label."""

DESK_SCALE_FAMILIES: Final[tuple[str, ...]] = (
    "Lognormal",
    "Beta(1,1)",
    "ChiSq(4)",
    "Pareto(2)",
    "Exp(1)",
    "Weibull(2)",
)
"""Labels of REFERENCE_FAMILIES run by default by ``coverage_table``."""


def resolve_workers(workers: int | None = None) -> int:
    """Return the worker count: explicit value, then QRI_THREADS, then CPUs.

    Raises:
        ConfigurationError: If the value is not a positive integer.
    """
    if workers is None:
        raw = os.environ.get(THREADS_ENV_VAR)
        if raw is None or not raw.strip():
            return os.cpu_count() or 1
        try:
            workers = int(raw)
        except ValueError as e:
            msg = f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}"
            raise ConfigurationError(msg) from e
    if workers < 1:
        msg = f"worker count must be positive, got {workers}"
        raise ConfigurationError(msg)
    return workers


@dataclass(frozen=True, slots=True)
class ComponentCoverage:
    """Coverage of one estimated quantity.

    Attributes:
        true_value: The distribution-level value the intervals target.
        hits: Number of trials whose unclipped interval covered it.
        coverage: hits / trials; failed trials count as misses.
        mean_width: Mean interval width over successful trials.
    """

    true_value: float
    hits: int
    coverage: float
    mean_width: float

    def as_dict(self) -> dict[str, Any]:
        """Return a JSON-ready mapping."""
        return {
            "true_value": self.true_value,
            "hits": self.hits,
            "coverage": self.coverage,
            "mean_width": self.mean_width,
        }


@dataclass(frozen=True, slots=True)
class CoverageReport:
    """Result of a coverage experiment.

    Attributes:
        distribution: The sampled distribution.
        n: Sample size per trial.
        partition: The partition of the conditional indices.
        trials: Number of trials.
        grid_size: Grid size J of the estimators.
        alpha: Nominal error rate; nominal coverage is 1 - alpha.
        seed: Base random stream; trial i used ``seed.spawn(i)``.
        per_component: Coverage of each I_k.
        total: Coverage of the whole index I.
        failed_trials: Trials in which the estimator raised an error.
        variance_clamps: Negative variances clamped over all trials.
    """

    distribution: DistributionSpec
    n: int
    partition: "SymmetricPartition"
    trials: int
    grid_size: int
    alpha: float
    seed: SeededRng
    per_component: tuple[ComponentCoverage, ...]
    total: ComponentCoverage
    failed_trials: int = 0
    variance_clamps: int = 0

    @property
    def nominal(self) -> float:
        """Nominal coverage 1 - alpha."""
        return 1.0 - self.alpha

    def as_dict(self) -> dict[str, Any]:
        """Return a JSON-ready mapping with the full configuration."""
        return {
            "distribution": self.distribution.literal(),
            "n": self.n,
            "cuts": list(self.partition.cuts),
            "trials": self.trials,
            "grid_size": self.grid_size,
            "alpha": self.alpha,
            "nominal": self.nominal,
            "seed": self.seed.seed,
            "rng": self.seed.algorithm,
            "per_component": [c.as_dict() for c in self.per_component],
            "total": self.total.as_dict(),
            "failed_trials": self.failed_trials,
            "variance_clamps": self.variance_clamps,
        }


def _truth(
    d: DistributionSpec, partition: "SymmetricPartition"
) -> tuple[list[float], float]:
    if d.family is Family.LOGNORMAL:
        sigma = d.params[1]
        return lognormal_Ik(sigma, partition), lognormal_I(sigma)
    return true_Ik(d, partition), true_I(d)


# (covered, width) for each component followed by the total
_TrialOutcome = tuple[tuple[tuple[bool, float], ...], int] | None


def coverage_experiment(  # noqa: PLR0913
    d: DistributionSpec,
    n: int,
    partition: "SymmetricPartition",
    trials: int,
    grid_size: int = DEFAULT_GRID_SIZE,
    alpha: float = DEFAULT_ALPHA,
    rng: SeededRng | None = None,
    *,
    policy: BandwidthPolicy | None = None,
    workers: int | None = None,
) -> CoverageReport:
    """Estimate the coverage of the grid intervals by simulation.

    Args:
        d: The distribution to sample from.
        n: Sample size per trial, at least 20.
        partition: The partition of the conditional indices.
        trials: Number of trials, at least 1.
        grid_size: Grid size J of the estimators.
        alpha: Nominal error rate of the intervals.
        rng: Base random stream; defaults to seed 0.
        policy: Quantile-density bandwidth policy.
        workers: Number of threads; defaults to QRI_THREADS or the CPU count.

    Returns:
        The coverage report. Trials whose estimator raised a QRIError count
        as misses and are tallied in ``failed_trials``.

    Raises:
        ConfigurationError: If n, trials, grid_size or alpha is out of range.
    """
    if n < MIN_SIMULATION_SAMPLE:
        msg = f"sample size must be at least {MIN_SIMULATION_SAMPLE}, got {n}"
        raise ConfigurationError(msg)
    if trials < 1:
        msg = f"need at least one trial, got {trials}"
        raise ConfigurationError(msg)
    if grid_size < MIN_GRID_SIZE:
        msg = f"grid size must be at least {MIN_GRID_SIZE}, got {grid_size}"
        raise ConfigurationError(msg)
    if not 0.0 < alpha < 1.0:
        msg = f"alpha must be in (0, 1), got {alpha}"
        raise ConfigurationError(msg)
    rng = rng or SeededRng(0)
    policy = policy or BandwidthPolicy()
    truth_k, truth_total = _truth(d, partition)
    targets = (*truth_k, truth_total)

    def trial(index: int) -> _TrialOutcome:
        try:
            values = sample_with(d, n, rng.spawn(index).generator())
            estimate = ik_hat_grid(ingest(values), partition, grid_size, alpha, policy)
        except QRIError as e:
            logger.debug("trial {} failed: {}: {}", index, type(e).__name__, e)
            return None
        estimates = (*estimate.components, estimate.total)
        outcome = tuple(
            (est.covers(target), _width(est.raw_low, est.raw_high))
            for est, target in zip(estimates, targets, strict=True)
        )
        clamps = sum(est.variance_clamps for est in estimates)
        return outcome, clamps

    pool_size = min(resolve_workers(workers), trials)
    logger.info(
        "coverage: {} n={} K={} trials={} J={} alpha={} seed={} workers={}",
        d.literal(),
        n,
        len(partition),
        trials,
        grid_size,
        alpha,
        rng.seed,
        pool_size,
    )
    with ThreadPoolExecutor(max_workers=pool_size) as pool:
        outcomes = list(pool.map(trial, range(trials)))

    return _reduce(
        outcomes,
        targets,
        d=d,
        n=n,
        partition=partition,
        trials=trials,
        grid_size=grid_size,
        alpha=alpha,
        rng=rng,
    )


def _width(low: float | None, high: float | None) -> float:
    return 0.0 if low is None or high is None else high - low


def _reduce(  # noqa: PLR0913
    outcomes: "Sequence[_TrialOutcome]",
    targets: tuple[float, ...],
    *,
    d: DistributionSpec,
    n: int,
    partition: "SymmetricPartition",
    trials: int,
    grid_size: int,
    alpha: float,
    rng: SeededRng,
) -> CoverageReport:
    succeeded = [outcome for outcome in outcomes if outcome is not None]
    failed = trials - len(succeeded)
    if failed:
        logger.warning("{} of {} trials failed and count as misses", failed, trials)

    coverages: list[ComponentCoverage] = []
    for position, target in enumerate(targets):
        hits = sum(1 for outcome, _ in succeeded if outcome[position][0])
        widths = [outcome[position][1] for outcome, _ in succeeded]
        mean_width = math.fsum(widths) / len(widths) if widths else math.nan
        coverages.append(ComponentCoverage(target, hits, hits / trials, mean_width))

    return CoverageReport(
        distribution=d,
        n=n,
        partition=partition,
        trials=trials,
        grid_size=grid_size,
        alpha=alpha,
        seed=rng,
        per_component=tuple(coverages[:-1]),
        total=coverages[-1],
        failed_trials=failed,
        variance_clamps=sum(clamps for _, clamps in succeeded),
    )


def coverage_table(  # noqa: PLR0913
    partition: "SymmetricPartition",
    sizes: "Sequence[int]",
    trials: int,
    families: "Mapping[str, DistributionSpec] | None" = None,
    grid_size: int = DEFAULT_GRID_SIZE,
    alpha: float = DEFAULT_ALPHA,
    rng: SeededRng | None = None,
    *,
    policy: BandwidthPolicy | None = None,
    workers: int | None = None,
) -> pd.DataFrame:
    """Run coverage experiments over a grid of families and sample sizes.

    Args:
        partition: The partition of the conditional indices.
        sizes: Sample sizes, e.g. (100, 500, 1000).
        trials: Trials per cell.
        families: Labelled distributions; defaults to the desk-scale subset
            of REFERENCE_FAMILIES.
        grid_size: Grid size J.
        alpha: Nominal error rate.
        rng: Base random stream shared by every cell.
        policy: Quantile-density bandwidth policy of every cell.
        workers: Number of threads per experiment.

    Returns:
        One row per (family, n) with columns ``family``, ``n``, ``I_1`` ..
        ``I_K`` (empirical coverage), ``I``, ``width_I`` (mean interval
        width of I) and ``failed_trials``.
    """
    if families is None:
        families = {label: REFERENCE_FAMILIES[label] for label in DESK_SCALE_FAMILIES}
    rows: list[dict[str, Any]] = []
    for label, d in families.items():
        for n in sizes:
            report = coverage_experiment(
                d,
                n,
                partition,
                trials,
                grid_size,
                alpha,
                rng,
                policy=policy,
                workers=workers,
            )
            row: dict[str, Any] = {"family": label, "n": n}
            for k, component in enumerate(report.per_component, start=1):
                row[f"I_{k}"] = component.coverage
            row["I"] = report.total.coverage
            row["width_I"] = report.total.mean_width
            row["failed_trials"] = report.failed_trials
            rows.append(row)
    return pd.DataFrame(rows)
