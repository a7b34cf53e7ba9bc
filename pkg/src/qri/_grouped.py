"""Grouped (binned) income tables and population synthesis.

A grouped table lists dollar classes with counts in thousands of persons.
A population is synthesized by drawing uniform values inside each closed
class and Pareto II values in the unbounded top class, whose scale is chosen
so that the tail starts exactly at the class's lower bound.
"""

import math
from dataclasses import dataclass, field
from importlib import resources
from typing import TYPE_CHECKING, Final

import numpy as np
import pandas as pd
from loguru import logger
from scipy import integrate

from ._constants import (
    DEFAULT_COUNT_SCALE,
    DEFAULT_KDE_POINTS,
    DEFAULT_PERCENTILES,
    DEFAULT_TAIL_SHAPE,
)
from ._distributions import SeededRng
from ._estimation import SortedSample, ingest, quantile_type8
from ._exceptions import (
    ConfigurationError,
    EmptyTable,
    NoOpenBin,
    OpenBinNotLast,
    OpenBinTooLarge,
    OverlappingBins,
    ParseError,
    ProbabilityOutOfRange,
)
from ._reader import parse_bins_frame, read_bins_frame

if TYPE_CHECKING:
    from collections.abc import Sequence
    from pathlib import Path

    import numpy.typing as npt

    from ._types import FloatArray

__all__ = [
    "BUNDLED_TABLES",
    "Bin",
    "GroupedBins",
    "PercentileTable",
    "SynthConfig",
    "bins_from_frame",
    "kde_bandwidth",
    "kde_export",
    "load_bundled_bins",
    "parse_bins",
    "percentile_table",
    "read_bins",
    "subsample",
    "synth_population",
    "tail_scale",
]

BUNDLED_TABLES: Final[tuple[str, ...]] = tuple(
    f"{measure}-{year}"
    for measure in ("dwi", "nhw")
    for year in (2004, 2006, 2010, 2012, 2014)
)
"""Names of the grouped tables shipped in ``qri/data``.

``dwi-*`` tables hold equivalized disposable weekly income, ``nhw-*`` tables
net household wealth in thousands of dollars.
"""

_KDE_CHUNK: Final[int] = 16


@dataclass(frozen=True, slots=True)
class Bin:
    """One class of a grouped table.

    Attributes:
        lower: Lower bound (inclusive).
        upper: Upper bound (inclusive), or None for the unbounded top class.
        count: Frequency in table units.
    """

    lower: float
    upper: float | None
    count: float

    @property
    def is_open(self) -> bool:
        """Whether the bin has no upper bound."""
        return self.upper is None


@dataclass(frozen=True, slots=True)
class GroupedBins:
    """A validated grouped frequency table.

    Attributes:
        bins: The classes in ascending order.
    """

    bins: tuple[Bin, ...]

    def __post_init__(self) -> None:
        """Check ordering, the open class and the total.

        Raises:
            EmptyTable: If there are no bins or the total count is not positive.
            OverlappingBins: If a bin has lower > upper or starts below the
                upper bound of its predecessor.
            OpenBinNotLast: If an unbounded bin is not the last one.
            OpenBinTooLarge: If the unbounded bin holds half or more of the
                total.
        """
        if not self.bins or self.total <= 0:
            msg = "grouped table has no bins or a non-positive total"
            raise EmptyTable(msg)
        for index, current in enumerate(self.bins):
            if current.is_open and index != len(self.bins) - 1:
                msg = f"unbounded bin at row {index + 1} is not the last bin"
                raise OpenBinNotLast(msg)
            if current.upper is not None and current.lower > current.upper:
                msg = (
                    f"bin {index + 1} has lower {current.lower} "
                    f"> upper {current.upper}"
                )
                raise OverlappingBins(msg)
            if index == 0:
                continue
            previous = self.bins[index - 1]
            if previous.upper is not None and current.lower < previous.upper:
                msg = (
                    f"bin {index + 1} starts at {current.lower}, inside bin {index} "
                    f"ending at {previous.upper}"
                )
                raise OverlappingBins(msg)
        open_bin = self.open_bin
        if open_bin is not None and 2 * open_bin.count >= self.total:
            msg = f"unbounded bin holds {open_bin.count} of {self.total} (half or more)"
            raise OpenBinTooLarge(msg)

    def __len__(self) -> int:
        """Return the number of bins."""
        return len(self.bins)

    @property
    def total(self) -> float:
        """Sum of all counts."""
        return math.fsum(b.count for b in self.bins)

    @property
    def open_bin(self) -> Bin | None:
        """The unbounded top bin, if any."""
        return self.bins[-1] if self.bins and self.bins[-1].is_open else None

    def as_frame(self) -> pd.DataFrame:
        """Return the table as a ``lower,upper,count`` frame."""
        return pd.DataFrame(
            {
                "lower": [b.lower for b in self.bins],
                "upper": [np.nan if b.upper is None else b.upper for b in self.bins],
                "count": [b.count for b in self.bins],
            }
        )


def bins_from_frame(frame: pd.DataFrame) -> GroupedBins:
    """Build a grouped table from a numeric ``lower,upper,count`` frame.

    Negative bounds are clipped to zero, so a class of negative values
    becomes a point mass at zero. An unbounded class with zero count is
    dropped.

    Raises:
        ParseError: If a count is negative.
        GroupedDataError: If the resulting table is invalid.
    """
    bins: list[Bin] = []
    for lower, upper, count in frame.itertuples(index=False, name=None):
        if count < 0:
            msg = f"bin count must be nonnegative, got {count}"
            raise ParseError(msg)
        is_open = upper is None or bool(np.isnan(upper))
        if is_open and count == 0:
            continue
        bins.append(
            Bin(
                lower=max(float(lower), 0.0),
                upper=None if is_open else max(float(upper), 0.0),
                count=float(count),
            )
        )
    return GroupedBins(tuple(bins))


def parse_bins(text: str) -> GroupedBins:
    """Parse a grouped table from CSV text (header optional).

    Raises:
        EmptyTable: If the text is empty or the total is not positive.
        ParseError: If the CSV is malformed.
        GroupedDataError: If the bins are invalid.
    """
    if not text.strip():
        msg = "grouped table is empty"
        raise EmptyTable(msg)
    return bins_from_frame(parse_bins_frame(text))


def read_bins(path: "Path | str") -> GroupedBins:
    """Read a grouped table from a CSV file.

    Raises:
        FileError: If the file cannot be read.
        ParseError: If the CSV is malformed.
        GroupedDataError: If the bins are invalid.
    """
    return bins_from_frame(read_bins_frame(path))


def load_bundled_bins(name: str) -> GroupedBins:
    """Load one of the bundled tables, e.g. ``dwi-2004`` or ``nhw-2014``.

    Raises:
        ConfigurationError: If no bundled table has that name.
    """
    key = name.strip().lower()
    if key not in BUNDLED_TABLES:
        known = ", ".join(BUNDLED_TABLES)
        msg = f"unknown bundled table {name!r} (expected one of {known})"
        raise ConfigurationError(msg)
    text = (resources.files("qri") / "data" / f"{key}.csv").read_text("utf-8")
    return parse_bins(text)


def _open_probability(bins: GroupedBins) -> tuple[Bin, float]:
    open_bin = bins.open_bin
    if open_bin is None:
        msg = "grouped table has no unbounded top bin"
        raise NoOpenBin(msg)
    return open_bin, 1.0 - open_bin.count / bins.total


def tail_scale(bins: GroupedBins, a: float) -> float:
    """Pareto II scale for the open bin: lam = x_q / ((1 - q)^(-1/a) - 1).

    x_q is the lower bound of the unbounded bin and q = 1 - open count /
    total, so the fitted tail puts probability 1 - q above x_q.

    Raises:
        NoOpenBin: If the table has no unbounded bin.
        ConfigurationError: If a is not positive.
    """
    if not (math.isfinite(a) and a > 0):
        msg = f"tail shape must be positive, got {a}"
        raise ConfigurationError(msg)
    open_bin, q = _open_probability(bins)
    return open_bin.lower / math.expm1(-math.log1p(-q) / a)


@dataclass(frozen=True, slots=True)
class SynthConfig:
    """Settings for population synthesis.

    Attributes:
        tail_shape: Pareto shape a of the open bin.
        count_scale: Synthesized persons per table unit.
        rng: Random stream for the uniform and Pareto draws.
    """

    tail_shape: float = DEFAULT_TAIL_SHAPE
    count_scale: float = DEFAULT_COUNT_SCALE
    rng: SeededRng = field(default_factory=lambda: SeededRng(0))

    def __post_init__(self) -> None:
        """Validate the shape and scale.

        Raises:
            ConfigurationError: If tail_shape is not positive or count_scale
                is below one.
        """
        if not (math.isfinite(self.tail_shape) and self.tail_shape > 0):
            msg = f"tail shape must be positive, got {self.tail_shape}"
            raise ConfigurationError(msg)
        if not (math.isfinite(self.count_scale) and self.count_scale >= 1):
            msg = f"count scale must be at least 1, got {self.count_scale}"
            raise ConfigurationError(msg)


def _scaled_counts(bins: GroupedBins, scale: float) -> "npt.NDArray[np.int64]":
    exact = np.asarray([b.count for b in bins.bins], dtype=np.float64) * scale
    counts = np.round(exact).astype(np.int64)
    residual = round(bins.total * scale) - int(counts.sum())
    if residual:
        logger.debug("spreading rounding residual {} over the largest bins", residual)
        order = np.argsort(-exact, kind="stable")
        step = 1 if residual > 0 else -1
        for i in range(abs(residual)):
            counts[order[i % order.size]] += step
    return counts


def synth_population(
    bins: GroupedBins, cfg: SynthConfig | None = None
) -> SortedSample:
    """Synthesize an explicit population from a grouped table.

    Each closed bin contributes round(count * scale) values uniform on
    [lower, upper]; point bins contribute constants. The open bin
    contributes Pareto II draws Q(u) = lam ((1 - u)^(-1/a) - 1) for u
    uniform on [q, 1), all at or above its lower bound. Per-bin counts are
    rounded half to even, and the residual against round(total * scale) is
    spread one at a time over the largest bins.

    Raises:
        ZeroMassTooLarge: If half or more of the population is zero.
        ConfigurationError: If the configuration is invalid.
    """
    cfg = cfg or SynthConfig()
    generator = cfg.rng.generator()
    counts = _scaled_counts(bins, cfg.count_scale)

    parts: list[FloatArray] = []
    for b, m in zip(bins.bins, counts, strict=True):
        if m <= 0:
            continue
        if b.upper is None:
            parts.append(_pareto_tail(bins, int(m), cfg, generator))
        elif b.upper == b.lower:
            parts.append(np.full(int(m), b.lower))
        else:
            parts.append(generator.uniform(b.lower, b.upper, int(m)))
    if not parts:
        msg = "grouped table synthesizes an empty population"
        raise EmptyTable(msg)
    return ingest(np.concatenate(parts))


def _pareto_tail(
    bins: GroupedBins, m: int, cfg: SynthConfig, generator: np.random.Generator
) -> "FloatArray":
    open_bin, q = _open_probability(bins)
    lam = tail_scale(bins, cfg.tail_shape)
    logger.debug(
        "pareto tail: x_q={}, q={:.6f}, a={}, lambda={:.4f}, draws={}",
        open_bin.lower,
        q,
        cfg.tail_shape,
        lam,
        m,
    )
    u = np.minimum(q + (1.0 - q) * generator.random(m), np.nextafter(1.0, 0.0))
    values = lam * np.expm1(-np.log1p(-u) / cfg.tail_shape)
    return np.maximum(values, open_bin.lower)


def subsample(s: SortedSample, size: int, rng: SeededRng | None = None) -> SortedSample:
    """Draw a simple random sample without replacement from a population.

    Args:
        s: The population.
        size: Number of observations to keep, between 2 and ``s.n``.
        rng: Random stream of the draw; defaults to seed 0.

    Returns:
        The subsample, sorted.

    Raises:
        ConfigurationError: If size is out of range.
        ZeroMassTooLarge: If half or more of the subsample is zero.
    """
    if not 2 <= size <= s.n:  # noqa: PLR2004
        msg = f"subsample size must be in [2, {s.n}], got {size}"
        raise ConfigurationError(msg)
    rng = rng or SeededRng(0)
    logger.debug("subsampling {} of {} observations (seed {})", size, s.n, rng.seed)
    return ingest(rng.generator().choice(s.values, size=size, replace=False))


@dataclass(frozen=True, slots=True)
class PercentileTable:
    """Type 8 percentiles of a population and its maximum.

    Attributes:
        rows: (probability, value) pairs in the requested order.
        maximum: The largest observation.
    """

    rows: tuple[tuple[float, float], ...]
    maximum: float

    def as_frame(self) -> pd.DataFrame:
        """Return the rows as a ``prob,value`` frame with a final ``max`` row."""
        return pd.DataFrame(
            {
                "prob": [f"{p:g}" for p, _ in self.rows] + ["max"],
                "value": [v for _, v in self.rows] + [self.maximum],
            }
        )


def percentile_table(
    s: SortedSample, probs: "Sequence[float]" = DEFAULT_PERCENTILES
) -> PercentileTable:
    """Type 8 quantiles of a population at each probability, plus the maximum.

    Raises:
        ProbabilityOutOfRange: If a probability is not in [0, 1].
    """
    for p in probs:
        if not 0.0 <= p <= 1.0:
            msg = f"percentile probability must be in [0, 1], got {p}"
            raise ProbabilityOutOfRange(msg)
    rows = tuple((float(p), quantile_type8(s, p)) for p in probs)
    return PercentileTable(rows=rows, maximum=float(s.values[-1]))


def kde_bandwidth(x: "FloatArray") -> float:
    """Rule-of-thumb Gaussian bandwidth 0.9 min(sd, IQR/1.34) n^(-1/5).

    Falls back to the standard deviation, then |x_1|, then 1 when the
    spread measures vanish.
    """
    sd = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75.0, 25.0])
    spread = min(sd, float(q75 - q25) / 1.34)
    for fallback in (spread, sd, abs(float(x[0])), 1.0):
        if fallback > 0:
            spread = fallback
            break
    return 0.9 * spread * x.size ** (-0.2)


def kde_export(
    s: SortedSample,
    truncate_at: float,
    grid_points: int = DEFAULT_KDE_POINTS,
) -> pd.DataFrame:
    """Gaussian kernel density on an even grid over [0, truncate_at].

    The estimate uses every observation, so the curve integrates to the
    share of the population below ``truncate_at`` rather than to one.

    Returns:
        A frame with columns ``x`` and ``density``.

    Raises:
        ConfigurationError: If truncate_at is not positive or grid_points < 2.
    """
    if not (math.isfinite(truncate_at) and truncate_at > 0):
        msg = f"truncation point must be positive, got {truncate_at}"
        raise ConfigurationError(msg)
    if grid_points < 2:  # noqa: PLR2004
        msg = f"density grid needs at least 2 points, got {grid_points}"
        raise ConfigurationError(msg)
    x = s.values
    bw = kde_bandwidth(x)
    grid = np.linspace(0.0, truncate_at, grid_points)
    density = np.empty(grid_points, dtype=np.float64)
    norm = x.size * bw * math.sqrt(2.0 * math.pi)
    for start in range(0, grid_points, _KDE_CHUNK):
        chunk = grid[start : start + _KDE_CHUNK]
        z = (chunk[:, np.newaxis] - x[np.newaxis, :]) / bw
        density[start : start + _KDE_CHUNK] = np.exp(-0.5 * z * z).sum(axis=1) / norm
    logger.debug(
        "kde: n={}, bandwidth={:.4g}, mass below truncation={:.4f}",
        x.size,
        bw,
        float(integrate.trapezoid(density, grid)),
    )
    return pd.DataFrame({"x": grid, "density": density})
