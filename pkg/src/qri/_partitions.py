"""Symmetric K-partitions of the unit interval.

A symmetric K-partition is fixed by cut points 0 = p_0 < p_1 < ... < p_K = 1/2.
Member k is the union [p_{k-1}, p_k) U (1 - p_k, 1 - p_{k-1}] and carries the
weight w_k = 2 (p_k - p_{k-1}).
"""

import math
from dataclasses import dataclass
from itertools import pairwise
from typing import TYPE_CHECKING

from ._constants import CUT_TOLERANCE, MAX_PARTITION_MEMBERS, WEIGHT_TOLERANCE
from ._exceptions import (
    CutOutOfRange,
    NonIncreasingCuts,
    NotARefinement,
    ParseError,
    PartitionError,
    PartitionTooLarge,
    ZeroK,
)

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence

__all__ = [
    "SymmetricPartition",
    "coarsen",
    "equi_partition",
    "make_partition",
    "parse_partition",
]


@dataclass(frozen=True, slots=True)
class SymmetricPartition:
    """A validated symmetric K-partition and its weights.

    Instances are immutable; build them with make_partition or
    equi_partition rather than directly.

    Attributes:
        cuts: The cut points p_0 = 0, ..., p_K = 1/2.
        weights: The member weights w_1, ..., w_K, summing to one.
    """

    cuts: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        """Check the partition invariants.

        Raises:
            PartitionError: If the cuts do not run from 0 to 1/2, are not
                strictly increasing, or the weights do not match the cuts.
        """
        if (
            len(self.cuts) < 2  # noqa: PLR2004
            or self.cuts[0] != 0.0
            or self.cuts[-1] != 0.5  # noqa: PLR2004
        ):
            msg = "cuts must start at 0 and end at exactly 1/2"
            raise PartitionError(msg)
        if len(self.weights) != len(self.cuts) - 1:
            msg = f"expected {len(self.cuts) - 1} weights, got {len(self.weights)}"
            raise PartitionError(msg)
        for lower, upper, weight in zip(
            self.cuts[:-1], self.cuts[1:], self.weights, strict=True
        ):
            if upper <= lower:
                msg = f"cuts must be strictly increasing, got {lower} then {upper}"
                raise NonIncreasingCuts(msg)
            if abs(weight - 2.0 * (upper - lower)) > WEIGHT_TOLERANCE:
                msg = f"weight {weight} does not match cuts ({lower}, {upper})"
                raise PartitionError(msg)
        if abs(math.fsum(self.weights) - 1.0) > WEIGHT_TOLERANCE:
            msg = f"weights sum to {math.fsum(self.weights)}, not 1"
            raise PartitionError(msg)

    def __len__(self) -> int:
        """Return the number of members K."""
        return len(self.weights)

    @property
    def interior_cuts(self) -> tuple[float, ...]:
        """The cuts strictly between 0 and 1/2."""
        return self.cuts[1:-1]

    def bounds(self, k: int) -> tuple[float, float]:
        """Return (p_{k-1}, p_k) for member k (1-based)."""
        if not 1 <= k <= len(self):
            msg = f"member index {k} outside 1..{len(self)}"
            raise IndexError(msg)
        return self.cuts[k - 1], self.cuts[k]

    def members(self) -> "Iterator[tuple[float, float, float]]":
        """Iterate (p_{k-1}, p_k, w_k) over the members in order."""
        return zip(self.cuts[:-1], self.cuts[1:], self.weights, strict=True)

    def literal(self) -> str:
        """Return the comma-separated interior cuts (CLI syntax)."""
        return ",".join(f"{cut:g}" for cut in self.interior_cuts)


def _check_size(k: int) -> None:
    if k > MAX_PARTITION_MEMBERS:
        msg = f"partition has {k} members, exceeding maximum {MAX_PARTITION_MEMBERS}"
        raise PartitionTooLarge(msg)


def make_partition(interior_cuts: "Sequence[float]") -> SymmetricPartition:
    """Build a symmetric partition from its interior cut points.

    Args:
        interior_cuts: Cuts p_1 < ... < p_{K-1}, each in the open interval
            (0, 1/2). An empty sequence gives the single-member partition.

    Returns:
        The partition with cuts (0, *interior_cuts, 1/2).

    Raises:
        CutOutOfRange: If a cut is not strictly between 0 and 1/2.
        NonIncreasingCuts: If the cuts are not strictly increasing.
        PartitionTooLarge: If the partition would exceed the member cap.

    Example:
        >>> make_partition([0.2, 0.4]).weights
        (0.4, 0.4, 0.19999999999999996)
    """
    cuts = [float(cut) for cut in interior_cuts]
    _check_size(len(cuts) + 1)
    for cut in cuts:
        if not 0.0 < cut < 0.5:  # noqa: PLR2004
            msg = f"cut {cut} is not in the open interval (0, 1/2)"
            raise CutOutOfRange(msg)
    for previous, current in pairwise(cuts):
        if current <= previous:
            msg = f"cuts must be strictly increasing, got {previous} then {current}"
            raise NonIncreasingCuts(msg)

    full = (0.0, *cuts, 0.5)
    weights = tuple(2.0 * (upper - lower) for lower, upper in pairwise(full))
    return SymmetricPartition(cuts=full, weights=weights)


def equi_partition(k: int) -> SymmetricPartition:
    """Build the equi-K-partition with cuts p_j = j / (2K).

    Args:
        k: Number of members K, at least one.

    Returns:
        The partition whose K weights all equal 1/K.

    Raises:
        ZeroK: If k is less than one.
        PartitionTooLarge: If k exceeds the member cap.
    """
    if k < 1:
        msg = f"an equi-partition needs at least one member, got {k}"
        raise ZeroK(msg)
    _check_size(k)
    cuts = (0.0, *(j / (2 * k) for j in range(1, k)), 0.5)
    return SymmetricPartition(cuts=cuts, weights=(1.0 / k,) * k)


def parse_partition(text: str) -> SymmetricPartition:
    """Parse the CLI partition literal, e.g. ``"0.2,0.4"``.

    An empty string gives the single-member partition.

    Raises:
        ParseError: If a cut is not a number.
        PartitionError: If the cuts do not form a valid partition.
    """
    fields = [field.strip() for field in text.split(",") if field.strip()]
    try:
        cuts = [float(field) for field in fields]
    except ValueError as e:
        msg = f"invalid partition literal {text!r}: {e}"
        raise ParseError(msg) from e
    return make_partition(cuts)


def _refinement_positions(
    fine: SymmetricPartition, coarse: SymmetricPartition
) -> list[int]:
    positions: list[int] = []
    start = 0
    for cut in coarse.cuts:
        for index in range(start, len(fine.cuts)):
            if abs(fine.cuts[index] - cut) <= CUT_TOLERANCE:
                positions.append(index)
                start = index + 1
                break
        else:
            msg = f"coarse cut {cut} is not a cut of the fine partition"
            raise NotARefinement(msg)
    return positions


def coarsen(
    fine: SymmetricPartition,
    coarse: SymmetricPartition,
    fine_values: "Sequence[float]",
) -> list[float]:
    """Regroup per-member values of a fine partition onto a coarser one.

    Coarse value j is the weighted mean of the fine values inside coarse
    member j, with weights w_fine / w_coarse_j. Weighted totals are preserved.

    Args:
        fine: The finer partition.
        coarse: A partition whose cuts are all cuts of ``fine``.
        fine_values: One value per member of ``fine``.

    Returns:
        One value per member of ``coarse``.

    Raises:
        NotARefinement: If a coarse cut is missing from the fine cuts.
        PartitionError: If the number of values does not match ``fine``.
    """
    if len(fine_values) != len(fine):
        msg = f"expected {len(fine)} values, got {len(fine_values)}"
        raise PartitionError(msg)
    positions = _refinement_positions(fine, coarse)

    result: list[float] = []
    for j, coarse_weight in enumerate(coarse.weights):
        members = range(positions[j], positions[j + 1])
        result.append(
            math.fsum(fine.weights[m] / coarse_weight * fine_values[m] for m in members)
        )
    return result
