"""Exception hierarchy for qri operations.

Every error raised by the library inherits from QRIError. Errors are grouped
by the stage that detects them: partition construction, distributions,
samples and estimators, grouped tables, and run configuration.
"""

from typing_extensions import override


class QRIError(Exception):
    """Base exception for all qri operations.

    Callers can catch every library error with a single handler. The command
    line tool reports the concrete class name on stderr and exits with
    status 1.
    """


class ConfigurationError(QRIError):
    """Invalid run parameters.

    Raised for:
    - Grid sizes below 2
    - Nominal error rates outside (0, 1)
    - Simulation sample sizes below 20 or fewer than one trial
    - Unknown or malformed distribution literals
    """


class ParseError(QRIError):
    """Malformed textual input (CSV files, cut lists, numbers)."""


class FileError(QRIError):
    """Error during file system operations.

    Raised for:
    - Input files that are missing or unreadable
    - Output files that cannot be written or atomically replaced
    """


class ProbabilityOutOfRange(QRIError):
    """A probability argument lies outside the domain of the operation."""


class QuadratureNonConvergence(QRIError):
    """Adaptive quadrature did not reach the requested tolerance."""


# Partitions


class PartitionError(QRIError):
    """Error constructing or combining symmetric partitions."""


class NonIncreasingCuts(PartitionError):
    """Interior cut points are not strictly increasing (or are duplicated)."""


class CutOutOfRange(PartitionError):
    """An interior cut point is not inside the open interval (0, 1/2)."""


class ZeroK(PartitionError):
    """An equi-partition was requested with fewer than one member."""


class PartitionTooLarge(PartitionError):
    """A partition has more members than MAX_PARTITION_MEMBERS."""


class NotARefinement(PartitionError):
    """The fine partition does not contain every cut of the coarse one."""


# Distributions


class DistributionError(QRIError):
    """Error in a parametric distribution specification."""


class InvalidParameter(DistributionError):
    """A shape, scale or rate parameter is not strictly positive or finite."""


class InversionFailure(DistributionError):
    """Numerical inversion of a distribution function failed.

    Signals a parameter pathology: the inversion did not produce a finite
    value for a probability inside the support.
    """


# Samples and estimators


class SampleError(QRIError):
    """Error in a sample of incomes or in an estimator applied to it."""


class NegativeIncome(SampleError):
    """The sample contains a negative income.

    Callers are expected to clip negatives to zero before ingesting.
    """


class NonFiniteIncome(SampleError):
    """The sample contains NaN or infinite values."""


class TooFewObservations(SampleError):
    """The sample has fewer than two observations."""


class ZeroMassTooLarge(SampleError):
    """At least half of the observations are exactly zero."""


class ZeroDenominator(SampleError):
    """An upper symmetric quantile used as a denominator is zero."""


class DegenerateWindow(SampleError):
    """The quantile-density window shrank to zero width.

    Signals that the sample is too small for the requested probability.
    """


class NonIntegerBlockBoundary(SampleError):
    """A block boundary n * p_k of the exact decomposition is not an integer.

    Callers may fall back to the grid estimator for such partitions.

    Attributes:
        boundary: The offending value of n * p_k.
    """

    def __init__(self, message: str, boundary: float) -> None:
        """Initialize a NonIntegerBlockBoundary.

        Args:
            message: The error message.
            boundary: The offending value of n * p_k.
        """
        super().__init__(message)
        self._boundary: float = boundary

    @property
    def boundary(self) -> float:
        """The offending value of n * p_k."""
        return self._boundary

    @override
    def __repr__(self) -> str:
        """Return a string representation of the error."""
        return f"NonIntegerBlockBoundary({self.args[0]!r}, boundary={self._boundary!r})"


# Grouped tables


class GroupedDataError(QRIError):
    """Error in a grouped (binned) frequency table."""


class EmptyTable(GroupedDataError):
    """The table has no bins or a non-positive total count."""


class OverlappingBins(GroupedDataError):
    """Bins are out of order, overlap, or have lower > upper."""


class OpenBinNotLast(GroupedDataError):
    """An unbounded bin appears before the last row, or more than once."""


class OpenBinTooLarge(GroupedDataError):
    """The unbounded top bin holds half or more of the total count."""


class NoOpenBin(GroupedDataError):
    """A Pareto tail was requested for a table without an unbounded bin."""
