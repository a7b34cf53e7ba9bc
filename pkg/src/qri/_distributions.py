"""Parametric income distributions, seeded samplers and lognormal closed forms.

Each DistributionSpec supplies an exact (or numerically inverted) quantile
function. Sampling is by inverse transform from a seeded PCG64 stream, so a
(seed, algorithm) pair always reproduces the same draws.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Final, overload

import numpy as np
from scipy import special, stats

from ._constants import MAX_SEED, RNG_ALGORITHM
from ._exceptions import (
    ConfigurationError,
    InvalidParameter,
    InversionFailure,
    ProbabilityOutOfRange,
)

if TYPE_CHECKING:
    from ._partitions import SymmetricPartition
    from ._types import ArrayLikeFloat, FloatArray

__all__ = [
    "DistributionSpec",
    "Family",
    "SeededRng",
    "lognormal_I",
    "lognormal_Ik",
    "lognormal_partial_integral",
    "normal_cdf",
    "normal_quantile",
    "parse_distribution",
    "quantile",
    "sample",
    "sample_with",
]


# Scalar normal kernels


def normal_cdf(x: float) -> float:
    """Standard normal distribution function Phi(x)."""
    return float(special.ndtr(x))


def normal_quantile(p: float) -> float:
    """Standard normal quantile function Phi^{-1}(p).

    Raises:
        ProbabilityOutOfRange: If p is not in the open interval (0, 1).
    """
    if not 0.0 < p < 1.0:
        msg = f"normal quantile needs p in (0, 1), got {p}"
        raise ProbabilityOutOfRange(msg)
    return float(special.ndtri(p))


# Distribution specifications


class Family(str, Enum):
    """Supported parametric families, valued by their CLI literal prefix."""

    LOGNORMAL = "lognormal"
    BETA = "beta"
    CHISQ = "chisq"
    PARETO2 = "pareto2"
    EXP = "exp"
    WEIBULL = "weibull"
    LNFRECHET = "lnfrechet"


_ARITY: Final[dict[Family, tuple[int, int]]] = {
    Family.LOGNORMAL: (2, 2),
    Family.BETA: (2, 2),
    Family.CHISQ: (1, 1),
    Family.PARETO2: (1, 2),
    Family.EXP: (1, 1),
    Family.WEIBULL: (1, 1),
    Family.LNFRECHET: (2, 2),
}
"""Minimum and maximum number of parameters per family."""


@dataclass(frozen=True, slots=True)
class DistributionSpec:
    """A parametric income distribution.

    Parameters by family:

    - ``LOGNORMAL``: (mu, sigma), Q(p) = exp(mu + sigma z_p)
    - ``BETA``: (alpha, beta)
    - ``CHISQ``: (df,)
    - ``PARETO2``: (a, lam), Lomax quantile Q(p) = lam ((1 - p)^(-1/a) - 1);
      lam defaults to 1
    - ``EXP``: (rate,)
    - ``WEIBULL``: (theta,), unit scale
    - ``LNFRECHET``: (sigma, tail), a lognormal body spliced at the median to
      a Frechet upper tail with shape ``tail``

    Attributes:
        family: The parametric family.
        params: The family parameters, in the order above.
    """

    family: Family
    params: tuple[float, ...]

    def __post_init__(self) -> None:
        """Validate the parameter count and positivity.

        Raises:
            InvalidParameter: If the arity is wrong or a shape, scale or rate
                parameter is not a finite positive number.
        """
        low, high = _ARITY[self.family]
        if not low <= len(self.params) <= high:
            msg = (
                f"{self.family.value} takes {low}..{high} parameters, "
                f"got {len(self.params)}"
            )
            raise InvalidParameter(msg)
        if not all(math.isfinite(value) for value in self.params):
            msg = f"{self.family.value} parameters must be finite, got {self.params}"
            raise InvalidParameter(msg)
        # mu is the only parameter allowed to be non-positive
        positive = self.params[1:] if self.family is Family.LOGNORMAL else self.params
        if any(value <= 0 for value in positive):
            msg = f"{self.family.value} parameters must be positive, got {self.params}"
            raise InvalidParameter(msg)

    @classmethod
    def lognormal(cls, mu: float = 0.0, sigma: float = 1.0) -> "DistributionSpec":
        """Lognormal(mu, sigma)."""
        return cls(Family.LOGNORMAL, (mu, sigma))

    @classmethod
    def beta(cls, alpha: float, beta: float) -> "DistributionSpec":
        """Beta(alpha, beta)."""
        return cls(Family.BETA, (alpha, beta))

    @classmethod
    def chisq(cls, df: float) -> "DistributionSpec":
        """Chi-square with df degrees of freedom."""
        return cls(Family.CHISQ, (df,))

    @classmethod
    def pareto2(cls, a: float, lam: float = 1.0) -> "DistributionSpec":
        """Type II Pareto (Lomax) with shape a and scale lam."""
        return cls(Family.PARETO2, (a, lam))

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "DistributionSpec":
        """Exponential with the given rate."""
        return cls(Family.EXP, (rate,))

    @classmethod
    def weibull(cls, theta: float) -> "DistributionSpec":
        """Weibull with shape theta and unit scale."""
        return cls(Family.WEIBULL, (theta,))

    @classmethod
    def lnfrechet(cls, sigma: float = 1.0, tail: float = 2.0) -> "DistributionSpec":
        """Lognormal body with a Frechet(tail) upper half."""
        return cls(Family.LNFRECHET, (sigma, tail))

    @property
    def bounded_above(self) -> bool:
        """Whether Q(1) is finite, so p = 1 is an admissible probability."""
        return self.family is Family.BETA

    def literal(self) -> str:
        """Return the CLI literal, e.g. ``pareto2:4,1``."""
        return f"{self.family.value}:" + ",".join(f"{value:g}" for value in self.params)

    def quantile_array(self, p: "FloatArray") -> "FloatArray":
        """Evaluate Q on an array of probabilities without range checks.

        Probabilities at or beyond the support edge map to the edge value
        (possibly ``inf``); callers are responsible for the domain.
        """
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return _QUANTILES[self.family](p, self.params)


def _lognormal_q(p: "FloatArray", params: tuple[float, ...]) -> "FloatArray":
    mu, sigma = params
    return np.exp(mu + sigma * special.ndtri(p))


def _beta_q(p: "FloatArray", params: tuple[float, ...]) -> "FloatArray":
    alpha, beta = params
    return np.asarray(stats.beta.ppf(p, alpha, beta), dtype=np.float64)


def _chisq_q(p: "FloatArray", params: tuple[float, ...]) -> "FloatArray":
    return np.asarray(stats.chi2.ppf(p, params[0]), dtype=np.float64)


def _pareto2_q(p: "FloatArray", params: tuple[float, ...]) -> "FloatArray":
    a = params[0]
    lam = params[1] if len(params) > 1 else 1.0
    return lam * np.expm1(-np.log1p(-p) / a)


def _exp_q(p: "FloatArray", params: tuple[float, ...]) -> "FloatArray":
    return -np.log1p(-p) / params[0]


def _weibull_q(p: "FloatArray", params: tuple[float, ...]) -> "FloatArray":
    return (-np.log1p(-p)) ** (1.0 / params[0])


def _lnfrechet_q(p: "FloatArray", params: tuple[float, ...]) -> "FloatArray":
    sigma, tail = params
    body = np.exp(sigma * special.ndtri(p))
    # Frechet quantile (-log p)^(-1/tail), shifted to pass through 1 at the
    # median and scaled so the slopes of both halves agree there
    median_frechet = math.log(2.0) ** (-1.0 / tail)
    frechet_slope = 2.0 / tail * math.log(2.0) ** (-1.0 / tail - 1.0)
    scale = sigma * math.sqrt(2.0 * math.pi) / frechet_slope
    upper = 1.0 + scale * ((-np.log(p)) ** (-1.0 / tail) - median_frechet)
    return np.where(p <= 0.5, body, upper)  # noqa: PLR2004


_QUANTILES = {
    Family.LOGNORMAL: _lognormal_q,
    Family.BETA: _beta_q,
    Family.CHISQ: _chisq_q,
    Family.PARETO2: _pareto2_q,
    Family.EXP: _exp_q,
    Family.WEIBULL: _weibull_q,
    Family.LNFRECHET: _lnfrechet_q,
}


def parse_distribution(text: str) -> DistributionSpec:
    """Parse a distribution literal such as ``lognormal:0,1`` or ``exp:1``.

    Raises:
        ConfigurationError: If the family is unknown or a parameter is not
            a number.
        InvalidParameter: If the parameters are invalid for the family.
    """
    name, _, rest = text.partition(":")
    try:
        family = Family(name.strip().lower())
    except ValueError as e:
        known = ", ".join(member.value for member in Family)
        msg = f"unknown distribution family {name!r} (expected one of {known})"
        raise ConfigurationError(msg) from e
    try:
        params = tuple(float(part) for part in rest.split(",") if part.strip())
    except ValueError as e:
        msg = f"invalid parameters in distribution literal {text!r}"
        raise ConfigurationError(msg) from e
    return DistributionSpec(family, params)


def _check_probabilities(d: DistributionSpec, p: "FloatArray") -> None:
    upper_ok = p <= 1.0 if d.bounded_above else p < 1.0
    if not bool(np.all((p >= 0.0) & upper_ok)):
        bound = "[0, 1]" if d.bounded_above else "[0, 1)"
        msg = f"quantile of {d.literal()} needs p in {bound}"
        raise ProbabilityOutOfRange(msg)


@overload
def quantile(d: DistributionSpec, p: float) -> float: ...
@overload
def quantile(d: DistributionSpec, p: "FloatArray") -> "FloatArray": ...
def quantile(
    d: DistributionSpec, p: "float | FloatArray"
) -> "float | FloatArray":
    """Evaluate the quantile function Q(p) of a distribution.

    Closed forms are used for the lognormal, Pareto II, exponential, Weibull
    and spliced families; Beta and chi-square are inverted numerically.

    Args:
        d: The distribution.
        p: A probability or an array of probabilities in [0, 1). Beta also
            accepts p = 1.

    Returns:
        The quantile(s), with the same shape as ``p``.

    Raises:
        ProbabilityOutOfRange: If a probability is outside the domain.
        InversionFailure: If numerical inversion returns a non-finite value.
    """
    values = np.asarray(p, dtype=np.float64)
    _check_probabilities(d, values)
    result = d.quantile_array(values)
    if not bool(np.all(np.isfinite(result))):
        msg = f"quantile inversion failed for {d.literal()}"
        raise InversionFailure(msg)
    if np.ndim(p) == 0:
        return float(result)
    return result


# Seeded random streams


@dataclass(frozen=True, slots=True)
class SeededRng:
    """A reproducible random stream identified by seed and algorithm.

    The value itself is immutable; ``generator()`` returns a fresh numpy
    Generator positioned at the start of the stream.

    Attributes:
        seed: A 64-bit unsigned seed.
        algorithm: The bit generator identifier (always ``PCG64``).
    """

    seed: int
    algorithm: str = field(default=RNG_ALGORITHM)

    def __post_init__(self) -> None:
        """Validate the seed range and algorithm.

        Raises:
            ConfigurationError: If the seed is outside [0, 2^64) or the
                algorithm is not supported.
        """
        if not 0 <= self.seed <= MAX_SEED:
            msg = f"seed must be a 64-bit unsigned integer, got {self.seed}"
            raise ConfigurationError(msg)
        if self.algorithm != RNG_ALGORITHM:
            msg = f"unsupported RNG algorithm {self.algorithm!r}"
            raise ConfigurationError(msg)

    def generator(self) -> np.random.Generator:
        """Return a new Generator at the start of this stream."""
        return np.random.Generator(np.random.PCG64(self.seed))

    def spawn(self, index: int) -> "SeededRng":
        """Derive an independent stream for trial ``index`` (seed XOR index)."""
        return SeededRng(self.seed ^ index, self.algorithm)


def sample_with(
    d: DistributionSpec, n: int, generator: np.random.Generator
) -> "FloatArray":
    """Draw n values from d by inverse transform using an existing generator."""
    if n < 1:
        msg = f"sample size must be at least 1, got {n}"
        raise ConfigurationError(msg)
    u = generator.random(n)
    return quantile(d, u)


def sample(d: DistributionSpec, n: int, rng: SeededRng) -> "FloatArray":
    """Draw n values from d by inverse transform sampling.

    Each draw is Q(u) for u uniform on [0, 1) from the stream of ``rng``.
    Calling twice with the same rng returns the same values.

    Raises:
        ConfigurationError: If n is less than one.
    """
    return sample_with(d, n, rng.generator())


# Lognormal closed forms


def _check_sigma(sigma: float) -> None:
    if not (math.isfinite(sigma) and sigma > 0):
        msg = f"sigma must be a finite positive number, got {sigma}"
        raise InvalidParameter(msg)


def _log_partial_integral(sigma: float, r: "ArrayLikeFloat") -> "FloatArray":
    r_arr = np.asarray(r, dtype=np.float64)
    shifted = special.ndtri(r_arr / 2.0) - 2.0 * sigma
    return 2.0 * sigma**2 + math.log(2.0) + special.log_ndtr(shifted)


def lognormal_partial_integral(sigma: float, r: float) -> float:
    """Integral of the lognormal quantile ratio curve over [0, r].

    Evaluates 2 exp(2 sigma^2) Phi(Phi^{-1}(r/2) - 2 sigma) in log space so
    large sigma does not overflow.

    Raises:
        InvalidParameter: If sigma is not positive.
        ProbabilityOutOfRange: If r is not in (0, 1].
    """
    _check_sigma(sigma)
    if not 0.0 < r <= 1.0:
        msg = f"upper limit must be in (0, 1], got {r}"
        raise ProbabilityOutOfRange(msg)
    return float(np.exp(_log_partial_integral(sigma, r)))


def lognormal_I(sigma: float) -> float:
    """Quantile ratio index of a lognormal with shape sigma.

    I(sigma) = 1 - 2 exp(2 sigma^2) Phi(-2 sigma); independent of mu.
    """
    return 1.0 - lognormal_partial_integral(sigma, 1.0)


def lognormal_Ik(sigma: float, partition: "SymmetricPartition") -> list[float]:
    """Conditional indices I_k of a lognormal over a symmetric partition.

    1 - I_k = (2 exp(2 sigma^2) / w_k) (Phi(z_{p_k} - 2 sigma) -
    Phi(z_{p_{k-1}} - 2 sigma)).
    """
    _check_sigma(sigma)
    upper = np.asarray(partition.cuts[1:], dtype=np.float64) * 2.0
    integrals = np.exp(_log_partial_integral(sigma, upper))
    # the integral over [0, 0] is zero
    previous = np.concatenate(([0.0], integrals[:-1]))
    weights = np.asarray(partition.weights, dtype=np.float64)
    return [float(value) for value in 1.0 - (integrals - previous) / weights]
