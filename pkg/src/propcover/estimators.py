"""Closed-form confidence intervals for a binomial proportion.

Three interval families are provided: Wald, Wilson (score) and the adjusted
Wilson interval of type ``epsilon``, which adds ``epsilon`` pseudo-observations
(half successes, half failures) before computing a Wald interval.

The scalar functions (``wald_interval`` and friends) return :class:`Interval`
objects.  The ``*_bounds`` kernels accept numpy arrays of success counts and
are what the coverage code uses; both paths run the same arithmetic, so a
scalar result is bit-identical to the matching array element.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ConfidenceLevel",
    "EstimatorSpec",
    "Interval",
    "Method",
    "SampleSummary",
    "adjusted_wilson_interval",
    "interval_bounds",
    "inverse_normal_cdf",
    "wald_interval",
    "wilson_interval",
    "wilson_interval_weighted_form",
]


# Coefficients of Acklam's rational approximation to the normal quantile.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _acklam(q: float) -> float:
    if q < _P_LOW:
        r = math.sqrt(-2.0 * math.log(q))
        return (((((_C[0] * r + _C[1]) * r + _C[2]) * r + _C[3]) * r + _C[4]) * r + _C[5]) / (
            (((_D[0] * r + _D[1]) * r + _D[2]) * r + _D[3]) * r + 1.0)
    if q > 1.0 - _P_LOW:
        return -_acklam(1.0 - q)
    r = q - 0.5
    s = r * r
    return (((((_A[0] * s + _A[1]) * s + _A[2]) * s + _A[3]) * s + _A[4]) * s + _A[5]) * r / (
        ((((_B[0] * s + _B[1]) * s + _B[2]) * s + _B[3]) * s + _B[4]) * s + 1.0)


def inverse_normal_cdf(q: float) -> float:
    """Quantile function of the standard normal distribution.

    Acklam's rational approximation (relative error about 1e-9) followed by
    one Halley refinement step, which brings the result to near machine
    precision over the whole open unit interval.

    Raises:
        ValueError: if ``q`` is not strictly between 0 and 1.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {q!r}")
    if q == 0.5:
        return 0.0
    # Work in the lower tail so the residual is computed from erfc without
    # cancellation, then reflect.
    if q > 0.5:
        return -inverse_normal_cdf(1.0 - q)
    x = _acklam(q)
    residual = 0.5 * math.erfc(-x / math.sqrt(2.0)) - q
    u = residual * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


@dataclass(frozen=True)
class ConfidenceLevel:
    """A two-sided confidence level ``level = 1 - alpha``."""

    level: float
    alpha: float = field(init=False)
    z: float = field(init=False)

    def __post_init__(self) -> None:
        level = float(self.level)
        if not 0.0 < level < 1.0:
            raise ValueError(f"confidence level must lie in (0, 1), got {level!r}")
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "alpha", 1.0 - level)
        # (1 + level) / 2 is 1 - alpha/2 without the rounding of 1 - level.
        object.__setattr__(self, "z", inverse_normal_cdf((1.0 + level) / 2.0))

    @property
    def percent(self) -> str:
        """Level as a compact percentage label: 0.95 -> '95', 0.975 -> '97.5'."""
        return f"{self.level * 100:.10g}"


class Method(enum.Enum):
    WALD = "wald"
    WILSON = "wilson"
    ADJUSTED_WILSON = "adjusted_wilson"


@dataclass(frozen=True)
class EstimatorSpec:
    """Which interval method to use, at which confidence level."""

    method: Method
    level: ConfidenceLevel
    epsilon: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.level, ConfidenceLevel):
            object.__setattr__(self, "level", ConfidenceLevel(self.level))
        object.__setattr__(self, "method", Method(self.method))
        if self.method is Method.ADJUSTED_WILSON:
            if self.epsilon < 1:
                raise ValueError("adjusted Wilson requires epsilon >= 1")
        elif self.epsilon != 0:
            # epsilon is meaningless for the other methods; normalise it so
            # that equal estimators compare and hash equal.
            object.__setattr__(self, "epsilon", 0)

    @classmethod
    def wald(cls, level: float) -> EstimatorSpec:
        return cls(Method.WALD, ConfidenceLevel(level))

    @classmethod
    def wilson(cls, level: float) -> EstimatorSpec:
        return cls(Method.WILSON, ConfidenceLevel(level))

    @classmethod
    def adjusted_wilson(cls, epsilon: int, level: float) -> EstimatorSpec:
        return cls(Method.ADJUSTED_WILSON, ConfidenceLevel(level), epsilon)

    @property
    def name(self) -> str:
        """Short identifier used in file names and tables, e.g. ``adjwilson4``."""
        if self.method is Method.ADJUSTED_WILSON:
            return f"adjwilson{self.epsilon}"
        return self.method.value

    @property
    def label(self) -> str:
        if self.method is Method.ADJUSTED_WILSON:
            return f"Adjusted Wilson {self.epsilon}"
        return self.method.value.capitalize()

    def interval(self, x: int, n: int) -> Interval:
        return _SCALAR[self.method](self, SampleSummary(x, n))


@dataclass(frozen=True)
class SampleSummary:
    successes: int
    trials: int

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.successes <= self.trials:
            raise ValueError(
                f"successes must lie in [0, {self.trials}], got {self.successes}")

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lower, upper]``, stored unclipped.

    Membership uses the unclipped endpoints; the clipped ones exist for
    display.
    """

    lower: float
    upper: float

    @property
    def clipped_lower(self) -> float:
        return max(self.lower, 0.0)

    @property
    def clipped_upper(self) -> float:
        return min(self.upper, 1.0)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def __contains__(self, p: float) -> bool:
        return self.lower <= p <= self.upper


# -- array kernels ----------------------------------------------------------
#
# Each kernel takes success counts ``x`` (int array or int) and returns
# ``(lower, upper)`` as float64 arrays.


def wald_bounds(x, n: int, z: float):
    p_hat = np.asarray(x, dtype=np.float64) / n
    half = z * np.sqrt(p_hat * (1.0 - p_hat) / n)
    return p_hat - half, p_hat + half


def wilson_bounds(x, n: int, z: float):
    x = np.asarray(x)
    p_hat = x / n
    z2 = z * z
    denom = n + z2
    center = (n * p_hat + 0.5 * z2) / denom
    half = z * np.sqrt((n * p_hat * (1.0 - p_hat) + 0.25 * z2) / (denom * denom))
    # The endpoints at x = 0 and x = n are exactly 0 and 1 algebraically;
    # pin them so rounding never pushes them outside [0, 1].
    lower = np.where(x == 0, 0.0, center - half)
    upper = np.where(x == n, 1.0, center + half)
    return lower, upper


def wilson_weighted_bounds(x, n: int, z: float):
    x = np.asarray(x)
    p_hat = x / n
    z2 = z * z
    m = n + z2
    w_data = n / m
    w_prior = z2 / m
    center = w_data * p_hat + w_prior * 0.5
    variance = (w_data * p_hat * (1.0 - p_hat) + w_prior * 0.5 * (1.0 - 0.5)) / m
    half = z * np.sqrt(variance)
    lower = np.where(x == 0, 0.0, center - half)
    upper = np.where(x == n, 1.0, center + half)
    return lower, upper


def adjusted_wilson_bounds(x, n: int, z: float, epsilon: float):
    p_hat = np.asarray(x, dtype=np.float64) / n
    m = n + epsilon
    p_tilde = (n * p_hat + 0.5 * epsilon) / m
    half = z * np.sqrt(p_tilde * (1.0 - p_tilde) / m)
    return p_tilde - half, p_tilde + half


def interval_bounds(spec: EstimatorSpec, x, n: int):
    """Vectorised ``(lower, upper)`` arrays for success counts ``x`` out of ``n``."""
    z = spec.level.z
    if spec.method is Method.WALD:
        return wald_bounds(x, n, z)
    if spec.method is Method.WILSON:
        return wilson_bounds(x, n, z)
    return adjusted_wilson_bounds(x, n, z, spec.epsilon)


# -- scalar API ---------------------------------------------------------------


def _interval(bounds) -> Interval:
    lower, upper = bounds
    return Interval(float(lower), float(upper))


def wald_interval(s: SampleSummary, level: ConfidenceLevel) -> Interval:
    """``p_hat +- z * sqrt(p_hat (1 - p_hat) / n)``; a point interval when x is 0 or n."""
    return _interval(wald_bounds(s.successes, s.trials, level.z))


def wilson_interval(s: SampleSummary, level: ConfidenceLevel) -> Interval:
    """Wilson score interval, always inside ``[0, 1]``."""
    return _interval(wilson_bounds(s.successes, s.trials, level.z))


def wilson_interval_weighted_form(s: SampleSummary, level: ConfidenceLevel) -> Interval:
    """Wilson interval written as weighted averages of the data and of 1/2.

    Algebraically identical to :func:`wilson_interval`; kept as a second,
    independently written evaluation so the two can be checked against each
    other.
    """
    return _interval(wilson_weighted_bounds(s.successes, s.trials, level.z))


def adjusted_wilson_interval(s: SampleSummary, epsilon: float,
                             level: ConfidenceLevel) -> Interval:
    """Wald interval after adding ``epsilon`` pseudo-observations, half of them successes.

    ``epsilon`` is an integer in normal use, but any positive real is
    accepted.  The result is not clipped and can extend below 0 or above 1.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    return _interval(adjusted_wilson_bounds(s.successes, s.trials, level.z, epsilon))


_SCALAR = {
    Method.WALD: lambda spec, s: wald_interval(s, spec.level),
    Method.WILSON: lambda spec, s: wilson_interval(s, spec.level),
    Method.ADJUSTED_WILSON: lambda spec, s: adjusted_wilson_interval(s, spec.epsilon, spec.level),
}
