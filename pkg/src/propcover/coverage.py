"""Coverage probability of an interval estimator at one ``(n, p)`` pixel.

Two routes are provided:

* :func:`exact_coverage` sums the sampling distribution of the success count
  over the outcomes whose interval contains ``p``.
* :func:`monte_carlo_coverage` repeats the draw-a-sample / build-the-interval
  experiment ``n_sim`` times and reports the hit frequency.  Every replicate
  feeds one sample to all requested estimators (paired design).

Both routes understand two sampling models.  ``Binomial`` draws the success
count from Binomial(n, p).  ``FinitePopulation`` draws n items without
replacement from a population of N items, round(p N) of which are successes,
so the count is hypergeometric.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .estimators import EstimatorSpec, interval_bounds

__all__ = [
    "CoverageResult",
    "Mode",
    "PixelKey",
    "SamplingScheme",
    "binomial_pmf",
    "exact_coverage",
    "hypergeometric_pmf",
    "log_factorials",
    "monte_carlo_coverage",
    "pixel_rng",
    "success_count_pmf",
]

P_GRID = 100


class Mode(enum.Enum):
    EXACT = "exact"
    MONTE_CARLO = "mc"


@dataclass(frozen=True, order=True)
class PixelKey:
    """Grid cell ``(n, p)`` with ``p = p_index / 100``."""

    n: int
    p_index: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.p_index <= P_GRID - 1:
            raise ValueError(f"p_index must lie in 1..{P_GRID - 1}, got {self.p_index}")

    @property
    def p_fraction(self) -> Fraction:
        return Fraction(self.p_index, P_GRID)

    @property
    def p(self) -> float:
        return self.p_index / P_GRID


@dataclass(frozen=True)
class SamplingScheme:
    """How a sample of size n is drawn at proportion p.

    Attributes:
        mode: ``"finite"`` (without replacement from a population) or
            ``"binomial"``.
        population_size: N for the finite-population model.
        shuffle: finite-population Monte Carlo only.  When true each replicate
            runs a literal partial Fisher-Yates shuffle of the labelled
            population; otherwise the success count is drawn directly from
            the hypergeometric distribution, which has the same law and is
            much cheaper.
    """

    mode: str = "finite"
    population_size: int = 10_000
    shuffle: bool = False

    def __post_init__(self) -> None:
        if self.mode not in ("finite", "binomial"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")
        if self.mode == "finite" and self.population_size < 1:
            raise ValueError("population_size must be >= 1")

    @classmethod
    def binomial(cls) -> SamplingScheme:
        return cls(mode="binomial")

    @classmethod
    def finite(cls, population_size: int = 10_000, shuffle: bool = False) -> SamplingScheme:
        return cls(mode="finite", population_size=population_size, shuffle=shuffle)

    @property
    def is_finite(self) -> bool:
        return self.mode == "finite"

    def population_successes(self, p_index: int) -> int:
        """round(p N), evaluated exactly on the rational p."""
        return round(Fraction(p_index, P_GRID) * self.population_size)

    def true_proportion(self, p_index: int) -> float:
        """The proportion an interval must cover under this scheme.

        Under the finite-population model this is the realised population
        proportion round(p N) / N, which equals p on the 0.01 grid whenever
        N is a multiple of 100.
        """
        if self.is_finite:
            return self.population_successes(p_index) / self.population_size
        return p_index / P_GRID

    def check(self, n: int) -> None:
        if self.is_finite and n > self.population_size:
            raise ValueError(
                f"sample size {n} exceeds population size {self.population_size}")

    def as_dict(self) -> dict:
        d = {"mode": self.mode}
        if self.is_finite:
            d["population_size"] = self.population_size
            d["shuffle"] = self.shuffle
        return d


@dataclass(frozen=True)
class CoverageResult:
    """Coverage of one estimator at one pixel.

    For Monte Carlo results ``hits`` is the integer count kappa, and
    ``coverage == hits / n_sim``.
    """

    pixel: PixelKey
    estimator: EstimatorSpec
    coverage: float
    mode: Mode
    n_sim: int | None = None
    seed: int | None = None
    hits: int | None = None


# -- pmfs -----------------------------------------------------------------------


@lru_cache(maxsize=8)
def log_factorials(upto: int) -> np.ndarray:
    """``log(k!)`` for ``k = 0..upto``."""
    return np.array([math.lgamma(k + 1.0) for k in range(upto + 1)])


def _pmf_from_ratios(ratio: np.ndarray, mode: np.ndarray, lo: np.ndarray,
                     hi: np.ndarray) -> np.ndarray:
    """Unimodal pmf rows from successive ratios ``w[x+1] / w[x] = ratio[x]``.

    Each row starts at 1 at its mode and is extended outward by
    multiplication (upward) and division (downward) inside its support
    ``lo..hi``, then normalised.  Values near the mode never under- or
    overflow and each term carries at most about ``|x - mode|`` roundings.
    """
    rows, n = ratio.shape
    w = np.zeros((rows, n + 1))
    r = np.arange(rows)
    w[r, mode] = 1.0
    for k in range(1, n + 1):
        up = mode + k
        act = up <= hi
        if act.any():
            ra, xa = r[act], up[act]
            w[ra, xa] = w[ra, xa - 1] * ratio[ra, xa - 1]
        down = mode - k
        act = down >= lo
        if act.any():
            ra, xd = r[act], down[act]
            w[ra, xd] = w[ra, xd + 1] / ratio[ra, xd]
        if not ((mode + k < hi) | (mode - k > lo)).any():
            break
    return w / w.sum(axis=1, keepdims=True)


def binomial_pmf(n: int, p) -> np.ndarray:
    """Binomial(n, p) pmf over ``x = 0..n``.

    ``p`` may be a scalar (result shape ``(n+1,)``) or a 1-d array of
    probabilities strictly inside (0, 1) (result shape ``(len(p), n+1)``).
    """
    scalar = np.ndim(p) == 0
    p = np.atleast_1d(np.asarray(p, dtype=np.float64))
    if np.any((p <= 0.0) | (p >= 1.0)):
        raise ValueError("p must lie strictly inside (0, 1)")
    x = np.arange(n)
    odds = (p / (1.0 - p))[:, None]
    ratio = (n - x) / (x + 1.0) * odds
    mode = np.minimum(np.floor((n + 1) * p).astype(np.int64), n)
    zeros = np.zeros(len(p), dtype=np.int64)
    pmf = _pmf_from_ratios(ratio, mode, zeros, zeros + n)
    return pmf[0] if scalar else pmf


def hypergeometric_pmf(n: int, successes, population_size: int) -> np.ndarray:
    """Pmf of the success count in n draws without replacement, over ``x = 0..n``.

    ``successes`` is the number K of successes in the population; scalar or
    1-d integer array, with the same shape convention as :func:`binomial_pmf`.
    Impossible counts get probability exactly 0.
    """
    N = population_size
    if n > N:
        raise ValueError(f"cannot draw {n} items from a population of {N}")
    scalar = np.ndim(successes) == 0
    K = np.atleast_1d(np.asarray(successes, dtype=np.int64))
    if np.any((K < 0) | (K > N)):
        raise ValueError("population successes must lie in [0, N]")
    Kc = K[:, None]
    x = np.arange(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        # Only entries inside each row's support are ever read.
        ratio = ((Kc - x) * (n - x)) / ((x + 1.0) * (N - Kc - n + x + 1.0))
    lo = np.maximum(0, n - (N - K))
    hi = np.minimum(n, K)
    mode = np.clip((n + 1) * (K + 1) // (N + 2), lo, hi)
    pmf = _pmf_from_ratios(ratio, mode, lo, hi)
    return pmf[0] if scalar else pmf


def success_count_pmf(n: int, p_indices: Sequence[int], scheme: SamplingScheme) -> np.ndarray:
    """Pmf matrix of shape ``(len(p_indices), n + 1)`` under ``scheme``."""
    scheme.check(n)
    if scheme.is_finite:
        K = [scheme.population_successes(k) for k in p_indices]
        return hypergeometric_pmf(n, np.array(K), scheme.population_size)
    return binomial_pmf(n, np.asarray(p_indices) / P_GRID)


# -- exact ----------------------------------------------------------------------


# Exact coverages within this distance of a colour-code edge are recomputed
# in rational arithmetic; ties such as coverage 1 - p = 0.9 at n = 1 are real.
EDGE_WINDOW = 1e-10


def critical_values(level: float) -> tuple[Fraction, ...]:
    """Colour-code edges alpha, 2 alpha, 3 alpha, 1/2 and their mirrors, as exact rationals."""
    alpha = 1 - Fraction(level).limit_denominator(10**6)
    return (alpha, 2 * alpha, 3 * alpha, Fraction(1, 2), 1 - 3 * alpha, 1 - 2 * alpha, 1 - alpha)


def rational_coverage(n: int, p_index: int, covered: np.ndarray, scheme: SamplingScheme) -> Fraction:
    """Exact probability of the outcomes flagged in ``covered`` (length n+1)."""
    xs = np.flatnonzero(covered).tolist()
    if scheme.is_finite:
        N = scheme.population_size
        K = scheme.population_successes(p_index)
        num = sum(math.comb(K, x) * math.comb(N - K, n - x) for x in xs)
        return Fraction(num, math.comb(N, n))
    k = p_index
    num = sum(math.comb(n, x) * k**x * (P_GRID - k) ** (n - x) for x in xs)
    return Fraction(num, P_GRID**n)


def exact_coverage_row(n: int, p_indices: Sequence[int], estimators: Sequence[EstimatorSpec],
                       scheme: SamplingScheme, pmf: np.ndarray | None = None) -> np.ndarray:
    """Exact coverage for every (estimator, p) at one n; shape ``(len(estimators), len(p))``.

    This is the kernel behind both :func:`exact_coverage` and exact grids, so
    single-pixel and whole-grid results agree bit for bit.
    """
    if pmf is None:
        pmf = success_count_pmf(n, p_indices, scheme)
    truth = np.array([scheme.true_proportion(k) for k in p_indices])[:, None]
    x = np.arange(n + 1)
    out = np.empty((len(estimators), len(p_indices)))
    for i, spec in enumerate(estimators):
        lower, upper = interval_bounds(spec, x, n)
        covered = (lower <= truth) & (truth <= upper)
        row = np.where(covered, pmf, 0.0).sum(axis=1)
        for edge in critical_values(spec.level.level):
            for j in np.flatnonzero(np.abs(row - float(edge)) <= EDGE_WINDOW):
                row[j] = float(rational_coverage(n, p_indices[j], covered[j], scheme))
        out[i] = row
    # Summed pmf mass can round a hair past 1.
    return np.minimum(out, 1.0)


def exact_coverage(pixel: PixelKey, estimator: EstimatorSpec,
                   scheme: SamplingScheme | None = None) -> CoverageResult:
    """Probability that the estimator's interval contains p at this pixel.

    The default scheme is binomial, the textbook definition of coverage.
    """
    scheme = scheme or SamplingScheme.binomial()
    value = exact_coverage_row(pixel.n, [pixel.p_index], [estimator], scheme)[0, 0]
    return CoverageResult(pixel, estimator, float(value), Mode.EXACT)


# -- Monte Carlo ----------------------------------------------------------------


def pixel_rng(seed: int, n: int, p_index: int) -> np.random.Generator:
    """Independent generator for one pixel, derived from the master seed.

    The stream depends only on ``(seed, n, p_index)``, never on which worker
    evaluates the pixel or in what order.
    """
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, n, p_index])))


def _shuffle_counts(rng: np.random.Generator, n: int, K: int, N: int, n_sim: int) -> np.ndarray:
    # One row per replicate: the population with K leading successes, then a
    # partial Fisher-Yates pass that fixes positions 0..n-1 as the sample.
    population = np.zeros((n_sim, N), dtype=np.int8)
    population[:, :K] = 1
    rows = np.arange(n_sim)
    for i in range(n):
        j = rng.integers(i, N, size=n_sim)
        picked = population[rows, j]
        population[rows, j] = population[rows, i]
        population[rows, i] = picked
    return population[:, :n].sum(axis=1, dtype=np.int64)


def draw_success_counts(rng: np.random.Generator, n: int, p_index: int,
                        scheme: SamplingScheme, n_sim: int) -> np.ndarray:
    """Success counts for ``n_sim`` independent samples of size n."""
    scheme.check(n)
    if scheme.is_finite:
        N = scheme.population_size
        K = scheme.population_successes(p_index)
        if scheme.shuffle:
            return _shuffle_counts(rng, n, K, N, n_sim)
        return rng.hypergeometric(K, N - K, n, size=n_sim)
    return rng.binomial(n, p_index / P_GRID, size=n_sim)


def monte_carlo_hits(counts: np.ndarray, n: int, p_index: int,
                     estimators: Sequence[EstimatorSpec], scheme: SamplingScheme) -> list[int]:
    """Integer hit counts kappa for each estimator given simulated success counts."""
    tally = np.bincount(counts, minlength=n + 1)
    truth = scheme.true_proportion(p_index)
    x = np.arange(n + 1)
    hits = []
    for spec in estimators:
        lower, upper = interval_bounds(spec, x, n)
        covered = (lower <= truth) & (truth <= upper)
        hits.append(int(tally[covered].sum()))
    return hits


def monte_carlo_coverage(pixel: PixelKey, estimators: Sequence[EstimatorSpec],
                         scheme: SamplingScheme | None = None, n_sim: int = 1000,
                         seed: int = 0) -> list[CoverageResult]:
    """Empirical coverage of each estimator over ``n_sim`` shared samples.

    Each replicate draws one sample and checks every estimator against it,
    so adding or removing estimators never changes the others' results.

    Raises:
        ValueError: if ``n_sim < 1`` or the sample is larger than the
            finite population.
    """
    scheme = scheme or SamplingScheme()
    if n_sim < 1:
        raise ValueError(f"n_sim must be >= 1, got {n_sim}")
    rng = pixel_rng(seed, pixel.n, pixel.p_index)
    counts = draw_success_counts(rng, pixel.n, pixel.p_index, scheme, n_sim)
    hits = monte_carlo_hits(counts, pixel.n, pixel.p_index, estimators, scheme)
    return [
        CoverageResult(pixel, spec, k / n_sim, Mode.MONTE_CARLO, n_sim=n_sim, seed=seed, hits=k)
        for spec, k in zip(estimators, hits)
    ]
