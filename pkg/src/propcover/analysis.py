"""SPP summary tables and the paired t-test.

The t-distribution tail comes from the regularised incomplete beta function,
evaluated with Lentz's continued fraction, so no statistics package is
needed at run time.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .coverage import Mode, SamplingScheme
from .estimators import EstimatorSpec, Method
from .grid import NEAR_TIE, GridSpec, PixelGrid, run_grid, satisfactory_pixel_percentage

__all__ = [
    "DegeneratePairingError",
    "SppRow",
    "SppTable",
    "TTestResult",
    "build_spp_table",
    "derive_seed",
    "paired_spp_runs",
    "paired_t_test",
    "regularized_incomplete_beta",
    "student_t_cdf",
    "student_t_sf",
]

_TINY = 1e-300
_EPS = 1e-16


def _beta_continued_fraction(a: float, b: float, x: float, max_iter: int = 10_000) -> float:
    # Modified Lentz evaluation of the continued fraction for I_x(a, b).
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for ``a, b > 0`` and ``0 <= x <= 1``."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    # The fraction converges fast only on this side of the mean; use the
    # symmetry I_x(a, b) = 1 - I_{1-x}(b, a) on the other.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: float) -> float:
    """Upper tail P(T > t) of Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be positive")
    if t == 0:
        return 0.5
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    t2 = t * t
    if t2 < df:
        # Near zero the direct form loses digits to cancellation; use
        # P(|T| < |t|) = I_{t^2/(df+t^2)}(1/2, df/2) instead.
        tail = 0.5 - 0.5 * regularized_incomplete_beta(0.5, 0.5 * df, t2 / (df + t2))
    else:
        # P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2)
        tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t2))
    return tail if t > 0 else 1.0 - tail


def student_t_cdf(t: float, df: float) -> float:
    if t == 0:
        return 0.5
    if t < 0:
        return student_t_sf(-t, df)
    return 1.0 - student_t_sf(t, df)


class DegeneratePairingError(ValueError):
    """Paired differences are constant but nonzero, so t is undefined."""


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p_value: float
    mean_difference: float
    sd_difference: float


def paired_t_test(a: Sequence[float], b: Sequence[float] | None = None) -> TTestResult:
    """Two-sided paired t-test of ``a - b`` (or of the differences ``a`` alone).

    Raises:
        ValueError: fewer than two pairs, or unequal lengths.
        DegeneratePairingError: every difference equal and nonzero.
    """
    if b is None:
        d = [float(v) for v in a]
    else:
        if len(a) != len(b):
            raise ValueError(f"paired samples differ in length ({len(a)} vs {len(b)})")
        d = [float(x) - float(y) for x, y in zip(a, b)]
    m = len(d)
    if m < 2:
        raise ValueError("a paired t-test needs at least two pairs")
    mean = math.fsum(d) / m
    if all(v == 0.0 for v in d):
        return TTestResult(0.0, m - 1, 1.0, 0.0, 0.0)
    if all(v == d[0] for v in d):
        raise DegeneratePairingError(
            f"all {m} differences equal {d[0]!r}; the t statistic is undefined")
    sd = math.sqrt(math.fsum((v - mean) ** 2 for v in d) / (m - 1))
    t = mean / (sd / math.sqrt(m))
    p = min(1.0, 2.0 * student_t_sf(abs(t), m - 1))
    return TTestResult(t, m - 1, p, mean, sd)


# -- SPP tables -----------------------------------------------------------------


@dataclass(frozen=True)
class SppRow:
    level: float
    method: Method
    epsilon: int
    n_max: int
    spp: float
    is_max: bool = False
    near_tie: bool = False

    @property
    def label(self) -> str:
        if self.method is Method.ADJUSTED_WILSON:
            return f"Adjusted Wilson {self.epsilon}"
        return self.method.value.capitalize()

    @property
    def key(self) -> tuple:
        return (self.level, self.method, self.epsilon)


_METHOD_ORDER = {Method.WALD: 0, Method.WILSON: 1, Method.ADJUSTED_WILSON: 2}


@dataclass(frozen=True)
class SppTable:
    rows: tuple[SppRow, ...]

    @property
    def levels(self) -> list[float]:
        return sorted({r.level for r in self.rows})

    @property
    def n_maxes(self) -> list[int]:
        return sorted({r.n_max for r in self.rows})

    def get(self, level: float, method: Method, epsilon: int = 0, n_max: int | None = None) -> SppRow:
        for r in self.rows:
            if (r.level, r.method, r.epsilon) == (level, method, epsilon) and (
                    n_max is None or r.n_max == n_max):
                return r
        raise KeyError((level, method, epsilon, n_max))

    def best(self, level: float, n_max: int | None = None) -> SppRow:
        for r in self.rows:
            if r.level == level and r.is_max and (n_max is None or r.n_max == n_max):
                return r
        raise KeyError((level, n_max))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("level", "method", "epsilon", "n_max", "spp", "is_max", "near_tie"))
        for r in self.rows:
            w.writerow((f"{r.level * 100:.10g}", r.method.value, r.epsilon, r.n_max,
                        f"{r.spp:.6f}", int(r.is_max), int(r.near_tie)))
        return buf.getvalue()

    def to_text(self) -> str:
        """Aligned plain-text table: one row per (level, method), one column per n range.

        ``*`` marks the per-column maximum at each level, ``~`` a value within
        the near-tie threshold of it.
        """
        n_maxes = self.n_maxes
        keys = []
        for r in self.rows:
            if r.key not in keys:
                keys.append(r.key)
        header = ["Level", "Method"] + [f"n=1..{n}" for n in n_maxes]
        lines = [header]
        for level, method, eps in keys:
            cells = []
            label = None
            for n in n_maxes:
                try:
                    r = self.get(level, method, eps, n)
                except KeyError:
                    cells.append("")
                    continue
                label = r.label
                mark = "*" if r.is_max else ("~" if r.near_tie else " ")
                cells.append(f"{r.spp:.4f}{mark}")
            lines.append([f"{level * 100:.10g}%", label or ""] + cells)
        widths = [max(len(row[i]) for row in lines) for i in range(len(header))]
        out = []
        for k, row in enumerate(lines):
            out.append("  ".join(c.ljust(w) if i < 2 else c.rjust(w)
                                 for i, (c, w) in enumerate(zip(row, widths))).rstrip())
            if k == 0:
                out.append("-" * len(out[0]))
        return "\n".join(out) + "\n"


def build_spp_table(grids: Iterable[PixelGrid], required: Iterable[tuple] | None = None,
                    tolerance: float = NEAR_TIE) -> SppTable:
    """Summarise grids as an SPP table with per-(level, n range) maxima flagged.

    Args:
        grids: one grid per (level, method, epsilon, n range).
        required: optional ``(level, method, epsilon)`` triples that must be
            present; each is checked for every n range seen.

    Raises:
        KeyError: when required cells are absent; the message lists them all.
    """
    raw = []
    for g in grids:
        e = g.estimator
        raw.append(SppRow(e.level.level, e.method, e.epsilon, g.spec.n_max,
                          satisfactory_pixel_percentage(g)))
    if required is not None:
        present = {(r.level, r.method, r.epsilon, r.n_max) for r in raw}
        n_maxes = sorted({r.n_max for r in raw}) or [None]
        missing = [(lvl, m, eps, n) for lvl, m, eps in required for n in n_maxes
                   if (lvl, m, eps, n) not in present]
        if missing:
            listed = ", ".join(
                f"({lvl * 100:.10g}%, {m.value}{'' if not eps else ' ' + str(eps)}, n<= {n})"
                for lvl, m, eps, n in missing)
            raise KeyError(f"SPP table is missing cells: {listed}")

    raw.sort(key=lambda r: (r.level, _METHOD_ORDER[r.method], r.epsilon, r.n_max))
    rows = []
    for r in raw:
        group = [q for q in raw if q.level == r.level and q.n_max == r.n_max]
        best = max(group, key=lambda q: (q.spp, -_METHOD_ORDER[q.method], -q.epsilon))
        is_max = r is best
        near = not is_max and best.spp - r.spp <= tolerance
        rows.append(SppRow(r.level, r.method, r.epsilon, r.n_max, r.spp, is_max, near))
    return SppTable(tuple(rows))


# -- repeated runs ----------------------------------------------------------------


def derive_seed(master_seed: int, run: int) -> int:
    """Unsigned 64-bit seed for replicate ``run`` of a master seed."""
    state = np.random.SeedSequence([master_seed, run]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def paired_spp_runs(first: EstimatorSpec, second: EstimatorSpec, runs: int, master_seed: int = 0,
                    n_max: int = 100, n_sim: int = 1000, scheme: SamplingScheme | None = None,
                    p_indices: Sequence[int] = tuple(range(1, 100)), threads: int = 1,
                    ) -> tuple[list[float], list[float]]:
    """SPP of two estimators over ``runs`` independent Monte Carlo grids.

    Both estimators see the same samples in every run; run ``r`` uses
    ``derive_seed(master_seed, r)``.
    """
    if runs < 2:
        raise ValueError("need at least two runs to compare")
    scheme = scheme or SamplingScheme()
    spp_a, spp_b = [], []
    for r in range(runs):
        spec = GridSpec((first, second), 1, n_max, tuple(p_indices), Mode.MONTE_CARLO,
                        scheme, n_sim, derive_seed(master_seed, r))
        ga, gb = run_grid(spec, threads=threads)
        spp_a.append(satisfactory_pixel_percentage(ga))
        spp_b.append(satisfactory_pixel_percentage(gb))
    return spp_a, spp_b
