"""Eight-colour rainbow code for coverage probabilities.

For significance level alpha the unit interval is split into

    Red        [0, a)          Green      [3a, 0.5)
    Orange     [a, 2a)         Turquoise  [0.5, 1-3a)
    LightGreen [2a, 3a)        Blue       [1-3a, 1-2a)
                               Purple     [1-2a, 1-a)
                               Pink       [1-a, 1]

Pink is the only closed bin; a coverage exactly equal to the nominal level
counts as satisfactory.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = ["ColorBin", "ColorCode", "DEFAULT_RGB", "classify", "parse_hex"]


class ColorBin(enum.IntEnum):
    """Bins in increasing order of coverage."""

    RED = 0
    ORANGE = 1
    LIGHT_GREEN = 2
    GREEN = 3
    TURQUOISE = 4
    BLUE = 5
    PURPLE = 6
    PINK = 7

    @property
    def label(self) -> str:
        return self.name.replace("_", " ").title()


def parse_hex(code: str) -> tuple[int, int, int]:
    code = code.lstrip("#")
    if len(code) != 6:
        raise ValueError(f"expected a #RRGGBB colour, got {code!r}")
    return tuple(int(code[i:i + 2], 16) for i in (0, 2, 4))


DEFAULT_RGB = {
    ColorBin.PINK: parse_hex("#FFC0CB"),
    ColorBin.PURPLE: parse_hex("#800080"),
    ColorBin.BLUE: parse_hex("#0000FF"),
    ColorBin.TURQUOISE: parse_hex("#40E0D0"),
    ColorBin.GREEN: parse_hex("#008000"),
    ColorBin.LIGHT_GREEN: parse_hex("#90EE90"),
    ColorBin.ORANGE: parse_hex("#FFA500"),
    ColorBin.RED: parse_hex("#FF0000"),
}


def _as_fraction(alpha) -> Fraction:
    if isinstance(alpha, Fraction):
        return alpha
    # 1 - 0.95 is 0.05000000000000004 in binary; snap to the intended decimal.
    return Fraction(alpha).limit_denominator(10**6)


@dataclass(frozen=True)
class ColorCode:
    """The rainbow code at one significance level.

    Bin edges are held as exact rationals.  ``classify`` on a float compares
    against the double nearest each edge, which is the same as comparing the
    float's shortest decimal form with the exact edge: a coverage of 0.95
    lands in Pink at alpha = 0.05.
    """

    alpha: Fraction
    rgb: dict = field(default_factory=lambda: dict(DEFAULT_RGB), compare=False)

    def __post_init__(self) -> None:
        alpha = _as_fraction(self.alpha)
        if not 0 < alpha < Fraction(1, 6):
            raise ValueError(f"alpha must lie in (0, 1/6) for a non-degenerate code, got {alpha}")
        object.__setattr__(self, "alpha", alpha)
        missing = set(ColorBin) - set(self.rgb)
        if missing:
            raise ValueError(f"palette lacks colours for {sorted(b.name for b in missing)}")

    @classmethod
    def for_level(cls, level: float, rgb: dict | None = None) -> ColorCode:
        alpha = 1 - Fraction(level).limit_denominator(10**6)
        return cls(alpha) if rgb is None else cls(alpha, rgb)

    @property
    def level(self) -> Fraction:
        return 1 - self.alpha

    @property
    def edges(self) -> tuple[Fraction, ...]:
        """Lower edges of bins RED..PINK, followed by the upper end 1."""
        a = self.alpha
        half = Fraction(1, 2)
        return (Fraction(0), a, 2 * a, 3 * a, half, 1 - 3 * a, 1 - 2 * a, 1 - a, Fraction(1))

    def bin_range(self, b: ColorBin) -> tuple[Fraction, Fraction]:
        e = self.edges
        return e[b], e[b + 1]

    def classify(self, coverage: float) -> ColorBin:
        return classify(coverage, self)

    def classify_array(self, coverage) -> np.ndarray:
        """Vectorised :meth:`classify`; returns an int array of bin indices."""
        inner = np.array([float(e) for e in self.edges[1:-1]])
        return np.searchsorted(inner, np.asarray(coverage, dtype=np.float64), side="right")

    def classify_count(self, hits: int, n_sim: int) -> ColorBin:
        """Classify ``hits / n_sim`` with exact rational comparisons."""
        return self._bin_of(Fraction(hits, n_sim))

    def classify_counts(self, hits, n_sim: int) -> np.ndarray:
        """Vectorised :meth:`classify_count` in integer arithmetic."""
        hits = np.asarray(hits, dtype=np.int64)
        out = np.zeros(hits.shape, dtype=np.int64)
        for e in self.edges[1:-1]:
            # hits / n_sim >= num / den  <=>  hits * den >= num * n_sim
            out += hits * e.denominator >= e.numerator * n_sim
        return out

    def _bin_of(self, value: Fraction) -> ColorBin:
        if not 0 <= value <= 1:
            raise ValueError(f"coverage must lie in [0, 1], got {value}")
        edges = self.edges
        for b in reversed(ColorBin):
            if value >= edges[b]:
                return b
        raise AssertionError("unreachable")

    def color(self, b: ColorBin) -> tuple[int, int, int]:
        return tuple(self.rgb[b])

    def lut(self) -> np.ndarray:
        """``(8, 3)`` uint8 array of bin colours indexed by bin."""
        return np.array([self.rgb[b] for b in ColorBin], dtype=np.uint8)


def classify(coverage: float, code: ColorCode) -> ColorBin:
    """Bin of a coverage probability in ``[0, 1]``."""
    if not 0.0 <= coverage <= 1.0:
        raise ValueError(f"coverage must lie in [0, 1], got {coverage!r}")
    return ColorBin(int(code.classify_array(coverage)))
