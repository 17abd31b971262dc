"""Coverage over full ``(n, p)`` grids, pixel classification and SPP.

A grid run evaluates every estimator of a :class:`GridSpec` at every pixel
``n = n_min..n_max``, ``p = p_index / 100``.  Exact grids share one pmf row
per ``n`` across all estimators.  Monte Carlo grids give each pixel its own
random stream (see :func:`propcover.coverage.pixel_rng`), so the output is
identical whatever the thread count.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .coverage import (
    CoverageResult,
    Mode,
    PixelKey,
    SamplingScheme,
    draw_success_counts,
    exact_coverage_row,
    monte_carlo_hits,
    pixel_rng,
)
from .estimators import EstimatorSpec
from .palette import ColorBin, ColorCode

__all__ = [
    "EpsilonChoice",
    "GridSpec",
    "PixelGrid",
    "color_histogram",
    "grids_to_json",
    "optimal_epsilon",
    "run_grid",
    "satisfactory_pixel_percentage",
    "write_grid_csv",
]

NEAR_TIE = 0.005
CSV_COLUMNS = ("n", "p", "method", "epsilon", "level", "coverage", "mode", "seed")


@dataclass(frozen=True)
class GridSpec:
    estimators: tuple[EstimatorSpec, ...]
    n_min: int = 1
    n_max: int = 100
    p_indices: tuple[int, ...] = tuple(range(1, 100))
    mode: Mode = Mode.EXACT
    scheme: SamplingScheme | None = None
    n_sim: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "estimators", tuple(self.estimators))
        object.__setattr__(self, "p_indices", tuple(self.p_indices))
        if self.scheme is None:
            # Exact sums default to the binomial model, simulation to the
            # finite population of 10000.
            default = SamplingScheme.binomial() if self.mode is Mode.EXACT else SamplingScheme()
            object.__setattr__(self, "scheme", default)
        if not self.estimators:
            raise ValueError("a grid needs at least one estimator")
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError(f"invalid n range {self.n_min}..{self.n_max}")
        if not self.p_indices or any(not 1 <= k <= 99 for k in self.p_indices):
            raise ValueError("p_indices must be a non-empty subset of 1..99")
        if self.mode is Mode.MONTE_CARLO and self.n_sim < 1:
            raise ValueError("n_sim must be >= 1")
        self.scheme.check(self.n_max)

    @property
    def n_values(self) -> range:
        return range(self.n_min, self.n_max + 1)

    @property
    def pixel_count(self) -> int:
        return len(self.n_values) * len(self.p_indices)

    def as_dict(self) -> dict:
        d = {
            "n_min": self.n_min,
            "n_max": self.n_max,
            "p_indices": list(self.p_indices),
            "mode": self.mode.value,
            "scheme": self.scheme.as_dict(),
            "estimators": [
                {"method": e.method.value, "epsilon": e.epsilon, "level": e.level.level}
                for e in self.estimators
            ],
        }
        if self.mode is Mode.MONTE_CARLO:
            d["n_sim"] = self.n_sim
            d["seed"] = self.seed
        return d


@dataclass(frozen=True, eq=False)
class PixelGrid:
    """Coverage of one estimator over a grid.

    ``coverage[i, j]`` belongs to ``n = n_values[i]``, ``p_index =
    p_indices[j]``.  Monte Carlo grids also carry the integer hit counts.
    """

    spec: GridSpec
    estimator: EstimatorSpec
    coverage: np.ndarray
    hits: np.ndarray | None = None

    def __post_init__(self) -> None:
        shape = (len(self.spec.n_values), len(self.spec.p_indices))
        if self.coverage.shape != shape:
            raise ValueError(f"coverage shape {self.coverage.shape} != {shape}")
        self.coverage.setflags(write=False)
        if self.hits is not None:
            self.hits.setflags(write=False)

    @property
    def code(self) -> ColorCode:
        return ColorCode.for_level(self.estimator.level.level)

    @property
    def mode(self) -> Mode:
        return self.spec.mode

    def cell(self, n: int, p_index: int) -> CoverageResult:
        i = n - self.spec.n_min
        j = self.spec.p_indices.index(p_index)
        if not 0 <= i < self.coverage.shape[0]:
            raise KeyError(n)
        mc = self.hits is not None
        return CoverageResult(
            PixelKey(n, p_index), self.estimator, float(self.coverage[i, j]), self.spec.mode,
            n_sim=self.spec.n_sim if mc else None,
            seed=self.spec.seed if mc else None,
            hits=int(self.hits[i, j]) if mc else None,
        )

    def bins(self, code: ColorCode | None = None) -> np.ndarray:
        """Bin index of every cell, same shape as ``coverage``."""
        code = code or self.code
        if self.hits is not None:
            return code.classify_counts(self.hits, self.spec.n_sim)
        return code.classify_array(self.coverage)


# -- running --------------------------------------------------------------------


def _exact_row(spec: GridSpec, n: int) -> np.ndarray:
    return exact_coverage_row(n, spec.p_indices, spec.estimators, spec.scheme)


def _mc_row(spec: GridSpec, n: int) -> np.ndarray:
    hits = np.empty((len(spec.estimators), len(spec.p_indices)), dtype=np.int64)
    for j, k in enumerate(spec.p_indices):
        rng = pixel_rng(spec.seed, n, k)
        counts = draw_success_counts(rng, n, k, spec.scheme, spec.n_sim)
        hits[:, j] = monte_carlo_hits(counts, n, k, spec.estimators, spec.scheme)
    return hits


def run_grid(spec: GridSpec, threads: int = 1, progress=None) -> list[PixelGrid]:
    """Evaluate ``spec``; returns one :class:`PixelGrid` per estimator, in order.

    Rows (one per n) are independent and may be computed on ``threads``
    worker threads.  ``progress``, if given, is called with each finished n.
    """
    row_fn = _exact_row if spec.mode is Mode.EXACT else _mc_row

    def job(n: int):
        row = row_fn(spec, n)
        if progress is not None:
            progress(n)
        return row

    ns = list(spec.n_values)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(job, ns))
    else:
        rows = [job(n) for n in ns]
    stacked = np.stack(rows, axis=1)  # (estimators, n, p)

    grids = []
    for i, est in enumerate(spec.estimators):
        if spec.mode is Mode.EXACT:
            grids.append(PixelGrid(spec, est, np.ascontiguousarray(stacked[i])))
        else:
            hits = np.ascontiguousarray(stacked[i])
            grids.append(PixelGrid(spec, est, hits / spec.n_sim, hits))
    return grids


# -- summaries ------------------------------------------------------------------


def satisfactory_pixel_percentage(grid: PixelGrid) -> float:
    """Fraction of pixels whose coverage is at least the nominal level (Pink)."""
    return float(np.count_nonzero(grid.bins() == ColorBin.PINK) / grid.coverage.size)


def color_histogram(grid: PixelGrid, code: ColorCode | None = None) -> dict[ColorBin, float]:
    """Fraction of pixels in each of the eight bins."""
    counts = np.bincount(grid.bins(code).ravel(), minlength=len(ColorBin))
    total = grid.coverage.size
    return {b: counts[b] / total for b in ColorBin}


@dataclass(frozen=True)
class EpsilonChoice:
    best: int
    spp: dict[int, float]
    near_ties: tuple[int, ...]

    def __int__(self) -> int:
        return self.best


def optimal_epsilon(grids: Mapping[int, PixelGrid], tolerance: float = NEAR_TIE) -> EpsilonChoice:
    """Pick the epsilon with the highest SPP.

    Ties go to the smaller epsilon.  Every other epsilon within ``tolerance``
    of the best is reported in ``near_ties``.
    """
    if not grids:
        raise ValueError("no grids given")
    levels = {g.estimator.level.level for g in grids.values()}
    if len(levels) != 1:
        raise ValueError(f"grids mix confidence levels {sorted(levels)}")
    spp = {eps: satisfactory_pixel_percentage(g) for eps, g in sorted(grids.items())}
    best = max(spp, key=lambda e: (spp[e], -e))
    near = tuple(e for e in spp if e != best and spp[best] - spp[e] <= tolerance)
    return EpsilonChoice(best, spp, near)


# -- export ---------------------------------------------------------------------


def _format_coverage(value: float, mode: Mode, precise: bool) -> str:
    if precise and mode is Mode.EXACT:
        return f"{value:.15g}"
    return f"{value:.6f}"


def write_grid_csv(grids: Iterable[PixelGrid], out, precise: bool = False) -> None:
    """Write one CSV row per pixel per grid to a path or text stream.

    Coverage has 6 decimals; ``precise=True`` prints exact-mode values with
    15 significant digits instead.
    """
    if isinstance(out, (str, bytes)) or hasattr(out, "__fspath__"):
        with open(out, "w", newline="", encoding="utf-8") as fh:
            write_grid_csv(grids, fh, precise)
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for g in grids:
        est = g.estimator
        seed = str(g.spec.seed) if g.mode is Mode.MONTE_CARLO else ""
        for i, n in enumerate(g.spec.n_values):
            for j, k in enumerate(g.spec.p_indices):
                w.writerow((n, f"{k / 100:.2f}", est.method.value, est.epsilon,
                            est.level.percent,
                            _format_coverage(g.coverage[i, j], g.mode, precise),
                            g.mode.value, seed))


def grid_csv_text(grids: Iterable[PixelGrid], precise: bool = False) -> str:
    buf = io.StringIO()
    write_grid_csv(grids, buf, precise)
    return buf.getvalue()


def grids_to_json(grids: Sequence[PixelGrid]) -> dict:
    """JSON-ready dict nested by estimator; coverage as ``[n][p]`` lists."""
    if not grids:
        return {"estimators": []}
    spec = grids[0].spec
    out = {"grid": spec.as_dict(), "estimators": []}
    for g in grids:
        entry = {
            "name": g.estimator.name,
            "method": g.estimator.method.value,
            "epsilon": g.estimator.epsilon,
            "level": g.estimator.level.level,
            "spp": satisfactory_pixel_percentage(g),
            "coverage": g.coverage.tolist(),
        }
        if g.hits is not None:
            entry["hits"] = g.hits.tolist()
        out["estimators"].append(entry)
    return out


def write_grids_json(grids: Sequence[PixelGrid], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(grids_to_json(grids), fh)
        fh.write("\n")
