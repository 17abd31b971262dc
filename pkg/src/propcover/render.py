"""Pixel-colour plots and legends as RGB rasters.

Images are plain ``(height, width, 3)`` uint8 arrays.  Binary PPM (P6) is the
reference output format and is byte-deterministic; PNG output goes through
Pillow when it is installed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .grid import PixelGrid
from .palette import ColorBin, ColorCode

__all__ = [
    "LEGEND_MARGIN",
    "PlotImage",
    "render_grid",
    "render_legend",
    "write_png",
    "write_ppm",
]

# Rows appended under a grid plot when its legend strip is enabled.
LEGEND_MARGIN = 12
BACKGROUND = (255, 255, 255)
INK = (0, 0, 0)


@dataclass
class PlotImage:
    pixels: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def ppm_bytes(self) -> bytes:
        header = f"P6\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + np.ascontiguousarray(self.pixels, dtype=np.uint8).tobytes()


def write_ppm(image: PlotImage, path) -> Path:
    path = Path(path)
    path.write_bytes(image.ppm_bytes())
    return path


def write_png(image: PlotImage, path) -> Path:
    try:
        from PIL import Image
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise RuntimeError("PNG output needs Pillow (pip install 'propcover[png]')") from exc
    path = Path(path)
    Image.fromarray(np.ascontiguousarray(image.pixels), "RGB").save(path, format="PNG")
    return path


def read_ppm(path) -> np.ndarray:
    """Parse a P6 file written by :func:`write_ppm`."""
    data = Path(path).read_bytes()
    magic, dims, maxval, body = data.split(b"\n", 3)
    if magic != b"P6" or maxval != b"255":
        raise ValueError("not an 8-bit binary PPM")
    w, h = (int(v) for v in dims.split())
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3)


def render_grid(grid: PixelGrid, code: ColorCode | None = None, scale: int = 1,
                legend: bool = False) -> PlotImage:
    """Colour every pixel of ``grid`` by its bin.

    n runs left to right and p bottom to top; each cell becomes a
    ``scale x scale`` block.  With ``legend`` a strip of the eight bin
    colours (low coverage on the left) is appended below the plot.
    """
    if scale < 1:
        raise ValueError("scale must be >= 1")
    code = code or grid.code
    bins = grid.bins(code)  # (n, p)
    raster = code.lut()[bins.T[::-1]]  # rows = p descending, cols = n ascending
    raster = np.repeat(np.repeat(raster, scale, axis=0), scale, axis=1)
    if legend:
        raster = np.concatenate([raster, _legend_strip(code, raster.shape[1])], axis=0)
    meta = {
        "estimator": grid.estimator.name,
        "level": grid.estimator.level.level,
        "x_axis": {"name": "n", "values": [grid.spec.n_min, grid.spec.n_max], "direction": "left_to_right"},
        "y_axis": {"name": "p", "values": [k / 100 for k in grid.spec.p_indices], "direction": "bottom_to_top"},
        "scale": scale,
        "legend": legend,
        "plot_height": len(grid.spec.p_indices) * scale,
    }
    return PlotImage(raster, meta)


def _legend_strip(code: ColorCode, width: int) -> np.ndarray:
    strip = np.full((LEGEND_MARGIN, width, 3), 255, dtype=np.uint8)
    lut = code.lut()
    edges = np.linspace(0, width, len(ColorBin) + 1).astype(int)
    for b in ColorBin:
        strip[2:, edges[b]:edges[b + 1]] = lut[b]
    return strip


# -- legend ---------------------------------------------------------------------

# 3x5 bitmap glyphs, one string per row.
_GLYPHS = {
    "0": ("111", "101", "101", "101", "111"),
    "1": ("010", "110", "010", "010", "111"),
    "2": ("111", "001", "111", "100", "111"),
    "3": ("111", "001", "111", "001", "111"),
    "4": ("101", "101", "111", "001", "001"),
    "5": ("111", "100", "111", "001", "111"),
    "6": ("111", "100", "111", "101", "111"),
    "7": ("111", "001", "001", "001", "001"),
    "8": ("111", "101", "111", "101", "111"),
    "9": ("111", "101", "111", "001", "111"),
    ".": ("000", "000", "000", "000", "010"),
    "%": ("101", "001", "010", "100", "101"),
}
_GLYPH_W, _GLYPH_H = 3, 5


def _text_width(text: str, size: int) -> int:
    return (len(text) * (_GLYPH_W + 1) - 1) * size


def _draw_text(canvas: np.ndarray, text: str, x: int, y: int, size: int) -> None:
    for ch in text:
        glyph = _GLYPHS[ch]
        for r, row in enumerate(glyph):
            for c, bit in enumerate(row):
                if bit == "1":
                    canvas[y + r * size:y + (r + 1) * size, x + c * size:x + (c + 1) * size] = INK
        x += (_GLYPH_W + 1) * size


def _edge_label(value) -> str:
    text = f"{float(value):.4f}".rstrip("0").rstrip(".")
    return text or "0"


def render_legend(codes: Sequence[ColorCode], cell: int = 48, band_height: int = 24,
                  text_size: int = 2) -> PlotImage:
    """One horizontal band per code, eight equal cells from Red to Pink.

    Each band carries its level on the left and the nine bin edges printed
    under the cell boundaries.  Edge values are also returned in
    ``meta["bands"]``.
    """
    codes = list(codes)
    if not codes:
        raise ValueError("render_legend needs at least one colour code")
    if len(codes) > 3:
        raise ValueError("render_legend takes at most three colour codes")

    glyph_h = _GLYPH_H * text_size
    pad = 2 * text_size
    label_w = _text_width("99.99%", text_size) + 2 * pad
    half_label = _text_width("0.9999", text_size) // 2 + pad
    band_total = band_height + pad + glyph_h + 2 * pad
    width = label_w + half_label + len(ColorBin) * cell + half_label
    height = len(codes) * band_total + pad
    canvas = np.full((height, width, 3), 255, dtype=np.uint8)

    bands = []
    for i, code in enumerate(codes):
        top = pad + i * band_total
        x0 = label_w + half_label
        level_text = f"{float(code.level) * 100:.10g}%"
        _draw_text(canvas, level_text, pad, top + (band_height - glyph_h) // 2, text_size)
        for b in ColorBin:
            canvas[top:top + band_height, x0 + b * cell:x0 + (b + 1) * cell] = code.color(b)
        labels = []
        for k, edge in enumerate(code.edges):
            text = _edge_label(edge)
            cx = x0 + k * cell
            _draw_text(canvas, text, cx - _text_width(text, text_size) // 2,
                       top + band_height + pad, text_size)
            labels.append(text)
        bands.append({
            "alpha": str(code.alpha),
            "level": float(code.level),
            "edges": [float(e) for e in code.edges],
            "labels": labels,
            "bins": [b.label for b in ColorBin],
            "top": top,
        })
    return PlotImage(canvas, {"bands": bands, "cell": cell, "band_height": band_height})
