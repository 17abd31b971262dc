import hashlib

import numpy as np
import pytest

from propcover.coverage import SamplingScheme
from propcover.estimators import EstimatorSpec
from propcover.grid import GridSpec, PixelGrid, run_grid
from propcover.palette import ColorBin, ColorCode
from propcover.render import LEGEND_MARGIN, read_ppm, render_grid, render_legend, write_png, write_ppm

C95 = ColorCode.for_level(0.95)


def test_two_by_one_raster():
    # n = 1..2 at p = 0.5 for Wald: coverage 0 (Red) then 0.5 (Turquoise).
    spec = GridSpec((EstimatorSpec.wald(0.95),), 1, 2, (50,), scheme=SamplingScheme.binomial())
    [g] = run_grid(spec)
    img = render_grid(g)
    assert (img.height, img.width) == (1, 2)
    assert tuple(img.pixels[0, 0]) == C95.color(ColorBin.RED)
    assert tuple(img.pixels[0, 1]) == C95.color(ColorBin.TURQUOISE)


def test_axes_orientation():
    spec = GridSpec((EstimatorSpec.wald(0.95),), 1, 2, (10, 20, 30))
    cov = np.array([[0.0, 0.96, 0.0], [0.0, 0.0, 0.91]])  # (n, p)
    img = render_grid(PixelGrid(spec, spec.estimators[0], cov))
    assert (img.height, img.width) == (3, 2)
    # Top row is the largest p; left column is n = 1.
    assert tuple(img.pixels[2, 0]) == C95.color(ColorBin.RED)
    assert tuple(img.pixels[1, 0]) == C95.color(ColorBin.PINK)
    assert tuple(img.pixels[0, 1]) == C95.color(ColorBin.PURPLE)
    assert img.meta["y_axis"]["direction"] == "bottom_to_top"


@pytest.fixture(scope="module")
def full_grid():
    return run_grid(GridSpec((EstimatorSpec.adjusted_wilson(4, 0.95),)))[0]


def test_scaled_size_and_block_centres(full_grid):
    img = render_grid(full_grid, scale=4)
    assert (img.width, img.height) == (400, 396)
    bins = full_grid.bins()
    lut = C95.lut()
    for n in (1, 37, 100):
        for k in (1, 50, 99):
            row = (99 - k) * 4 + 2
            col = (n - 1) * 4 + 2
            assert tuple(img.pixels[row, col]) == tuple(lut[bins[n - 1, k - 1]])


def test_render_is_byte_deterministic(full_grid, tmp_path):
    a = write_ppm(render_grid(full_grid, scale=2), tmp_path / "a.ppm").read_bytes()
    again = run_grid(GridSpec((EstimatorSpec.adjusted_wilson(4, 0.95),)))[0]
    b = write_ppm(render_grid(again, scale=2), tmp_path / "b.ppm").read_bytes()
    assert hashlib.sha256(a).digest() == hashlib.sha256(b).digest()
    assert a.startswith(b"P6\n200 198\n255\n")
    assert len(a) == len(b"P6\n200 198\n255\n") + 200 * 198 * 3


def test_ppm_round_trip(full_grid, tmp_path):
    img = render_grid(full_grid, legend=True)
    assert img.height == 99 + LEGEND_MARGIN
    path = write_ppm(img, tmp_path / "x.ppm")
    assert np.array_equal(read_ppm(path), img.pixels)


def test_png_matches_ppm(full_grid, tmp_path):
    Image = pytest.importorskip("PIL.Image")
    img = render_grid(full_grid, scale=2)
    path = write_png(img, tmp_path / "x.png")
    with Image.open(path) as im:
        assert np.array_equal(np.asarray(im.convert("RGB")), img.pixels)


def test_scale_must_be_positive(full_grid):
    with pytest.raises(ValueError):
        render_grid(full_grid, scale=0)


def test_legend_boundaries():
    img = render_legend([C95])
    [band] = img.meta["bands"]
    assert band["edges"] == [0.0, 0.05, 0.10, 0.15, 0.5, 0.85, 0.90, 0.95, 1.0]
    assert band["labels"] == ["0", "0.05", "0.1", "0.15", "0.5", "0.85", "0.9", "0.95", "1"]
    assert band["bins"][0] == "Red" and band["bins"][-1] == "Pink"


def test_legend_cell_colours():
    codes = [ColorCode.for_level(v) for v in (0.90, 0.95, 0.99)]
    img = render_legend(codes, cell=20, band_height=10)
    assert len(img.meta["bands"]) == 3
    band = img.meta["bands"][1]
    row = band["top"] + 5
    found = []
    for px in img.pixels[row]:
        c = tuple(int(v) for v in px)
        if c in C95.rgb.values() and (not found or found[-1] != c):
            found.append(c)
    assert found == [C95.color(b) for b in ColorBin]


def test_legend_is_deterministic():
    codes = [ColorCode.for_level(0.9), ColorCode.for_level(0.99)]
    assert render_legend(codes).ppm_bytes() == render_legend(codes).ppm_bytes()


def test_legend_rejects_bad_input():
    with pytest.raises(ValueError):
        render_legend([])
    with pytest.raises(ValueError):
        render_legend([C95] * 4)
