import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special, stats

from propcover.analysis import (
    DegeneratePairingError,
    build_spp_table,
    derive_seed,
    paired_spp_runs,
    paired_t_test,
    regularized_incomplete_beta,
    student_t_cdf,
    student_t_sf,
)
from propcover.estimators import EstimatorSpec, Method
from propcover.grid import GridSpec, PixelGrid


@pytest.mark.parametrize("a, b, x", [(0.5, 0.5, 0.3), (1, 1, 0.7), (2.5, 0.5, 0.9),
                                     (49.5, 0.5, 0.97), (0.5, 30, 0.01), (100, 100, 0.5),
                                     (3, 7, 1e-8), (5, 0.5, 0.999999)])
def test_incomplete_beta_matches_reference(a, b, x):
    assert regularized_incomplete_beta(a, b, x) == pytest.approx(special.betainc(a, b, x), rel=1e-11, abs=1e-300)


def test_incomplete_beta_domain():
    assert regularized_incomplete_beta(2, 3, 0.0) == 0.0
    assert regularized_incomplete_beta(2, 3, 1.0) == 1.0
    with pytest.raises(ValueError):
        regularized_incomplete_beta(0, 1, 0.5)
    with pytest.raises(ValueError):
        regularized_incomplete_beta(1, 1, 1.5)


@given(st.floats(-40, 40), st.integers(1, 300))
def test_t_cdf_matches_reference(t, df):
    assert student_t_cdf(t, df) == pytest.approx(stats.t.cdf(t, df), rel=1e-9, abs=1e-15)


@given(st.floats(0, 50), st.integers(1, 200))
def test_t_tail_symmetry(t, df):
    assert student_t_cdf(-t, df) == pytest.approx(1 - student_t_cdf(t, df), abs=1e-14)
    assert student_t_sf(t, df) == pytest.approx(1 - student_t_cdf(t, df), abs=1e-14)


@pytest.mark.parametrize("df", [1, 2, 5, 99])
def test_t_cdf_at_zero(df):
    assert student_t_cdf(0.0, df) == 0.5


@given(st.floats(-20, 20), st.floats(-20, 20), st.integers(1, 50))
def test_t_cdf_monotone(a, b, df):
    lo, hi = min(a, b), max(a, b)
    assert student_t_cdf(lo, df) <= student_t_cdf(hi, df)


def test_paired_t_test_example():
    r = paired_t_test([1, 2, 3])
    ref = stats.ttest_1samp([1, 2, 3], 0.0)
    assert r.t == pytest.approx(3.4641, abs=1e-3)
    assert r.p_value == pytest.approx(0.0742, abs=1e-3)
    assert r.t == pytest.approx(ref.statistic, rel=1e-12)
    assert r.p_value == pytest.approx(ref.pvalue, rel=1e-10)
    assert r.df == 2 and r.mean_difference == 2.0 and r.sd_difference == 1.0


@given(st.lists(st.floats(-1, 1), min_size=2, max_size=40), st.lists(st.floats(-1, 1), min_size=2, max_size=40))
def test_paired_t_test_against_reference(a, b):
    m = min(len(a), len(b))
    a, b = a[:m], b[:m]
    d = np.subtract(a, b)
    if np.ptp(d) < 1e-9:
        return
    r = paired_t_test(a, b)
    ref = stats.ttest_rel(a, b)
    assert r.t == pytest.approx(ref.statistic, rel=1e-8, abs=1e-9)
    assert r.p_value == pytest.approx(ref.pvalue, rel=1e-7, abs=1e-12)


@given(st.lists(st.floats(-1, 1), min_size=3, max_size=30))
def test_paired_t_test_antisymmetry(d):
    if np.ptp(d) < 1e-9:
        return
    zeros = [0.0] * len(d)
    fwd, rev = paired_t_test(d, zeros), paired_t_test(zeros, d)
    assert fwd.t == pytest.approx(-rev.t, rel=1e-12, abs=1e-12)
    assert fwd.p_value == pytest.approx(rev.p_value, rel=1e-12)


def test_paired_t_test_zero_differences():
    r = paired_t_test([0.5, 0.7, 0.1], [0.5, 0.7, 0.1])
    assert r.t == 0.0 and r.p_value == 1.0 and r.df == 2


def test_paired_t_test_errors():
    with pytest.raises(DegeneratePairingError):
        paired_t_test([0.2, 0.2, 0.2])
    with pytest.raises(ValueError):
        paired_t_test([1.0])
    with pytest.raises(ValueError):
        paired_t_test([1.0, 2.0], [1.0])


def test_derive_seed():
    assert derive_seed(0, 0) == derive_seed(0, 0)
    assert len({derive_seed(0, r) for r in range(100)}) == 100
    assert derive_seed(1, 0) != derive_seed(0, 1)
    assert 0 <= derive_seed(2**64 - 1, 5) < 2**64


def test_paired_spp_runs_small():
    a = EstimatorSpec.adjusted_wilson(5, 0.99)
    b = EstimatorSpec.adjusted_wilson(6, 0.99)
    kw = dict(runs=3, master_seed=4, n_max=10, n_sim=100, p_indices=range(5, 100, 10))
    first = paired_spp_runs(a, b, **kw)
    assert first == paired_spp_runs(a, b, **kw)
    same = paired_spp_runs(a, a, **kw)
    assert same[0] == same[1] == first[0]
    with pytest.raises(ValueError):
        paired_spp_runs(a, b, runs=1)


def _grid(level, method, eps, spp_value, n_max=10):
    est = EstimatorSpec(method, level, eps)
    spec = GridSpec((est,), 1, n_max, (50,))
    cov = np.zeros((n_max, 1))
    cov[: round(spp_value * n_max)] = 1.0
    return PixelGrid(spec, spec.estimators[0], cov)


def test_spp_table_flags_and_output():
    grids = [_grid(0.95, Method.WALD, 0, 0.2), _grid(0.95, Method.WILSON, 0, 0.6),
             _grid(0.95, Method.ADJUSTED_WILSON, 4, 0.7), _grid(0.95, Method.ADJUSTED_WILSON, 5, 0.7),
             _grid(0.9, Method.WALD, 0, 0.5)]
    table = build_spp_table(grids, tolerance=0.1)
    best = table.best(0.95)
    assert (best.method, best.epsilon) == (Method.ADJUSTED_WILSON, 4)
    assert table.get(0.95, Method.ADJUSTED_WILSON, 5).near_tie
    assert table.get(0.95, Method.WILSON).near_tie
    assert not table.get(0.95, Method.WALD).near_tie
    assert table.best(0.9).method is Method.WALD
    csv_lines = table.to_csv().splitlines()
    assert csv_lines[0] == "level,method,epsilon,n_max,spp,is_max,near_tie"
    assert "95,adjusted_wilson,4,10,0.700000,1,0" in csv_lines
    text = table.to_text()
    assert "0.7000*" in text and "0.7000~" in text and "Adjusted Wilson 5" in text


def test_spp_table_missing_cells():
    grids = [_grid(0.95, Method.WALD, 0, 0.2)]
    with pytest.raises(KeyError, match="wilson"):
        build_spp_table(grids, required=[(0.95, Method.WALD, 0), (0.95, Method.WILSON, 0),
                                         (0.95, Method.ADJUSTED_WILSON, 3)])
    assert math.isclose(build_spp_table(grids, required=[(0.95, Method.WALD, 0)]).rows[0].spp, 0.2)
