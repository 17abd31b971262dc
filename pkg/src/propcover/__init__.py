"""Coverage of Wald, Wilson and adjusted Wilson intervals for a binomial proportion."""

__version__ = "0.1.0"

from .estimators import (  # noqa: E402
    ConfidenceLevel,
    EstimatorSpec,
    Interval,
    Method,
    SampleSummary,
    adjusted_wilson_interval,
    inverse_normal_cdf,
    wald_interval,
    wilson_interval,
    wilson_interval_weighted_form,
)
from .coverage import (  # noqa: E402
    CoverageResult,
    Mode,
    PixelKey,
    SamplingScheme,
    exact_coverage,
    monte_carlo_coverage,
)
from .grid import (  # noqa: E402
    GridSpec,
    PixelGrid,
    color_histogram,
    optimal_epsilon,
    run_grid,
    satisfactory_pixel_percentage,
)
from .palette import ColorBin, ColorCode, classify  # noqa: E402
from .render import PlotImage, render_grid, render_legend  # noqa: E402
from .analysis import build_spp_table, paired_t_test  # noqa: E402
