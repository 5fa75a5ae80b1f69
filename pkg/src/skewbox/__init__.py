"""Skewness-aware boxplots: robust fences, SEPD simulations and SVG output."""

from .fences import (
    METHODS,
    FenceParams,
    Fences,
    GroupFailure,
    SkewBoxSummary,
    classify_outliers,
    compute_fences,
    grouped_summary,
    skewbox_summary,
)
from .mosaic import CellResult, GridSpec, MosaicResult, SimConfig, inject_outliers, run_mosaic, run_mosaics
from .render import BoxplotStyle, HeatmapScale, render_boxplots, render_mosaic
from .robust import (
    DegenerateSampleError,
    QuartileSet,
    Sample,
    SkewboxError,
    bowley,
    capped_moment_skewness,
    medcouple,
    quantile,
    quartiles,
    skewness_measures,
)
from .sepd import SepdEvaluator, SepdParams

__version__ = "0.1.0"
