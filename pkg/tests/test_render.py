import math
import re
from dataclasses import replace

import pytest

from helpers import GOLDEN, MPG_HUBERT_TABLE, golden_mosaic, golden_summaries, mpg_rows
from skewbox.fences import FenceParams, SkewBoxSummary, grouped_summary
from skewbox.mosaic import CellResult, GridSpec, MosaicResult
from skewbox.render import BoxplotStyle, HeatmapScale, render_boxplots, render_mosaic
from skewbox.robust import SkewboxError



def _count(svg, tag, cls=None):
    pat = f"<{tag} " + (f'class="{cls}"' if cls else "")
    return svg.count(pat)


def _viewbox(svg):
    w, h = re.search(r'viewBox="0 0 ([0-9.]+) ([0-9.]+)"', svg).groups()
    return float(w), float(h)


def _assert_contained(svg):
    w, h = _viewbox(svg)
    for m in re.finditer(r'(x|cx|x1|x2|y|cy|y1|y2)="(-?[0-9.]+)"', svg):
        v = float(m.group(2))
        assert 0 <= v <= (w if m.group(1).startswith(("x", "cx")) else h), m.group(0)
    for d in re.findall(r'd="([^"]+)"', svg):
        for v in map(float, re.findall(r"-?[0-9]+\.[0-9]+", d)):
            assert 0 <= v <= max(w, h)


class TestBoxplot:
    def test_single_symmetric_group(self):
        s = SkewBoxSummary("g", 0.0, 1.0, 2.0, 3.0, 4.0, (), 9)
        svg = render_boxplots([s])
        assert _count(svg, "rect") == 1
        assert _count(svg, "line", "median") == 1
        assert _count(svg, "line", "whisker") == 2
        assert _count(svg, "line") == 3
        assert _count(svg, "circle") == 0
        assert svg.startswith('<?xml version="1.0"') and 'version="1.1"' in svg

    def test_mpg_hubert_circles_follow_outlier_counts(self):
        res = grouped_summary(mpg_rows(), "hubert", FenceParams(mc_estimator="split-median"))
        svg = render_boxplots(res)
        assert _count(svg, "rect", "box") == 7
        groups = svg.split("<g class=\"group\"")[1:]
        counts = [g.count("<circle") for g in groups]
        assert counts == [MPG_HUBERT_TABLE[s.group_label][3] for s in res]

    def test_deterministic_and_contained(self):
        a = render_boxplots(golden_summaries())
        assert a == render_boxplots(golden_summaries())
        _assert_contained(a)

    def test_non_finite_names_group(self):
        bad = replace(golden_summaries()[1], ymax=math.inf)
        with pytest.raises(SkewboxError, match="'beta'"):
            render_boxplots([golden_summaries()[0], bad])

    def test_empty_and_style_validation(self):
        with pytest.raises(SkewboxError):
            render_boxplots([])
        with pytest.raises(SkewboxError):
            BoxplotStyle(box_width=0)
        with pytest.raises(SkewboxError):
            BoxplotStyle(fill_colors=("red",))

    def test_outliers_hidden(self):
        svg = render_boxplots(golden_summaries(), BoxplotStyle(show_outliers=False))
        assert _count(svg, "circle") == 0

    def test_labels_escaped(self):
        svg = render_boxplots(golden_summaries())
        assert "gamma &amp; delta" in svg and "gamma & delta" not in svg


class TestHeatmapScale:
    def test_endpoints_and_clamp(self):
        s = HeatmapScale()
        assert s.color(0.0) == "#1a1a40"
        assert s.color(0.10) == "#f5f5dc"
        assert s.color(0.25) == "#f5f5dc"
        assert s.color(-0.5) == "#1a1a40"
        assert s.color(math.nan) == s.failed_color

    def test_monotone_parameter(self):
        s = HeatmapScale()
        rates = [i / 1000 for i in range(101)]
        params = [s.parameter(r) for r in rates]
        assert all(a < b for a, b in zip(params, params[1:]))

    @pytest.mark.parametrize("kw", [{"min_rate": 0.1, "max_rate": 0.1}, {"low_color": "#12345"},
                                    {"max_rate": math.inf}])
    def test_invalid(self, kw):
        with pytest.raises(SkewboxError):
            HeatmapScale(**kw)


def _uniform_result(rows, cols, rate):
    grid = GridSpec(tuple(0.05 + 0.9 * i / max(cols - 1, 1) for i in range(cols)) if cols > 1 else (0.5,),
                    tuple(0.5 + i for i in range(rows)))
    cells = [[CellResult(a, p, rate, 0.0, 10, 0, ai, pi) for ai, a in enumerate(grid.alpha_values)]
             for pi, p in enumerate(grid.p_values)]
    return MosaicResult(grid, None, cells)


class TestMosaic:
    def test_all_zero_is_uniform_low(self):
        svg = render_mosaic(_uniform_result(3, 4, 0.0))
        fills = re.findall(r'class="tile" [^>]*fill="(#[0-9a-f]{6})"', svg)
        assert len(fills) == 12 and set(fills) == {"#1a1a40"}

    def test_clamped_cell(self):
        svg = render_mosaic(_uniform_result(1, 1, 0.25), HeatmapScale(max_rate=0.10))
        assert re.search(r'class="tile" [^>]*fill="#f5f5dc"', svg)

    def test_full_grid_tile_count(self):
        svg = render_mosaic(_uniform_result(49, 49, 0.05))
        assert svg.count('class="tile') == 2401
        _assert_contained(svg)

    def test_failed_cell_sentinel(self):
        svg = render_mosaic(golden_mosaic())
        assert svg.count('class="tile failed"') == 1
        assert 'fill="#c0392b"' in svg

    def test_orientation(self):
        res = golden_mosaic()
        svg = render_mosaic(res, cell_size=10)
        tiles = re.findall(r'class="tile[^"]*" x="([0-9.]+)" y="([0-9.]+)"', svg)
        # row-major: alpha varies fastest left to right, p increases downward
        xs = [float(x) for x, _ in tiles[:5]]
        ys = [float(y) for _, y in tiles[::5]]
        assert xs == sorted(xs) and ys == sorted(ys) and len(set(ys)) == 4


class TestGolden:
    def test_boxplot_golden(self):
        style = BoxplotStyle(fill_colors=("#9ecae1", "#fdae6b"), axis_label="mileage")
        got = render_boxplots(golden_summaries(), style)
        assert got == (GOLDEN / "boxplot.svg").read_text()

    def test_mosaic_golden(self):
        assert render_mosaic(golden_mosaic()) == (GOLDEN / "mosaic.svg").read_text()
