"""Standalone SVG output: skew-aware boxplots and mosaic heatmaps.

Output is a pure function of the input: no timestamps, fixed element order
and fixed-precision coordinates, so identical inputs give identical bytes.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import List, Sequence, Tuple
from xml.sax.saxutils import escape, quoteattr

from .fences import SkewBoxSummary
from .mosaic import MosaicResult
from .robust import SkewboxError

_HEX = re.compile(r"^#[0-9a-fA-F]{6}$")
N_TICKS = 5
FONT = 'font-family="sans-serif" font-size="11"'


def _check_hex(color: str) -> str:
    if not isinstance(color, str) or not _HEX.match(color):
        raise SkewboxError(f"invalid color {color!r}; expected #rrggbb")
    return color.lower()


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _tick_label(v: float) -> str:
    s = format(v, ".3g")
    return "0" if s == "-0" else s


def _header(width: float, height: float) -> List[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(width)}" '
        f'height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}">',
    ]


@dataclass(frozen=True)
class BoxplotStyle:
    box_width: float = 40.0
    gap: float = 30.0
    height: float = 400.0
    show_outliers: bool = True
    axis_label: str = "value"
    fill_colors: Tuple[str, ...] = ("#9ecae1",)
    stroke: str = "#222222"
    outlier_radius: float = 3.0

    def __post_init__(self):
        if not self.box_width > 0:
            raise SkewboxError("box_width must be positive")
        if not self.gap >= 0:
            raise SkewboxError("gap must be nonnegative")
        if not self.height >= 100:
            raise SkewboxError("height must be at least 100")
        if not self.fill_colors:
            raise SkewboxError("at least one fill color is needed")
        object.__setattr__(self, "fill_colors", tuple(_check_hex(c) for c in self.fill_colors))
        object.__setattr__(self, "stroke", _check_hex(self.stroke))


def _check_summary(s: SkewBoxSummary) -> None:
    for name in ("ymin", "lower", "middle", "upper", "ymax"):
        if not math.isfinite(getattr(s, name)):
            raise SkewboxError(f"group {s.group_label!r}: non-finite {name}")
    if any(not math.isfinite(v) for v in s.outlier_values):
        raise SkewboxError(f"group {s.group_label!r}: non-finite outlier value")


def _value_range(summaries: Sequence[SkewBoxSummary], with_outliers: bool) -> Tuple[float, float]:
    vals = []
    for s in summaries:
        vals += [s.ymin, s.lower, s.middle, s.upper, s.ymax]
        if with_outliers:
            vals += s.outlier_values
    lo, hi = min(vals), max(vals)
    if hi == lo:
        pad = abs(lo) * 0.5 or 1.0
        lo, hi = lo - pad, hi + pad
    return lo, hi


def render_boxplots(summaries: Sequence[SkewBoxSummary], style: BoxplotStyle = None) -> str:
    """One box per summary on a shared vertical value axis.

    Box (class ``box``) spans lower..upper, a median line (class ``median``)
    sits at middle, whisker lines (class ``whisker``) run to ymin and ymax
    and each outlier is a circle (class ``outlier``). Axes are drawn as
    paths so ``<line>`` and ``<rect>`` elements belong to the boxes only.
    """
    style = style or BoxplotStyle()
    summaries = list(summaries)
    if not summaries:
        raise SkewboxError("nothing to render: no summaries")
    for s in summaries:
        _check_summary(s)
    lo, hi = _value_range(summaries, style.show_outliers)

    left, right, top, bottom = 70.0, 20.0, 20.0, 50.0
    plot_w = len(summaries) * (style.box_width + style.gap) + style.gap
    plot_h = style.height - top - bottom
    width = left + plot_w + right

    def y(v: float) -> float:
        return top + (hi - v) / (hi - lo) * plot_h

    out = _header(width, style.height)
    stroke = style.stroke
    # axes
    out.append(
        f'<path class="axis" d="M{_f(left)},{_f(top)} V{_f(top + plot_h)} H{_f(left + plot_w)}" '
        f'fill="none" stroke="{stroke}"/>'
    )
    for i in range(N_TICKS):
        v = lo + (hi - lo) * i / (N_TICKS - 1)
        ty = y(v)
        out.append(f'<path class="tick" d="M{_f(left - 5)},{_f(ty)} H{_f(left)}" stroke="{stroke}"/>')
        out.append(
            f'<text x="{_f(left - 8)}" y="{_f(ty + 4)}" text-anchor="end" {FONT}>{_tick_label(v)}</text>'
        )
    cy = top + plot_h / 2
    out.append(
        f'<text x="{_f(14)}" y="{_f(cy)}" text-anchor="middle" transform="rotate(-90 {_f(14)} {_f(cy)})" '
        f"{FONT}>{escape(style.axis_label)}</text>"
    )

    for i, s in enumerate(summaries):
        fill = style.fill_colors[i % len(style.fill_colors)]
        x0 = left + style.gap + i * (style.box_width + style.gap)
        xc = x0 + style.box_width / 2
        out.append(f"<g class=\"group\" data-group={quoteattr(s.group_label)}>")
        out.append(
            f'<line class="whisker" x1="{_f(xc)}" y1="{_f(y(s.upper))}" x2="{_f(xc)}" y2="{_f(y(s.ymax))}" '
            f'stroke="{stroke}"/>'
        )
        out.append(
            f'<line class="whisker" x1="{_f(xc)}" y1="{_f(y(s.lower))}" x2="{_f(xc)}" y2="{_f(y(s.ymin))}" '
            f'stroke="{stroke}"/>'
        )
        out.append(
            f'<rect class="box" x="{_f(x0)}" y="{_f(y(s.upper))}" width="{_f(style.box_width)}" '
            f'height="{_f(y(s.lower) - y(s.upper))}" fill="{fill}" stroke="{stroke}"/>'
        )
        out.append(
            f'<line class="median" x1="{_f(x0)}" y1="{_f(y(s.middle))}" x2="{_f(x0 + style.box_width)}" '
            f'y2="{_f(y(s.middle))}" stroke="{stroke}" stroke-width="2"/>'
        )
        if style.show_outliers:
            for v in sorted(s.outlier_values):
                out.append(
                    f'<circle class="outlier" cx="{_f(xc)}" cy="{_f(y(v))}" r="{_f(style.outlier_radius)}" '
                    f'fill="none" stroke="{stroke}"/>'
                )
        out.append(
            f'<text x="{_f(xc)}" y="{_f(top + plot_h + 18)}" text-anchor="middle" {FONT}>'
            f"{escape(s.group_label)}</text>"
        )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _rgb(color: str) -> Tuple[int, int, int]:
    return int(color[1:3], 16), int(color[3:5], 16), int(color[5:7], 16)


@dataclass(frozen=True)
class HeatmapScale:
    """Linear two-color ramp from ``low_color`` at ``min_rate`` to ``high_color`` at ``max_rate``."""

    min_rate: float = 0.0
    max_rate: float = 0.10
    low_color: str = "#1a1a40"
    high_color: str = "#f5f5dc"
    failed_color: str = "#c0392b"

    def __post_init__(self):
        if not (math.isfinite(self.min_rate) and math.isfinite(self.max_rate)):
            raise SkewboxError("heatmap limits must be finite")
        if not self.min_rate < self.max_rate:
            raise SkewboxError("min_rate must be below max_rate")
        for name in ("low_color", "high_color", "failed_color"):
            object.__setattr__(self, name, _check_hex(getattr(self, name)))

    def parameter(self, rate: float) -> float:
        """Position on the ramp in [0, 1]; rates outside the range are clamped."""
        t = (rate - self.min_rate) / (self.max_rate - self.min_rate)
        return min(1.0, max(0.0, t))

    def color(self, rate: float) -> str:
        if not math.isfinite(rate):
            return self.failed_color
        t = self.parameter(rate)
        lo, hi = _rgb(self.low_color), _rgb(self.high_color)
        return "#" + "".join(f"{round(a + t * (b - a)):02x}" for a, b in zip(lo, hi))


def _tick_positions(count: int) -> List[int]:
    if count <= N_TICKS:
        return list(range(count))
    return sorted({round(i * (count - 1) / (N_TICKS - 1)) for i in range(N_TICKS)})


def render_mosaic(result: MosaicResult, scale: HeatmapScale = None, cell_size: float = None) -> str:
    """Heatmap with alpha across and p down, one ``tile`` rect per cell, plus a color bar."""
    scale = scale or HeatmapScale()
    rows, cols = result.grid.shape
    if cell_size is None:
        cell_size = max(4.0, min(40.0, float(480 // max(rows, cols))))
    left, top = 70.0, 40.0
    plot_w, plot_h = cols * cell_size, rows * cell_size
    bar_x = left + plot_w + 20
    bar_w = 16.0
    width = bar_x + bar_w + 60
    height = top + plot_h + 50

    out = _header(width, height)
    out.append("<defs>")
    out.append('<linearGradient id="ramp" x1="0" y1="1" x2="0" y2="0">')
    out.append(f'<stop offset="0" stop-color="{scale.low_color}"/>')
    out.append(f'<stop offset="1" stop-color="{scale.high_color}"/>')
    out.append("</linearGradient>")
    out.append("</defs>")
    if result.config is not None:
        c = result.config
        title = f"{c.method} / {c.scenario} / n = {c.n} / reps = {c.reps}"
        out.append(f'<text x="{_f(left)}" y="{_f(20)}" {FONT}>{escape(title)}</text>')

    for pi, row in enumerate(result.cells):
        for ai, cell in enumerate(row):
            failed = cell.reps_completed == 0 or not math.isfinite(cell.rate)
            fill = scale.failed_color if failed else scale.color(cell.rate)
            cls = "tile failed" if failed else "tile"
            out.append(
                f'<rect class="{cls}" x="{_f(left + ai * cell_size)}" y="{_f(top + pi * cell_size)}" '
                f'width="{_f(cell_size)}" height="{_f(cell_size)}" fill="{fill}"/>'
            )

    ink = "#222222"
    out.append(
        f'<path class="axis" d="M{_f(left)},{_f(top)} V{_f(top + plot_h)} H{_f(left + plot_w)}" '
        f'fill="none" stroke="{ink}"/>'
    )
    for ai in _tick_positions(cols):
        x = left + (ai + 0.5) * cell_size
        out.append(f'<path class="tick" d="M{_f(x)},{_f(top + plot_h)} V{_f(top + plot_h + 5)}" stroke="{ink}"/>')
        out.append(
            f'<text x="{_f(x)}" y="{_f(top + plot_h + 17)}" text-anchor="middle" {FONT}>'
            f"{_tick_label(result.grid.alpha_values[ai])}</text>"
        )
    for pi in _tick_positions(rows):
        y = top + (pi + 0.5) * cell_size
        out.append(f'<path class="tick" d="M{_f(left - 5)},{_f(y)} H{_f(left)}" stroke="{ink}"/>')
        out.append(
            f'<text x="{_f(left - 8)}" y="{_f(y + 4)}" text-anchor="end" {FONT}>'
            f"{_tick_label(result.grid.p_values[pi])}</text>"
        )
    out.append(
        f'<text x="{_f(left + plot_w / 2)}" y="{_f(top + plot_h + 40)}" text-anchor="middle" {FONT}>&#945;</text>'
    )
    out.append(f'<text x="{_f(18)}" y="{_f(top + plot_h / 2)}" text-anchor="middle" {FONT}>p</text>')

    out.append(
        f'<rect class="colorbar" x="{_f(bar_x)}" y="{_f(top)}" width="{_f(bar_w)}" height="{_f(plot_h)}" '
        f'fill="url(#ramp)" stroke="{ink}"/>'
    )
    for i in range(N_TICKS):
        v = scale.min_rate + (scale.max_rate - scale.min_rate) * i / (N_TICKS - 1)
        y = top + plot_h * (1 - i / (N_TICKS - 1))
        out.append(
            f'<text x="{_f(bar_x + bar_w + 4)}" y="{_f(y + 4)}" {FONT}>{_tick_label(v)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
