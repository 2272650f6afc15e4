"""
svg_plot.py - Minimal SVG Line Plots for Experiment Outputs

Renders one or more named series on shared axes as a self-contained SVG
string. Non-finite points are dropped.

Usage:
    from svg_plot import Series, line_plot

    svg = line_plot([Series("sdr_case2", [25, 50, 75], [31.2, 29.8, 28.9])],
                    title="Power vs M", x_label="M", y_label="dBm")
    Path("power.svg").write_text(svg)
"""

from __future__ import annotations

import html
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple

# Module-level constants
SERIES_COLORS = ["#e94560", "#00d9ff", "#06d6a0", "#ef8354", "#8338ec", "#ffbe0b"]
WIDTH, HEIGHT = 640, 420
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 160, 40, 55
TICKS = 5


@dataclass(frozen=True)
class Series:
    """A named polyline."""

    name: str
    x: Sequence[float]
    y: Sequence[float]


def _escape(text: str) -> str:
    """Escape XML special characters."""
    return html.escape(str(text))


def _finite_points(series: Series) -> List[Tuple[float, float]]:
    return [
        (float(x), float(y))
        for x, y in zip(series.x, series.y)
        if x is not None and y is not None and math.isfinite(x) and math.isfinite(y)
    ]


def _bounds(values: List[float]) -> Tuple[float, float]:
    low, high = min(values), max(values)
    if high == low:
        pad = abs(low) * 0.05 or 1.0
        return low - pad, high + pad
    return low, high


def _format_tick(value: float) -> str:
    return f"{value:.3g}"


def line_plot(
    series: Sequence[Series],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
) -> str:
    """Render series as an SVG document string."""
    points = {s.name: _finite_points(s) for s in series}
    xs = [p[0] for pts in points.values() for p in pts]
    ys = [p[1] for pts in points.values() for p in pts]
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15">{_escape(title)}</text>',
    ]

    if not xs:
        parts.append(
            f'<text x="{WIDTH / 2:.1f}" y="{HEIGHT / 2:.1f}" text-anchor="middle">no data</text>'
        )
        parts.append("</svg>")
        return "\n".join(parts)

    x_min, x_max = _bounds(xs)
    y_min, y_max = _bounds(ys)

    def sx(x: float) -> float:
        return MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w

    def sy(y: float) -> float:
        return MARGIN_TOP + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h

    parts.append(
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333"/>'
    )
    for i in range(TICKS + 1):
        fx = x_min + (x_max - x_min) * i / TICKS
        fy = y_min + (y_max - y_min) * i / TICKS
        px, py = sx(fx), sy(fy)
        parts.append(
            f'<line x1="{px:.1f}" y1="{MARGIN_TOP}" x2="{px:.1f}" y2="{MARGIN_TOP + plot_h}" '
            f'stroke="#e0e0e0"/>'
        )
        parts.append(
            f'<line x1="{MARGIN_LEFT}" y1="{py:.1f}" x2="{MARGIN_LEFT + plot_w}" y2="{py:.1f}" '
            f'stroke="#e0e0e0"/>'
        )
        parts.append(
            f'<text x="{px:.1f}" y="{MARGIN_TOP + plot_h + 16}" text-anchor="middle">'
            f"{_format_tick(fx)}</text>"
        )
        parts.append(
            f'<text x="{MARGIN_LEFT - 6}" y="{py + 4:.1f}" text-anchor="end">{_format_tick(fy)}</text>'
        )

    parts.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">'
        f"{_escape(x_label)}</text>"
    )
    parts.append(
        f'<text x="16" y="{MARGIN_TOP + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN_TOP + plot_h / 2:.1f})">{_escape(y_label)}</text>'
    )

    for index, s in enumerate(series):
        color = SERIES_COLORS[index % len(SERIES_COLORS)]
        pts = points[s.name]
        if pts:
            coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in pts)
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>'
            )
            for x, y in pts:
                parts.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" fill="{color}"/>')
        legend_y = MARGIN_TOP + 14 + 18 * index
        legend_x = WIDTH - MARGIN_RIGHT + 12
        parts.append(
            f'<line x1="{legend_x}" y1="{legend_y - 4}" x2="{legend_x + 18}" y2="{legend_y - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{legend_x + 24}" y="{legend_y}">{_escape(s.name)}</text>')

    parts.append("</svg>")
    return "\n".join(parts)


def write_plot(
    path: Path,
    series: Sequence[Series],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
) -> Path:
    """Write line_plot output to path; returns the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(line_plot(series, title, x_label, y_label), encoding="utf-8")
    return path
