"""Figure emission as plot CSV and dependency-free SVG.

CSV rows are ``series,x,y`` with shortest round-trip float formatting,
so output bytes are a pure function of the input series. SVG output is
a fixed 800x400 canvas: one polyline per series, axis lines with min/max
tick labels, and a legend.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadParameterError, NonFiniteError

SVG_WIDTH = 800
SVG_HEIGHT = 400
_MARGIN_LEFT = 60
_MARGIN_RIGHT = 20
_MARGIN_TOP = 20
_MARGIN_BOTTOM = 40
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass(frozen=True)
class PlotSeries:
    """A named polyline: finite (x, y) points."""

    name: str
    points: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        points = tuple((float(x), float(y)) for x, y in self.points)
        if not points:
            raise BadParameterError(f"series {self.name!r} has no points")
        if not all(np.isfinite(x) and np.isfinite(y) for x, y in points):
            raise NonFiniteError(f"series {self.name!r} contains a non-finite point")
        object.__setattr__(self, "points", points)


def series_from_values(name: str, values) -> PlotSeries:
    """Index the values 0..n-1 on the x axis."""
    return PlotSeries(name, tuple((float(i), float(v)) for i, v in enumerate(values)))


def _render_csv(series: list[PlotSeries]) -> str:
    lines = ["series,x,y"]
    for s in series:
        for x, y in s.points:
            lines.append(f"{s.name},{x!r},{y!r}")
    return "\n".join(lines) + "\n"


def _scale(value: float, lo: float, hi: float, out_lo: float, out_hi: float) -> float:
    if hi == lo:
        return (out_lo + out_hi) / 2.0
    return out_lo + (value - lo) * (out_hi - out_lo) / (hi - lo)


def _render_svg(series: list[PlotSeries]) -> str:
    xs = [x for s in series for x, _ in s.points]
    ys = [y for s in series for _, y in s.points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    plot_left, plot_right = _MARGIN_LEFT, SVG_WIDTH - _MARGIN_RIGHT
    plot_top, plot_bottom = _MARGIN_TOP, SVG_HEIGHT - _MARGIN_BOTTOM

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        # axes
        f'<line x1="{plot_left}" y1="{plot_bottom}" x2="{plot_right}" '
        f'y2="{plot_bottom}" stroke="black"/>',
        f'<line x1="{plot_left}" y1="{plot_top}" x2="{plot_left}" '
        f'y2="{plot_bottom}" stroke="black"/>',
        # min/max tick labels
        f'<text x="{plot_left}" y="{plot_bottom + 16}" font-size="11" '
        f'text-anchor="middle">{x_lo:g}</text>',
        f'<text x="{plot_right}" y="{plot_bottom + 16}" font-size="11" '
        f'text-anchor="middle">{x_hi:g}</text>',
        f'<text x="{plot_left - 6}" y="{plot_bottom + 4}" font-size="11" '
        f'text-anchor="end">{y_lo:g}</text>',
        f'<text x="{plot_left - 6}" y="{plot_top + 4}" font-size="11" '
        f'text-anchor="end">{y_hi:g}</text>',
    ]
    for idx, s in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(
            f"{_scale(x, x_lo, x_hi, plot_left, plot_right):.2f},"
            f"{_scale(y, y_lo, y_hi, plot_bottom, plot_top):.2f}"
            for x, y in s.points
        )
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        legend_y = _MARGIN_TOP + 14 * (idx + 1)
        parts.append(
            f'<line x1="{plot_right - 110}" y1="{legend_y - 4}" '
            f'x2="{plot_right - 90}" y2="{legend_y - 4}" stroke="{color}" '
            f'stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{plot_right - 84}" y="{legend_y}" font-size="11">'
            f"{s.name}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_plot(series: list[PlotSeries], fmt: str, path: Path | str) -> None:
    """Write the series to `path` as 'csv' or 'svg'.

    Validation happens before the file is opened: a bad series never
    leaves a partial file behind.
    """
    if not series:
        raise BadParameterError("no series to plot")
    for s in series:
        if not isinstance(s, PlotSeries):
            raise BadParameterError("emit_plot expects PlotSeries values")
    if fmt == "csv":
        content = _render_csv(series)
    elif fmt == "svg":
        content = _render_svg(series)
    else:
        raise BadParameterError(f"unknown plot format {fmt!r} (csv or svg)")
    Path(path).write_text(content, encoding="utf-8")


def read_series_csv(path: Path | str) -> list[PlotSeries]:
    """Read a ``series,x,y`` CSV back into PlotSeries (original order)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "series,x,y":
        raise BadParameterError(f"{path}: not a plot CSV (missing series,x,y header)")
    grouped: dict[str, list[tuple[float, float]]] = {}
    order: list[str] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != 3:
            raise BadParameterError(f"{path}:{lineno}: expected 3 cells")
        name = cells[0]
        try:
            point = (float(cells[1]), float(cells[2]))
        except ValueError as exc:
            raise BadParameterError(f"{path}:{lineno}: bad number") from exc
        if name not in grouped:
            grouped[name] = []
            order.append(name)
        grouped[name].append(point)
    if not order:
        raise BadParameterError(f"{path}: no data rows")
    return [PlotSeries(name, tuple(grouped[name])) for name in order]
