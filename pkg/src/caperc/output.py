"""CSV and SVG emitters.

CSV: header row, RFC-4180 quoting, ``\\n`` line endings, floats written with
17 significant digits so they parse back to the identical double.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence, TextIO
from xml.sax.saxutils import escape


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    if hasattr(value, "item"):  # numpy scalar
        return format_cell(value.item())
    return str(value)


def emit_csv(rows: Sequence[Mapping[str, Any]], sink: TextIO, columns: Sequence[str] | None = None) -> None:
    """Write dict rows; ``columns`` fixes the header (default: keys of the first row)."""
    if not rows and columns is None:
        raise ValueError("cannot infer a header from an empty table")
    header = list(columns) if columns is not None else list(rows[0])
    w = csv.writer(sink, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(header)
    for row in rows:
        w.writerow([format_cell(row.get(col)) for col in header])


@dataclass(frozen=True)
class Axes:
    log_x: bool = False
    log_y: bool = False
    width: int = 640
    height: int = 400
    margin: int = 60
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""


def _scale(vals: Sequence[float], log: bool, lo_px: float, hi_px: float) -> list[float]:
    t = [math.log10(v) if log else v for v in vals]
    lo, hi = min(t), max(t)
    if hi == lo:
        return [(lo_px + hi_px) / 2] * len(t)
    return [lo_px + (x - lo) / (hi - lo) * (hi_px - lo_px) for x in t]


def svg_coordinates(points: Sequence[tuple[float, float]], axes: Axes) -> list[tuple[float, float]]:
    """Pixel positions of the data points (y grows downward, as in SVG)."""
    xs = [float(x) for x, _ in points]
    ys = [float(y) for _, y in points]
    if axes.log_x and min(xs) <= 0 or axes.log_y and min(ys) <= 0:
        raise ValueError("log axes need positive data")
    m = axes.margin
    px = _scale(xs, axes.log_x, m, axes.width - m)
    py = _scale(ys, axes.log_y, axes.height - m, m)
    return list(zip(px, py))


def emit_svg(points: Sequence[tuple[float, float]], axes: Axes, sink: TextIO) -> None:
    """Standalone single-series line+marker plot."""
    if not points:
        raise ValueError("empty series")
    pts = svg_coordinates(points, axes)
    w, h, m = axes.width, axes.height, axes.margin
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
        f'<line x1="{m}" y1="{h - m}" x2="{w - m}" y2="{h - m}" stroke="black"/>',
        f'<line x1="{m}" y1="{m}" x2="{m}" y2="{h - m}" stroke="black"/>',
    ]
    if axes.title:
        out.append(f'<text x="{w / 2}" y="{m / 2}" text-anchor="middle">{escape(axes.title)}</text>')
    xl = axes.xlabel + (" (log)" if axes.log_x else "")
    yl = axes.ylabel + (" (log)" if axes.log_y else "")
    out.append(f'<text x="{w / 2}" y="{h - m / 4}" text-anchor="middle">{escape(xl)}</text>')
    out.append(
        f'<text x="{m / 4}" y="{h / 2}" text-anchor="middle" transform="rotate(-90 {m / 4} {h / 2})">'
        f"{escape(yl)}</text>"
    )
    poly = " ".join(f"{x:.3f},{y:.3f}" for x, y in pts)
    out.append(f'<polyline points="{poly}" fill="none" stroke="steelblue"/>')
    for (x, y), (dx, dy) in zip(pts, points):
        out.append(
            f'<circle class="point" cx="{x:.3f}" cy="{y:.3f}" r="4" fill="steelblue" '
            f'data-x="{format_cell(float(dx))}" data-y="{format_cell(float(dy))}"/>'
        )
    out.append("</svg>")
    sink.write("\n".join(out) + "\n")
