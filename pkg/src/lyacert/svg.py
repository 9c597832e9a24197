"""Minimal SVG line-plot writer (axes, optional log-scale y, polylines).

Deliberately tiny: enough for rate-curve figures without a plotting
dependency.  Output is deterministic for identical input.
"""

from __future__ import annotations

import math
from typing import Sequence

__all__ = ["write_line_plot"]

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 30, 50
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def write_line_plot(
    path: str,
    series: Sequence[tuple[str, Sequence[tuple[float, float]]]],
    x_label: str = "",
    y_label: str = "",
    log_y: bool = False,
) -> None:
    pts_all = [(x, y) for _, pts in series for x, y in pts
               if y is not None and (not log_y or y > 0)]
    if not pts_all:
        raise ValueError("nothing to plot")
    xs = [p[0] for p in pts_all]
    ys = [math.log10(p[1]) if log_y else p[1] for p in pts_all]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    px = _W - _ML - _MR
    py = _H - _MT - _MB

    def sx(x):
        return _ML + (x - x0) / (x1 - x0) * px

    def sy(y):
        yv = math.log10(y) if log_y else y
        return _H - _MB - (yv - y0) / (y1 - y0) * py

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
        f'height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" '
        f'y2="{_H - _MB}" stroke="black"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" '
        f'stroke="black"/>',
    ]
    for i in range(5):
        xv = x0 + (x1 - x0) * i / 4
        xp = sx(xv)
        out.append(
            f'<line x1="{_fmt(xp)}" y1="{_H - _MB}" x2="{_fmt(xp)}" '
            f'y2="{_H - _MB + 5}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_fmt(xp)}" y="{_H - _MB + 20}" font-size="12" '
            f'text-anchor="middle">{_fmt(xv)}</text>'
        )
        yv = y0 + (y1 - y0) * i / 4
        yp = _H - _MB - py * i / 4
        label = f"1e{_fmt(yv)}" if log_y else _fmt(yv)
        out.append(
            f'<line x1="{_ML - 5}" y1="{_fmt(yp)}" x2="{_ML}" '
            f'y2="{_fmt(yp)}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_ML - 8}" y="{_fmt(yp + 4)}" font-size="12" '
            f'text-anchor="end">{label}</text>'
        )
    if x_label:
        out.append(
            f'<text x="{_ML + px / 2}" y="{_H - 10}" font-size="13" '
            f'text-anchor="middle">{x_label}</text>'
        )
    if y_label:
        out.append(
            f'<text x="15" y="{_MT + py / 2}" font-size="13" '
            f'text-anchor="middle" transform="rotate(-90 15 '
            f'{_MT + py / 2})">{y_label}</text>'
        )
    for k, (name, pts) in enumerate(series):
        pts = [(x, y) for x, y in pts
               if y is not None and (not log_y or y > 0)]
        if not pts:
            continue
        color = _COLORS[k % len(_COLORS)]
        poly = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in pts)
        out.append(
            f'<polyline points="{poly}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        out.append(
            f'<text x="{_W - _MR - 5}" y="{_MT + 15 + 15 * k}" '
            f'font-size="12" text-anchor="end" fill="{color}">{name}</text>'
        )
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
