"""Minimal deterministic SVG line charts.

Hand-rolled rather than delegated to a plotting library so that identical
inputs produce byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 30, 40, 55
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
N_TICKS = 5


@dataclass
class Series:
    """One plotted line; ``errors`` (if given) draw vertical error bars."""

    name: str
    xs: Sequence[float]
    ys: Sequence[Optional[float]]
    errors: Optional[Sequence[float]] = None


def _fmt(v: float) -> str:
    return format(float(v), ".6g")


def _range(values):
    lo, hi = min(values), max(values)
    if lo == hi:
        pad = abs(lo) if lo else 1.0
        lo, hi = lo - 0.5 * pad, hi + 0.5 * pad
    return lo, hi


def line_chart(series: List[Series], x_label: str, y_label: str, title: str = "") -> str:
    """Render series as a self-contained SVG document string."""
    xs_all = [x for s in series for x in s.xs]
    ys_all = []
    for s in series:
        for i, y in enumerate(s.ys):
            if y is None:
                continue
            err = s.errors[i] if s.errors is not None else 0.0
            ys_all.extend([y - err, y + err])
    if not xs_all or not ys_all:
        raise ValueError("nothing to plot: no finite points")
    x_lo, x_hi = _range(xs_all)
    y_lo, y_hi = _range(ys_all)

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x):
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{WIDTH / 2:g}" y="22" text-anchor="middle" font-size="15" '
            f'font-family="sans-serif">{escape(title)}</text>'
        )
    axis_y = MARGIN_TOP + plot_h
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{axis_y}" x2="{MARGIN_LEFT + plot_w}" y2="{axis_y}" '
        'stroke="black"/>'
    )
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{axis_y}" '
        'stroke="black"/>'
    )
    for k in range(N_TICKS):
        frac = k / (N_TICKS - 1)
        xv = x_lo + frac * (x_hi - x_lo)
        xp = px(xv)
        parts.append(f'<line x1="{xp:.2f}" y1="{axis_y}" x2="{xp:.2f}" y2="{axis_y + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{xp:.2f}" y="{axis_y + 18}" text-anchor="middle" font-size="11" '
            f'font-family="sans-serif">{_fmt(xv)}</text>'
        )
        yv = y_lo + frac * (y_hi - y_lo)
        yp = py(yv)
        parts.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{yp:.2f}" x2="{MARGIN_LEFT}" y2="{yp:.2f}" stroke="black"/>')
        parts.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{yp + 4:.2f}" text-anchor="end" font-size="11" '
            f'font-family="sans-serif">{_fmt(yv)}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2:g}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-size="13" font-family="sans-serif">{escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="18" y="{MARGIN_TOP + plot_h / 2:g}" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif" transform="rotate(-90 18 {MARGIN_TOP + plot_h / 2:g})">'
        f"{escape(y_label)}</text>"
    )
    for idx, s in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        pts = [
            (px(x), py(y))
            for x, y in zip(s.xs, s.ys)
            if y is not None
        ]
        if s.errors is not None:
            for (x, y, e) in zip(s.xs, s.ys, s.errors):
                if y is None:
                    continue
                xp = px(x)
                parts.append(
                    f'<line x1="{xp:.2f}" y1="{py(y - e):.2f}" x2="{xp:.2f}" y2="{py(y + e):.2f}" '
                    f'stroke="{color}" stroke-width="1"/>'
                )
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}">'
            f"<title>{escape(s.name)}</title></polyline>"
        )
        for x, y in pts:
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.5" fill="{color}"/>')
        legend_y = MARGIN_TOP + 8 + 16 * idx
        legend_x = MARGIN_LEFT + plot_w - 150
        parts.append(
            f'<line x1="{legend_x}" y1="{legend_y}" x2="{legend_x + 22}" y2="{legend_y}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{legend_x + 28}" y="{legend_y + 4}" font-size="12" '
            f'font-family="sans-serif">{escape(s.name)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
