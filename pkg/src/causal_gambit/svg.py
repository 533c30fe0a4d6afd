"""Minimal SVG 1.1 line charts for reward curves."""

from __future__ import annotations

import math
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 800, 500
_MARGIN = dict(left=70, right=170, top=40, bottom=60)
_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _nice_step(span: float, target_ticks: int = 5) -> float:
    raw = span / target_ticks
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if m * mag >= raw:
            return m * mag
    return 10 * mag


def _ticks(lo: float, hi: float) -> list[float]:
    step = _nice_step(hi - lo)
    start = math.ceil(lo / step - 1e-9) * step
    out = []
    k = 0
    while start + k * step <= hi + 1e-9:
        out.append(round(start + k * step, 10))
        k += 1
    return out


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _label(x: float) -> str:
    return f"{x:g}"


def reward_curves_svg(series: Mapping[str, Sequence[float]], title: str = "",
                      y_label: str = "average reward") -> str:
    """One polyline per series over rounds ``1..n``; y axis fixed to [0, 1]."""
    left, right, top, bottom = (_MARGIN[k] for k in ("left", "right", "top", "bottom"))
    pw, ph = WIDTH - left - right, HEIGHT - top - bottom
    n = max((len(v) for v in series.values()), default=1)
    x_lo, x_hi = 1.0, float(max(n, 2))
    y_lo, y_hi = 0.0, 1.0

    def sx(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return top + (1 - (y - y_lo) / (y_hi - y_lo)) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="16">{escape(title)}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for x in _ticks(x_lo, x_hi):
        px = _fmt(sx(x))
        out.append(f'<line x1="{px}" y1="{top + ph}" x2="{px}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px}" y="{top + ph + 20}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="12">{_label(x)}</text>')
    for y in _ticks(y_lo, y_hi):
        py = _fmt(sy(y))
        out.append(f'<line x1="{left - 5}" y1="{py}" x2="{left}" y2="{py}" stroke="black"/>')
        out.append(f'<line x1="{left}" y1="{py}" x2="{left + pw}" y2="{py}" stroke="#dddddd"/>')
        out.append(f'<text x="{left - 8}" y="{py}" text-anchor="end" dominant-baseline="middle" '
                   f'font-family="sans-serif" font-size="12">{_label(y)}</text>')
    out.append(f'<text x="{left + pw / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="13">round</text>')
    out.append(f'<text x="18" y="{top + ph / 2:.0f}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="13" transform="rotate(-90 18 {top + ph / 2:.0f})">{escape(y_label)}</text>')
    for i, (name, values) in enumerate(series.items()):
        colour = _COLOURS[i % len(_COLOURS)]
        pts = " ".join(f"{_fmt(sx(t + 1))},{_fmt(sy(min(max(v, y_lo), y_hi)))}" for t, v in enumerate(values))
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="2" points="{pts}"/>')
        ly = top + 20 + 22 * i
        out.append(f'<line x1="{left + pw + 15}" y1="{ly}" x2="{left + pw + 40}" y2="{ly}" '
                   f'stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 46}" y="{ly}" dominant-baseline="middle" font-family="sans-serif" '
                   f'font-size="12">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
