"""Minimal deterministic SVG line plots."""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["Series", "PALETTE", "render_svg", "emit_svg"]

PALETTE = ["#1f77b4", "#d62728", "#e6a700", "#7b3294", "#000000", "#2ca02c"]

_W, _H = 640, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 20, 30, 55


@dataclass(frozen=True)
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    color: str | None = None


def _ticks(lo, hi, n=5):
    if hi == lo:
        return [lo]
    return list(np.linspace(lo, hi, n))


def _range(values):
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        pad = abs(lo) * 0.1 or 1.0
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def render_svg(series, xlabel="", ylabel="", title=""):
    """Return the SVG document as a string; identical inputs give identical text."""
    series = list(series)
    if not series:
        raise ValueError("need at least one series")
    xs = np.concatenate([np.asarray(s.x, float) for s in series])
    ys = np.concatenate([np.asarray(s.y, float) for s in series])
    finite = np.isfinite(ys)
    if not finite.any():
        raise ValueError("no finite values to plot")
    x0, x1 = float(xs.min()), float(xs.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    y0, y1 = _range(ys[finite])
    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def px(x):
        return _LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return _TOP + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    for t in _ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{X:.2f}" y1="{_TOP + ph}" x2="{X:.2f}" '
                   f'y2="{_TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{_TOP + ph + 18}" font-size="11" '
                   f'text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{_LEFT - 5}" y1="{Y:.2f}" x2="{_LEFT}" y2="{Y:.2f}" '
                   'stroke="black"/>')
        out.append(f'<text x="{_LEFT - 8}" y="{Y + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{t:.4g}</text>')
    for i, s in enumerate(series):
        color = s.color or PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}"
                       for x, y in zip(np.asarray(s.x, float), np.asarray(s.y, float))
                       if math.isfinite(y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'points="{pts}"/>')
    labelled = [(i, s) for i, s in enumerate(series) if s.label]
    if labelled:
        out.append('<g class="legend">')
        for row, (i, s) in enumerate(labelled):
            color = s.color or PALETTE[i % len(PALETTE)]
            y = _TOP + 14 + 16 * row
            out.append(f'<line x1="{_LEFT + pw - 150}" y1="{y}" x2="{_LEFT + pw - 125}" '
                       f'y2="{y}" stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{_LEFT + pw - 120}" y="{y + 4}" font-size="11">'
                       f'{escape(s.label)}</text>')
        out.append("</g>")
    if title:
        out.append(f'<text x="{_W / 2:.1f}" y="18" font-size="13" '
                   f'text-anchor="middle">{escape(title)}</text>')
    if xlabel:
        out.append(f'<text x="{_LEFT + pw / 2:.1f}" y="{_H - 12}" font-size="12" '
                   f'text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="16" y="{_TOP + ph / 2:.1f}" font-size="12" '
                   f'text-anchor="middle" transform="rotate(-90 16 {_TOP + ph / 2:.1f})">'
                   f'{escape(ylabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(series, xlabel, ylabel, path, title=""):
    text = render_svg(series, xlabel, ylabel, title)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path
