"""
Minimal SVG 1.1 charts: scatter/line plots with axes, and polygon overlays.

Output is deterministic. A timestamp comment is added only when
``timestamp=True`` is passed to ``save``.
"""

from __future__ import annotations

import datetime
import math
from xml.sax.saxutils import escape

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _ticks(lo: float, hi: float, count: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * step:
        out.append(round(t, 12))
        t += step
    return out


class Chart:
    """An x-y chart with linear or log axes."""

    def __init__(self, title: str, xlabel: str, ylabel: str, width=640, height=420, logx=False, logy=False):
        self.title = title
        self.xlabel = xlabel
        self.ylabel = ylabel
        self.width = width
        self.height = height
        self.logx = logx
        self.logy = logy
        self.series = []
        self.margin = (70, 20, 40, 50)  # left, right, top, bottom

    def add(self, xs, ys, label: str = "", kind: str = "points", color: str | None = None):
        pts = [(float(x), float(y)) for x, y in zip(xs, ys) if _finite(x) and _finite(y)]
        if self.logx:
            pts = [(x, y) for x, y in pts if x > 0]
        if self.logy:
            pts = [(x, y) for x, y in pts if y > 0]
        color = color or PALETTE[len(self.series) % len(PALETTE)]
        self.series.append((pts, label, kind, color))
        return self

    def _tx(self, v, axis):
        return math.log10(v) if (self.logx if axis == "x" else self.logy) else v

    def _bounds(self):
        xs = [self._tx(x, "x") for pts, *_ in self.series for x, _ in pts]
        ys = [self._tx(y, "y") for pts, *_ in self.series for _, y in pts]
        if not xs:
            return 0.0, 1.0, 0.0, 1.0
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
        if x1 == x0:
            x0, x1 = x0 - 0.5, x1 + 0.5
        if y1 == y0:
            y0, y1 = y0 - 0.5, y1 + 0.5
        px, py = 0.05 * (x1 - x0), 0.05 * (y1 - y0)
        return x0 - px, x1 + px, y0 - py, y1 + py

    def render(self) -> str:
        l, r, t, b = self.margin
        W, H = self.width, self.height
        pw, ph = W - l - r, H - t - b
        x0, x1, y0, y1 = self._bounds()

        def X(v):
            return l + (self._tx(v, "x") - x0) / (x1 - x0) * pw

        def Y(v):
            return t + ph - (self._tx(v, "y") - y0) / (y1 - y0) * ph

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
            f'<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>',
            f'<text x="{W / 2}" y="{t - 15}" text-anchor="middle" font-size="14" font-family="sans-serif">{escape(self.title)}</text>',
            f'<rect x="{l}" y="{t}" width="{pw}" height="{ph}" fill="none" stroke="#000000"/>',
        ]
        for v in _ticks(x0, x1):
            px = l + (v - x0) / (x1 - x0) * pw
            lab = f"{10 ** v:.3g}" if self.logx else f"{v:.4g}"
            out.append(f'<line x1="{_fmt(px)}" y1="{t + ph}" x2="{_fmt(px)}" y2="{t + ph + 5}" stroke="#000000"/>')
            out.append(f'<text x="{_fmt(px)}" y="{t + ph + 18}" text-anchor="middle" font-size="10" font-family="sans-serif">{lab}</text>')
        for v in _ticks(y0, y1):
            py = t + ph - (v - y0) / (y1 - y0) * ph
            lab = f"{10 ** v:.3g}" if self.logy else f"{v:.4g}"
            out.append(f'<line x1="{l - 5}" y1="{_fmt(py)}" x2="{l}" y2="{_fmt(py)}" stroke="#000000"/>')
            out.append(f'<text x="{l - 8}" y="{_fmt(py + 3)}" text-anchor="end" font-size="10" font-family="sans-serif">{lab}</text>')
        out.append(f'<text x="{l + pw / 2}" y="{H - 8}" text-anchor="middle" font-size="12" font-family="sans-serif">{escape(self.xlabel)}</text>')
        out.append(
            f'<text x="14" y="{t + ph / 2}" text-anchor="middle" font-size="12" font-family="sans-serif" '
            f'transform="rotate(-90 14 {t + ph / 2})">{escape(self.ylabel)}</text>'
        )
        for k, (pts, label, kind, color) in enumerate(self.series):
            if kind == "line" and len(pts) > 1:
                s = " ".join(f"{_fmt(X(x))},{_fmt(Y(y))}" for x, y in pts)
                out.append(f'<polyline points="{s}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            else:
                for x, y in pts:
                    out.append(f'<circle cx="{_fmt(X(x))}" cy="{_fmt(Y(y))}" r="3" fill="{color}"/>')
            if label:
                ly = t + 14 + 14 * k
                out.append(f'<rect x="{l + 8}" y="{ly - 8}" width="10" height="10" fill="{color}"/>')
                out.append(f'<text x="{l + 22}" y="{ly + 1}" font-size="11" font-family="sans-serif">{escape(label)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path, timestamp: bool = False) -> None:
        text = self.render()
        if timestamp:
            stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
            text = text.replace("</svg>\n", f"<!-- generated {stamp} -->\n</svg>\n")
        with open(path, "w") as fh:
            fh.write(text)


def _finite(v) -> bool:
    try:
        return math.isfinite(float(v))
    except (TypeError, ValueError):
        return False


def polygon_overlay(polys, labels, path, size=420, timestamp: bool = False) -> None:
    """Draw polygons (lists of (x, y)) on a common square canvas."""
    xs = [x for P in polys for x, _ in P]
    ys = [y for P in polys for _, y in P]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0) or 1.0
    pad = 0.08 * span
    scale = (size - 20) / (span + 2 * pad)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>',
    ]
    for k, (P, lab) in enumerate(zip(polys, labels)):
        color = PALETTE[k % len(PALETTE)]
        s = " ".join(f"{_fmt(10 + (x - x0 + pad) * scale)},{_fmt(size - 10 - (y - y0 + pad) * scale)}" for x, y in P)
        out.append(f'<polygon points="{s}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="14" y="{20 + 14 * k}" font-size="11" font-family="sans-serif" fill="{color}">{escape(lab)}</text>')
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if timestamp:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        text = text.replace("</svg>\n", f"<!-- generated {stamp} -->\n</svg>\n")
    with open(path, "w") as fh:
        fh.write(text)
