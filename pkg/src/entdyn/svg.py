"""Minimal hand-written SVG plots: polylines, a shaded region and axis ticks."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .sweep import SweepResult

WIDTH, HEIGHT = 640, 440
MARGIN = dict(left=70, right=20, top=30, bottom=55)
COLORS = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e")


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    return np.arange(start, hi + step * 1e-9, step)


class Canvas:
    def __init__(self, xlim, ylim, xlabel: str, ylabel: str, title: str = ""):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0
        self.parts: list[str] = []
        self.xlabel, self.ylabel, self.title = xlabel, ylabel, title
        self.legend: list[tuple[str, str, bool]] = []

    def px(self, x: float) -> float:
        w = WIDTH - MARGIN["left"] - MARGIN["right"]
        return MARGIN["left"] + (x - self.x0) / (self.x1 - self.x0) * w

    def py(self, y: float) -> float:
        h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
        return HEIGHT - MARGIN["bottom"] - (y - self.y0) / (self.y1 - self.y0) * h

    def _points(self, xs, ys) -> str:
        return " ".join(f"{self.px(x):.2f},{self.py(y):.2f}"
                        for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y))

    def polyline(self, xs, ys, color: str, dashed: bool = False, label: str | None = None):
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        self.parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="2"{dash} '
                          f'points="{self._points(xs, ys)}"/>')
        if label:
            self.legend.append((label, color, dashed))

    def region(self, xs, ys_low, ys_high, color: str = "#aab7c4"):
        pts = self._points(list(xs) + list(xs)[::-1], list(ys_low) + list(ys_high)[::-1])
        self.parts.append(f'<polygon fill="{color}" fill-opacity="0.5" stroke="none" '
                          f'points="{pts}"/>')

    def vline(self, x: float, color: str, label: str):
        self.polyline([x, x], [self.y0, self.y1], color, dashed=True, label=label)

    def render(self) -> str:
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
               f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
               f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
        left, bottom = MARGIN["left"], HEIGHT - MARGIN["bottom"]
        right, top = WIDTH - MARGIN["right"], MARGIN["top"]
        out.append(f'<clipPath id="plot"><rect x="{left}" y="{top}" '
                   f'width="{right - left}" height="{bottom - top}"/></clipPath>')
        out.append('<g clip-path="url(#plot)">')
        out.extend(self.parts)
        out.append("</g>")
        out.append(f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
                   f'fill="none" stroke="black"/>')
        for t in _ticks(self.x0, self.x1):
            x = self.px(t)
            out.append(f'<line x1="{x:.2f}" y1="{bottom}" x2="{x:.2f}" y2="{bottom + 5}" '
                       f'stroke="black"/>')
            out.append(f'<text x="{x:.2f}" y="{bottom + 18}" text-anchor="middle">{t:.3g}</text>')
        for t in _ticks(self.y0, self.y1):
            y = self.py(t)
            out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" '
                       f'stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{t:.3g}</text>')
        out.append(f'<text x="{(left + right) / 2}" y="{HEIGHT - 15}" text-anchor="middle">'
                   f'{escape(self.xlabel)}</text>')
        out.append(f'<text x="18" y="{(top + bottom) / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 18 {(top + bottom) / 2})">{escape(self.ylabel)}</text>')
        if self.title:
            out.append(f'<text x="{(left + right) / 2}" y="18" text-anchor="middle">'
                       f'{escape(self.title)}</text>')
        for k, (label, color, dashed) in enumerate(self.legend):
            y = top + 16 + 16 * k
            dash = ' stroke-dasharray="6,4"' if dashed else ""
            out.append(f'<line x1="{right - 150}" y1="{y - 4}" x2="{right - 120}" y2="{y - 4}" '
                       f'stroke="{color}" stroke-width="2"{dash}/>')
            out.append(f'<text x="{right - 114}" y="{y}">{escape(label)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def _finite(values) -> list[float]:
    return [v for v in values if math.isfinite(v)]


def phase_diagram_svg(result: SweepResult, title: str = "") -> str:
    """1/T against ln(1/γ); shaded region is where the numeric scan found entanglement."""
    b = [r for r in result.boundaries if math.isfinite(r.T_uc_numeric) and r.T_uc_numeric > 0]
    xs = [math.log(1 / r.gamma) for r in b]
    y_num = [1 / r.T_uc_numeric for r in b]
    lb = [(math.log(1 / r.gamma), 1 / r.T_lb) for r in result.boundaries
          if math.isfinite(r.T_lb) and r.T_lb > 0]
    all_x = xs + [p[0] for p in lb] or [0.0, 1.0]
    all_y = y_num + [p[1] for p in lb] or [0.0, 1.0]
    ymax = max(all_y) * 1.15
    c = Canvas((min(all_x), max(all_x)), (0.0, ymax), "ln(1/γ)", "1/T", title)
    if xs:
        c.region(xs, y_num, [ymax] * len(xs))
        c.polyline(xs, y_num, COLORS[0], label="numeric boundary")
    if lb:
        c.polyline([p[0] for p in lb], [p[1] for p in lb], COLORS[1], dashed=True, label="T_lb")
    return c.render()


def negativity_curve_svg(result: SweepResult, title: str = "") -> str:
    """Time-averaged negativity against T with dashed markers for each annotation."""
    rows = [r for r in result.rows if math.isfinite(r.T)]
    xs = [r.T for r in rows]
    ys = [r.neg_avg for r in rows]
    marks = {k: v for k, v in result.annotations.items() if k != "T_lc_numeric"}
    all_x = xs + _finite(marks.values()) or [0.0, 1.0]
    c = Canvas((min(all_x), max(all_x)), (0.0, (max(ys) if ys else 1.0) * 1.1 or 1.0),
               "T", "⟨N⟩", title)
    c.polyline(xs, ys, COLORS[0], label="⟨N⟩")
    for k, (name, value) in enumerate(sorted(marks.items())):
        c.vline(value, COLORS[1 + k % (len(COLORS) - 1)], name)
    return c.render()
