"""Minimal static SVG plots: boxplots, strip plots, scatter, error bars.

Output is plain SVG text with a fixed layout; no external plotting stack.
All elements are emitted in deterministic order so files are byte-stable.
"""

from __future__ import annotations

import math

import numpy as np

_W, _H = 640, 420
_MARGIN = 56


class _Canvas:
    def __init__(self, width=_W, height=_H, title=""):
        self.width = width
        self.height = height
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">',
            f'<rect width="{width}" height="{height}" fill="white"/>',
        ]
        if title:
            self.text(width / 2, 20, title, anchor="middle", size=14)

    def line(self, x1, y1, x2, y2, color="black", width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{color}" stroke-width="{width}"{d}/>'
        )

    def rect(self, x, y, w, h, fill="none", stroke="black"):
        self.parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
            f'fill="{fill}" stroke="{stroke}"/>'
        )

    def circle(self, x, y, r=3.0, fill="steelblue", opacity=1.0):
        self.parts.append(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r:.2f}" fill="{fill}" '
            f'fill-opacity="{opacity:.2f}"/>'
        )

    def text(self, x, y, s, anchor="start", size=11, rotate=None):
        t = f' transform="rotate({rotate} {x:.2f} {y:.2f})"' if rotate else ""
        self.parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" '
            f'font-family="sans-serif" text-anchor="{anchor}"{t}>{s}</text>'
        )

    def to_string(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


class _Scale:
    def __init__(self, lo, hi, out_lo, out_hi):
        if hi == lo:
            hi = lo + 1.0
        self.lo, self.hi = lo, hi
        self.out_lo, self.out_hi = out_lo, out_hi

    def __call__(self, v):
        t = (v - self.lo) / (self.hi - self.lo)
        return self.out_lo + t * (self.out_hi - self.out_lo)


def _ticks(lo, hi, n=5):
    if hi == lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s for s in (1, 2, 5, 10) if s * mag >= raw), default=10) * mag
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12:
        out.append(round(v, 10))
        v += step
    return out


def _frame(canvas, ys, ylabel):
    lo = min(ys)
    hi = max(ys)
    pad = 0.05 * (hi - lo or 1.0)
    sy = _Scale(lo - pad, hi + pad, canvas.height - _MARGIN, _MARGIN)
    canvas.line(_MARGIN, _MARGIN, _MARGIN, canvas.height - _MARGIN)
    canvas.line(_MARGIN, canvas.height - _MARGIN, canvas.width - 20,
                canvas.height - _MARGIN)
    for tv in _ticks(lo - pad, hi + pad):
        y = sy(tv)
        canvas.line(_MARGIN - 4, y, _MARGIN, y)
        canvas.text(_MARGIN - 8, y + 3, f"{tv:g}", anchor="end", size=9)
    canvas.text(16, canvas.height / 2, ylabel, anchor="middle", rotate=-90)
    return sy


def boxplot(groups: dict[str, list[float]], title="", ylabel="Q") -> str:
    """Quartile boxes with median line and whiskers to data extremes."""
    canvas = _Canvas(title=title)
    all_vals = [v for vs in groups.values() for v in vs]
    sy = _frame(canvas, all_vals, ylabel)
    labels = list(groups)
    slot = (canvas.width - _MARGIN - 20) / max(len(labels), 1)
    for k, label in enumerate(labels):
        vals = np.array(sorted(groups[label]), dtype=float)
        q1, q2, q3 = np.quantile(vals, [0.25, 0.5, 0.75])
        cx = _MARGIN + (k + 0.5) * slot
        half = min(28.0, slot * 0.3)
        canvas.line(cx, sy(vals[0]), cx, sy(q1))
        canvas.line(cx, sy(q3), cx, sy(vals[-1]))
        canvas.rect(cx - half, sy(q3), 2 * half, sy(q1) - sy(q3),
                    fill="#dfe8f3")
        canvas.line(cx - half, sy(q2), cx + half, sy(q2), width=2.0)
        canvas.text(cx, canvas.height - _MARGIN + 16, label, anchor="middle")
    return canvas.to_string()


def strip_plot(groups: dict[str, list[float]], title="", ylabel="z",
               hline: float | None = 0.0) -> str:
    """One vertical strip of points per group, in given order."""
    canvas = _Canvas(title=title)
    all_vals = [v for vs in groups.values() for v in vs] or [0.0]
    sy = _frame(canvas, all_vals + ([hline] if hline is not None else []), ylabel)
    labels = list(groups)
    slot = (canvas.width - _MARGIN - 20) / max(len(labels), 1)
    if hline is not None:
        canvas.line(_MARGIN, sy(hline), canvas.width - 20, sy(hline),
                    color="#999999", dash="4,3")
    for k, label in enumerate(labels):
        vals = groups[label]
        x0 = _MARGIN + k * slot + 12
        span = slot - 24
        for idx, v in enumerate(vals):
            x = x0 + span * (idx / max(len(vals) - 1, 1))
            canvas.circle(x, sy(v), r=2.4, opacity=0.8)
        canvas.text(_MARGIN + (k + 0.5) * slot, canvas.height - _MARGIN + 16,
                    label, anchor="middle")
    return canvas.to_string()


def scatter(x, y, *, slope=None, intercept=None, title="", xlabel="fitness",
            ylabel="weighted neighbor fitness") -> str:
    """Scatter with optional regression line."""
    canvas = _Canvas(title=title)
    sy = _frame(canvas, list(y), ylabel)
    xlo, xhi = min(x), max(x)
    pad = 0.05 * (xhi - xlo or 1.0)
    sx = _Scale(xlo - pad, xhi + pad, _MARGIN, canvas.width - 20)
    for tv in _ticks(xlo - pad, xhi + pad):
        px = sx(tv)
        canvas.line(px, canvas.height - _MARGIN, px, canvas.height - _MARGIN + 4)
        canvas.text(px, canvas.height - _MARGIN + 16, f"{tv:g}", anchor="middle",
                    size=9)
    canvas.text(canvas.width / 2, canvas.height - 12, xlabel, anchor="middle")
    for xi, yi in zip(x, y):
        canvas.circle(sx(xi), sy(yi), r=3.0, opacity=0.65)
    if slope is not None and intercept is not None:
        canvas.line(sx(xlo), sy(intercept + slope * xlo),
                    sx(xhi), sy(intercept + slope * xhi),
                    color="firebrick", width=1.6)
    return canvas.to_string()


def errorbar_plot(categories, series: dict[str, tuple[list, list]], title="",
                  ylabel="mean weight") -> str:
    """Per-category means with +/- one standard error bars, one color per series."""
    colors = ["steelblue", "darkorange", "seagreen", "purple"]
    canvas = _Canvas(title=title)
    all_vals = []
    for means, ses in series.values():
        all_vals += [m - s for m, s in zip(means, ses)]
        all_vals += [m + s for m, s in zip(means, ses)]
    sy = _frame(canvas, all_vals, ylabel)
    slot = (canvas.width - _MARGIN - 20) / max(len(categories), 1)
    for si, (name, (means, ses)) in enumerate(series.items()):
        color = colors[si % len(colors)]
        for k, (m, s) in enumerate(zip(means, ses)):
            cx = _MARGIN + (k + 0.5) * slot + 6 * si
            canvas.line(cx, sy(m - s), cx, sy(m + s), color=color, width=1.4)
            canvas.line(cx - 3, sy(m - s), cx + 3, sy(m - s), color=color)
            canvas.line(cx - 3, sy(m + s), cx + 3, sy(m + s), color=color)
            canvas.circle(cx, sy(m), r=3.2, fill=color)
        canvas.text(canvas.width - 24, _MARGIN + 14 * si, name, anchor="end",
                    size=10)
    for k, cat in enumerate(categories):
        canvas.text(_MARGIN + (k + 0.5) * slot, canvas.height - _MARGIN + 16,
                    str(cat), anchor="middle")
    return canvas.to_string()
