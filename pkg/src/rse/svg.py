"""Minimal deterministic SVG line charts (no plotting-library metadata)."""

from __future__ import annotations

from typing import Mapping, Sequence, Tuple

import numpy as np

from .fockspace import DomainError

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=20, top=40, bottom=55)
COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"]


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _ticks(lo: float, hi: float, n: int = 5):
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def render_svg(series: Mapping[str, Tuple[Sequence[float], Sequence[float]]],
               title: str = "", xlabel: str = "", ylabel: str = "") -> str:
    """One polyline per named series; raises DomainError if there is nothing to draw."""
    items = [(name, np.asarray(x, float), np.asarray(y, float)) for name, (x, y) in series.items()]
    if not items or any(x.size == 0 or x.size != y.size for _, x, y in items):
        raise DomainError("every series must be non-empty with matching x/y lengths")
    xs = np.concatenate([x for _, x, _ in items])
    ys = np.concatenate([y for _, _, y in items])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return MARGIN["left"] + (x - x0) / (x1 - x0) * pw

    def py(y):
        return MARGIN["top"] + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15">{_esc(title)}</text>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black"/>',
    ]
    for xv in _ticks(x0, x1):
        out.append(f'<text x="{px(xv):.2f}" y="{MARGIN["top"] + ph + 18}" text-anchor="middle" '
                   f'font-size="11">{xv:.4g}</text>')
    for yv in _ticks(y0, y1):
        out.append(f'<text x="{MARGIN["left"] - 6}" y="{py(yv) + 4:.2f}" text-anchor="end" '
                   f'font-size="11">{yv:.4g}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" '
               f'font-size="13">{_esc(xlabel)}</text>')
    out.append(f'<text x="16" y="{MARGIN["top"] + ph / 2:.1f}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2:.1f})">{_esc(ylabel)}</text>')
    for k, (name, x, y) in enumerate(items):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = MARGIN["top"] + 16 + 16 * k
        out.append(f'<text x="{MARGIN["left"] + pw - 8}" y="{ly}" text-anchor="end" font-size="12" '
                   f'fill="{color}">{_esc(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(series, path, **labels) -> str:
    text = render_svg(series, **labels)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return text
