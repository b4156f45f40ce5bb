"""Minimal deterministic SVG output: polygon outline, labels, heatmap."""

from __future__ import annotations

import math

import numpy as np

from .polygon import LabeledPolygon

WIDTH = 600
HEIGHT = 600
PAD = 40


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _label_text(s: float) -> str:
    return "inf" if math.isinf(s) else f"{s:.6g}"


def _colour(t: float) -> str:
    """Diverging blue-white-red ramp for t in [0, 1]."""
    t = min(1.0, max(0.0, t))
    if t < 0.5:
        a = t / 0.5
        r, g, b = 59 + a * (247 - 59), 76 + a * (247 - 76), 192 + a * (247 - 192)
    else:
        a = (t - 0.5) / 0.5
        r, g, b = 247 + a * (180 - 247), 247 + a * (4 - 247), 247 + a * (38 - 247)
    return f"#{int(round(r)):02x}{int(round(g)):02x}{int(round(b)):02x}"


class _View:
    def __init__(self, xmin, xmax, ymin, ymax):
        span = max(xmax - xmin, ymax - ymin, 1e-9)
        cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)
        self.x0, self.y0 = cx - 0.5 * span, cy - 0.5 * span
        self.scale = (WIDTH - 2 * PAD) / span

    def __call__(self, p):
        return PAD + (p[0] - self.x0) * self.scale, HEIGHT - PAD - (p[1] - self.y0) * self.scale


def _outline_points(poly: LabeledPolygon, reach: float):
    """Polyline (list of segments with their labels) for drawing."""
    segs = []
    if poly.kind == "polygon":
        pts = [v.as_array() for v in poly.vertices]
        r0, r1 = np.array(poly.rays[0]), np.array(poly.rays[1])
        segs.append((pts[0] + reach * r0, pts[0], poly.labels[0]))
        for i, (a, b) in enumerate(zip(pts, pts[1:]), start=1):
            segs.append((a, b, poly.labels[i]))
        segs.append((pts[-1], pts[-1] + reach * r1, poly.labels[-1]))
    elif poly.kind in ("half_plane", "strip"):
        t = np.array(poly.direction)
        b = poly.base.as_array()
        segs.append((b - reach * t, b + reach * t, poly.labels[0]))
        if poly.kind == "strip":
            off = poly.width * np.array([-t[1], t[0]])
            segs.append((b + off + reach * t, b + off - reach * t, poly.labels[1]))
    return segs


def render_svg(poly: LabeledPolygon | None, heat=None, title: str = "") -> str:
    """SVG text. `heat` is (quads, values, name) with quads of shape (n, 4, 2)."""
    pts = []
    if poly is not None and poly.kind == "polygon":
        pts = [v.as_array() for v in poly.vertices]
    elif poly is not None and poly.kind in ("half_plane", "strip"):
        pts = [poly.base.as_array()]
    if heat is not None:
        q = heat[0].reshape(-1, 2)
        q = q[np.all(np.isfinite(q), axis=1)]
        if len(q):
            pts.extend([q.min(axis=0), q.max(axis=0)])
    if not pts:
        pts = [np.zeros(2)]
    arr = np.array(pts)
    lo, hi = arr.min(axis=0), arr.max(axis=0)
    reach = max(2.0, float(np.max(hi - lo)))
    if poly is not None:
        for a, b, _ in _outline_points(poly, reach):
            arr = np.vstack([arr, a, b])
    lo, hi = arr.min(axis=0), arr.max(axis=0)
    view = _View(lo[0], hi[0], lo[1], hi[1])

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{PAD}" y="{PAD // 2}" font-size="14" font-family="monospace">{title}</text>')
    if heat is not None:
        quads, vals, name = heat
        finite = vals[np.isfinite(vals)]
        if finite.size:
            vmin, vmax = float(finite.min()), float(finite.max())
            span = vmax - vmin if vmax > vmin else 1.0
            out.append('<g stroke="none">')
            for quad, v in zip(quads, vals):
                if not (np.isfinite(v) and np.all(np.isfinite(quad))):
                    continue
                d = " ".join(("M" if i == 0 else "L") + _fmt(a) + "," + _fmt(b) for i, (a, b) in enumerate(map(view, quad)))
                out.append(f'<path d="{d} Z" fill="{_colour((v - vmin) / span)}"/>')
            out.append("</g>")
            out.append(
                f'<text x="{PAD}" y="{HEIGHT - 10}" font-size="12" font-family="monospace">'
                f"{name}: min {vmin:.6g} max {vmax:.6g}</text>"
            )
    if poly is not None:
        out.append('<g stroke="black" stroke-width="2" fill="none">')
        for a, b, _ in _outline_points(poly, reach):
            (x1, y1), (x2, y2) = view(a), view(b)
            out.append(f'<path d="M{_fmt(x1)},{_fmt(y1)} L{_fmt(x2)},{_fmt(y2)}"/>')
        out.append("</g>")
        out.append('<g font-size="13" font-family="monospace" fill="darkgreen">')
        for a, b, s in _outline_points(poly, min(reach, 1.0)):
            mx, my = view(0.5 * (a + b))
            out.append(f'<text x="{_fmt(mx + 6)}" y="{_fmt(my - 6)}">s={_label_text(s)}</text>')
        out.append("</g>")
        if poly.kind == "polygon":
            out.append('<g fill="black">')
            for v in poly.vertices:
                cx, cy = view(v.as_array())
                out.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="3"/>')
            out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def heat_quads(mm, xs, ys, values):
    """Images of the (x, y) grid cells under the momentum map, with cell values."""
    X, Y = np.meshgrid(xs, ys)
    P1, P2 = mm.value(X, Y)
    quads, vals = [], []
    for j in range(len(ys) - 1):
        for i in range(len(xs) - 1):
            corners = [(j, i), (j, i + 1), (j + 1, i + 1), (j + 1, i)]
            quads.append([(P1[c], P2[c]) for c in corners])
            cell = [values[c] for c in corners]
            vals.append(np.mean(cell) if np.all(np.isfinite(cell)) else np.nan)
    return np.array(quads, dtype=float).reshape(-1, 4, 2), np.array(vals)
