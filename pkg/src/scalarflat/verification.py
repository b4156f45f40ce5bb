"""Invariant suite for an outline-matched polygon (used by the CLI)."""

from __future__ import annotations

import math

import numpy as np

from . import geometry
from .errors import DegenerateMapError, StepError
from .momentum import add_variation, match_outline, outline_restriction
from .pdecheck import residual
from .polygon import LabeledPolygon


def sample_points(mm, n, rng, y_range=(1e-3, 5.0)):
    """Random interior points spanning every breakpoint with margin."""
    bps = list(mm.breakpoints) or [0.0]
    lo, hi = min(bps) - 5.0, max(bps) + 5.0
    return rng.uniform(lo, hi, n), rng.uniform(*y_range, n)


def edge_probe_points(mm):
    """One boundary x inside every edge interval, paired with the edge index."""
    b = list(mm.breakpoints)
    if not b:
        return [(0.0, 0)]
    pts = [(b[0] - 1.0, 0)]
    pts += [(0.5 * (a + c), i + 1) for i, (a, c) in enumerate(zip(b, b[1:]))]
    pts.append((b[-1] + 1.0, len(b)))
    return pts


def max_scaled_residual(mm, xs, ys) -> float:
    j1, j2 = mm.jets(xs, ys)
    worst = 0.0
    for j in (j1, j2):
        r = np.abs(residual(j, ys)) / (1.0 + np.hypot(j.dx, j.dy))
        worst = max(worst, float(np.max(r)))
    return worst


def label_errors(mm) -> list[float]:
    return [abs(outline_restriction(mm, x)[1] - mm.labels[i]) for x, i in edge_probe_points(mm)]


def interior_grid(mm, poly, n=10, min_dist=0.1, y_range=(0.1, 2.5), margin=1.5):
    """n x n grid in (x, y) kept where the image lies at least `min_dist`
    inside the polygon."""
    b = list(getattr(mm, "breakpoints", ())) or [0.0]
    X, Y = np.meshgrid(np.linspace(min(b) - margin, max(b) + margin, n), np.linspace(*y_range, n))
    P1, P2 = mm.value(X, Y)
    keep = poly.inner_distance(np.column_stack([P1.ravel(), P2.ravel()])) >= min_dist
    return [(float(x), float(y)) for x, y in zip(X.ravel()[keep], Y.ravel()[keep])]


def scalar_checks(mm, points, h=1e-3):
    """Max |s_a - 2K|, min conformal scalar, max conformal route gap."""
    gap = cgap = 0.0
    cmin = math.inf
    for x, y in points:
        j1, j2 = mm.jets(x, y)
        phi = (j1.value, j2.value)
        s_a, s_b = geometry.scalar_two_routes(mm, phi, h, guess=(x, y))
        c1, c2 = geometry.conformal_scalar(mm, phi, h, guess=(x, y), both=True)
        gap = max(gap, abs(s_a - s_b))
        cmin = min(cmin, c1)
        cgap = max(cgap, abs(c1 - c2))
    return gap, cmin, cgap


def verify_polygon(
    poly: LabeledPolygon,
    variation: dict | None = None,
    n_points: int = 1000,
    tol: float = 1e-8,
    h: float = 1e-3,
    seed: int = 0,
    grid_n: int = 4,
) -> dict:
    mm = match_outline(poly)
    if variation:
        mm = add_variation(mm, **{k: v for k, v in variation.items() if v})
    rng = np.random.default_rng(seed)
    checks = []

    def add(name, ok, value, limit):
        checks.append({"name": name, "status": "pass" if ok else "fail", "value": value, "tol": limit})

    xs, ys = sample_points(mm, n_points, rng)
    r = max_scaled_residual(mm, xs, ys)
    add("pde residual (scaled)", r <= tol, r, tol)
    le = max(label_errors(mm))
    add("label recovery", le <= tol, le, tol)
    try:
        lam = geometry.conformal_factor(mm, xs, ys)
        add("oriented det A > 0", True, float(lam.min()), 0.0)
    except DegenerateMapError as exc:
        checks.append({"name": "oriented det A > 0", "status": "fail", "detail": str(exc)})
    try:
        pts = interior_grid(mm, poly, grid_n)
        gap, cmin, cgap = scalar_checks(mm, pts, h)
        add("scalar routes agree", gap <= 1e-4, gap, 1e-4)
        add("conformal scalar >= 0", cmin >= -1e-8, cmin, -1e-8)
        add("conformal routes agree", cgap <= 1e-4, cgap, 1e-4)
    except (StepError, DegenerateMapError) as exc:
        checks.append({"name": "scalar routes", "status": "fail", "detail": str(exc)})
    return {
        "class": mm.case.value,
        "momentum": mm.describe(),
        "passed": all(c["status"] == "pass" for c in checks),
        "checks": checks,
    }
