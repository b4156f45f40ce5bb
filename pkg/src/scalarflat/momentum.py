"""Momentum functions on the closed upper half-plane by outline matching.

Every map built here has the form

    phi(x, y) = c + l*x + sum_a C_a * P_a(x, y) + v*y^2 + w*x*y^2

with vector coefficients and P_a = (x - a) + sqrt((x - a)^2 + y^2). Each
P_a solves y*(f_xx + f_yy) - f_y = 0, vanishes on {y = 0, x < a} and
equals 2(x - a) on {y = 0, x > a}, so the boundary restriction is piecewise
linear with kinks at the knots a. This covers terminal rays, interior
building blocks and the y^2 / x*y^2 Liouville variations in one
representation, in any affine coordinates on the momentum plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import DomainError, UnsupportedError
from .polygon import LabeledPolygon, Point2, PolygonClass, classify

__all__ = [
    "Jet2",
    "MomentumMap",
    "building_block",
    "match_outline",
    "outline_map",
    "add_variation",
    "eval",
    "outline_restriction",
]


@dataclass(frozen=True)
class Jet2:
    """Value and partials up to second order; fields may be numpy arrays."""

    value: object
    dx: object
    dy: object
    dxx: object
    dxy: object
    dyy: object

    def __add__(self, other):
        return Jet2(*(a + b for a, b in zip(self, other)))

    def __mul__(self, c):
        return Jet2(*(c * a for a in self))

    __rmul__ = __mul__

    def __iter__(self):
        yield from (self.value, self.dx, self.dy, self.dxx, self.dxy, self.dyy)

    @property
    def grad(self):
        return (self.dx, self.dy)


def _p_jet(u, y):
    r = math.hypot(u, y)
    if r == 0.0:
        raise ValueError("jets are singular at a breakpoint on the boundary")
    p = u + r if u >= 0 else y * y / (r - u)
    r3 = r ** 3
    return Jet2(p, p / r, y / r, y * y / r3, -u * y / r3, u * u / r3)


def building_block(x: float, y: float, xi: float, xi1: float) -> Jet2:
    """Interpolating solution equal to 0 left of xi and 1 right of xi1 on y = 0."""
    if not xi < xi1:
        raise ValueError("need xi < xi1")
    if y < 0:
        raise ValueError("y must be non-negative")
    scale = 1.0 / (2.0 * (xi1 - xi))
    if y == 0.0:
        # boundary value by continuity; derivatives are one-sided here
        val = scale * ((x - xi + abs(x - xi)) - (x - xi1 + abs(x - xi1)))
        if x in (xi, xi1):
            return Jet2(val, math.nan, math.nan, math.nan, math.nan, math.nan)
    return (_p_jet(x - xi, y) + _p_jet(x - xi1, y) * -1.0) * scale


_VAR_NAMES = {
    PolygonClass.GENERAL: ("c1", "c2"),
    PolygonClass.PARALLEL_RAYS: ("c1",),
    PolygonClass.HALF_PLANE: ("m", "c3"),
}


@dataclass(frozen=True, eq=False)
class MomentumMap:
    case: PolygonClass
    breakpoints: tuple
    pivots: tuple
    labels: tuple
    rays: tuple | None
    orientation: int
    const: np.ndarray
    lin: np.ndarray
    knots: np.ndarray
    coefs: np.ndarray
    base_quad: np.ndarray = field(default_factory=lambda: np.zeros(2))
    variation: tuple = ()
    direction: tuple | None = None

    @property
    def s0(self) -> float:
        return self.labels[0]

    @property
    def sd(self) -> float:
        return self.labels[-1]

    @property
    def params(self) -> dict:
        return dict(self.variation)

    def _var_vectors(self):
        """y^2 and x*y^2 coefficient vectors contributed by the variation."""
        p = self.params
        quad = np.array(self.base_quad, dtype=float)
        xquad = np.zeros(2)
        if self.case == PolygonClass.GENERAL:
            quad = quad + p.get("c1", 0.0) * np.array(self.rays[0]) + p.get("c2", 0.0) * np.array(self.rays[1])
        elif self.case == PolygonClass.PARALLEL_RAYS:
            quad = quad + p.get("c1", 0.0) * np.array(self.rays[0])
        else:
            t = np.array(self.direction)
            quad = quad + p.get("c3", 0.0) * t
            xquad = p.get("m", 0.0) * t
        return quad, xquad

    def jets(self, x, y):
        """Closed-form jets of both components at interior points."""
        scalar = np.ndim(x) == 0 and np.ndim(y) == 0
        xa, ya = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        shape = xa.shape
        xf, yf = xa.ravel(), ya.ravel()
        acc = kernels.ray_jets_sum(xf, yf, self.knots, self.coefs)
        quad, xquad = self._var_vectors()
        out = []
        for c in range(2):
            val = acc[c, 0] + self.const[c] + self.lin[c] * xf + quad[c] * yf**2 + xquad[c] * xf * yf**2
            dx = acc[c, 1] + self.lin[c] + xquad[c] * yf**2
            dy = acc[c, 2] + 2.0 * quad[c] * yf + 2.0 * xquad[c] * xf * yf
            dxx = acc[c, 3]
            dxy = acc[c, 4] + 2.0 * xquad[c] * yf
            dyy = acc[c, 5] + 2.0 * quad[c] + 2.0 * xquad[c] * xf
            parts = [val, dx, dy, dxx, dxy, dyy]
            if scalar:
                parts = [float(p[0]) for p in parts]
            else:
                parts = [p.reshape(shape) for p in parts]
            out.append(Jet2(*parts))
        return out[0], out[1]

    def value(self, x, y):
        j1, j2 = self.jets(x, y)
        return j1.value, j2.value

    def describe(self) -> dict:
        return {
            "case": self.case.value,
            "breakpoints": list(self.breakpoints),
            "pivots": [[p.m, p.n] for p in self.pivots],
            "speeds": [("inf" if math.isinf(s) else s) for s in self.labels],
            "orientation": self.orientation,
            "variation": self.params,
        }


def match_outline(poly: LabeledPolygon, x1: float = 0.0) -> MomentumMap:
    """Momentum map whose boundary restriction traces `poly` at its label speeds.

    The first breakpoint sits at x = x1. Works in the coordinates the
    polygon is given in; normalising first is not required.
    """
    cls = classify(poly)
    if cls == PolygonClass.HALF_PLANE:
        t = np.array(poly.direction)
        n = np.array([-t[1], t[0]])
        s0 = poly.labels[0]
        base = poly.base.as_array()
        return MomentumMap(
            case=cls,
            breakpoints=(),
            pivots=(),
            labels=poly.labels,
            rays=None,
            orientation=1,
            const=base - s0 * x1 * t,
            lin=s0 * t,
            knots=np.zeros(0),
            coefs=np.zeros((0, 2)),
            base_quad=0.5 * n,
            variation=(("m", 0.0), ("c3", 0.0)),
            direction=poly.direction,
        )
    if cls not in (PolygonClass.GENERAL, PolygonClass.PARALLEL_RAYS):
        raise UnsupportedError(f"outline matching does not exist for class {cls.value}")
    if any(math.isinf(s) for s in poly.labels):
        raise UnsupportedError("infinite labels are not supported by outline matching")

    names = _VAR_NAMES[cls]
    mm = outline_map(poly.vertices, poly.labels, poly.rays, x1=x1, orientation=poly.orientation)
    return replace(mm, case=cls, variation=tuple((k, 0.0) for k in names))


def outline_map(pivots, labels, rays, x1: float = 0.0, orientation: int | None = None) -> MomentumMap:
    """Outline-matched map for an arbitrary vertex chain, without validation.

    Useful for probing non-convex outlines; `match_outline` is the checked
    entry point. Orientation defaults to the sign of the first turn.
    """
    pts = [np.array(tuple(p), dtype=float) for p in pivots]
    r0 = np.array(rays[0], dtype=float)
    r1 = np.array(rays[1], dtype=float)
    r0, r1 = r0 / np.hypot(*r0), r1 / np.hypot(*r1)
    s = [float(v) for v in labels]
    if len(s) != len(pts) + 1:
        raise ValueError("need one more label than pivots")
    xs = [float(x1)]
    for a, b, si in zip(pts, pts[1:], s[1:-1]):
        xs.append(xs[-1] + float(np.hypot(*(b - a))) / si)
    coefs = np.zeros((len(xs), 2))
    # first ray: r0*(s0/2)*(R - (x - x1)) = r0*(s0/2)*P_{x1} - r0*s0*(x - x1)
    coefs[0] += 0.5 * s[0] * r0
    lin = -s[0] * r0
    const = pts[0] + s[0] * xs[0] * r0
    for i in range(len(pts) - 1):
        w = (pts[i + 1] - pts[i]) / (2.0 * (xs[i + 1] - xs[i]))
        coefs[i] += w
        coefs[i + 1] -= w
    coefs[-1] += 0.5 * s[-1] * r1
    if orientation is None:
        nxt = pts[1] - pts[0] if len(pts) > 1 else r1
        orientation = 1 if (-r0[0] * nxt[1] + r0[1] * nxt[0]) > 0 else -1
    return MomentumMap(
        case=PolygonClass.GENERAL,
        breakpoints=tuple(xs),
        pivots=tuple(p if isinstance(p, Point2) else Point2(*p) for p in pivots),
        labels=tuple(s),
        rays=(tuple(r0), tuple(r1)),
        orientation=orientation,
        const=const,
        lin=lin,
        knots=np.array(xs),
        coefs=coefs,
        variation=(("c1", 0.0), ("c2", 0.0)),
    )


def add_variation(mm: MomentumMap, **params) -> MomentumMap:
    """Add Liouville variations; values accumulate onto existing ones.

    General: c1, c2 (y^2 along the first and last ray directions).
    ParallelRays: c1 (y^2 along the common ray direction).
    HalfPlane: m (x*y^2) and c3 (y^2), both along the boundary direction.
    """
    allowed = _VAR_NAMES[mm.case]
    current = mm.params
    for key, val in params.items():
        key = key.lower()
        if key not in allowed:
            if mm.case == PolygonClass.PARALLEL_RAYS and key == "c2":
                raise DomainError("the bounded momentum component cannot be varied")
            raise DomainError(f"parameter {key!r} not defined for case {mm.case.value}")
        val = float(val)
        if not val >= 0.0 or math.isinf(val):
            raise DomainError(f"variation parameter {key} must be finite and >= 0, got {val}")
        current[key] = current[key] + val
    return replace(mm, variation=tuple((k, current[k]) for k in allowed))


def eval(mm, x, y):  # noqa: A001 - mirrors the operation name
    """Jets (phi^1, phi^2) at interior points y > 0."""
    if np.any(np.asarray(y) <= 0):
        raise ValueError("eval requires y > 0")
    return mm.jets(x, y)


def outline_restriction(mm: MomentumMap, x: float) -> tuple[Point2, float]:
    """Boundary point (phi^1, phi^2)(x, 0) and the speed there."""
    x = float(x)
    if np.any(mm.knots == x):
        raise ValueError("speed is one-sided at a breakpoint")
    u = x - mm.knots
    val = mm.const + mm.lin * x + ((u + np.abs(u))[:, None] * mm.coefs).sum(axis=0)
    der = mm.lin + ((1.0 + np.sign(u))[:, None] * mm.coefs).sum(axis=0)
    return Point2(val[0], val[1]), float(math.hypot(der[0], der[1]))
