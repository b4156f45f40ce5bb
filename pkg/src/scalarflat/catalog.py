"""Closed-form reference examples with polygons and expected values.

Jets come from symbolic differentiation (sympy) of the displayed momentum
functions, so they are independent of the hand-written jets in
``momentum``. Where a closed-form curvature is available it is carried as
a separate expression and checked against the generic numerical route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
import sympy as sym

from . import geometry, pdecheck
from .errors import DegenerateMapError, DomainError, InputError, StepError
from .momentum import Jet2
from .polygon import LabeledPolygon, Point2

__all__ = ["ClosedFormMap", "Expectation", "NamedExample", "ids", "get", "verify", "describe"]

X, Y = sym.symbols("x y", real=True)
R0 = sym.sqrt(X**2 + Y**2)


def _r(a):
    return sym.sqrt((X - a) ** 2 + Y**2)


class ClosedFormMap:
    """Momentum pair given by symbolic expressions in x, y."""

    def __init__(self, phi1, phi2, orientation: int, K=None, lam=None):
        self.exprs = (sym.sympify(phi1), sym.sympify(phi2))
        self.orientation = orientation
        funcs = []
        for e in self.exprs:
            parts = [e, e.diff(X), e.diff(Y), e.diff(X, 2), e.diff(X, Y), e.diff(Y, 2)]
            funcs.append([sym.lambdify((X, Y), p, "numpy") for p in parts])
        self._funcs = funcs
        if lam is None:
            p1, p2 = self.exprs
            lam = orientation * (p1.diff(X) * p2.diff(Y) - p1.diff(Y) * p2.diff(X)) / Y
            self.lam_is_closed_form = False
        else:
            self.lam_is_closed_form = True
        self.lam_expr = sym.sympify(lam)
        if K is None:
            ll = sym.log(self.lam_expr)
            K = -(ll.diff(X, 2) + ll.diff(Y, 2)) / (2 * self.lam_expr)
            self.K_is_closed_form = False
        else:
            self.K_is_closed_form = True
        self.K_expr = sym.sympify(K)
        self._lam = sym.lambdify((X, Y), self.lam_expr, "numpy")
        self._K = sym.lambdify((X, Y), self.K_expr, "numpy")

    def jets(self, x, y):
        xa, ya = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        scalar = xa.ndim == 0
        out = []
        for fs in self._funcs:
            parts = []
            for f in fs:
                v = np.broadcast_to(np.asarray(f(xa, ya), dtype=float), xa.shape)
                parts.append(float(v) if scalar else np.array(v))
            out.append(Jet2(*parts))
        return out[0], out[1]

    def value(self, x, y):
        j1, j2 = self.jets(x, y)
        return j1.value, j2.value

    def K(self, x, y):
        return self._K(np.asarray(x, dtype=float), np.asarray(y, dtype=float)) + 0.0

    def lam(self, x, y):
        return self._lam(np.asarray(x, dtype=float), np.asarray(y, dtype=float)) + 0.0


@dataclass(frozen=True)
class Expectation:
    """A checkable claim: `quantity` at `location` compared to `value`.

    compare: "abs" (|q - value| <= tol), "gt" (q > value), "lt" (q < value),
    "range" (value[0] < q < value[1]) or "grows" (|q| increases along the
    listed locations, each larger than `value`).
    """

    description: str
    quantity: str
    location: tuple
    value: object
    tol: float = 0.0
    compare: str = "abs"


@dataclass
class NamedExample:
    id: str
    params: dict
    momentum: ClosedFormMap | None
    polygon: LabeledPolygon | None
    expectations: list = field(default_factory=list)
    flags: tuple = ()
    notes: str = ""
    hessian: Callable | None = None
    speeds: tuple = ()  # (x on the boundary, expected speed) pairs

    def metadata(self) -> dict:
        from .polygon import polygon_to_dict

        return {
            "id": self.id,
            "params": self.params,
            "flags": list(self.flags),
            "notes": self.notes,
            "orientation": None if self.momentum is None else self.momentum.orientation,
            "momentum": None
            if self.momentum is None
            else [str(e) for e in self.momentum.exprs],
            "polygon": None if self.polygon is None else polygon_to_dict(self.polygon),
            "expectations": [
                {
                    "description": e.description,
                    "quantity": e.quantity,
                    "location": list(e.location),
                    "value": e.value if not isinstance(e.value, tuple) else list(e.value),
                    "tol": e.tol,
                    "compare": e.compare,
                }
                for e in self.expectations
            ],
        }


_DEFAULTS = {
    "taub_nut": {"k": 0.0},
    "half_plane_exceptional": {},
    "lebrun_ok": {"k": 2},
    "s2xh2_elliptic": {},
    "s2xh2_parabolic": {},
    "s2xh2_hyperbolic": {},
    "two_ended": {"M": 1.0, "k": 0.0},
    "disk_nonpolygon": {},
    "lipschitz_pathology": {"s0": 1.0, "s1": 2.0, "C": 0.0},
    "removed_edge_ray": {},
    "removed_edge_half_strip": {},
    "removed_edge_segment": {},
}


def ids() -> list[str]:
    return list(_DEFAULTS)


def _unit_k(k):
    if not -1.0 <= k <= 1.0:
        raise DomainError(f"k must lie in [-1, 1], got {k}")


def _taub_nut(k):
    _unit_k(k)
    s2 = sym.sqrt(2)
    kk = sym.nsimplify(k)
    phi1 = (R0 - X) / s2 + (1 + kk) * Y**2 / s2
    phi2 = (X + R0) / s2 + (1 - kk) * Y**2 / s2
    lam = (1 + 2 * (kk * X + R0)) / R0
    K = (-1 + 2 * kk * (X + kk * R0)) / (1 + 2 * (kk * X + R0)) ** 3
    mm = ClosedFormMap(phi1, phi2, -1, K=K, lam=lam)
    poly = LabeledPolygon(vertices=[(0, 0)], labels=[math.sqrt(2)] * 2, rays=[(1, 0), (0, 1)])
    exps = [
        Expectation("K at (0,1)", "K", (0.0, 1.0), (2 * k * k - 1) / 27, 1e-6),
        Expectation("lambda at (0,1)", "lambda", (0.0, 1.0), 1 + 2 * (0 + 1.0), 1e-10),
        Expectation("numerical K matches closed form", "K_vs_closed", (0.7, 0.4), 0.0, 1e-6),
        Expectation("numerical K matches closed form", "K_vs_closed", (-1.3, 2.1), 0.0, 1e-6),
    ]
    if k == -1.0:
        exps.append(
            Expectation(
                "no curvature falloff along the positive x-axis",
                "K_ratio_ray",
                (1.0, 100.0, 0.01),
                2.0,
                compare="lt",
            )
        )
    return NamedExample(
        "taub_nut",
        {"k": k},
        mm,
        poly,
        exps,
        notes="momentum functions carry (1+k) on phi^1 so that the metric and curvature "
        "closed forms hold; the opposite assignment flips the sign of k in both",
        speeds=((-1.0, math.sqrt(2)), (1.0, math.sqrt(2))),
    )


def _half_plane_exceptional():
    mm = ClosedFormMap(X + X * Y**2, Y**2 / 2, 1)
    poly = LabeledPolygon(kind="half_plane", base=(0, 0), direction=(1, 0), labels=[1.0])
    exps = [
        Expectation("lambda = 1 + y^2", "lambda", (0.5, 2.0), 5.0, 1e-10),
        Expectation("phi at (2,3)", "phi1", (2.0, 3.0), 20.0, 1e-12),
        Expectation("phi at (2,3)", "phi2", (2.0, 3.0), 4.5, 1e-12),
    ]
    return NamedExample("half_plane_exceptional", {"M": 1.0}, mm, poly, exps, speeds=((0.5, 1.0),))


def _lebrun(k):
    if k != int(k) or k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    k = int(k)
    h = sym.Rational(k, 2)
    phi1 = sym.Rational(1, 2) * (1 - h + (_r(h) + _r(-h)) / 2)
    phi2 = sym.Rational(1, 2) * (X + (sym.Rational(1, 2) - sym.Rational(1, k)) * (_r(h) - _r(-h)))
    mm = ClosedFormMap(phi1, phi2, -1)
    s = 1 / math.sqrt(2)
    poly = LabeledPolygon(vertices=[(0.5, -0.5), (0.5, 0.5)], labels=[s, 1.0 / k, s], rays=[(1, -1), (1, 1)])
    speeds = ((-float(k), s), (0.0, 1.0 / k), (float(k), s))
    exps = [Expectation(f"boundary speed at x={x:g}", "speed", (x,), v, 1e-12) for x, v in speeds]
    return NamedExample("lebrun_ok", {"k": k}, mm, poly, exps, speeds=speeds)


def _elliptic():
    phi1 = (-1 + R0 + _r(1)) / 2
    phi2 = (1 - R0 + _r(1)) / 2
    mm = ClosedFormMap(phi1, phi2, 1)
    poly = LabeledPolygon(vertices=[(0, 1), (0, 0)], labels=[1.0, 1.0, 1.0], rays=[(1, 0), (1, 0)])
    speeds = ((-1.0, 1.0), (0.5, 1.0), (2.0, 1.0))
    exps = [Expectation(f"boundary speed at x={x:g}", "speed", (x,), v, 1e-10) for x, v in speeds]
    return NamedExample("s2xh2_elliptic", {}, mm, poly, exps, speeds=speeds)


def _parabolic():
    mm = ClosedFormMap(R0 / 2, (1 + X / R0) / 2, -1)
    poly = LabeledPolygon(vertices=[(0, 0), (0, 1)], labels=[0.5, math.inf, 0.5], rays=[(1, 0), (1, 0)])
    speeds = ((-1.0, 0.5), (1.0, 0.5))
    exps = [Expectation(f"boundary speed at x={x:g}", "speed", (x,), v, 1e-10) for x, v in speeds]
    return NamedExample(
        "s2xh2_parabolic", {}, mm, poly, exps, notes="segment between the rays has infinite label", speeds=speeds
    )


def _hyperbolic():
    rho4 = (X**2 + Y**2) ** 2
    root = sym.sqrt((1 - rho4) ** 2 + 4 * Y**2)
    phi1 = sym.sqrt(1 - rho4 + root) / sym.sqrt(2)
    phi2 = sym.sqrt(-1 + rho4 + root) / sym.sqrt(2)
    mm = ClosedFormMap(phi1, phi2, 1)
    exps = [
        Expectation(
            "displayed functions do not solve the degenerate equation", "residual", (0.3, 0.4), 1e-6, compare="gt"
        )
    ]
    return NamedExample(
        "s2xh2_hyperbolic",
        {},
        mm,
        None,
        exps,
        flags=("ramified", "non-solution"),
        notes="strip polygon; the half-plane parameter is ramified (2-to-1 branch point). "
        "The displayed pair fails y*Lap f - f_y = 0 by O(1), so residual checks are skipped",
    )


def _two_ended(M, k):
    _unit_k(k)
    if M < 0:
        raise DomainError("M must be >= 0")
    Ms, kk = sym.nsimplify(M), sym.nsimplify(k)
    phi1 = (X + R0) / 2 + (-1 + X / R0) / 2 + Ms * (1 - kk) / 2 * Y**2
    phi2 = (-X + R0) / 2 + (1 - X / R0) / 2 + Ms * (1 + kk) / 2 * Y**2
    mm = ClosedFormMap(phi1, phi2, 1)
    poly = LabeledPolygon(vertices=[(-1, 1), (0, 0)], labels=[1.0, math.inf, 1.0], rays=[(0, 1), (1, 0)])
    speeds = ((-1.0, 1.0), (1.0, 1.0))
    exps = [Expectation(f"boundary speed at x={x:g}", "speed", (x,), v, 1e-10) for x, v in speeds]
    return NamedExample(
        "two_ended",
        {"M": M, "k": k},
        mm,
        poly,
        exps,
        notes="semi-open polygon: the segment from (-1,1) to (0,0) has infinite label",
        speeds=speeds,
    )


def _disk_hessian(p):
    a, b = (p.m, p.n) if isinstance(p, Point2) else p
    q = 1.0 - a * a - b * b
    if not q > 0:
        raise DomainError("outside the unit disk")
    return np.array([[1 + a * a - b * b, 2 * a * b], [2 * a * b, 1 - a * a + b * b]]) / (q * q)


def _disk():
    exps = [
        Expectation("Hessian at the origin is the identity", "hessian", (0.0, 0.0), ((1.0, 0.0), (0.0, 1.0)), 1e-14),
        Expectation("scalar curvature at the origin", "R", (0.0, 0.0), 8.0, 1e-3),
        Expectation("scalar curvature near the rim", "R", (0.99, 0.0), (-3.05, 0.0), compare="range"),
    ]
    return NamedExample(
        "disk_nonpolygon",
        {},
        None,
        None,
        exps,
        flags=("not-a-polygon",),
        notes="symplectic potential u = -1/2 log(1 - |phi|^2); off-diagonal Hessian entry is 2 phi1 phi2 / (1-|phi|^2)^2",
        hessian=_disk_hessian,
    )


def _lipschitz(s0, s1, C):
    if not (s0 > 0 and s1 > 0) or s0 == s1:
        raise DomainError("need positive s0 != s1")
    if C < 0:
        raise DomainError("C must be >= 0")
    a, b, c = sym.nsimplify(s0), sym.nsimplify(s1), sym.nsimplify(C)
    phi1 = a / 2 * (X - R0) + b / 2 * (X + R0) + c * X * Y**2
    mm = ClosedFormMap(phi1, Y**2 / 2, 1)
    poly = LabeledPolygon(kind="half_plane", base=(0, 0), direction=(1, 0), labels=[float(s0)])
    eps = [1e-3 / 2**i for i in range(4)]
    exps = [
        Expectation("curvature blow-up at the Lipschitz point", "K", (1e-3, 1e-3), 1e3, compare="abs_gt"),
        Expectation("|K(e,e)| increases as e halves", "K", tuple(eps), 1e3, compare="grows"),
    ]
    return NamedExample(
        "lipschitz_pathology",
        {"s0": s0, "s1": s1, "C": C},
        mm,
        poly,
        exps,
        flags=("pathological",),
        notes="boundary speed jumps from s0 to s1 at the origin without a direction change",
        speeds=((-1.0, float(s0)), (1.0, float(s1))),
    )


def _removed(kind):
    if kind == "ray":
        mm = ClosedFormMap(X + R0, Y**2, 1)
        speeds = ((-1.0, 0.0), (1.0, 2.0))
    elif kind == "half_strip":
        mm = ClosedFormMap(Y**2, (1 - X / R0) / 2, 1)
        speeds = ()
    else:
        mm = ClosedFormMap(X + X / R0, Y**2, 1)
        speeds = ((-1.0, 1.0), (1.0, 1.0))
    eps = [1e-2 / 2**i for i in range(4)]
    exps = [Expectation("curvature unbounded near the origin", "K", tuple(eps), 1.0, compare="grows")]
    return NamedExample(
        f"removed_edge_{kind}",
        {},
        mm,
        None,
        exps,
        flags=("pathological",),
        speeds=speeds,
    )


@lru_cache(maxsize=64)
def _build(id_, key):
    p = dict(key)
    if id_ == "taub_nut":
        return _taub_nut(float(p["k"]))
    if id_ == "half_plane_exceptional":
        return _half_plane_exceptional()
    if id_ == "lebrun_ok":
        return _lebrun(p["k"])
    if id_ == "s2xh2_elliptic":
        return _elliptic()
    if id_ == "s2xh2_parabolic":
        return _parabolic()
    if id_ == "s2xh2_hyperbolic":
        return _hyperbolic()
    if id_ == "two_ended":
        return _two_ended(float(p["M"]), float(p["k"]))
    if id_ == "disk_nonpolygon":
        return _disk()
    if id_ == "lipschitz_pathology":
        return _lipschitz(float(p["s0"]), float(p["s1"]), float(p["C"]))
    if id_.startswith("removed_edge_"):
        return _removed(id_[len("removed_edge_"):])
    raise InputError(f"unknown catalog id {id_!r}")


def get(id_: str, **params) -> NamedExample:
    if id_ not in _DEFAULTS:
        raise InputError(f"unknown catalog id {id_!r}; known: {', '.join(_DEFAULTS)}")
    full = dict(_DEFAULTS[id_])
    for k, v in params.items():
        if v is None:
            continue
        if k not in full:
            raise InputError(f"{id_} takes no parameter {k!r}")
        full[k] = v
    return _build(id_, tuple(sorted(full.items())))


def describe(id_: str, **params) -> dict:
    return get(id_, **params).metadata()


def _boundary_speed(mm, x):
    # one-sided limit of |d phi / dx| at y -> 0
    j1, j2 = mm.jets(x, 1e-12)
    return math.hypot(j1.dx, j2.dx)


def _quantity(ex, e: Expectation, h):
    mm = ex.momentum
    loc = e.location
    q = e.quantity
    if q == "K":
        if e.compare == "grows":
            return [abs(float(mm.K(t, t))) for t in loc]
        return float(mm.K(*loc))
    if q == "K_vs_closed":
        return abs(geometry.gaussian_curvature(mm, *loc, h=h) - float(mm.K(*loc)))
    if q == "lambda":
        return float(geometry.conformal_factor(mm, *loc))
    if q in ("phi1", "phi2"):
        return mm.value(*loc)[0 if q == "phi1" else 1]
    if q == "speed":
        return _boundary_speed(mm, loc[0])
    if q == "residual":
        j1, j2 = mm.jets(*loc)
        return max(abs(pdecheck.residual(j1, loc[1])), abs(pdecheck.residual(j2, loc[1])))
    if q == "R":
        return geometry.abreu_scalar(ex.hessian, loc, h=h)
    if q == "hessian":
        return np.asarray(ex.hessian(loc))
    if q == "K_ratio_ray":
        x0, x1, yy = loc
        xs = np.geomspace(x0, x1, 25)
        ks = np.abs(mm.K(xs, yy))
        return float(max(ks.max() / ks[0], ks[0] / ks.min()))
    raise ValueError(f"unknown quantity {q}")


def _judge(e: Expectation, got) -> bool:
    c = e.compare
    if c == "abs":
        if isinstance(e.value, tuple):
            return bool(np.max(np.abs(np.asarray(got) - np.asarray(e.value))) <= e.tol)
        return abs(got - e.value) <= e.tol
    if c == "gt":
        return got > e.value
    if c == "abs_gt":
        return abs(got) > e.value
    if c == "lt":
        return got < e.value
    if c == "range":
        return e.value[0] < got < e.value[1]
    if c == "grows":
        return got[0] > e.value and all(b > a for a, b in zip(got, got[1:]))
    raise ValueError(f"unknown comparison {c}")


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def verify(id_: str, n_points: int = 1000, seed: int = 0, h: float = 1e-3, tol: float = 1e-10, **params) -> dict:
    """Run residual, label and expectation checks; failures are report content."""
    ex = get(id_, **params)
    checks = []
    mm = ex.momentum
    if mm is not None:
        if "non-solution" in ex.flags:
            checks.append({"name": "residual", "status": "skipped", "detail": "flagged non-solution / ramified"})
        else:
            rng = np.random.default_rng(seed)
            xs = rng.uniform(-5, 5, n_points)
            ys = rng.uniform(0.01, 5, n_points)
            j1, j2 = mm.jets(xs, ys)
            worst = 0.0
            for j in (j1, j2):
                r = np.abs(pdecheck.residual(j, ys)) / (1 + np.hypot(j.dx, j.dy))
                worst = max(worst, float(np.max(r)))
            checks.append({"name": "residual", "status": "pass" if worst <= tol else "fail", "value": worst, "tol": tol})
        if "pathological" not in ex.flags and "non-solution" not in ex.flags:
            try:
                rng = np.random.default_rng(seed + 1)
                xs = rng.uniform(-3, 3, 50)
                ys = rng.uniform(0.05, 3, 50)
                lam = geometry.conformal_factor(mm, xs, ys)
                checks.append({"name": "orientation", "status": "pass", "value": float(lam.min())})
            except DegenerateMapError as exc:
                checks.append({"name": "orientation", "status": "fail", "detail": str(exc)})
    for e in ex.expectations:
        try:
            got = _quantity(ex, e, h)
            ok = _judge(e, got)
            checks.append(
                {
                    "name": e.description,
                    "status": "pass" if ok else "fail",
                    "value": _jsonable(got),
                    "expected": _jsonable(e.value),
                    "tol": e.tol,
                    "compare": e.compare,
                }
            )
        except (DegenerateMapError, StepError, DomainError, ArithmeticError) as exc:
            checks.append({"name": e.description, "status": "fail", "detail": str(exc)})
    passed = all(c["status"] != "fail" for c in checks)
    return {"id": ex.id, "params": ex.params, "flags": list(ex.flags), "passed": passed, "checks": checks}
