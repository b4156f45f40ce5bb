"""Labeled convex polygons in the momentum plane.

A polygon with d >= 1 vertices is stored as its vertex chain, two unit ray
directions (pointing away from the first and last vertex) and d + 1 labels
s_0..s_d. Label s_0 belongs to the first ray, s_i (0 < i < d) to the segment
from vertex i-1 to vertex i (0-based), and s_d to the last ray. A label of
``math.inf`` marks a missing segment.

Half-planes, strips and the whole plane carry no vertices and are described
by a tag plus a base point and boundary direction. The interior of a
half-plane lies to the left of its direction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import InputError, UnsupportedError

__all__ = [
    "Point2",
    "PolygonClass",
    "LabeledPolygon",
    "Affine2",
    "classify",
    "normalize",
    "breakpoints",
    "cone_angle",
    "polygon_from_dict",
    "polygon_to_dict",
    "load_polygon",
    "random_polygon",
]

CONVEX_TOL = 1e-12


@dataclass(frozen=True)
class Point2:
    m: float
    n: float

    def __post_init__(self):
        object.__setattr__(self, "m", float(self.m))
        object.__setattr__(self, "n", float(self.n))
        if not (math.isfinite(self.m) and math.isfinite(self.n)):
            raise InputError(f"non-finite point ({self.m}, {self.n})")

    def as_array(self) -> np.ndarray:
        return np.array([self.m, self.n])

    def __iter__(self):
        yield self.m
        yield self.n


class PolygonClass(str, Enum):
    NO_EDGES = "NoEdges"
    HALF_PLANE = "HalfPlane"
    STRIP = "Strip"
    PARALLEL_RAYS = "ParallelRays"
    GENERAL = "General"


def _cross(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _unit(v, what="direction") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (2,) or not np.all(np.isfinite(v)):
        raise InputError(f"bad {what}: {v!r}")
    nrm = math.hypot(v[0], v[1])
    if nrm == 0.0:
        raise InputError(f"zero {what}")
    return v / nrm


def _rot90(v) -> np.ndarray:
    return np.array([-v[1], v[0]])


def _check_label(s) -> float:
    s = float(s)
    if math.isnan(s) or s <= 0.0:
        raise InputError(f"labels must be positive, got {s}")
    return s


@dataclass(frozen=True)
class LabeledPolygon:
    vertices: tuple = ()
    labels: tuple = ()
    rays: tuple | None = None
    kind: str = "polygon"  # polygon | half_plane | strip | plane
    base: Point2 | None = None
    direction: tuple | None = None
    width: float | None = None
    orientation: int = field(init=False, default=0)

    def __post_init__(self):
        verts = tuple(v if isinstance(v, Point2) else Point2(*v) for v in self.vertices)
        labels = tuple(_check_label(s) for s in self.labels)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "labels", labels)
        kind = self.kind
        if kind == "polygon":
            self._init_polygon()
        elif kind in ("half_plane", "strip"):
            if verts or self.rays:
                raise InputError(f"{kind} takes no vertices or rays")
            if self.base is None or self.direction is None:
                raise InputError(f"{kind} needs base and direction")
            base = self.base if isinstance(self.base, Point2) else Point2(*self.base)
            object.__setattr__(self, "base", base)
            object.__setattr__(self, "direction", tuple(_unit(self.direction)))
            nlab = 1 if kind == "half_plane" else 2
            if len(labels) != nlab:
                raise InputError(f"{kind} needs {nlab} label(s), got {len(labels)}")
            if any(math.isinf(s) for s in labels):
                raise InputError(f"{kind} labels must be finite")
            if kind == "strip":
                if self.width is None or not float(self.width) > 0:
                    raise InputError("strip needs a positive width")
                object.__setattr__(self, "width", float(self.width))
            object.__setattr__(self, "orientation", 1)
        elif kind == "plane":
            if verts or labels or self.rays:
                raise InputError("the plane has no boundary data")
            object.__setattr__(self, "orientation", 1)
        else:
            raise InputError(f"unknown polygon kind {kind!r}")

    def _init_polygon(self):
        verts, labels = self.vertices, self.labels
        d = len(verts)
        if d < 1:
            raise InputError("a polygon needs at least one vertex (use a tag for d = 0)")
        if len(labels) != d + 1:
            raise InputError(f"{d} vertices need {d + 1} labels, got {len(labels)}")
        if math.isinf(labels[0]) or math.isinf(labels[-1]):
            raise InputError("ray labels must be finite")
        if self.rays is None or len(self.rays) != 2:
            raise InputError("two ray directions are required")
        r0, r1 = _unit(self.rays[0], "ray"), _unit(self.rays[1], "ray")
        object.__setattr__(self, "rays", (tuple(r0), tuple(r1)))
        pts = [v.as_array() for v in verts]
        for a, b in zip(pts, pts[1:]):
            if np.allclose(a, b, rtol=0, atol=0):
                raise InputError("consecutive vertices coincide")
        edges = [-r0] + [b - a for a, b in zip(pts, pts[1:])] + [r1]
        turns = []
        total = 0.0
        for a, b in zip(edges, edges[1:]):
            na, nb = np.hypot(*a), np.hypot(*b)
            c = _cross(a, b) / (na * nb)
            turns.append(c)
            total += math.atan2(_cross(a, b), float(a @ b))
        if all(c > CONVEX_TOL for c in turns):
            orient = 1
        elif all(c < -CONVEX_TOL for c in turns):
            orient = -1
        else:
            raise InputError("boundary is not strictly convex (turn signs vary or edges are collinear)")
        if abs(total) > math.pi + 1e-9:
            raise InputError("boundary turns by more than pi; rays cross")
        if abs(total) > math.pi - 1e-9 and _cross(r0, r1) == 0 and float(r0 @ r1) < 0:
            raise InputError("anti-parallel rays")
        object.__setattr__(self, "orientation", orient)

    @property
    def d(self) -> int:
        return len(self.vertices)

    def edge_directions(self) -> list:
        """Unit traversal direction of every edge, rays included."""
        r0, r1 = np.array(self.rays[0]), np.array(self.rays[1])
        pts = [v.as_array() for v in self.vertices]
        out = [-r0]
        for a, b in zip(pts, pts[1:]):
            out.append((b - a) / np.hypot(*(b - a)))
        out.append(r1)
        return out

    def _edge_lines(self):
        """(point, inward unit normal) for every boundary line."""
        if self.kind == "plane":
            return []
        if self.kind in ("half_plane", "strip"):
            t = np.array(self.direction)
            n = _rot90(t)
            b = self.base.as_array()
            lines = [(b, n)]
            if self.kind == "strip":
                lines.append((b + self.width * n, -n))
            return lines
        pts = [v.as_array() for v in self.vertices]
        anchors = [pts[0]] + pts[:-1] + [pts[-1]]
        return [(a, self.orientation * _rot90(e)) for a, e in zip(anchors, self.edge_directions())]

    def inner_distance(self, points) -> np.ndarray:
        """Signed distance to the boundary, positive inside (convexity makes
        this the minimum over the supporting lines)."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        lines = self._edge_lines()
        if not lines:
            return np.full(len(P), np.inf)
        return np.min([(P - a) @ n for a, n in lines], axis=0)

    def transformed(self, T: "Affine2") -> "LabeledPolygon":
        """Image under an affine map; labels follow the edge speed."""
        L = T.linear
        if self.kind == "plane":
            return self
        if self.kind in ("half_plane", "strip"):
            t = np.array(self.direction)
            scale = float(np.hypot(*(L @ t)))
            base = T.apply(self.base)
            direc = L @ t
            width = None
            if self.kind == "strip":
                # distance between the image lines
                p0 = self.base.as_array()
                p1 = p0 + self.width * _rot90(t)
                q0, q1 = T.apply(p0).as_array(), T.apply(p1).as_array()
                width = abs(_cross(_unit(direc), q1 - q0))
            if np.linalg.det(L) < 0:
                # keep the interior on the left
                direc = -direc
                if self.kind == "strip":
                    base = T.apply(self.base.as_array() + self.width * _rot90(t))
            return LabeledPolygon(
                kind=self.kind,
                base=base,
                direction=tuple(direc),
                width=width,
                labels=tuple(s * scale for s in self.labels),
            )
        dirs = self.edge_directions()
        labels = tuple(s * float(np.hypot(*(L @ e))) for s, e in zip(self.labels, dirs))
        return LabeledPolygon(
            vertices=tuple(T.apply(v) for v in self.vertices),
            labels=labels,
            rays=(tuple(L @ np.array(self.rays[0])), tuple(L @ np.array(self.rays[1]))),
        )


@dataclass(frozen=True)
class Affine2:
    linear: np.ndarray
    translation: Point2 = Point2(0.0, 0.0)

    def __post_init__(self):
        L = np.array(self.linear, dtype=float).reshape(2, 2)
        L.setflags(write=False)
        object.__setattr__(self, "linear", L)
        if not isinstance(self.translation, Point2):
            object.__setattr__(self, "translation", Point2(*self.translation))
        det = float(np.linalg.det(L))
        if not math.isfinite(det) or abs(det) < 1e-300:
            raise InputError("affine map must be invertible")

    @classmethod
    def identity(cls) -> "Affine2":
        return cls(np.eye(2))

    def apply(self, p) -> Point2:
        v = self.linear @ np.asarray(tuple(p), dtype=float) + self.translation.as_array()
        return Point2(v[0], v[1])

    def compose(self, other: "Affine2") -> "Affine2":
        """self after other."""
        return Affine2(self.linear @ other.linear, self.apply(other.translation))

    def inverse(self) -> "Affine2":
        Li = np.linalg.inv(self.linear)
        t = -Li @ self.translation.as_array()
        return Affine2(Li, Point2(*t))


def classify(poly: LabeledPolygon) -> PolygonClass:
    if poly.kind == "plane":
        return PolygonClass.NO_EDGES
    if poly.kind == "half_plane":
        return PolygonClass.HALF_PLANE
    if poly.kind == "strip":
        return PolygonClass.STRIP
    r0, r1 = poly.rays
    if abs(_cross(r0, r1)) <= CONVEX_TOL and r0[0] * r1[0] + r0[1] * r1[1] > 0:
        return PolygonClass.PARALLEL_RAYS
    return PolygonClass.GENERAL


def normalize(poly: LabeledPolygon) -> tuple[Affine2, LabeledPolygon]:
    """Affine map into class normal form and the image polygon.

    General: first ray onto the positive phi^1-axis, last ray onto the
    positive phi^2-axis, their lines meeting at the origin. Parallel rays:
    both rays along +phi^1 with the first vertex at the origin. Half-plane:
    the set {phi^2 >= 0}.
    """
    cls = classify(poly)
    if cls == PolygonClass.GENERAL:
        r0, r1 = np.array(poly.rays[0]), np.array(poly.rays[1])
        M = np.column_stack([r0, r1])
        L = np.linalg.inv(M)
        p1 = poly.vertices[0].as_array()
        pd = poly.vertices[-1].as_array()
        # p1 + a r0 = pd + b r1
        a, _b = np.linalg.solve(np.column_stack([r0, -r1]), pd - p1)
        q = p1 + a * r0
        T = Affine2(L, Point2(*(-L @ q)))
    elif cls == PolygonClass.PARALLEL_RAYS:
        r = np.array(poly.rays[0])
        L = np.linalg.inv(np.column_stack([r, _rot90(r)]))
        T = Affine2(L, Point2(*(-L @ poly.vertices[0].as_array())))
    elif cls == PolygonClass.HALF_PLANE:
        t = np.array(poly.direction)
        L = np.linalg.inv(np.column_stack([t, _rot90(t)]))
        T = Affine2(L, Point2(*(-L @ poly.base.as_array())))
    else:
        raise UnsupportedError(f"no normal form for class {cls.value}")
    return T, poly.transformed(T)


def breakpoints(poly: LabeledPolygon, x1: float = 0.0) -> list[float]:
    """Lipschitz points x_1 < ... < x_d on the boundary line."""
    if poly.kind != "polygon":
        raise UnsupportedError("breakpoints need at least one vertex")
    xs = [float(x1)]
    pts = [v.as_array() for v in poly.vertices]
    for i, (a, b) in enumerate(zip(pts, pts[1:]), start=1):
        s = poly.labels[i]
        if math.isinf(s):
            raise UnsupportedError("infinite label on an interior edge")
        xs.append(xs[-1] + float(np.hypot(*(b - a))) / s)
    return xs


def cone_angle(label: float, angle_range: float) -> float:
    if not (label > 0 and angle_range > 0):
        raise InputError("label and angle range must be positive")
    return angle_range / label


def _parse_label(s):
    if isinstance(s, str):
        if s.strip().lower() in ("inf", "infinity", "+inf"):
            return math.inf
        raise InputError(f"bad label {s!r}")
    if isinstance(s, bool) or not isinstance(s, (int, float)):
        raise InputError(f"bad label {s!r}")
    return float(s)


def _pair(v, what):
    if not isinstance(v, Sequence) or len(v) != 2:
        raise InputError(f"{what} must be a pair of numbers")
    try:
        return (float(v[0]), float(v[1]))
    except (TypeError, ValueError):
        raise InputError(f"{what} must be a pair of numbers") from None


def polygon_from_dict(data: dict) -> LabeledPolygon:
    if not isinstance(data, dict):
        raise InputError("polygon JSON must be an object")
    kind = data.get("class", "polygon")
    labels = data.get("labels", [])
    if not isinstance(labels, list):
        raise InputError("labels must be a list")
    labels = [_parse_label(s) for s in labels]
    if kind == "polygon":
        verts = data.get("vertices")
        rays = data.get("rays")
        if not isinstance(verts, list) or not isinstance(rays, list):
            raise InputError("polygon JSON needs 'vertices' and 'rays' lists")
        return LabeledPolygon(
            vertices=tuple(_pair(v, "vertex") for v in verts),
            labels=tuple(labels),
            rays=tuple(_pair(r, "ray") for r in rays),
        )
    if kind in ("half_plane", "strip"):
        return LabeledPolygon(
            kind=kind,
            base=_pair(data.get("base"), "base"),
            direction=_pair(data.get("direction"), "direction"),
            width=data.get("width"),
            labels=tuple(labels),
        )
    if kind == "plane":
        return LabeledPolygon(kind="plane")
    raise InputError(f"unknown class {kind!r}")


def _label_out(s):
    return "inf" if math.isinf(s) else s


def polygon_to_dict(poly: LabeledPolygon) -> dict:
    if poly.kind == "polygon":
        return {
            "vertices": [[v.m, v.n] for v in poly.vertices],
            "labels": [_label_out(s) for s in poly.labels],
            "rays": [list(r) for r in poly.rays],
        }
    out = {"class": poly.kind, "labels": list(poly.labels)}
    if poly.kind != "plane":
        out["base"] = [poly.base.m, poly.base.n]
        out["direction"] = list(poly.direction)
    if poly.kind == "strip":
        out["width"] = poly.width
    return out


def load_polygon(path) -> LabeledPolygon:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from None
    return polygon_from_dict(data)


def random_polygon(rng, d_max: int = 6, label_range=(0.1, 10.0), parallel: bool = False) -> LabeledPolygon:
    """Random strictly convex unbounded polygon with 1 <= d <= d_max vertices.

    Labels are log-uniform in `label_range`; traversal orientation is random.
    With parallel=True the two rays point the same way (needs d >= 2).
    """
    lo = 2 if parallel else 1
    d = int(rng.integers(lo, d_max + 1))
    total = math.pi if parallel else float(rng.uniform(0.15, 0.9)) * math.pi
    w = rng.dirichlet(np.ones(d)) * 0.8 + 0.2 / d
    turns = w * total
    sign = 1.0 if rng.random() < 0.5 else -1.0
    theta = float(rng.uniform(0, 2 * math.pi))
    dirs = [theta]
    for t in turns:
        dirs.append(dirs[-1] + sign * t)
    e = [np.array([math.cos(a), math.sin(a)]) for a in dirs]
    p = [rng.uniform(-1, 1, 2)]
    for i in range(1, d):
        p.append(p[-1] + rng.uniform(0.3, 3.0) * e[i])
    labels = np.exp(rng.uniform(math.log(label_range[0]), math.log(label_range[1]), d + 1))
    rays = (tuple(-e[0]), tuple(e[-1]))
    if parallel:
        rays = (rays[0], rays[0])
    return LabeledPolygon(vertices=tuple(map(tuple, p)), labels=tuple(labels), rays=rays)
