import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scalarflat.errors import InputError, UnsupportedError
from scalarflat.polygon import (
    Affine2,
    LabeledPolygon,
    Point2,
    PolygonClass,
    breakpoints,
    classify,
    cone_angle,
    load_polygon,
    normalize,
    polygon_from_dict,
    polygon_to_dict,
    random_polygon,
)

QUARTER = LabeledPolygon(vertices=[(0, 0)], labels=[1.0, 2.0], rays=[(1, 0), (0, 1)])
LEBRUN = LabeledPolygon(vertices=[(0.5, -0.5), (0.5, 0.5)], labels=[2**-0.5, 0.5, 2**-0.5], rays=[(1, -1), (1, 1)])


def same_up_to_row_scaling(L, M):
    for a, b in zip(np.asarray(L), np.asarray(M)):
        c = float(a @ b) / float(b @ b)
        if not (c > 0 and np.allclose(a, c * b, atol=1e-12)):
            return False
    return True


def test_classify_examples():
    assert classify(QUARTER) == PolygonClass.GENERAL
    par = LabeledPolygon(vertices=[(0, 0), (0, 1)], labels=[1, 1, 1], rays=[(1, 0), (1, 0)])
    assert classify(par) == PolygonClass.PARALLEL_RAYS
    hp = LabeledPolygon(kind="half_plane", base=(0, 0), direction=(1, 0), labels=[1.0])
    assert classify(hp) == PolygonClass.HALF_PLANE
    strip = LabeledPolygon(kind="strip", base=(0, 0), direction=(1, 0), width=1.0, labels=[1.0, 1.0])
    assert classify(strip) == PolygonClass.STRIP
    assert classify(LabeledPolygon(kind="plane")) == PolygonClass.NO_EDGES


@pytest.mark.parametrize(
    "verts, rays",
    [
        ([(0, 0), (1, 0), (2, 1), (3, 0)], [(-1, 0), (1, -1)]),  # turns both ways
        ([(0, 0), (1, 0)], [(-1, 0), (1, 0)]),  # collinear edges
        ([(0, 0)], [(1, 0), (-1, 0)]),  # anti-parallel rays
        ([(0, 0), (1, 1), (0, 2)], [(1, 0), (1, 0)]),  # folds back between parallel rays
    ],
)
def test_nonconvex_rejected(verts, rays):
    with pytest.raises(InputError):
        LabeledPolygon(vertices=verts, labels=[1.0] * (len(verts) + 1), rays=rays)


@pytest.mark.parametrize("labels", [[0.0, 1.0], [-1.0, 1.0], [math.nan, 1.0], [math.inf, 1.0], [1.0]])
def test_bad_labels(labels):
    with pytest.raises(InputError):
        LabeledPolygon(vertices=[(0, 0)], labels=labels, rays=[(1, 0), (0, 1)])


def test_orientation_sign():
    assert QUARTER.orientation == -1
    flipped = LabeledPolygon(vertices=[(0, 0)], labels=[1.0, 1.0], rays=[(0, 1), (1, 0)])
    assert flipped.orientation == 1


def test_normalize_wedge():
    wedge = LabeledPolygon(vertices=[(0, 0)], labels=[1.0, 1.0], rays=[(1, 0), (1, 1)])
    T, img = normalize(wedge)
    assert same_up_to_row_scaling(T.linear, [[1, -1], [0, 1]])
    assert np.allclose(img.rays, [(1, 0), (0, 1)], atol=1e-15)
    assert np.allclose(T.translation.as_array(), 0.0)


def test_normalize_quarter_plane_is_identity():
    T, img = normalize(QUARTER)
    assert np.allclose(T.linear, np.eye(2)) and np.allclose(T.translation.as_array(), 0.0)
    assert img.labels == QUARTER.labels


def test_normalize_lebrun():
    T, img = normalize(LEBRUN)
    assert same_up_to_row_scaling(T.linear, [[1, -1], [1, 1]])
    assert np.allclose(T.translation.as_array(), 0.0, atol=1e-15)
    assert np.allclose(img.rays, [(1, 0), (0, 1)], atol=1e-15)


def test_label_transformation_rule(rng):
    poly = random_polygon(rng, d_max=5)
    T, img = normalize(poly)
    dirs = poly.edge_directions()
    for s, s_new, e in zip(poly.labels, img.labels, dirs):
        assert s_new == pytest.approx(s * np.linalg.norm(T.linear @ e), rel=1e-12)


def test_normalize_idempotent(rng):
    for _ in range(20):
        poly = random_polygon(rng, parallel=bool(rng.random() < 0.3))
        T1, n1 = normalize(poly)
        T2, n2 = normalize(n1)
        assert np.allclose(T2.linear, np.diag(np.diag(T2.linear)), atol=1e-9)
        assert np.all(np.diag(T2.linear) > 0)
        assert np.allclose(T2.translation.as_array(), 0.0, atol=1e-9)


def test_normalize_half_plane():
    hp = LabeledPolygon(kind="half_plane", base=(1, 2), direction=(0, 1), labels=[3.0])
    T, img = normalize(hp)
    assert np.allclose(img.direction, (1, 0)) and np.allclose(img.base.as_array(), 0.0)
    assert img.labels[0] == pytest.approx(3.0)


def test_normalize_strip_unsupported():
    strip = LabeledPolygon(kind="strip", base=(0, 0), direction=(1, 0), width=1.0, labels=[1.0, 1.0])
    with pytest.raises(UnsupportedError):
        normalize(strip)


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    mat=st.lists(st.floats(-3, 3), min_size=4, max_size=4),
    shift=st.lists(st.floats(-5, 5), min_size=2, max_size=2),
)
def test_classify_affine_invariant(seed, mat, shift):
    L = np.array(mat).reshape(2, 2)
    if abs(np.linalg.det(L)) < 1e-2 or np.linalg.cond(L) > 1e3:
        return
    poly = random_polygon(np.random.default_rng(seed), parallel=seed % 3 == 0)
    img = poly.transformed(Affine2(L, Point2(*shift)))
    assert classify(img) == classify(poly)


def test_breakpoints():
    assert breakpoints(QUARTER) == [0.0]
    p = LabeledPolygon(vertices=[(1, 0), (0, 1)], labels=[1.0, 1.0, 1.0], rays=[(1, 0), (0, 1)])
    assert breakpoints(p)[1] == pytest.approx(math.sqrt(2), abs=1e-15)
    _, norm = normalize(LEBRUN)
    xs = breakpoints(norm)
    assert xs[0] == 0.0 and xs[1] == pytest.approx(2.0, abs=1e-14)  # width k for k = 2


def test_breakpoint_spacing_exact(rng):
    poly = random_polygon(rng)
    xs = breakpoints(poly, x1=-1.0)
    pts = [v.as_array() for v in poly.vertices]
    for i in range(len(xs) - 1):
        assert xs[i + 1] - xs[i] == pytest.approx(np.linalg.norm(pts[i + 1] - pts[i]) / poly.labels[i + 1], rel=1e-15)


def test_breakpoints_infinite_interior_label():
    p = LabeledPolygon(vertices=[(-1, 1), (0, 0)], labels=[1.0, math.inf, 1.0], rays=[(0, 1), (1, 0)])
    with pytest.raises(UnsupportedError):
        breakpoints(p)


def test_cone_angle():
    assert cone_angle(1.0, 2 * math.pi) == pytest.approx(2 * math.pi)
    for k in (1, 2, 5):
        assert cone_angle(math.sqrt(2) * k, 2 * math.sqrt(2) * math.pi * k) == pytest.approx(2 * math.pi)
        assert cone_angle(1.0 / k, 2 * math.pi) == pytest.approx(2 * math.pi * k)
    with pytest.raises(InputError):
        cone_angle(0.0, 1.0)


def test_inner_distance():
    d = QUARTER.inner_distance(np.array([[1.0, 2.0], [-1.0, 3.0], [0.5, 0.5]]))
    assert np.allclose(d, [1.0, -1.0, 0.5])


def test_json_round_trip(tmp_path):
    p = LabeledPolygon(vertices=[(-1, 1), (0, 0)], labels=[1.0, math.inf, 1.0], rays=[(0, 1), (1, 0)])
    data = polygon_to_dict(p)
    assert data["labels"][1] == "inf"
    f = tmp_path / "p.json"
    f.write_text(json.dumps(data))
    q = load_polygon(f)
    assert q.vertices == p.vertices and q.labels == p.labels and q.rays == p.rays
    hp = polygon_from_dict({"class": "half_plane", "base": [0, 0], "direction": [2, 0], "labels": [1]})
    assert polygon_from_dict(polygon_to_dict(hp)) == hp


@pytest.mark.parametrize(
    "data",
    [
        [],
        {"vertices": [[0, 0]], "labels": [1, 1]},
        {"vertices": [[0, 0]], "labels": [1, "big"], "rays": [[1, 0], [0, 1]]},
        {"vertices": [[0]], "labels": [1, 1], "rays": [[1, 0], [0, 1]]},
        {"class": "hexagon"},
        {"vertices": [[0, 0]], "labels": [1, 1], "rays": [[0, 0], [0, 1]]},
    ],
)
def test_bad_json(data):
    with pytest.raises(InputError):
        polygon_from_dict(data)


def test_random_polygons_valid(rng):
    for _ in range(100):
        p = random_polygon(rng)
        assert 1 <= p.d <= 6
        assert all(0.1 <= s <= 10 for s in p.labels)
