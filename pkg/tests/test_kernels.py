import os
import subprocess
import sys

import numpy as np
import pytest

from scalarflat import kernels
from scalarflat.verification import interior_grid, verify_polygon
from scalarflat.momentum import match_outline
from scalarflat.polygon import LabeledPolygon, random_polygon

compiled = pytest.mark.skipif("compiled" not in kernels.BACKENDS, reason="extension not built")


def _sor_problem(n=24):
    h = 1.0 / n
    ys = h * np.arange(n + 1)
    u = np.zeros((n + 1, 2 * n + 1))
    fixed = np.ones_like(u, dtype=bool)
    fixed[3:-1, 1:-1] = False
    u[2, n // 2 : n + n // 2] = 1.0
    return u, fixed, ys, h


def test_python_backend_always_present():
    assert "python" in kernels.BACKENDS
    assert kernels.get_backend("python").ray_jets_sum is not None
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_ray_jets_sum_single_knot():
    x, y = np.array([0.3, -2.0]), np.array([0.7, 0.1])
    acc = kernels.get_backend("python").ray_jets_sum(x, y, np.array([0.0]), np.array([[1.0, 0.0]]))
    r = np.hypot(x, y)
    assert np.allclose(acc[0, 0], x + r) and np.allclose(acc[0, 2], y / r) and np.all(acc[1] == 0)


@compiled
def test_sor_backends_agree():
    out = []
    for name in ("python", "compiled"):
        u, fixed, ys, h = _sor_problem()
        it, upd = kernels.get_backend(name).sor_solve(u, fixed, ys, h, 1.7, 1e-12, 100_000)
        assert upd <= 1e-12
        out.append((it, u))
    assert out[0][0] == out[1][0]
    assert np.allclose(out[0][1], out[1][1], atol=1e-13)


def test_pure_python_switch():
    env = dict(os.environ, SCALARFLAT_PURE_PYTHON="1")
    proc = subprocess.run(
        [sys.executable, "-c", "from scalarflat import kernels; print(kernels.BACKEND)"],
        capture_output=True, text=True, env=env,
    )
    assert proc.stdout.strip() == "python"


def test_interior_grid_respects_distance(rng):
    poly = random_polygon(rng)
    mm = match_outline(poly)
    pts = interior_grid(mm, poly, n=10, min_dist=0.1)
    assert 0 < len(pts) <= 100
    phi = np.array([mm.value(x, y) for x, y in pts])
    assert np.all(poly.inner_distance(phi) >= 0.1)


def test_verify_polygon_report():
    poly = LabeledPolygon(vertices=[(0, 0), (1, 2)], labels=[0.5, 2.0, 3.0], rays=[(0, -1), (1, 0)])
    rep = verify_polygon(poly, {"c1": 0.2, "c2": 1.0}, n_points=200)
    assert rep["passed"], rep["checks"]
    assert {c["name"] for c in rep["checks"]} >= {"pde residual (scaled)", "label recovery", "scalar routes agree"}
