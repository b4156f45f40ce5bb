import csv
import math

import numpy as np
import pytest

from scalarflat import pdecheck
from scalarflat.errors import ConvergenceError, DomainError, StepError
from scalarflat.momentum import Jet2, add_variation, match_outline
from scalarflat.polygon import LabeledPolygon

BOX = pdecheck.RectDomain(1.0, 1.0)


def test_residual_examples():
    C, y = 2.5, 0.7
    assert pdecheck.residual(Jet2(C * y * y, 0.0, 2 * C * y, 0.0, 0.0, 2 * C), y) == 0.0
    x, y = 1.0, 1.0
    r = math.hypot(x, y)
    j = Jet2(x + r, 1 + x / r, y / r, y * y / r**3, -x * y / r**3, x * x / r**3)
    assert abs(pdecheck.residual(j, y)) <= 1e-14
    assert pdecheck.residual(Jet2(y, 0.0, 1.0, 0.0, 0.0, 0.0), y) == -1.0


def test_fd_residual_examples():
    assert abs(pdecheck.fd_residual(lambda x, y: y * y, 0.5, 0.5, 1e-3)) <= 1e-8
    # the central first difference of y^3 is off by exactly h^2
    assert pdecheck.fd_residual(lambda x, y: y**3, 0.0, 1.0, 1e-4) == pytest.approx(3.0, abs=1e-6)
    with pytest.raises(StepError):
        pdecheck.fd_residual(lambda x, y: y, 0.0, 1e-3, 1e-3)


def test_fd_agrees_with_analytic_residual(rng):
    mm = add_variation(match_outline(LabeledPolygon(vertices=[(0, 0)], labels=[1.0, 2.0], rays=[(1, 0), (0, 1)])), c1=0.3)
    f = lambda x, y: mm.value(x, y)[0]
    for x, y in zip(rng.uniform(-2, 2, 10), rng.uniform(0.2, 2, 10)):
        assert abs(pdecheck.fd_residual(f, x, y, 1e-3)) <= 1e-5


def test_barrier_box_values():
    assert pdecheck.barrier_box(0.0, 0.0, BOX) == 1.0
    dom = pdecheck.RectDomain(2.0, 0.5)
    assert pdecheck.barrier_box(0.0, 0.0, dom) == 1.0
    for y in (0.0, 0.3, 0.9):
        assert pdecheck._box_raw(1.0, y, BOX) <= 0.0
        assert pdecheck.barrier_box(1.0, y, BOX) == 0.0
    assert pdecheck.barrier_box(0.0, 1.0, BOX) == 0.0
    assert pdecheck.barrier_box(3.0, 0.5, BOX) == 0.0
    assert pdecheck.barrier_box(0.0, -0.1, BOX) == 0.0
    # continuous up to the degenerate boundary
    assert pdecheck.barrier_box(0.3, 1e-9, BOX) == pytest.approx(pdecheck.barrier_box(0.3, 0.0, BOX), abs=1e-7)


def test_barrier_box_vectorised():
    xs, ys = np.array([0.0, 0.2, 2.0]), np.array([0.0, 0.3, 0.3])
    v = pdecheck.barrier_box(xs, ys, BOX)
    assert v.shape == (3,) and v[0] == 1.0 and v[2] == 0.0
    assert v[1] == pdecheck.barrier_box(0.2, 0.3, BOX)


def test_barrier_box_pde():
    f = lambda x, y: pdecheck.barrier_box(x, y, BOX)
    assert abs(pdecheck.fd_residual(f, 0.2, 0.3, 1e-4)) <= 1e-6
    # the error is O(h^2): 1e-3 is already close
    assert abs(pdecheck.fd_residual(f, 0.2, 0.3, 1e-3)) <= 1e-5


def test_strip_barrier():
    B, eps = 2.0, 0.25
    assert pdecheck.strip_profile(0.0, B, eps) == -1.0
    ys = np.linspace(0, B / eps, 200)
    assert max(pdecheck.strip_profile(y, B, eps) for y in ys) <= -1.0
    assert pdecheck.strip_barrier(0.0, 0.0, B, eps) == -1.0
    f = lambda x, y: pdecheck.strip_barrier(x, y, B, eps)
    assert abs(pdecheck.fd_residual(f, 0.7, 3.0, 1e-4)) <= 1e-6
    with pytest.raises(DomainError):
        pdecheck.strip_barrier(0.0, B / eps + 0.1, B, eps)
    with pytest.raises(DomainError):
        pdecheck.strip_barrier(0.0, 1.0, -1.0, eps)


@pytest.fixture(scope="module")
def box_runs():
    return pdecheck.solve_degenerate_dirichlet(BOX, mesh=1 / 64, delta_schedule=(1 / 8, 1 / 16, 1 / 32), return_all=True)


def test_dirichlet_bounds_and_residual(box_runs):
    for sol in box_runs:
        vals = sol.values[sol.active]
        assert vals.min() >= 0.0 and vals.max() <= 1.0
        assert pdecheck.discrete_residual(sol) <= 1e-9
        # discrete maximum principle: the extremes are attained on the boundary
        inner = sol.values[sol.active & ~sol.boundary]
        assert inner.max() <= sol.values[sol.boundary].max() and inner.min() >= sol.values[sol.boundary].min()


def test_dirichlet_dominates_barrier(box_runs):
    for sol in box_runs:
        X, Y = np.meshgrid(sol.x, sol.y)
        m = sol.active
        assert np.all(pdecheck.barrier_box(X[m], Y[m], BOX) <= sol.values[m] + 1e-12)


def test_dirichlet_decreases_with_delta(box_runs):
    # value 1 sits on the clip line y = delta; lowering it moves the data
    # further from every fixed node, so the solutions decrease
    base = box_runs[0]
    mask = base.active & ~base.boundary
    for a, b in zip(box_runs, box_runs[1:]):
        assert np.all(b.values[mask] <= a.values[mask] + 1e-12)


def test_dirichlet_diagnostics(box_runs):
    diag = box_runs[-1].diagnostics
    assert [d["delta"] for d in diag] == [1 / 8, 1 / 16, 1 / 32]
    assert "max_change" not in diag[0] and all(d["max_change"] > 0 for d in diag[1:])


def test_two_segment_sum_below_one():
    dom = pdecheck.TwoSegmentDomain(0.5)
    kw = dict(mesh=1 / 32, delta_schedule=(1 / 8, 1 / 16))
    u1 = pdecheck.solve_degenerate_dirichlet(dom, 0, **kw)
    u2 = pdecheck.solve_degenerate_dirichlet(dom, 1, **kw)
    m = u1.active
    assert np.all(u1.values[m] + u2.values[m] <= 1.0 + 1e-12)
    # mirror symmetry of the two problems
    assert np.allclose(u1.values, u2.values[:, ::-1], atol=1e-10)


def test_sor_matches_direct():
    kw = dict(mesh=1 / 16, delta_schedule=(1 / 4, 1 / 8))
    a = pdecheck.solve_degenerate_dirichlet(BOX, **kw)
    b = pdecheck.solve_degenerate_dirichlet(BOX, method="sor", tol=1e-13, **kw)
    assert np.max(np.abs(a.values - b.values)) <= 1e-10
    assert b.diagnostics[-1]["method"] == "sor"


def test_sor_nonconvergence():
    with pytest.raises(ConvergenceError):
        pdecheck.solve_degenerate_dirichlet(BOX, mesh=1 / 16, delta_schedule=(1 / 8,), method="sor", maxit=3)


@pytest.mark.parametrize(
    "kw",
    [
        dict(delta_schedule=(1 / 16, 1 / 8)),
        dict(delta_schedule=(1 / 8, 1 / 64), mesh=1 / 64),
        dict(mesh=0.3),
        dict(method="jacobi"),
    ],
)
def test_dirichlet_bad_arguments(kw):
    args = dict(mesh=1 / 16, delta_schedule=(1 / 4, 1 / 8))
    args.update(kw)
    with pytest.raises((DomainError, ValueError)):
        pdecheck.solve_degenerate_dirichlet(BOX, **args)


def test_domains_validate():
    with pytest.raises(DomainError):
        pdecheck.RectDomain(0.0, 1.0)
    with pytest.raises(DomainError):
        pdecheck.TwoSegmentDomain(-1.0)


def test_grid_csv(tmp_path):
    sol = pdecheck.solve_degenerate_dirichlet(BOX, mesh=1 / 8, delta_schedule=(1 / 4,))
    path = tmp_path / "u.csv"
    sol.to_csv(path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "y", "value"]
    assert len(rows) - 1 == int(sol.active.sum())
    x, y, v = map(float, rows[1 + len(rows) // 2])
    assert sol.value_at(x, y) == v


def test_liouville_probe():
    C, dev = pdecheck.liouville_probe(lambda x, y: 3 * y * y)
    assert C == pytest.approx(3.0, abs=1e-14) and dev <= 1e-14
    quarter = LabeledPolygon(vertices=[(0, 0)], labels=[1.0, 1.0], rays=[(1, 0), (0, 1)])
    base = match_outline(quarter)
    var = add_variation(base, c1=0.7)
    C, dev = pdecheck.liouville_probe(lambda x, y: var.value(x, y)[0] - base.value(x, y)[0])
    assert C == pytest.approx(0.7, abs=1e-12) and dev <= 1e-10
    _, dev = pdecheck.liouville_probe(lambda x, y: y**3)
    assert dev > 0.05
    with pytest.raises(DomainError):
        pdecheck.liouville_probe(lambda x, y: y, grid=(1, 5))
    with pytest.raises(DomainError):
        pdecheck.liouville_probe(lambda x, y: y, box=(0, 1, 0, 0))
