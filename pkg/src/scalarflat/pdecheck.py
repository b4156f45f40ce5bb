"""The operator L[f] = y*(f_xx + f_yy) - f_y: residuals, barriers, solvers."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .errors import ConvergenceError, DomainError, StepError
from .specialfn import bessel_k1, bessel_y1, y1_first_zero

__all__ = [
    "RectDomain",
    "TwoSegmentDomain",
    "GridSolution",
    "residual",
    "fd_residual",
    "barrier_box",
    "strip_barrier",
    "strip_profile",
    "solve_degenerate_dirichlet",
    "discrete_residual",
    "liouville_probe",
]


@dataclass(frozen=True)
class RectDomain:
    """The box [-x0, x0] x [0, y0]."""

    x0: float
    y0: float

    def __post_init__(self):
        if not (self.x0 > 0 and self.y0 > 0):
            raise DomainError("box dimensions must be positive")

    @property
    def bounds(self):
        return -self.x0, self.x0, self.y0

    def contains(self, x, y):
        return (np.abs(x) <= self.x0) & (y >= 0) & (y <= self.y0)

    def open_mask(self, X, Y, tol):
        return (np.abs(X) < self.x0 - tol) & (Y < self.y0 - tol)

    def degenerate_segments(self):
        return [(-self.x0, self.x0)]


@dataclass(frozen=True)
class TwoSegmentDomain:
    """[-2, 2] x [0, 2y'] with the closed box [-1, 1] x [0, y'] removed."""

    yprime: float

    def __post_init__(self):
        if not self.yprime > 0:
            raise DomainError("yprime must be positive")

    @property
    def bounds(self):
        return -2.0, 2.0, 2.0 * self.yprime

    def open_mask(self, X, Y, tol):
        inside_outer = (np.abs(X) < 2.0 - tol) & (Y < 2.0 * self.yprime - tol)
        in_hole = (np.abs(X) <= 1.0 + tol) & (Y <= self.yprime + tol)
        return inside_outer & ~in_hole

    def degenerate_segments(self):
        return [(-2.0, -1.0), (1.0, 2.0)]


@dataclass
class GridSolution:
    hx: float
    hy: float
    x: np.ndarray  # (nx,)
    y: np.ndarray  # (ny,)
    values: np.ndarray  # (ny, nx)
    boundary: np.ndarray  # (ny, nx) bool, Dirichlet nodes
    delta: float
    active: np.ndarray | None = None  # nodes belonging to the clipped domain
    diagnostics: list = field(default_factory=list)

    def value_at(self, xv, yv):
        i = int(round((xv - self.x[0]) / self.hx))
        j = int(round((yv - self.y[0]) / self.hy))
        return self.values[j, i]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "value"])
            act = self.active if self.active is not None else np.ones_like(self.boundary)
            for j, yv in enumerate(self.y):
                for i, xv in enumerate(self.x):
                    if act[j, i]:
                        w.writerow([repr(float(xv)), repr(float(yv)), repr(float(self.values[j, i]))])


def residual(jet, y):
    return y * (jet.dxx + jet.dyy) - jet.dy


def fd_residual(f: Callable, x: float, y: float, h: float = 1e-3) -> float:
    """Five-point finite-difference residual of y*Lap f - f_y."""
    if not y - h > 0:
        raise StepError("stencil crosses y <= 0")
    c = f(x, y)
    e, w, n, s = f(x + h, y), f(x - h, y), f(x, y + h), f(x, y - h)
    return y * (e + w + n + s - 4.0 * c) / (h * h) - (n - s) / (2.0 * h)


def _box_raw(x, y, dom: RectDomain):
    c = math.pi / (2.0 * dom.x0)
    k0 = bessel_k1(c * dom.y0)
    C1 = 1.0 / c - dom.y0 * k0
    yk = 1.0 / c if y == 0.0 else y * bessel_k1(c * y)
    return (math.cos(c * x) * yk - dom.y0 * k0) / C1


def barrier_box(x, y, dom: RectDomain):
    """Lower barrier supported in the box, equal to 1 at the origin."""
    if np.ndim(x) or np.ndim(y):
        return np.vectorize(lambda a, b: barrier_box(a, b, dom), otypes=[float])(x, y)
    x, y = float(x), float(y)
    if abs(x) > dom.x0 or y < 0.0 or y > dom.y0:
        return 0.0
    v = _box_raw(x, y, dom)
    return v if v > 0.0 else 0.0


def strip_profile(y, B: float, eps: float, y11: float | None = None):
    """f(y) = (pi/2) t Y1(t) with t = eps*y11*y/(2B); f(0) = -1."""
    y11 = y1_first_zero() if y11 is None else y11
    c = eps * y11 / B
    t = 0.5 * c * y
    if t == 0.0:
        return -1.0
    return 0.5 * math.pi * t * bessel_y1(t)


def strip_barrier(x, y, B: float, eps: float, y11: float | None = None):
    if not (B > 0 and eps > 0):
        raise DomainError("B and eps must be positive")
    if y < 0 or y > B / eps * (1 + 1e-12):
        raise DomainError(f"y = {y} outside the strip [0, {B / eps}]")
    y11 = y1_first_zero() if y11 is None else y11
    c = eps * y11 / B
    return strip_profile(y, B, eps, y11) * math.cosh(0.5 * c * x)


def _assemble(yc, h, free, u):
    """Sparse system for the upwind scheme on the free nodes."""
    ny, nx = free.shape
    idx = -np.ones(free.shape, dtype=np.int64)
    jj, ii = np.nonzero(free)
    idx[jj, ii] = np.arange(jj.size)
    a = yc[jj] / (h * h)
    b = np.full(jj.size, 1.0 / h)
    rows = [np.arange(jj.size)]
    cols = [np.arange(jj.size)]
    vals = [-(4.0 * a + b)]
    rhs = np.zeros(jj.size)
    for dj, di, coef in ((0, 1, a), (0, -1, a), (1, 0, a), (-1, 0, a + b)):
        nj, ni = jj + dj, ii + di
        k = idx[nj, ni]
        inner = k >= 0
        rows.append(np.nonzero(inner)[0])
        cols.append(k[inner])
        vals.append(coef[inner])
        rhs[~inner] -= coef[~inner] * u[nj[~inner], ni[~inner]]
    A = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(jj.size, jj.size),
    )
    return A, rhs, (jj, ii)


def discrete_residual(sol: GridSolution) -> float:
    """Max |scheme residual| over free nodes of a solution."""
    u, h = sol.values, sol.hy
    free = sol.active & ~sol.boundary
    jj, ii = np.nonzero(free)
    yv = sol.y[jj]
    lap = u[jj, ii + 1] + u[jj, ii - 1] + u[jj + 1, ii] + u[jj - 1, ii] - 4.0 * u[jj, ii]
    r = yv * lap / (h * h) - (u[jj, ii] - u[jj - 1, ii]) / h
    return float(np.max(np.abs(r))) if r.size else 0.0


def _setup_grid(dom, delta, h, segment):
    xmin, xmax, ytop = dom.bounds
    nx = int(round((xmax - xmin) / h)) + 1
    jd = int(round(delta / h))
    ny = int(round(ytop / h)) + 1
    if abs((xmax - xmin) - (nx - 1) * h) > 1e-9 * h or abs(ytop - (ny - 1) * h) > 1e-9 * h:
        raise DomainError("mesh must divide the domain")
    if abs(jd * h - delta) > 1e-9 * h:
        raise DomainError("clip level must be a mesh line")
    xs = xmin + h * np.arange(nx)
    ys = h * np.arange(ny)
    X, Y = np.meshgrid(xs, ys)
    tol = 1e-9 * h
    open_ = dom.open_mask(X, Y, tol) & (Y > delta + tol)
    # Dirichlet nodes: grid neighbours of the open set that are not in it
    nb = np.zeros_like(open_)
    nb[1:, :] |= open_[:-1, :]
    nb[:-1, :] |= open_[1:, :]
    nb[:, 1:] |= open_[:, :-1]
    nb[:, :-1] |= open_[:, 1:]
    bnd = nb & ~open_
    u = np.zeros_like(X)
    lo, hi = segment
    on_clip = bnd & (np.abs(Y - delta) <= tol) & (X > lo + tol) & (X < hi - tol)
    u[on_clip] = 1.0
    return xs, ys, X, Y, open_, bnd, u


def solve_degenerate_dirichlet(
    dom,
    boundary_spec=0,
    delta_schedule=(0.125, 0.0625, 0.03125, 0.015625),
    mesh: float = 1.0 / 256,
    method: str = "direct",
    omega: float = 1.7,
    tol: float = 1e-10,
    maxit: int = 100_000,
    return_all: bool = False,
):
    """Clipped Dirichlet problems for y*Lap u - u_y = 0.

    For each clip level delta the domain is cut to {y > delta}; the
    solution is 1 on the clip line above the designated degenerate segment
    (`boundary_spec` indexes ``dom.degenerate_segments()``) and 0 on the
    rest of the boundary. The first-order term is upwinded so the scheme
    is an M-matrix and obeys the discrete maximum principle.

    Returns the final GridSolution, or all of them with return_all=True.
    """
    deltas = [float(d) for d in delta_schedule]
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise DomainError("delta schedule must be strictly decreasing")
    if deltas[-1] < 2.0 * mesh - 1e-15:
        raise DomainError(f"delta floor {deltas[-1]} below 2*mesh = {2 * mesh}")
    segs = dom.degenerate_segments()
    if isinstance(boundary_spec, int):
        segment = segs[boundary_spec]
    else:
        segment = tuple(boundary_spec)
    h = float(mesh)
    sols = []
    prev = None
    for delta in deltas:
        xs, ys, X, Y, open_, bnd, u = _setup_grid(dom, delta, h, segment)
        active = open_ | bnd
        if method == "direct":
            A, rhs, (jj, ii) = _assemble(ys, h, open_, u)
            u[jj, ii] = spla.spsolve(A.tocsc(), rhs)
            info = {"method": "direct"}
        elif method == "sor":
            fixed = ~open_
            it, upd = kernels.sor_solve(u, fixed, np.ascontiguousarray(ys), h, omega, tol, maxit)
            if upd > tol:
                raise ConvergenceError(f"SOR did not converge: last update {upd:.2e} after {it} sweeps")
            info = {"method": "sor", "iterations": int(it), "last_update": float(upd)}
        else:
            raise ValueError(f"unknown method {method!r}")
        sol = GridSolution(hx=h, hy=h, x=xs, y=ys, values=u, boundary=bnd, delta=delta, active=active)
        res = discrete_residual(sol)
        info.update(delta=delta, residual=res)
        if prev is not None:
            common = open_ & prev.active
            info["max_change"] = float(np.max(np.abs(u[common] - prev.values[common])))
        sol.diagnostics.append(info)
        sols.append(sol)
        prev = sol
    final = sols[-1]
    final.diagnostics = [s.diagnostics[0] for s in sols]
    return sols if return_all else final


def liouville_probe(f: Callable, box=(-1.0, 1.0, 0.0, 1.0), grid=(21, 21)):
    """Least-squares fit f ~ C*y^2 on a grid; returns (C, max deviation)."""
    x0, x1, y0, y1 = box
    nx, ny = grid
    if nx < 2 or ny < 2 or not (x1 > x0 and y1 > y0):
        raise DomainError("degenerate probe grid")
    X, Y = np.meshgrid(np.linspace(x0, x1, nx), np.linspace(y0, y1, ny))
    F = np.vectorize(f, otypes=[float])(X, Y)
    basis = Y**2
    denom = float(np.sum(basis * basis))
    if denom == 0.0:
        raise DomainError("probe grid has no points off the boundary")
    C = float(np.sum(basis * F) / denom)
    return C, float(np.max(np.abs(F - C * basis)))
