"""Reduced metric, curvature and related quantities from momentum jets.

Anything with a ``jets(x, y) -> (Jet2, Jet2)`` method and an ``orientation``
attribute (+1 or -1, the sign of det A on the interior) can be passed where
a momentum map is expected. The orientation absorbs the two possible
conventions for the harmonic conjugate x: with it, the oriented determinant
is positive on every valid reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DegenerateMapError, DomainError, StepError
from .polygon import Point2

__all__ = [
    "MetricSample",
    "AmbientBlocks",
    "metric_sample",
    "conformal_factor",
    "gaussian_curvature",
    "invert_moment",
    "christoffels",
    "scalar_two_routes",
    "conformal_scalar",
    "ambient_blocks",
    "abreu_scalar",
]

DEFAULT_H = 1e-3


@dataclass(frozen=True)
class MetricSample:
    A: np.ndarray
    detA: float
    lam: float
    G_up: np.ndarray
    V: float
    K: float | None = None

    @property
    def G_down(self) -> np.ndarray:
        return np.linalg.inv(self.G_up)


@dataclass(frozen=True)
class AmbientBlocks:
    G_down: np.ndarray
    G_up: np.ndarray
    metric4: np.ndarray
    hermitian: np.ndarray

    @property
    def det4(self) -> float:
        return float(np.linalg.det(self.metric4))


def metric_sample(jets, y: float, orientation: int = 1, K=None) -> MetricSample:
    """Transition matrix, conformal factor and cometric at one point.

    `detA` is reported with the orientation sign applied, so it is positive
    for a valid reduction.
    """
    j1, j2 = jets
    if not y > 0:
        raise ValueError("metric_sample needs y > 0")
    A = np.array([[j1.dx, j1.dy], [j2.dx, j2.dy]], dtype=float)
    det = orientation * (A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    if not det > 0:
        raise DegenerateMapError(f"oriented det A = {det:.3e} <= 0 at y = {y}")
    G_up = (y / det) * (A @ A.T)
    return MetricSample(A=A, detA=det, lam=det / y, G_up=G_up, V=y * y, K=K)


def conformal_factor(mm, x, y):
    """lambda = (oriented det A)/y, vectorised; raises if not positive."""
    j1, j2 = mm.jets(x, y)
    det = mm.orientation * (j1.dx * j2.dy - j1.dy * j2.dx)
    lam = det / np.asarray(y, dtype=float)
    if np.any(~(lam > 0)):
        raise DegenerateMapError("non-positive conformal factor on the sample set")
    return lam


def _laplacian_log(mm, x, y, h):
    c = np.log(conformal_factor(mm, x, y))
    e = np.log(conformal_factor(mm, x + h, y))
    w = np.log(conformal_factor(mm, x - h, y))
    n = np.log(conformal_factor(mm, x, y + h))
    s = np.log(conformal_factor(mm, x, y - h))
    return (e + w + n + s - 4.0 * c) / (h * h), c


def gaussian_curvature(mm, x, y, h: float = DEFAULT_H):
    """K = -(1/(2 lambda)) * flat Laplacian of log(lambda).

    Five-point Laplacian at steps h and h/2 with one Richardson step.
    Points with y < 3h are refused.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y < 3.0 * h):
        raise StepError(f"curvature refused: y < 3h = {3.0 * h}")
    l1, c = _laplacian_log(mm, x, y, h)
    l2, _ = _laplacian_log(mm, x, y, 0.5 * h)
    lap = (4.0 * l2 - l1) / 3.0
    K = -0.5 * lap / np.exp(c)
    return float(K) if K.ndim == 0 else K


def _coarse_guess(mm, target):
    xs = np.linspace(-20, 20, 81)
    ys = np.geomspace(1e-3, 40, 60)
    X, Y = np.meshgrid(xs, ys)
    v1, v2 = mm.value(X, Y) if hasattr(mm, "value") else (mm.jets(X, Y)[0].value, mm.jets(X, Y)[1].value)
    d = (v1 - target[0]) ** 2 + (v2 - target[1]) ** 2
    i = np.unravel_index(np.nanargmin(d), d.shape)
    return float(X[i]), float(Y[i])


def invert_moment(mm, target, guess=None, tol: float = 1e-12, maxit: int = 50):
    """Newton solve of (phi^1, phi^2)(x, y) = target with halving line search."""
    t = np.array(tuple(target), dtype=float)
    if guess is None:
        guess = _coarse_guess(mm, t)
    x, y = float(guess[0]), float(guess[1])
    if not y > 0:
        y = 1.0

    def resid(px, py):
        j1, j2 = mm.jets(px, py)
        return np.array([j1.value - t[0], j2.value - t[1]]), j1, j2

    F, j1, j2 = resid(x, y)
    nf = float(np.max(np.abs(F)))
    best = (x, y, nf)
    for _ in range(maxit):
        if nf <= tol:
            return x, y
        J = np.array([[j1.dx, j1.dy], [j2.dx, j2.dy]])
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        for _ls in range(60):
            xn, yn = x + lam * step[0], y + lam * step[1]
            if yn > 0:
                Fn, k1, k2 = resid(xn, yn)
                nfn = float(np.max(np.abs(Fn)))
                if nfn < nf or nfn <= tol:
                    break
            lam *= 0.5
        else:
            break
        x, y, F, j1, j2, nf = xn, yn, Fn, k1, k2, nfn
        if nf < best[2]:
            best = (x, y, nf)
    if nf <= tol:
        return x, y
    raise ConvergenceError(
        f"Newton inversion stalled at residual {best[2]:.3e}", best=best[:2], residual=best[2]
    )


def _g_down_at(mm, phi, guess):
    x, y = invert_moment(mm, phi, guess)
    s = metric_sample(mm.jets(x, y), y, mm.orientation)
    return np.linalg.inv(s.G_up), (x, y)


def _dg(mm, phi, guess, h):
    """Central differences of g_down in both phi directions, Richardson-improved."""
    out = np.zeros((2, 2, 2))  # [s, i, j] = d g_ij / d phi^s
    for s in range(2):
        e = np.zeros(2)
        e[s] = 1.0
        parts = []
        for step in (h, 0.5 * h):
            gp, _ = _g_down_at(mm, phi + step * e, guess)
            gm, _ = _g_down_at(mm, phi - step * e, guess)
            parts.append((gp - gm) / (2.0 * step))
        out[s] = (4.0 * parts[1] - parts[0]) / 3.0
    return out


def christoffels(mm, phi_point, h: float = DEFAULT_H, guess=None):
    """Christoffel symbols of the reduced metric in momentum coordinates.

    Returns (Gamma[i, j, k] = Gamma_ij^k, g_down, g_up, (x, y)) where the
    last entry is the half-plane preimage of `phi_point`.
    """
    phi = np.array(tuple(phi_point), dtype=float)
    try:
        g, pre = _g_down_at(mm, phi, guess)
        dg = _dg(mm, phi, pre, h)
    except (ConvergenceError, DegenerateMapError) as exc:
        raise StepError(f"stencil at {tuple(phi)} leaves the admissible region: {exc}") from exc
    gi = np.linalg.inv(g)
    # Hessian-type metric: Gamma_ij^k = 1/2 d_s g_ij g^{sk}
    gamma = 0.5 * np.einsum("sij,sk->ijk", dg, gi)
    gamma = 0.5 * (gamma + gamma.transpose(1, 0, 2))
    return gamma, g, gi, pre


def _gamma_norm2(gamma, g, gi):
    return float(np.einsum("ijk,ia,jb,kc,abc->", gamma, gi, gi, g, gamma))


def scalar_two_routes(mm, phi_point, h: float = DEFAULT_H, guess=None):
    """(s from Christoffel norms, 2K from the conformal factor)."""
    gamma, g, gi, (x, y) = christoffels(mm, phi_point, h, guess)
    lam = float(conformal_factor(mm, x, y))
    grad_log_sqrt_v = 1.0 / (lam * y * y)
    s_a = _gamma_norm2(gamma, g, gi) - grad_log_sqrt_v
    s_b = 2.0 * gaussian_curvature(mm, x, y, min(h, y / 3.0))
    return s_a, s_b


def conformal_scalar(mm, phi_point, h: float = DEFAULT_H, guess=None, both: bool = False):
    """Scalar curvature of V^{-1/2} g on the reduced surface (s = 0 case).

    Route one is |Gamma|^2 / y; route two is (2K - Laplacian log y)/y with
    the Laplacian exact: -1/(lambda y^2). With both=True return the pair.
    """
    gamma, g, gi, (x, y) = christoffels(mm, phi_point, h, guess)
    r1 = _gamma_norm2(gamma, g, gi) / y
    if not both:
        return r1
    lam = float(conformal_factor(mm, x, y))
    K = gaussian_curvature(mm, x, y, min(h, y / 3.0))
    r2 = (2.0 * K + 1.0 / (lam * y * y)) / y
    return r1, r2


def ambient_blocks(sample: MetricSample) -> AmbientBlocks:
    G_up = np.asarray(sample.G_up, dtype=float)
    if abs(np.linalg.det(G_up)) < 1e-300:
        raise DegenerateMapError("singular cometric")
    G_down = np.linalg.inv(G_up)
    m4 = np.zeros((4, 4))
    m4[:2, :2] = G_down
    m4[2:, 2:] = G_up
    return AmbientBlocks(G_down=G_down, G_up=G_up, metric4=m4, hermitian=0.5 * G_up)


def _inverse_hessian(hessian_fn, p):
    H = np.asarray(hessian_fn(Point2(p[0], p[1])), dtype=float)
    try:
        np.linalg.cholesky(H)
    except np.linalg.LinAlgError:
        raise DomainError(f"Hessian not positive definite at {tuple(p)}") from None
    return np.linalg.inv(H)


def abreu_scalar(hessian_fn: Callable, phi_point, h: float = DEFAULT_H) -> float:
    """R = -1/2 sum_ij d^2 u^{ij} / d phi^i d phi^j, Richardson-extrapolated."""
    p = np.array(tuple(phi_point), dtype=float)

    def second(step):
        U = lambda dx, dy: _inverse_hessian(hessian_fn, p + np.array([dx, dy]))
        c = U(0, 0)
        d11 = (U(step, 0)[0, 0] - 2 * c[0, 0] + U(-step, 0)[0, 0]) / step**2
        d22 = (U(0, step)[1, 1] - 2 * c[1, 1] + U(0, -step)[1, 1]) / step**2
        d12 = (
            U(step, step)[0, 1] - U(step, -step)[0, 1] - U(-step, step)[0, 1] + U(-step, -step)[0, 1]
        ) / (4 * step**2)
        return -0.5 * (d11 + d22 + 2.0 * d12)

    r1, r2 = second(h), second(0.5 * h)
    return (4.0 * r2 - r1) / 3.0
