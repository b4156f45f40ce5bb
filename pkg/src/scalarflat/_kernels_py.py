"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def ray_jets_sum(x, y, knots, coefs):
    """Sum of c_a * jets of P_a(x, y) = (x - a) + sqrt((x - a)^2 + y^2).

    x, y: 1-d float arrays of equal length N; knots: (K,); coefs: (K, 2).
    Returns an array of shape (2, 6, N) holding value, dx, dy, dxx, dxy, dyy
    for both components.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    knots = np.asarray(knots, dtype=float)
    coefs = np.asarray(coefs, dtype=float)
    out = np.zeros((2, 6, x.size))
    if knots.size == 0:
        return out
    u = x[None, :] - knots[:, None]
    yy = np.broadcast_to(y[None, :], u.shape)
    r = np.hypot(u, yy)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(u >= 0.0, u + r, yy * yy / (r - u))
        ir = 1.0 / r
        ir3 = ir * ir * ir
        jets = np.stack([p, p * ir, yy * ir, yy * yy * ir3, -u * yy * ir3, u * u * ir3])
    # jets: (6, K, N); coefs: (K, 2)
    return np.einsum("jkn,kc->cjn", jets, coefs)


def sor_solve(u, fixed, yc, h, omega, tol, maxit):
    """Red-black SOR for y*(u_E+u_W+u_N+u_S-4u)/h^2 - (u-u_S)/h = 0.

    `u` (ny, nx) holds boundary values at fixed nodes and the initial guess
    elsewhere; it is updated in place. `fixed` marks Dirichlet nodes, which
    must include the whole outer frame. `yc` gives the y-coordinate of each
    row. Returns (iterations, last max update).
    """
    ny, nx = u.shape
    free = ~fixed
    a = (yc / (h * h))[:, None] * np.ones((1, nx))
    b = np.full_like(a, 1.0 / h)
    diag = 4.0 * a + b
    jj, ii = np.indices(u.shape)
    colors = [free & ((ii + jj) % 2 == c) for c in (0, 1)]
    it = 0
    delta = np.inf
    while it < maxit:
        it += 1
        delta = 0.0
        for mask in colors:
            nb = np.zeros_like(u)
            nb[1:-1, 1:-1] = (
                a[1:-1, 1:-1] * (u[1:-1, 2:] + u[1:-1, :-2] + u[2:, 1:-1] + u[:-2, 1:-1])
                + b[1:-1, 1:-1] * u[:-2, 1:-1]
            )
            gs = nb / diag
            upd = omega * (gs - u)
            upd[~mask] = 0.0
            u += upd
            delta = max(delta, float(np.max(np.abs(upd))))
        if delta <= tol:
            break
    return it, delta
