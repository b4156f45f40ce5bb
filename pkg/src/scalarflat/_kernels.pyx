# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the inner loops; see _kernels_py for the reference."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


def ray_jets_sum(x, y, knots, coefs):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64).ravel()
    cdef double[::1] kv = np.ascontiguousarray(knots, dtype=np.float64).ravel()
    cdef double[:, ::1] cv = np.ascontiguousarray(coefs, dtype=np.float64).reshape(-1, 2)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t nk = kv.shape[0]
    out_arr = np.zeros((2, 6, n))
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t i, k
    cdef double u, yy, r, p, ir, ir3, c0, c1
    cdef double j0, j1, j2, j3, j4, j5
    for i in range(n):
        yy = yv[i]
        for k in range(nk):
            u = xv[i] - kv[k]
            r = sqrt(u * u + yy * yy)
            if u >= 0.0:
                p = u + r
            else:
                p = yy * yy / (r - u)
            ir = 1.0 / r
            ir3 = ir * ir * ir
            j0 = p
            j1 = p * ir
            j2 = yy * ir
            j3 = yy * yy * ir3
            j4 = -u * yy * ir3
            j5 = u * u * ir3
            c0 = cv[k, 0]
            c1 = cv[k, 1]
            out[0, 0, i] += c0 * j0
            out[0, 1, i] += c0 * j1
            out[0, 2, i] += c0 * j2
            out[0, 3, i] += c0 * j3
            out[0, 4, i] += c0 * j4
            out[0, 5, i] += c0 * j5
            out[1, 0, i] += c1 * j0
            out[1, 1, i] += c1 * j1
            out[1, 2, i] += c1 * j2
            out[1, 3, i] += c1 * j3
            out[1, 4, i] += c1 * j4
            out[1, 5, i] += c1 * j5
    return out_arr


def sor_solve(double[:, ::1] u, fixed, double[::1] yc, double h,
              double omega, double tol, long maxit):
    cdef cnp.uint8_t[:, ::1] fx = np.ascontiguousarray(fixed, dtype=np.uint8)
    cdef Py_ssize_t ny = u.shape[0]
    cdef Py_ssize_t nx = u.shape[1]
    cdef Py_ssize_t i, j
    cdef int color
    cdef long it = 0
    cdef double delta = 1e300
    cdef double a, b, gs, upd, ih2 = 1.0 / (h * h), ih = 1.0 / h
    while it < maxit:
        it += 1
        delta = 0.0
        for color in range(2):
            for j in range(1, ny - 1):
                a = yc[j] * ih2
                b = ih
                for i in range(1 + (j + 1 + color) % 2, nx - 1, 2):
                    if fx[j, i]:
                        continue
                    gs = (a * (u[j, i + 1] + u[j, i - 1] + u[j + 1, i] + u[j - 1, i])
                          + b * u[j - 1, i]) / (4.0 * a + b)
                    upd = omega * (gs - u[j, i])
                    u[j, i] += upd
                    if fabs(upd) > delta:
                        delta = fabs(upd)
        if delta <= tol:
            break
    return it, delta
