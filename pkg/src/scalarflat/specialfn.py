"""Modified Bessel K1 and Bessel Y1 for positive real arguments.

Only the two first-order functions used by the barrier constructions are
provided. Everything is plain float arithmetic so results are reproducible
across platforms and independent of scipy.
"""

import math

__all__ = ["bessel_k1", "bessel_y1", "bessel_j1", "y1_first_zero"]

_EULER = 0.57721566490153286061
_EPS = 1e-17

# Above these arguments the power series lose too many digits to cancellation.
_K1_SERIES_MAX = 2.0
_Y1_SERIES_MAX = 4.0
# Hankel's expansion is accurate to machine precision beyond this point.
_Y1_ASYMP_MIN = 25.0


def _check(t):
    t = float(t)
    if not t > 0.0 or math.isinf(t):
        raise ValueError(f"argument must be positive and finite, got {t!r}")
    return t


def _psi_pair_series(t, sign):
    """Return (J1 or I1, sum of digamma-weighted series) for order one.

    `sign` is -1 for the oscillatory pair and +1 for the modified pair.
    """
    q = 0.25 * t * t * sign
    term = 0.5 * t  # (t/2)^(2k+1) q-weighted / (k!(k+1)!)
    psi_a = -_EULER  # psi(k+1)
    psi_b = 1.0 - _EULER  # psi(k+2)
    first = 0.0
    second = 0.0
    k = 0
    while True:
        first += term
        contrib = (psi_a + psi_b) * term
        second += contrib
        if k > 2 and abs(contrib) <= _EPS * abs(second) and abs(term) <= _EPS * abs(first):
            break
        k += 1
        term *= q / (k * (k + 1))
        psi_a += 1.0 / k
        psi_b += 1.0 / (k + 1)
        if k > 500:
            break
    return first, second


def _k1_series(t):
    i1, s = _psi_pair_series(t, 1.0)
    return 1.0 / t + math.log(0.5 * t) * i1 - 0.5 * s


def _k1_steed(t):
    # Steed's continued fraction for K_0 and K_1 (Temme's variant).
    b = 2.0 * (1.0 + t)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(1, 100000):
        a -= 2 * i
        c = -a * c / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < 1e-17:
            break
    h = a1 * h
    k0 = math.sqrt(math.pi / (2.0 * t)) * math.exp(-t) / s
    return k0 * (t + 0.5 - h) / t


def bessel_k1(t):
    """Modified Bessel function of the second kind, order one."""
    t = _check(t)
    if t <= _K1_SERIES_MAX:
        return _k1_series(t)
    return _k1_steed(t)


def _jn_miller(t, nmax):
    """J_0..J_nmax by backward recurrence normalised with the Neumann sum."""
    start = nmax + int(t) + 40
    start += start % 2
    vals = [0.0] * (start + 2)
    vals[start + 1] = 0.0
    vals[start] = 1e-300
    for n in range(start, 0, -1):
        vals[n - 1] = (2.0 * n / t) * vals[n] - vals[n + 1]
        if abs(vals[n - 1]) > 1e250:
            scale = 1e-250
            for m in range(n - 1, start + 2):
                vals[m] *= scale
    norm = vals[0] + 2.0 * math.fsum(vals[2:start + 1:2])
    return [v / norm for v in vals[: nmax + 1]]


def bessel_j1(t):
    """Bessel function of the first kind, order one (t > 0)."""
    t = _check(t)
    if t <= _Y1_SERIES_MAX:
        return _psi_pair_series(t, -1.0)[0]
    return _jn_miller(t, 1)[1]


def _y1_series(t):
    j1, s = _psi_pair_series(t, -1.0)
    return -2.0 / (math.pi * t) + (2.0 / math.pi) * math.log(0.5 * t) * j1 - s / math.pi


def _y1_neumann(t):
    # Y1 = -(2/pi)[J0/t - (ln(t/2)+gamma) J1 - sum_k (-1)^k (J_{2k-1} - J_{2k+1})/k]
    nmax = int(t) + 40
    nmax += nmax % 2 + 1
    j = _jn_miller(t, nmax)
    acc = []
    sgn = -1.0
    for k in range(1, (nmax - 1) // 2 + 1):
        acc.append(sgn * (j[2 * k - 1] - j[2 * k + 1]) / k)
        sgn = -sgn
    total = math.fsum(acc)
    return -(2.0 / math.pi) * (j[0] / t - (math.log(0.5 * t) + _EULER) * j[1] - total)


def _y1_hankel(t):
    mu = 4.0
    p = 0.0
    q = 0.0
    term = 1.0
    k = 0
    prev = math.inf
    while True:
        if k % 2 == 0:
            p += term if (k // 2) % 2 == 0 else -term
        else:
            q += term if (k // 2) % 2 == 0 else -term
        k += 1
        nxt = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * t)
        if abs(nxt) >= prev or abs(nxt) < 1e-18 or k > 200:
            break
        prev = abs(term)
        term = nxt
    chi = t - 0.75 * math.pi
    return math.sqrt(2.0 / (math.pi * t)) * (p * math.sin(chi) + q * math.cos(chi))


def bessel_y1(t):
    """Bessel function of the second kind, order one."""
    t = _check(t)
    if t <= _Y1_SERIES_MAX:
        return _y1_series(t)
    if t < _Y1_ASYMP_MIN:
        return _y1_neumann(t)
    return _y1_hankel(t)


def y1_first_zero(tol=1e-14):
    """First positive zero of Y1, by bisection on a bracketing interval."""
    lo, hi = 2.0, 2.4
    flo = bessel_y1(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = bessel_y1(mid)
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
