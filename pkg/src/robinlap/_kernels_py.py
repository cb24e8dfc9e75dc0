"""Pure-Python reference kernels.

Selected at import when the compiled ``_kernels_c`` extension is missing
(or when ``ROBINLAP_PURE_PYTHON=1``).  Every function here has a twin with
the same signature in ``_kernels_c.pyx``.
"""
import cmath
import math

import numpy as np

# |z|^2/4 below which the ascending series is used directly for small orders
SERIES_RADIUS2 = 25.0
_EPS = 1e-17
_TINY = 1e-300
_RESCALE = 1e150


def log_j_series(nu, z):
    """log J_nu(z) from the ascending series; z != 0."""
    w = -(z * z) / 4.0
    t = 1.0 + 0.0j
    s = 1.0 + 0.0j
    m = 0
    while m < 200000:
        m += 1
        t = t * w / (m * (nu + m))
        s += t
        if abs(t) <= _EPS * abs(s):
            break
    if s == 0:
        return complex(-math.inf, 0.0)
    head = nu * cmath.log(z / 2.0) if nu != 0 else 0j
    return head - math.lgamma(nu + 1.0) + cmath.log(s)


def reduced_j(nu, w):
    """Gamma(nu+1) (z/2)^(-nu) J_nu(z) as a function of w = z**2 (entire)."""
    q = -w / 4.0
    t = 1.0 + 0.0j
    s = 1.0 + 0.0j
    m = 0
    while m < 200000:
        m += 1
        t = t * q / (m * (nu + m))
        s += t
        if abs(t) <= _EPS * abs(s):
            break
    return s


def j_ratio_cf(nu, z):
    """J_{nu+1}(z) / J_nu(z) by the modified Lentz continued fraction."""
    if z == 0:
        return 0j
    zi = 1.0 / z
    f = complex(_TINY, 0.0)
    c = f
    d = 0j
    limit = int(4.0 * abs(z)) + 20000
    for m in range(1, limit):
        a = 1.0 if m == 1 else -1.0
        b = 2.0 * (nu + m) * zi
        d = b + a * d
        if d == 0:
            d = complex(_TINY, 0.0)
        c = b + a / c
        if c == 0:
            c = complex(_TINY, 0.0)
        d = 1.0 / d
        delta = c * d
        f = f * delta
        if abs(delta - 1.0) < 1e-16:
            return f
    raise ArithmeticError(f"continued fraction for J ratio did not converge (nu={nu}, z={z})")


def log_j(nu, z):
    """log J_nu(z) for real nu >= 0 and complex z (principal branch).

    Uses the ascending series where it is well conditioned; otherwise the
    series is evaluated at a higher anchor order and the minimal solution
    is carried back down by the three-term recurrence.
    Returns ``-inf`` (real part) for an exact zero.
    """
    if z == 0:
        return 0j if nu == 0 else complex(-math.inf, 0.0)
    a2 = abs(z) ** 2 / 4.0
    if a2 <= max(nu + 1.0, SERIES_RADIUS2):
        return log_j_series(nu, z)
    m = max(1, int(math.ceil(a2 - nu)))
    mu = nu + m
    log_anchor = log_j_series(mu, z)
    y_hi = j_ratio_cf(mu, z)  # order mu + 1
    y = 1.0 + 0.0j  # order mu
    acc = 0.0
    zi = 1.0 / z
    for j in range(m, 0, -1):
        y_lo = 2.0 * (nu + j) * zi * y - y_hi
        y_hi = y
        y = y_lo
        big = abs(y)
        if big > _RESCALE:
            y /= big
            y_hi /= big
            acc += math.log(big)
    if y == 0:
        return complex(-math.inf, 0.0)
    return log_anchor + cmath.log(y) + acc


def log_j_array(nu, z):
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    flat_in = z.ravel()
    flat_out = out.ravel()
    for i in range(flat_in.size):
        flat_out[i] = log_j(nu, complex(flat_in[i]))
    return out


def reduced_j_array(nu, w):
    w = np.asarray(w, dtype=complex)
    out = np.empty(w.shape, dtype=complex)
    flat_in = w.ravel()
    flat_out = out.ravel()
    for i in range(flat_in.size):
        flat_out[i] = reduced_j(nu, complex(flat_in[i]))
    return out


def weyl_denominators(nu0, ells, k, radius):
    """ell/R - k * J_{nu+1}(kR)/J_nu(kR) for nu = nu0 + ell, per ell."""
    ells = np.asarray(ells, dtype=np.int64)
    out = np.empty(ells.shape, dtype=complex)
    z = k * radius
    for i, ell in enumerate(ells):
        h = j_ratio_cf(nu0 + ell, z)
        out[i] = ell / radius - k * h
    return out


def tridiag_solve(lower, diag, upper, rhs):
    """Thomas algorithm; lower[i] couples row i+1 to i, upper[i] row i to i+1."""
    n = len(diag)
    cp = np.empty(n, dtype=complex)
    dp = np.empty(n, dtype=complex)
    lower = [complex(v) for v in lower]
    diag = [complex(v) for v in diag]
    upper = [complex(v) for v in upper]
    rhs = [complex(v) for v in rhs]
    piv = diag[0]
    if piv == 0:
        raise ZeroDivisionError("zero pivot in tridiagonal solve")
    c_prev = upper[0] / piv if n > 1 else 0j
    d_prev = rhs[0] / piv
    cp[0] = c_prev
    dp[0] = d_prev
    for i in range(1, n):
        piv = diag[i] - lower[i - 1] * c_prev
        if piv == 0:
            raise ZeroDivisionError("zero pivot in tridiagonal solve")
        c_prev = upper[i] / piv if i < n - 1 else 0j
        d_prev = (rhs[i] - lower[i - 1] * d_prev) / piv
        cp[i] = c_prev
        dp[i] = d_prev
    x = np.empty(n, dtype=complex)
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x
