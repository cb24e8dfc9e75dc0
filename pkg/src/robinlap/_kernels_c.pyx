# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same signatures and semantics as ``_kernels_py``."""
import numpy as np

from libc.math cimport lgamma, log, ceil, fabs, INFINITY, fmax

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex clog(double complex)

DEF _EPS = 1e-17
DEF _TINY = 1e-300
DEF _RESCALE = 1e150

SERIES_RADIUS2 = 25.0
cdef double _SERIES_RADIUS2 = 25.0


cdef double complex _log_j_series(double nu, double complex z) nogil:
    cdef double complex w = -(z * z) / 4.0
    cdef double complex t = 1.0
    cdef double complex s = 1.0
    cdef long m = 0
    cdef double complex head
    while m < 200000:
        m += 1
        t = t * w / (m * (nu + m))
        s = s + t
        if cabs(t) <= _EPS * cabs(s):
            break
    if s == 0:
        return -INFINITY
    if nu != 0:
        head = nu * clog(z / 2.0)
    else:
        head = 0
    return head - lgamma(nu + 1.0) + clog(s)


cdef double complex _reduced_j(double nu, double complex w) nogil:
    cdef double complex q = -w / 4.0
    cdef double complex t = 1.0
    cdef double complex s = 1.0
    cdef long m = 0
    while m < 200000:
        m += 1
        t = t * q / (m * (nu + m))
        s = s + t
        if cabs(t) <= _EPS * cabs(s):
            break
    return s


cdef int _j_ratio_cf(double nu, double complex z, double complex *out) nogil:
    cdef double complex zi, f, c, d, b, delta
    cdef double a
    cdef long m, limit
    if z == 0:
        out[0] = 0
        return 0
    zi = 1.0 / z
    f = _TINY
    c = f
    d = 0
    limit = <long>(4.0 * cabs(z)) + 20000
    for m in range(1, limit):
        a = 1.0 if m == 1 else -1.0
        b = 2.0 * (nu + m) * zi
        d = b + a * d
        if d == 0:
            d = _TINY
        c = b + a / c
        if c == 0:
            c = _TINY
        d = 1.0 / d
        delta = c * d
        f = f * delta
        if cabs(delta - 1.0) < 1e-16:
            out[0] = f
            return 0
    return -1


cdef int _log_j(double nu, double complex z, double complex *out) nogil:
    cdef double a2, acc, big
    cdef long m, j
    cdef double mu
    cdef double complex log_anchor, y, y_hi, y_lo, zi
    if z == 0:
        out[0] = 0 if nu == 0 else -INFINITY
        return 0
    a2 = cabs(z) * cabs(z) / 4.0
    if a2 <= fmax(nu + 1.0, _SERIES_RADIUS2):
        out[0] = _log_j_series(nu, z)
        return 0
    m = <long>ceil(a2 - nu)
    if m < 1:
        m = 1
    mu = nu + m
    log_anchor = _log_j_series(mu, z)
    if _j_ratio_cf(mu, z, &y_hi) != 0:
        return -1
    y = 1.0
    acc = 0.0
    zi = 1.0 / z
    j = m
    while j > 0:
        y_lo = 2.0 * (nu + j) * zi * y - y_hi
        y_hi = y
        y = y_lo
        big = cabs(y)
        if big > _RESCALE:
            y = y / big
            y_hi = y_hi / big
            acc += log(big)
        j -= 1
    if y == 0:
        out[0] = -INFINITY
        return 0
    out[0] = log_anchor + clog(y) + acc
    return 0


def log_j_series(double nu, double complex z):
    return _log_j_series(nu, z)


def reduced_j(double nu, double complex w):
    return _reduced_j(nu, w)


def j_ratio_cf(double nu, double complex z):
    cdef double complex out
    if _j_ratio_cf(nu, z, &out) != 0:
        raise ArithmeticError(
            f"continued fraction for J ratio did not converge (nu={nu}, z={z})")
    return out


def log_j(double nu, double complex z):
    cdef double complex out
    if _log_j(nu, z, &out) != 0:
        raise ArithmeticError(f"J ratio continued fraction failed (nu={nu}, z={z})")
    return out


def log_j_array(double nu, z):
    cdef double complex[::1] zin = np.ascontiguousarray(z, dtype=complex).ravel()
    res = np.empty(zin.shape[0], dtype=complex)
    cdef double complex[::1] out = res
    cdef Py_ssize_t i
    cdef int bad = 0
    with nogil:
        for i in range(zin.shape[0]):
            if _log_j(nu, zin[i], &out[i]) != 0:
                bad = 1
    if bad:
        raise ArithmeticError(f"J ratio continued fraction failed (nu={nu})")
    return res.reshape(np.shape(z))


def reduced_j_array(double nu, w):
    cdef double complex[::1] win = np.ascontiguousarray(w, dtype=complex).ravel()
    res = np.empty(win.shape[0], dtype=complex)
    cdef double complex[::1] out = res
    cdef Py_ssize_t i
    with nogil:
        for i in range(win.shape[0]):
            out[i] = _reduced_j(nu, win[i])
    return res.reshape(np.shape(w))


def weyl_denominators(double nu0, ells, double complex k, double radius):
    cdef long long[::1] ls = np.ascontiguousarray(ells, dtype=np.int64).ravel()
    res = np.empty(ls.shape[0], dtype=complex)
    cdef double complex[::1] out = res
    cdef double complex z = k * radius
    cdef double complex h
    cdef Py_ssize_t i
    cdef int bad = 0
    with nogil:
        for i in range(ls.shape[0]):
            if _j_ratio_cf(nu0 + ls[i], z, &h) != 0:
                bad = 1
                break
            out[i] = ls[i] / radius - k * h
    if bad:
        raise ArithmeticError("continued fraction for J ratio did not converge")
    return res


def tridiag_solve(lower, diag, upper, rhs):
    cdef double complex[::1] lo = np.ascontiguousarray(lower, dtype=complex)
    cdef double complex[::1] di = np.ascontiguousarray(diag, dtype=complex)
    cdef double complex[::1] up = np.ascontiguousarray(upper, dtype=complex)
    cdef double complex[::1] b = np.ascontiguousarray(rhs, dtype=complex)
    cdef Py_ssize_t n = di.shape[0]
    cp_arr = np.empty(n, dtype=complex)
    dp_arr = np.empty(n, dtype=complex)
    x_arr = np.empty(n, dtype=complex)
    cdef double complex[::1] cp = cp_arr
    cdef double complex[::1] dp = dp_arr
    cdef double complex[::1] x = x_arr
    cdef double complex piv
    cdef Py_ssize_t i
    cdef int bad = 0
    with nogil:
        piv = di[0]
        if piv == 0:
            bad = 1
        else:
            cp[0] = up[0] / piv if n > 1 else 0
            dp[0] = b[0] / piv
            for i in range(1, n):
                piv = di[i] - lo[i - 1] * cp[i - 1]
                if piv == 0:
                    bad = 1
                    break
                cp[i] = up[i] / piv if i < n - 1 else 0
                dp[i] = (b[i] - lo[i - 1] * dp[i - 1]) / piv
            if not bad:
                x[n - 1] = dp[n - 1]
                i = n - 2
                while i >= 0:
                    x[i] = dp[i] - cp[i] * x[i + 1]
                    i -= 1
    if bad:
        raise ZeroDivisionError("zero pivot in tridiagonal solve")
    return x_arr
