"""Bessel functions of the first kind for real order and complex argument.

Strategy
--------
* ascending series where it is well conditioned (``|z|^2/4 <= max(nu+1, 25)``);
* otherwise the series is evaluated at a higher anchor order and carried
  down by the (stable, backward) three-term recurrence;
* ratios ``J_{nu+1}/J_nu`` come from the modified Lentz continued fraction and
  never form numerator or denominator separately.

Everything is evaluated in log scale internally so that orders up to 1e4
do not underflow.  The heavy lifting happens in ``_kernels_c`` (compiled)
or ``_kernels_py`` (fallback); see :mod:`robinlap._backend`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._backend import kernels
from .errors import BesselOverflowError, PoleError, QuadratureError, ValidationError

#: log-magnitude window inside which exp() is a normal double
_LOG_MAX = 709.0
_LOG_MIN = -708.0
_POLE_RTOL = 1e-13


@dataclass(frozen=True)
class LogScaledComplex:
    """A nonzero complex number stored as ``exp(log_magnitude + i*phase)``.

    ``log_magnitude == -inf`` marks an exact zero.
    """

    log_magnitude: float
    phase: float

    @classmethod
    def from_log(cls, log_value: complex) -> "LogScaledComplex":
        mag = log_value.real
        if mag == -math.inf:
            return cls(-math.inf, 0.0)
        ph = math.remainder(log_value.imag, 2.0 * math.pi)
        if ph == -math.pi:
            ph = math.pi
        return cls(mag, ph)

    @property
    def is_zero(self) -> bool:
        return self.log_magnitude == -math.inf

    def conjugate(self) -> "LogScaledComplex":
        if self.is_zero or self.phase == math.pi:
            return self
        return LogScaledComplex(self.log_magnitude, -self.phase)

    def value(self) -> complex:
        """Exponentiate; raises :class:`BesselOverflowError` if not representable."""
        if self.is_zero:
            return 0j
        if not _LOG_MIN <= self.log_magnitude <= _LOG_MAX:
            raise BesselOverflowError(
                f"|value| = exp({self.log_magnitude:.6g}) is outside double range; "
                "keep working with the log-scaled form")
        return cmath.exp(complex(self.log_magnitude, self.phase))

    def __complex__(self) -> complex:
        return self.value()


def _check_order(nu) -> float:
    nu = float(nu)
    if not math.isfinite(nu) or nu < 0:
        raise ValidationError(f"Bessel order must be finite and >= 0, got {nu}")
    return nu


def _check_arg(z) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValidationError(f"argument must be finite, got {z}")
    return z


def log_bessel_j(nu, z) -> LogScaledComplex:
    """Log-scaled ``J_nu(z)``; usable for orders up to 1e4 without underflow."""
    nu = _check_order(nu)
    z = _check_arg(z)
    return LogScaledComplex.from_log(kernels.log_j(nu, z))


def bessel_j(nu, z) -> complex:
    """``J_nu(z)`` for real ``nu >= 0`` and complex ``z`` (principal branch).

    Raises
    ------
    BesselOverflowError
        If the value over- or underflows double precision; call
        :func:`log_bessel_j` instead.
    """
    nu = _check_order(nu)
    z = _check_arg(z)
    log_value = kernels.log_j(nu, z)
    if log_value.real == -math.inf:
        return 0j
    if not _LOG_MIN <= log_value.real <= _LOG_MAX:
        raise BesselOverflowError(
            f"J_{nu}({z}) is not representable in double precision; use log_bessel_j")
    return cmath.exp(log_value)


def bessel_j_next_ratio(nu, z) -> complex:
    """``J_{nu+1}(z) / J_nu(z)`` from the continued fraction."""
    return kernels.j_ratio_cf(_check_order(nu), _check_arg(z))


def bessel_j_prime(nu, z) -> complex:
    """``J_nu'(z) = (J_{nu-1}(z) - J_{nu+1}(z))/2``, evaluated as
    ``(nu/z) J_nu(z) - J_{nu+1}(z)`` so that no negative order is needed."""
    nu = _check_order(nu)
    z = _check_arg(z)
    if z == 0:
        if nu == 1:
            return 0.5 + 0j
        if nu == 0 or nu > 1:
            return 0j
        raise BesselOverflowError(f"J_nu'(0) is unbounded for 0 < nu < 1 (nu={nu})")
    l_next = kernels.log_j(nu + 1.0, z)
    if nu == 0:
        value_log = l_next + 1j * math.pi
    else:
        l_this = kernels.log_j(nu, z)
        # combine (nu/z) J_nu - J_{nu+1} around the larger term
        a = l_this + cmath.log(nu / z)
        b = l_next
        if a.real == -math.inf and b.real == -math.inf:
            return 0j
        base = a if a.real >= b.real else b
        s = cmath.exp(a - base) - cmath.exp(b - base)
        if s == 0:
            return 0j
        value_log = base + cmath.log(s)
    if not _LOG_MIN <= value_log.real <= _LOG_MAX:
        raise BesselOverflowError(
            f"J_{nu}'({z}) is not representable in double precision")
    return cmath.exp(value_log)


def bessel_ratio(nu, z) -> complex:
    """``J_nu(z) / J_nu'(z)`` without forming either factor.

    Raises
    ------
    PoleError
        If ``z`` is (numerically) a zero of ``J_nu'``.
    """
    nu = _check_order(nu)
    z = _check_arg(z)
    if z == 0:
        if nu > 0:
            return 0j
        raise PoleError("J_0'(0) = 0: bessel_ratio has a pole at z=0 for nu=0", nu=nu, z=z)
    h = kernels.j_ratio_cf(nu, z)
    lead = nu / z
    den = lead - h
    # the unit term keeps the test meaningful for nu = 0, where den = -h
    if abs(den) <= _POLE_RTOL * (abs(lead) + abs(h) + 1.0):
        raise PoleError(f"z={z} is a zero of J_{nu}'; bessel_ratio has a pole", nu=nu, z=z)
    return 1.0 / den


def reduced_bessel_j(nu, w) -> complex:
    """``Gamma(nu+1) (z/2)^(-nu) J_nu(z)`` written as an entire function of ``w = z**2``.

    Real on the real ``w`` axis; equals 1 at ``w = 0``.
    """
    nu = _check_order(nu)
    w = complex(w)
    if abs(w) / 4.0 <= max(nu + 1.0, kernels.SERIES_RADIUS2):
        return kernels.reduced_j(nu, w)
    z = cmath.sqrt(w)
    log_value = kernels.log_j(nu, z) - nu * cmath.log(z / 2.0) + math.lgamma(nu + 1.0)
    return cmath.exp(log_value)


def reduced_bessel_j_array(nu, w) -> np.ndarray:
    """Vectorized :func:`reduced_bessel_j`."""
    nu = _check_order(nu)
    w = np.asarray(w, dtype=complex)
    out = np.empty(w.shape, dtype=complex)
    direct = np.abs(w) / 4.0 <= max(nu + 1.0, kernels.SERIES_RADIUS2)
    if direct.any():
        out[direct] = kernels.reduced_j_array(nu, w[direct])
    for idx in zip(*np.nonzero(~direct)):
        out[idx] = reduced_bessel_j(nu, w[idx])
    return out


def _degenerate(k: complex, threshold: float) -> bool:
    return abs((k * k).imag) <= threshold * abs(k) ** 2


def _lommel_normalized(nu: float, k: complex, R: float) -> float:
    # R * [b J(aR) J'(bR) - a J'(aR) J(bR)] / (a^2 - b^2) with a = k, b = conj(k),
    # divided by |J(kR)|^2.  With rho = J'/J at kR: = R * Im(k*h) / Im(k^2),
    # where h = J_{nu+1}/J_nu at kR.
    h = kernels.j_ratio_cf(nu, k * R)
    return R * (k * h).imag / (k * k).imag


def _quad(integrand, R: float, what: str) -> float:
    value, abserr, info = integrate.quad(
        integrand, 0.0, R, epsabs=1e-12, epsrel=1e-11, limit=400, full_output=1)[:3]
    if abserr > max(1e-12, 1e-9 * abs(value)):
        raise QuadratureError(f"{what}: quadrature error estimate {abserr:.3g} exceeds tolerance")
    return value


def bessel_norm_integral(nu, k, R, *, method: str = "auto",
                         degenerate_threshold: float = 1e-8,
                         normalized: bool = False) -> float:
    """``\\int_0^R |J_nu(k r)|^2 r dr``.

    Parameters
    ----------
    nu : float
        Order, ``>= 0``.
    k : complex
        Wave number, nonzero.
    R : float
        Upper limit, ``> 0``.
    method : {"auto", "lommel", "quadrature"}
        ``auto`` uses the closed-form cross-product (Lommel) identity unless
        ``|Im k^2| <= degenerate_threshold * |k|^2``, where its denominator
        ``k^2 - conj(k)^2`` degenerates; then adaptive Gauss-Kronrod quadrature.
    normalized : bool
        Return the integral divided by ``|J_nu(kR)|^2`` (never underflows).

    Raises
    ------
    QuadratureError
        The quadrature did not converge to absolute tolerance 1e-12.
    """
    nu = _check_order(nu)
    k = _check_arg(k)
    R = float(R)
    if k == 0:
        raise ValidationError("k must be nonzero")
    if not R > 0:
        raise ValidationError(f"R must be positive, got {R}")
    if method not in ("auto", "lommel", "quadrature"):
        raise ValidationError(f"unknown method {method!r}")
    use_lommel = method == "lommel" or (method == "auto" and not _degenerate(k, degenerate_threshold))
    if use_lommel:
        if (k * k).imag == 0:
            raise ValidationError("Lommel identity is singular for real k^2")
        value = _lommel_normalized(nu, k, R)
        if normalized:
            return value
        log_edge = 2.0 * kernels.log_j(nu, k * R).real
        return value * math.exp(log_edge) if log_edge > -745 else 0.0
    if normalized:
        log_edge = kernels.log_j(nu, k * R).real
        if log_edge == -math.inf:
            raise PoleError("J_nu(kR) = 0: normalized integral is unbounded", nu=nu, z=k * R)

        def integrand(r):
            if r == 0:
                return 0.0
            return math.exp(2.0 * (kernels.log_j(nu, k * r).real - log_edge)) * r
    else:
        def integrand(r):
            if r == 0:
                return 0.0
            lm = kernels.log_j(nu, k * r).real
            return math.exp(2.0 * lm) * r if lm > -370 else 0.0
    return _quad(integrand, R, f"norm integral (nu={nu}, k={k}, R={R})")
