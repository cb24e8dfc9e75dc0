"""The Laplacian on the n-ball, decomposed into boundary harmonics.

Boundary mappings: ``Gamma0 f = df/dnu`` (Neumann trace) and
``Gamma1 f = f`` (Dirichlet trace).  On a degree-``ell`` harmonic the Weyl
function is the Neumann-to-Dirichlet multiplier ``M_ell(lambda) = u(R)/u'(R)``
with ``u(r) = r^{-(n-2)/2} J_nu(k r)``, ``nu = ell + (n-2)/2``, ``k = sqrt(lambda)``.
"""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import special_functions as sf
from ._backend import kernels
from .errors import InadmissibleSpectralPoint, PoleError, ValidationError

_POLE_RTOL = 1e-13


@dataclass(frozen=True)
class Domain:
    """Ball of radius ``R`` in ``R^n``."""

    n: int
    R: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValidationError(f"dimension n must be an integer >= 2, got {self.n}")
        if not (math.isfinite(self.R) and self.R > 0):
            raise ValidationError(f"radius must be finite and positive, got {self.R}")

    @property
    def nu_shift(self) -> float:
        return (self.n - 2) / 2.0

    def sphere_area(self) -> float:
        """Surface area of the boundary sphere of radius R."""
        n = self.n
        return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0) * self.R ** (n - 1)


@dataclass(frozen=True)
class Mode:
    ell: int
    nu: float
    lb_eigenvalue: float
    multiplicity: int


def make_ball(n: int, R: float = 1.0) -> Domain:
    return Domain(int(n) if float(n).is_integer() else n, float(R))


def multiplicity(n: int, ell: int) -> int:
    """Dimension of degree-``ell`` spherical harmonics on S^{n-1}."""
    if ell < 0:
        raise ValidationError("ell must be >= 0")
    if ell == 0:
        return 1
    return math.comb(ell + n - 1, n - 1) - math.comb(ell + n - 3, n - 1)


def make_mode(domain: Domain, ell: int) -> Mode:
    ell = int(ell)
    if ell < 0:
        raise ValidationError("ell must be >= 0")
    n = domain.n
    return Mode(ell=ell, nu=ell + domain.nu_shift,
                lb_eigenvalue=ell * (ell + n - 2) / domain.R ** 2,
                multiplicity=multiplicity(n, ell))


def modes(domain: Domain, cutoff: int) -> list[Mode]:
    """Modes ``ell = 0..cutoff`` in increasing order."""
    if cutoff < 0:
        raise ValidationError("cutoff must be >= 0")
    return [make_mode(domain, ell) for ell in range(cutoff + 1)]


def multiplicities(domain: Domain, cutoff: int) -> np.ndarray:
    return np.array([multiplicity(domain.n, ell) for ell in range(cutoff + 1)], dtype=np.int64)


def wavenumber(lam) -> complex:
    """Principal square root with ``Im k >= 0``."""
    k = cmath.sqrt(complex(lam))
    if k.imag < 0 or (k.imag == 0 and k.real < 0):
        k = -k
    return k


def _require_off_spectrum(lam: complex) -> complex:
    lam = complex(lam)
    if lam.imag == 0 and lam.real >= 0:
        raise InadmissibleSpectralPoint(
            f"lambda={lam} lies on [0, inf); the Weyl function is only evaluated off that half-line")
    return lam


def _mode_of(domain: Domain, mode) -> Mode:
    return mode if isinstance(mode, Mode) else make_mode(domain, mode)


def weyl_denominator(domain: Domain, mode, lam, *, k=None) -> complex:
    """``u'(R)/u(R) = ell/R - k J_{nu+1}(kR)/J_nu(kR)``."""
    mode = _mode_of(domain, mode)
    if k is None:
        k = wavenumber(lam)
    return mode.ell / domain.R - k * kernels.j_ratio_cf(mode.nu, k * domain.R)


def weyl_value(domain: Domain, mode, lam, *, k=None) -> complex:
    """Neumann-to-Dirichlet multiplier ``M_ell(lambda)``.

    ``k`` may be supplied to evaluate with a specific branch of ``sqrt(lambda)``;
    the result does not depend on it.

    Raises
    ------
    PoleError
        ``lambda`` is a Neumann eigenvalue for this mode.
    """
    lam = _require_off_spectrum(lam)
    mode = _mode_of(domain, mode)
    if k is None:
        k = wavenumber(lam)
    h = kernels.j_ratio_cf(mode.nu, k * domain.R)
    lead = mode.ell / domain.R
    den = lead - k * h
    if abs(den) <= _POLE_RTOL * (lead + abs(k * h) + abs(k)):
        raise PoleError(f"lambda={lam} is a Neumann eigenvalue of mode ell={mode.ell}",
                        ell=mode.ell, lam=lam)
    return complex((1.0 / den).real) if lam.imag == 0 else 1.0 / den


def _denominators(domain: Domain, cutoff: int, k: complex, threads: int = 1) -> np.ndarray:
    ells = np.arange(cutoff + 1, dtype=np.int64)
    if threads <= 1 or cutoff < 256:
        return kernels.weyl_denominators(domain.nu_shift, ells, k, domain.R)
    chunks = np.array_split(ells, threads * 4)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map() preserves chunk order, so the result is independent of scheduling
        parts = list(pool.map(
            lambda c: kernels.weyl_denominators(domain.nu_shift, c, k, domain.R), chunks))
    return np.concatenate(parts)


def mode_table(domain: Domain, cutoff: int, lam, threads: int = 1):
    """``(M_ell(lambda), ||gamma(lambda) e_ell||^2)`` for ``ell = 0..cutoff``."""
    lam = _require_off_spectrum(lam)
    k = wavenumber(lam)
    ells = np.arange(cutoff + 1, dtype=np.int64)
    den = _denominators(domain, cutoff, k, threads)
    kh = ells / domain.R - den
    bad = np.abs(den) <= _POLE_RTOL * (ells / domain.R + np.abs(kh) + abs(k))
    if bad.any():
        ell = int(np.argmax(bad))
        raise PoleError(f"lambda={lam} is a Neumann eigenvalue of mode ell={ell}", ell=ell, lam=lam)
    m_values = 1.0 / den
    if lam.imag == 0:
        m_values = m_values.real + 0j   # real below the spectrum
    if lam.imag != 0:
        gamma_sq = np.abs(m_values) ** 2 * kh.imag / lam.imag
    else:
        gamma_sq = np.array([
            gamma_norm_sq_from_weyl(domain, m_values[ell], lam, k, ell + domain.nu_shift)
            for ell in range(cutoff + 1)])
    return m_values, gamma_sq


def weyl_values(domain: Domain, cutoff: int, lam, threads: int = 1) -> np.ndarray:
    """``M_ell(lambda)`` for ``ell = 0..cutoff`` (vectorized)."""
    lam = _require_off_spectrum(lam)
    k = wavenumber(lam)
    ells = np.arange(cutoff + 1, dtype=np.int64)
    den = _denominators(domain, cutoff, k, threads)
    scale = ells / domain.R + np.abs(den - ells / domain.R) + abs(k)
    bad = np.abs(den) <= _POLE_RTOL * scale
    if bad.any():
        ell = int(np.argmax(bad))
        raise PoleError(f"lambda={lam} is a Neumann eigenvalue of mode ell={ell}", ell=ell, lam=lam)
    m_values = 1.0 / den
    return m_values.real + 0j if lam.imag == 0 else m_values


def gamma_norm_sq_from_weyl(domain: Domain, m_value: complex, lam: complex, k: complex,
                            nu: float) -> float:
    """``||gamma(lambda) e||^2`` from the normalized Lommel integral.

    With the interior solution scaled to unit Neumann data of a unit boundary
    harmonic, ``||gamma e||^2 = |M|^2 * int_0^R |J(kr)/J(kR)|^2 r dr / R``.
    """
    lam = complex(lam)
    if lam.imag != 0:
        h = kernels.j_ratio_cf(nu, k * domain.R)
        normalized = domain.R * (k * h).imag / lam.imag
    else:
        normalized = sf.bessel_norm_integral(nu, k, domain.R, normalized=True)
    return abs(m_value) ** 2 * normalized / domain.R


def gamma_norm(domain: Domain, mode, lam) -> float:
    """``||gamma(lambda) e||`` for a unit boundary harmonic ``e`` of degree ell."""
    mode = _mode_of(domain, mode)
    lam = complex(lam)
    k = wavenumber(lam)
    m_value = weyl_value(domain, mode, lam, k=k)
    return math.sqrt(gamma_norm_sq_from_weyl(domain, m_value, lam, k, mode.nu))


def gamma_norms_sq(domain: Domain, cutoff: int, lam) -> np.ndarray:
    """Vectorized ``||gamma(lambda) e_ell||^2`` for ``ell = 0..cutoff``."""
    return mode_table(domain, cutoff, lam)[1]


def gamma_profile(domain: Domain, mode, lam, r) -> np.ndarray:
    """Radial profile of ``gamma(lambda) e`` sampled at radii ``r``.

    ``f = g(r) Y`` with ``Y`` the harmonic normalized on the unit sphere, so the
    L^2(ball) norm is ``(int |g|^2 r^{n-1} dr)^{1/2}``.
    """
    mode = _mode_of(domain, mode)
    lam = complex(lam)
    R = domain.R
    r = np.asarray(r, dtype=float)
    m_value = weyl_value(domain, mode, lam)
    inner = sf.reduced_bessel_j_array(mode.nu, lam * r ** 2)
    edge = sf.reduced_bessel_j(mode.nu, lam * R ** 2)
    return R ** (-(domain.n - 1) / 2.0) * (r / R) ** mode.ell * inner / edge * m_value


def lb_eigenvalues(domain: Domain, cutoff: int) -> np.ndarray:
    """Multiplicity-expanded, sorted eigenvalues of -Laplace-Beltrami on the sphere."""
    ells = np.arange(cutoff + 1)
    vals = ells * (ells + domain.n - 2) / domain.R ** 2
    return np.repeat(vals, multiplicities(domain, cutoff))


def lb_counting_check(domain: Domain, cutoff: int) -> float:
    """Slope of ``log lambda_k`` against ``log k`` over ``k in [K/10, K]``.

    Tends to ``2/(n-1)``; only the exponent is meaningful, not the constant.
    """
    vals = lb_eigenvalues(domain, cutoff)
    K = vals.size
    if K < 100:
        raise ValidationError(f"need at least 100 eigenvalues, cutoff={cutoff} gives {K}")
    k = np.arange(1, K + 1)
    lo = max(2, K // 10)
    sel = slice(lo - 1, K)
    keep = vals[sel] > 0
    slope, _ = np.polyfit(np.log(k[sel][keep]), np.log(vals[sel][keep]), 1)
    return float(slope)
