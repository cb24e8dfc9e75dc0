import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robinlap import special_functions as sf
from robinlap.errors import BesselOverflowError, PoleError, ValidationError

mpmath.mp.dps = 40

ORDERS = [0.0, 0.5, 1.0, 2.5, 5.0, 20.0, 50.0]
ARGS = [0.3, 1 + 1j, 3 - 2j, 1j, 7.5 + 0.2j, -4 + 3j, 12j, 25 + 10j, 50.0, 35 - 35j]


def mp_j(nu, z):
    return complex(mpmath.besselj(nu, mpmath.mpc(z.real, z.imag)))


def mp_log_j(nu, z):
    return complex(mpmath.log(mpmath.besselj(nu, mpmath.mpc(z.real, z.imag))))


def envelope(nu, z):
    # |J| can cancel near zeros; measure error against the size of the terms
    return max(abs(mp_j(nu, z)), abs(mp_j(nu + 1, z)), 1e-300)


@pytest.mark.parametrize("nu", ORDERS)
@pytest.mark.parametrize("z", ARGS)
def test_log_j_matches_mpmath(kernels, nu, z):
    z = complex(z)
    got = cmath.exp(kernels.log_j(nu, z))
    assert abs(got - mp_j(nu, z)) <= 1e-12 * envelope(nu, z)


@pytest.mark.parametrize("nu", ORDERS)
@pytest.mark.parametrize("z", ARGS)
def test_ratio_matches_mpmath(kernels, nu, z):
    z = complex(z)
    want = mp_j(nu + 1, z) / mp_j(nu, z)
    assert abs(kernels.j_ratio_cf(nu, z) - want) <= 1e-11 * max(1.0, abs(want))


@pytest.mark.parametrize("nu,z", [(1000.0, 1.0), (1e4, 3 + 1j), (300.0, 150j), (2000.0, 40 + 40j)])
def test_large_order_log_scale(kernels, nu, z):
    want = mp_log_j(nu, complex(z))
    got = kernels.log_j(nu, complex(z))
    assert abs(got.real - want.real) <= 1e-10 * abs(want.real)
    assert abs(cmath.exp(1j * (got.imag - want.imag)) - 1) <= 1e-9


def test_backends_agree():
    from robinlap._backend import available_backends
    found = available_backends()
    if len(found) < 2:
        pytest.skip("compiled extension not built")
    z = np.linspace(0.1, 40, 101) + 1j * np.linspace(-5, 5, 101)
    a = found["python"].log_j_array(2.5, z)
    b = found["cython"].log_j_array(2.5, z)
    assert np.max(np.abs(np.exp(a) - np.exp(b)) / np.abs(np.exp(a))) < 1e-12
    ells = np.arange(0, 300, dtype=np.int64)
    da = found["python"].weyl_denominators(0.5, ells, 0.3 + 0.9j, 1.5)
    db = found["cython"].weyl_denominators(0.5, ells, 0.3 + 0.9j, 1.5)
    assert np.max(np.abs(da - db) / np.abs(da)) < 1e-13


def test_tridiag_solve(kernels):
    rng = np.random.default_rng(3)
    n = 50
    lower = rng.normal(size=n - 1) + 0j
    upper = rng.normal(size=n - 1) + 0j
    diag = 4 + rng.normal(size=n) + 1j
    rhs = rng.normal(size=n) + 1j * rng.normal(size=n)
    mat = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
    x = np.asarray(kernels.tridiag_solve(lower, diag, upper, rhs))
    assert np.allclose(mat @ x, rhs, rtol=0, atol=1e-12)


# -- public API examples -----------------------------------------------------

def test_bessel_j_examples():
    assert sf.bessel_j(0, 0) == 1
    assert sf.bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-13)
    assert abs(sf.bessel_j(0, 2.404826)) < 1e-5


def test_bessel_j_prime_examples():
    assert sf.bessel_j_prime(0, 0) == 0
    assert sf.bessel_j_prime(1, 0) == 0.5
    assert sf.bessel_j_prime(0, 1j) == pytest.approx(-0.5651591039924851j, rel=1e-12)
    with pytest.raises(BesselOverflowError):
        sf.bessel_j_prime(0.5, 0)


def test_bessel_ratio_examples():
    assert sf.bessel_ratio(0, 1j) == pytest.approx(2.240194j, abs=1e-5)
    z0 = 2.404825557695773
    assert abs(sf.bessel_ratio(0, z0)) < 1e-12
    assert sf.bessel_ratio(100, 1).real == pytest.approx(0.01, rel=1e-4)


def test_bessel_ratio_pole():
    j1_zero = 3.8317059702075125          # J_0' = -J_1
    with pytest.raises(PoleError) as info:
        sf.bessel_ratio(0, j1_zero)
    assert info.value.nu == 0 and info.value.z == j1_zero


def test_log_bessel_examples():
    assert sf.log_bessel_j(0, 1).value() == pytest.approx(sf.bessel_j(0, 1), rel=1e-12)
    lead = -1000 * math.log(2) - math.lgamma(1001)
    assert sf.log_bessel_j(1000, 1).log_magnitude == pytest.approx(lead, abs=1e-3)
    # the next series term shifts the log by -1/(4*1001)
    assert sf.log_bessel_j(1000, 1).log_magnitude == pytest.approx(lead - 1 / 4004, abs=1e-6)
    a = sf.log_bessel_j(3, 2 + 1j)
    b = sf.log_bessel_j(3, 2 - 1j)
    assert b.log_magnitude == a.log_magnitude and b.phase == pytest.approx(-a.phase, abs=1e-14)


def test_log_scaled_zero_and_overflow():
    assert sf.log_bessel_j(1, 0).is_zero
    with pytest.raises(BesselOverflowError):
        sf.bessel_j(1000, 1)
    with pytest.raises(BesselOverflowError):
        sf.log_bessel_j(1000, 1).value()


def test_validation():
    with pytest.raises(ValidationError):
        sf.bessel_j(-1, 1)
    with pytest.raises(ValidationError):
        sf.bessel_j(1, complex(math.inf, 0))


def test_norm_integral_examples():
    assert sf.bessel_norm_integral(0.5, 1, math.pi) == pytest.approx(1.0, abs=1e-10)
    lommel = sf.bessel_norm_integral(3, 1 + 0.5j, 1, method="lommel")
    quad = sf.bessel_norm_integral(3, 1 + 0.5j, 1, method="quadrature")
    assert abs(lommel - quad) <= 1e-9 * quad
    assert sf.bessel_norm_integral(2, 1 - 2j, 1.5) == pytest.approx(
        sf.bessel_norm_integral(2, 1 + 2j, 1.5), rel=1e-13)


def test_norm_integral_mpmath():
    nu, k, R = 1.5, 2 + 0.7j, 1.3
    want = mpmath.quad(lambda r: abs(mpmath.besselj(nu, mpmath.mpc(k.real, k.imag) * r)) ** 2 * r,
                       [0, R])
    assert sf.bessel_norm_integral(nu, k, R) == pytest.approx(float(want), rel=1e-11)


# -- invariants ----------------------------------------------------------------

orders = st.sampled_from([0.0, 0.5, 1.0, 5.0, 20.0])
args = st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False).filter(
    lambda z: abs(z) > 1e-3)


@given(orders, args)
@settings(max_examples=200, deadline=None)
def test_recurrence(nu, z):
    if nu == 0:
        lower = -sf.bessel_j(1, z)          # J_{-1} = -J_1
    elif nu == 0.5:
        lower = cmath.sqrt(2 / (math.pi * z)) * cmath.cos(z)
    else:
        lower = sf.bessel_j(nu - 1, z)
    upper = sf.bessel_j(nu + 1, z)
    mid = 2 * nu / z * sf.bessel_j(nu, z)
    scale = max(abs(lower), abs(upper), abs(mid), 1e-300)
    assert abs(lower + upper - mid) <= 1e-9 * scale


@given(orders, args)
@settings(max_examples=200, deadline=None)
def test_conjugate_symmetry(nu, z):
    a = sf.bessel_j(nu, z)
    b = sf.bessel_j(nu, z.conjugate())
    assert abs(b - a.conjugate()) <= 1e-13 * max(abs(a), 1e-300)


@given(orders, args)
@settings(max_examples=200, deadline=None)
def test_ratio_times_derivative(nu, z):
    try:
        ratio = sf.bessel_ratio(nu, z)
    except PoleError:
        return
    jp = sf.bessel_j_prime(nu, z)
    j = sf.bessel_j(nu, z)
    if abs(j) < 1e-290 or abs(jp) < 1e-290:
        return
    assert abs(ratio * jp - j) <= 1e-9 * abs(j)


@given(st.sampled_from([0.0, 0.5, 3.0, 10.0]),
       st.complex_numbers(min_magnitude=0.05, max_magnitude=15, allow_nan=False,
                          allow_infinity=False),
       st.floats(0.2, 3.0))
@settings(max_examples=60, deadline=None)
def test_norm_integral_positive(nu, k, R):
    assert sf.bessel_norm_integral(nu, k, R) > 0
