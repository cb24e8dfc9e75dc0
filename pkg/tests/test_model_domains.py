import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robinlap import fd_oracle as fd
from robinlap import model_domains as md
from robinlap.errors import InadmissibleSpectralPoint, ValidationError

DISK = md.make_ball(2, 1.0)


def test_make_ball():
    assert md.make_ball(3, 2).sphere_area() == pytest.approx(16 * math.pi)
    with pytest.raises(ValidationError):
        md.make_ball(1, 1)
    with pytest.raises(ValidationError):
        md.make_ball(2, 0)


@pytest.mark.parametrize("n,cutoff,expected", [
    (2, 3, [1, 2, 2, 2]), (3, 3, [1, 3, 5, 7]), (4, 2, [1, 4, 9])])
def test_multiplicities(n, cutoff, expected):
    assert [m.multiplicity for m in md.modes(md.make_ball(n), cutoff)] == expected


@pytest.mark.parametrize("n", [2, 3, 4, 5, 7])
def test_multiplicity_closed_form(n):
    # harmonic polynomials of degree <= L in n variables: C(L+n-1, n-1) + C(L+n-2, n-1)
    for L in range(12):
        total = sum(md.multiplicity(n, ell) for ell in range(L + 1))
        assert total == math.comb(L + n - 1, n - 1) + math.comb(L + n - 2, n - 1)
        if L >= 1:
            f = (2 * L + n - 2) * math.factorial(L + n - 3) // (math.factorial(L) * math.factorial(n - 2))
            assert md.multiplicity(n, L) == f


def mp_weyl(ell, nu_shift, lam, R=1.0):
    k = mpmath.sqrt(mpmath.mpc(lam.real, lam.imag))
    nu = ell + nu_shift
    j = mpmath.besselj(nu, k * R)
    jp = (mpmath.besselj(nu - 1, k * R) - mpmath.besselj(nu + 1, k * R)) / 2
    return complex(j / (k * jp - nu_shift / R * j))


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("ell", [0, 1, 4, 17])
@pytest.mark.parametrize("lam", [1j, -1, 3 - 2j, -10 + 0.1j])
def test_weyl_matches_mpmath(n, ell, lam):
    d = md.make_ball(n, 1.3)
    want = mp_weyl(ell, d.nu_shift, complex(lam), 1.3)
    assert md.weyl_value(d, ell, lam) == pytest.approx(want, rel=1e-11)


def test_weyl_examples():
    assert md.weyl_value(DISK, 0, -1).real == pytest.approx(2.24019, abs=1e-4)
    assert md.weyl_value(DISK, 0, -1).imag == 0
    assert md.weyl_value(DISK, 200, 1j) == pytest.approx(0.005, rel=5e-3)
    # the large-ell asymptote is cross-checked by the FD oracle at moderate ell
    assert fd.fd_weyl_value(DISK, 20, 1j, 4096) == pytest.approx(md.weyl_value(DISK, 20, 1j), rel=1e-5)


def test_weyl_inadmissible():
    with pytest.raises(InadmissibleSpectralPoint):
        md.weyl_value(DISK, 0, 4.0)
    with pytest.raises(InadmissibleSpectralPoint):
        md.weyl_values(DISK, 5, 0)


def test_weyl_vectorized_matches_scalar():
    vals = md.weyl_values(DISK, 50, 1 + 2j)
    assert np.allclose(vals, [md.weyl_value(DISK, ell, 1 + 2j) for ell in range(51)], rtol=1e-14)


def test_weyl_threads_deterministic():
    a = md.weyl_values(md.make_ball(3), 3000, 1j, threads=1)
    b = md.weyl_values(md.make_ball(3), 3000, 1j, threads=4)
    assert np.array_equal(a, b)


SAMPLES = [1j, -1j, 1 + 2j, 1 - 2j, -3 + 0.5j, -3 - 0.5j]


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("lam", SAMPLES)
def test_imaginary_part_sign(n, lam):
    vals = md.weyl_values(md.make_ball(n), 200, lam)
    assert np.all(np.sign(vals.imag) == np.sign(complex(lam).imag))


@pytest.mark.parametrize("lam", SAMPLES)
def test_branch_independence(lam):
    k = md.wavenumber(lam)
    for ell in range(0, 201, 7):
        a = md.weyl_value(DISK, ell, lam, k=k)
        b = md.weyl_value(DISK, ell, lam, k=-k)
        assert abs(a - b) <= 1e-12 * abs(a)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_negative_real_lambda_positive(n):
    vals = md.weyl_values(md.make_ball(n), 100, -2.5)
    assert np.all(vals.real > 0) and np.all(vals.imag == 0)


@given(st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False).filter(
    lambda z: abs(z.imag) > 1e-6), st.integers(0, 300))
@settings(max_examples=100, deadline=None)
def test_conjugate_symmetry(lam, ell):
    a = md.weyl_value(DISK, ell, lam)
    b = md.weyl_value(DISK, ell, lam.conjugate())
    assert abs(b - a.conjugate()) <= 1e-12 * abs(a)


def test_gamma_norm_examples():
    assert md.gamma_norm(DISK, 3, 1 - 1j) == pytest.approx(md.gamma_norm(DISK, 3, 1 + 1j), rel=1e-13)
    assert md.gamma_norm(DISK, 6, 1j) == pytest.approx(fd.fd_gamma_norm(DISK, 6, 1j, 4096), abs=1e-5)
    for ell in (200, 400):
        ratio = md.gamma_norm(DISK, 2 * ell, 1j) / md.gamma_norm(DISK, ell, 1j)
        assert ratio == pytest.approx(2 ** -1.5, rel=0.02)


@pytest.mark.parametrize("n,R", [(3, 2.0), (4, 0.7)])
def test_gamma_norm_general_radius(n, R):
    d = md.make_ball(n, R)
    for ell in (0, 3):
        assert md.gamma_norm(d, ell, 1j) == pytest.approx(fd.fd_gamma_norm(d, ell, 1j, 4096), rel=1e-6)


def test_gamma_norm_squared_is_im_m_over_im_lambda():
    # Green's identity: ||gamma(lam) e||^2 = Im M / Im lam
    lam = 0.5 + 2j
    m, g2 = md.mode_table(md.make_ball(3, 1.5), 40, lam)
    assert np.allclose(g2, m.imag / lam.imag, rtol=1e-12)


def test_gamma_norm_real_lambda_uses_quadrature():
    d = md.make_ball(2)
    _, g2 = md.mode_table(d, 4, -1.0)
    for ell in range(5):
        assert math.sqrt(g2[ell]) == pytest.approx(fd.fd_gamma_norm(d, ell, -1.0, 4096), rel=1e-6)


def test_gamma_profile_boundary_value():
    r = np.array([1.0])
    for ell in (0, 2, 9):
        assert md.gamma_profile(DISK, ell, 1j, r)[0] == pytest.approx(md.weyl_value(DISK, ell, 1j))


@pytest.mark.parametrize("n,cutoff,expected", [(2, 500, 2.0), (3, 100, 1.0), (4, 60, 2 / 3)])
def test_lb_counting(n, cutoff, expected):
    assert md.lb_counting_check(md.make_ball(n), cutoff) == pytest.approx(expected, abs=0.05)


def test_lb_counting_too_few():
    with pytest.raises(ValidationError):
        md.lb_counting_check(DISK, 10)


def test_lb_eigenvalues_circle():
    vals = md.lb_eigenvalues(DISK, 50)
    k = np.arange(1, vals.size + 1)
    assert np.array_equal(vals, (k // 2) ** 2)
