import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robinlap import fd_oracle as fd
from robinlap import model_domains as md
from robinlap import schatten_analysis as sa
from robinlap import triple_engine as te
from robinlap.errors import (EigenvalueHitError, EssentialSpectrumGapError,
                             InadmissibleSpectralPoint, SymmetryClassError, ValidationError)

DISK = md.make_ball(2)
P = te.ExtensionPair


def robin(rule, cls="self_adjoint", **kw):
    return te.Robin(te.make_boundary_operator(rule, cls, **kw))


# -- boundary operators ------------------------------------------------------

def test_constant_rule_certificate():
    theta = te.make_boundary_operator(1, "self_adjoint")
    assert theta.ess_gap == 1 and theta.tail_index == 0


def test_symmetry_mismatch():
    with pytest.raises(SymmetryClassError):
        te.make_boundary_operator("i*(1+1/l)", "accumulative")
    with pytest.raises(SymmetryClassError):
        te.make_boundary_operator("1+i", "self_adjoint")
    te.make_boundary_operator("1+i", "dissipative")


def test_essential_gap():
    with pytest.raises(EssentialSpectrumGapError):
        te.make_boundary_operator("1/(1+l)", "self_adjoint")
    # vanishing at finitely many modes is fine: the certificate starts after them
    theta = te.make_boundary_operator("l-3", "self_adjoint")
    assert theta.tail_index == 4
    with pytest.raises(EssentialSpectrumGapError):
        te.make_boundary_operator(2, "self_adjoint", ess_gap=3.0)


def test_dense_validation():
    with pytest.raises(SymmetryClassError):
        te.make_boundary_operator(np.array([[1, 2], [0, 1]]), "self_adjoint")
    with pytest.raises(SymmetryClassError):
        te.make_boundary_operator(np.diag([1 - 1j, 1]), "dissipative")
    te.make_boundary_operator(np.diag([1 + 1j, 1]), "dissipative")


def test_from_inverse():
    theta = te.BoundaryOperator.from_inverse("2+1/(1+l)", "self_adjoint")
    assert theta.value(3) == pytest.approx(1 / 2.25)
    # unbounded B pushes theta to 0: no essential-spectrum gap
    with pytest.raises(EssentialSpectrumGapError):
        te.BoundaryOperator.from_inverse("2+l", "self_adjoint")


def test_rule_parser_rejects_code():
    with pytest.raises(ValidationError):
        te.make_boundary_operator("__import__('os')", "self_adjoint")


# -- admissibility -----------------------------------------------------------

def test_admissible():
    te.admissible_lambda(P(robin(1), te.NEUMANN), 1j)
    te.admissible_lambda(P(robin("1+i", "dissipative"), te.NEUMANN), -1j)
    with pytest.raises(InadmissibleSpectralPoint, match="left participant is dissipative"):
        te.admissible_lambda(P(robin("1+i", "dissipative"), te.NEUMANN), 1j)
    with pytest.raises(InadmissibleSpectralPoint, match="right participant is accumulative"):
        te.admissible_lambda(P(te.NEUMANN, robin("1-i", "accumulative")), -1j)
    for lam in (1j, -1j, -1):
        with pytest.raises(InadmissibleSpectralPoint, match="no common half-plane"):
            te.admissible_lambda(P(robin("1+i", "dissipative"), robin("1-i", "accumulative")), lam)
    with pytest.raises(InadmissibleSpectralPoint):
        te.admissible_lambda(P(te.DIRICHLET, te.NEUMANN), 2.0)


def test_default_lambda():
    assert te.default_lambda(P(robin(1), te.NEUMANN)) == 1j
    assert te.default_lambda(P(robin("1+i", "dissipative"), te.NEUMANN)) == -1j


# -- coefficients and spectra --------------------------------------------------

def test_coefficient_examples():
    assert te.correction_coefficient(P(robin(2), robin(2)), DISK, 3, 1j) == 0
    c = te.correction_coefficient(P(te.DIRICHLET, te.NEUMANN), DISK, 0, -1)
    assert c.real == pytest.approx(-1 / 2.24019, abs=1e-4)
    c = te.correction_coefficient(P(robin(1), te.NEUMANN), DISK, 0, -1)
    assert c.real == pytest.approx(1 / (1 - 2.24019), abs=1e-4)


def test_coefficient_composition():
    lam = 0.3 + 1j
    m = md.weyl_value(DISK, 4, lam)
    t1, t2 = robin(2), robin("3 - l/10")
    c12 = te.correction_coefficient(P(t1, t2), DISK, 4, lam)
    assert c12 == pytest.approx(1 / (2 - m) - 1 / (2.6 - m), rel=1e-13)
    c1d = te.correction_coefficient(P(t1, te.DIRICHLET), DISK, 4, lam)
    assert c1d == pytest.approx(1 / (2 - m) + 1 / m, rel=1e-13)
    cd1 = te.correction_coefficient(P(te.DIRICHLET, t1), DISK, 4, lam)
    assert cd1 == pytest.approx(-c1d, rel=1e-13)


def test_eigenvalue_hit():
    # theta equal to M_1(-1) makes lambda=-1 an eigenvalue of mode 1
    m = md.weyl_value(DISK, 1, -1).real
    pair = P(robin(m), te.NEUMANN)
    with pytest.raises(EigenvalueHitError) as info:
        te.singular_spectrum(pair, DISK, -1, 5)
    assert info.value.ell == 1


def test_equal_pair_zero_spectrum():
    sp = te.singular_spectrum(P(robin(2), robin(2)), DISK, 1j, 30)
    assert len(sp) == 61 and np.all(sp.values == 0)


def test_spectrum_shape_and_order():
    d = md.make_ball(3)
    sp = te.singular_spectrum(P(robin(1), te.NEUMANN), d, 1j, 40)
    assert len(sp) == md.multiplicities(d, 40).sum()
    assert np.all(np.diff(sp.values) <= 0) and np.all(sp.values >= 0)
    assert np.all(np.isfinite(sp.values))


def test_spectrum_threads_deterministic():
    pair = P(robin(2), robin(-1))
    a = te.singular_spectrum(pair, md.make_ball(3), 1j, 800, threads=1)
    b = te.singular_spectrum(pair, md.make_ball(3), 1j, 800, threads=3)
    assert np.array_equal(a.values, b.values) and np.array_equal(a.ells, b.ells)


def test_tie_break_by_ell():
    sp = te.singular_spectrum(P(robin(2), robin(2)), DISK, 1j, 5)
    assert list(sp.ells) == [0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5]


def test_top_singular_value_matches_fd():
    sp = te.singular_spectrum(P(te.DIRICHLET, te.NEUMANN), DISK, -1, 10)
    num = fd.fd_resolvent_difference(DISK, 0, -1, te.DIRICHLET, te.NEUMANN, 4096).singular_value
    assert sp.values[0] == pytest.approx(num, abs=1e-4)


def test_monotone_in_distance():
    # (Robin, Neumann): s(ell) = ||gamma||^2 / |theta - M|
    lam = 1j
    m = md.weyl_value(DISK, 3, lam)
    thetas = [m.real + d for d in (0.5, 1.0, 2.0, 4.0)]
    s = [te.per_mode_singular_values(P(robin(t), te.NEUMANN), DISK, lam, 3)[3] for t in thetas]
    assert np.all(np.diff(s) < 0)


def test_guard_on_huge_expansion():
    with pytest.raises(ValidationError):
        te.singular_spectrum(P(robin(2), robin(-1)), md.make_ball(4), 1j, 4000)


# -- dense path ----------------------------------------------------------------

def dense_of(real, cutoff, domain=DISK):
    if not isinstance(real, te.Robin):
        return real
    return te.Robin(te.make_boundary_operator(real.theta.dense(domain, cutoff),
                                              real.theta.symmetry_class))


@pytest.mark.parametrize("pair", [
    P(robin(2), robin(-1)), P(robin(1), te.NEUMANN), P(te.DIRICHLET, robin(3)),
    P(robin(2), robin("2-(1+l)^(-2)"))])
def test_dense_matches_diagonal(pair):
    diag = te.singular_spectrum(pair, DISK, 1j, 100).values
    dense_pair = P(dense_of(pair.left, 100), dense_of(pair.right, 100))
    dense = te.singular_spectrum(dense_pair, DISK, 1j, 100)
    assert dense.provenance == "dense_gram"
    assert np.max(np.abs(diag - dense.values)) <= 1e-10


def test_dense_permutation_invariance():
    cutoff = 20
    dim = int(md.multiplicities(DISK, cutoff).sum())
    rng = np.random.default_rng(11)
    a = rng.normal(size=(dim, dim))
    t1 = np.eye(dim) * 2 + 0.1 * (a + a.T)
    t2 = np.eye(dim) * -1
    base = te.singular_spectrum(
        P(robin(t1), robin(t2)), DISK, 1j, cutoff).values
    # relabel the modes inside each degree only, so M stays diagonal
    blocks = np.eye(dim)
    blocks[1:3, 1:3] = [[0, 1], [1, 0]]
    blocks[3:5, 3:5] = [[0, 1], [1, 0]]
    moved = te.singular_spectrum(
        P(robin(blocks @ t1 @ blocks.T), robin(blocks @ t2 @ blocks.T)), DISK, 1j, cutoff).values
    assert np.allclose(base, moved, rtol=0, atol=1e-12)


def test_dense_rank_one_perturbation_interlacing():
    cutoff = 40
    dim = int(md.multiplicities(DISK, cutoff).sum())
    ells = np.repeat(np.arange(cutoff + 1), md.multiplicities(DISK, cutoff))
    t1 = np.diag(np.full(dim, 2.0))
    t2_diag = np.diag(2.0 - (1.0 + ells) ** -2.0)
    v = (1.0 + ells) ** -2.0
    t2 = t2_diag + np.outer(v, v)
    full = te.singular_spectrum(P(robin(t1), robin(t2)), DISK, 1j, cutoff).values
    diag = te.singular_spectrum(P(robin(t1), robin(t2_diag)), DISK, 1j, cutoff).values
    # a rank-one change in Theta moves the difference by rank <= 2 (one per resolvent factor)
    assert np.all(full[3:] <= diag[1:-2] + 1e-12)
    fit = sa.fit_decay_exponent(full, (10, 60))
    assert fit.exponent > 4.0


def test_dense_eigenvalue_hit():
    m = md.weyl_value(DISK, 1, -1).real
    dim = int(md.multiplicities(DISK, 3).sum())
    theta = np.diag(np.full(dim, m))
    with pytest.raises(EigenvalueHitError):
        te.dense_gram_reduction(P(robin(theta), te.NEUMANN), DISK, -1, 3)


# -- eigenvalues ---------------------------------------------------------------

def test_dirichlet_eigenvalues():
    ev = te.robin_eigenvalues(DISK, te.DIRICHLET, 0, (0, 10))
    assert ev == pytest.approx([2.404825557695773 ** 2], abs=1e-5)
    assert len(te.robin_eigenvalues(DISK, te.DIRICHLET, 0, (0, 40))) == 2


def test_neumann_eigenvalues():
    ev = te.robin_eigenvalues(DISK, te.NEUMANN, 1, (0.5, 30))
    assert ev == pytest.approx([1.8411837813406593 ** 2, 5.331442773525032 ** 2], abs=1e-9)


def test_robin_eigenvalues_match_fd():
    ev = te.robin_eigenvalues(DISK, 1.0, 0, (-10, 60))
    num = fd.fd_robin_eigenvalues(DISK, 0, 1.0, 4096, count=3)
    h = 1 / 4096
    assert np.all(np.abs(ev - num) <= 1e3 * h ** 2)


def test_robin_eigen_is_root_of_weyl():
    for ev in te.robin_eigenvalues(DISK, 2.0, 2, (-5, 50)):
        if ev < 0:
            assert md.weyl_value(DISK, 2, ev).real == pytest.approx(2.0, rel=1e-8)


def test_eigen_window_endpoint():
    ev = te.robin_eigenvalues(DISK, te.DIRICHLET, 0, (0, 10))[0]
    with pytest.raises(ValidationError, match="perturb"):
        te.robin_eigenvalues(DISK, te.DIRICHLET, 0, (ev, 10))


@pytest.mark.parametrize("ell", range(0, 11))
def test_dissipative_eigenvalues_upper_half_plane(ell):
    # maximal dissipative realization: no eigenvalues with Im lam < 0
    assert te.count_robin_eigenvalues(DISK, 1 + 1j, ell, (-60, 60), (-40, -1e-10)) == 0


def test_argument_principle_counts_real_eigenvalues():
    # self-adjoint theta: a thin box around the real axis sees the real roots
    n_real = len(te.robin_eigenvalues(DISK, 1.0, 0, (-10, 60)))
    assert te.count_robin_eigenvalues(DISK, 1.0, 0, (-10, 60), (-0.5, 0.5)) == n_real


@given(st.floats(-5, 5).filter(lambda t: abs(t) > 1e-3), st.integers(0, 50))
@settings(max_examples=50, deadline=None)
def test_same_theta_zero(theta, ell):
    pair = P(robin(theta), robin(theta))
    assert te.correction_coefficient(pair, DISK, ell, 1j) == 0
