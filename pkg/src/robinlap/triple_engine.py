"""Boundary parameters, extension pairs and Krein-formula spectra.

Per boundary harmonic of degree ``ell`` the resolvent difference of two
realizations is the rank-one operator ``f -> c_ell <f, gamma(conj lam) e> gamma(lam) e``;
its singular value is ``|c_ell| ||gamma(lam) e|| ||gamma(conj lam) e||``.
Coefficients relative to the Neumann realization:

* Neumann: ``0``;
* Dirichlet (``theta = 0``): ``-1/M``;
* Robin(theta): ``(theta - M)^{-1}``.
"""
from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from . import model_domains as md
from .errors import (BoundaryOperatorError, EigenvalueHitError, EssentialSpectrumGapError,
                     InadmissibleSpectralPoint, SymmetryClassError, ValidationError)
from .rules import DiagonalRule, constant_rule

_SYMMETRY_TOL = 1e-12
_HIT_RTOL = 1e-13
_GAP_FLOOR = 1e-6
_DENSE_PROBE = 2000
MAX_EXPANDED = 50_000_000
_TAIL_PROBES = np.unique(np.round(np.logspace(3, 12, 46)))


class SymmetryClass(enum.Enum):
    SELF_ADJOINT = "self_adjoint"
    DISSIPATIVE = "dissipative"
    ACCUMULATIVE = "accumulative"

    @classmethod
    def parse(cls, value) -> "SymmetryClass":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("-", "_"))
        except ValueError:
            raise ValidationError(f"unknown symmetry class {value!r}") from None


@dataclass(eq=False)
class BoundaryOperator:
    """The boundary parameter Theta.

    Either a diagonal rule ``ell -> theta_ell`` (acting on all harmonics of
    degree ``ell``) or a dense matrix over the multiplicity-expanded modes
    ``ell <= cutoff`` (ordered by ``ell``, then by index within the degree).
    ``ess_gap``/``tail_index`` certify ``|theta_ell| >= ess_gap`` for
    ``ell >= tail_index``, i.e. 0 is not in the essential spectrum.
    """

    symmetry_class: SymmetryClass
    rule: Callable | None = None
    matrix: np.ndarray | None = None
    ess_gap: float | None = None
    tail_index: int = 0
    label: str = ""

    @property
    def is_diagonal(self) -> bool:
        return self.rule is not None

    def values(self, ells) -> np.ndarray:
        if not self.is_diagonal:
            raise ValidationError("dense boundary operator has no diagonal rule")
        return np.asarray(self.rule(np.asarray(ells)), dtype=complex)

    def value(self, ell: int) -> complex:
        return complex(self.values(np.array([ell]))[0])

    def dense(self, domain: md.Domain, cutoff: int) -> np.ndarray:
        """Matrix over the expanded modes ``ell <= cutoff``."""
        mult = md.multiplicities(domain, cutoff)
        dim = int(mult.sum())
        if self.is_diagonal:
            return np.diag(np.repeat(self.values(np.arange(cutoff + 1)), mult))
        if self.matrix.shape != (dim, dim):
            raise ValidationError(
                f"dense Theta has shape {self.matrix.shape}; cutoff {cutoff} in n={domain.n} "
                f"needs {dim}x{dim}")
        return self.matrix

    @classmethod
    def from_inverse(cls, beta, symmetry_class, **kwargs) -> "BoundaryOperator":
        """Theta = B^{-1} for a bounded diagonal B, i.e. the condition
        ``df/dn = B f`` on the boundary.  The class refers to Theta itself."""
        beta_rule = _as_rule(beta)

        def inverse(ell):
            with np.errstate(divide="ignore", invalid="ignore"):
                return 1.0 / beta_rule(ell)
        label = f"1/({getattr(beta_rule, 'text', beta)})"
        return make_boundary_operator(inverse, symmetry_class, label=label, **kwargs)


def _as_rule(value):
    if isinstance(value, str):
        return DiagonalRule(value)
    if isinstance(value, numbers.Number):
        return constant_rule(value)
    if callable(value):
        return value
    raise ValidationError(f"cannot interpret {value!r} as a diagonal rule")


def _probe_indices(tail_index: int) -> np.ndarray:
    dense = np.arange(0, _DENSE_PROBE + 1, dtype=float)
    return np.concatenate([dense, _TAIL_PROBES[_TAIL_PROBES > _DENSE_PROBE]])


def _check_class_values(vals: np.ndarray, cls: SymmetryClass, what: str):
    finite = np.isfinite(vals)
    v = vals[finite]
    tol = _SYMMETRY_TOL * (1.0 + np.abs(v))
    if cls is SymmetryClass.SELF_ADJOINT:
        bad = np.abs(v.imag) > tol
    elif cls is SymmetryClass.DISSIPATIVE:
        bad = v.imag < -tol
    else:
        bad = v.imag > tol
    if bad.any():
        raise SymmetryClassError(
            f"{what}: value {v[bad][0]} is incompatible with class {cls.value}")


def make_boundary_operator(value, symmetry_class, *, ess_gap: float | None = None,
                           tail_index: int | None = None, label: str | None = None
                           ) -> BoundaryOperator:
    """Validate and build a :class:`BoundaryOperator`.

    ``value`` is a number, a rule string (see :mod:`robinlap.rules`), a vectorized
    callable ``ell -> theta``, or a square matrix (dense representation).
    Without an explicit certificate one is inferred from probes of the rule
    (every ``ell <= 2000`` plus a geometric tail out to ``1e12``).
    """
    cls = SymmetryClass.parse(symmetry_class)
    if isinstance(value, np.ndarray) and value.ndim == 2:
        mat = np.asarray(value, dtype=complex)
        if mat.shape[0] != mat.shape[1]:
            raise BoundaryOperatorError("dense Theta must be square")
        if not np.isfinite(mat).all():
            raise BoundaryOperatorError("dense Theta must be finite (bounded)")
        scale = max(1.0, float(np.abs(mat).max(initial=0.0)))
        if cls is SymmetryClass.SELF_ADJOINT:
            if np.abs(mat - mat.conj().T).max(initial=0.0) > _SYMMETRY_TOL * scale:
                raise SymmetryClassError("dense Theta is not Hermitian")
        else:
            im_part = np.linalg.eigvalsh((mat - mat.conj().T) / 2j)
            sign = 1.0 if cls is SymmetryClass.DISSIPATIVE else -1.0
            if (sign * im_part).min(initial=0.0) < -_SYMMETRY_TOL * scale:
                raise SymmetryClassError(
                    f"imaginary part of dense Theta is not semidefinite as {cls.value} requires")
        return BoundaryOperator(cls, matrix=mat, label=label or "dense")

    rule = _as_rule(value)
    if label is None:
        label = getattr(rule, "text", None) or (str(value) if isinstance(value, numbers.Number)
                                               else getattr(value, "__name__", "rule"))
    ells = _probe_indices(tail_index or 0)
    vals = np.asarray(rule(ells), dtype=complex)
    _check_class_values(vals, cls, f"rule {label!r}")
    if not np.isfinite(vals).all():
        raise BoundaryOperatorError(
            f"rule {label!r} is not finite at ell={int(ells[~np.isfinite(vals)][0])}")
    mags = np.abs(vals)
    if ess_gap is not None:
        L0 = int(tail_index or 0)
        if ess_gap <= 0 or mags[ells >= L0].min() < ess_gap:
            raise EssentialSpectrumGapError(
                f"rule {label!r}: certificate |theta_l| >= {ess_gap} for l >= {L0} fails")
        return BoundaryOperator(cls, rule=rule, ess_gap=float(ess_gap), tail_index=L0, label=label)
    floor = _GAP_FLOOR * max(1.0, float(mags[: _DENSE_PROBE + 1].max()))
    low = np.nonzero(mags < floor)[0]
    if low.size and ells[low[-1]] > _DENSE_PROBE // 2:
        raise EssentialSpectrumGapError(
            f"rule {label!r}: |theta_l| drops to {mags[low[-1]]:.3g} at l={int(ells[low[-1]])}; "
            "0 appears to be a limit point of theta_l")
    L0 = int(ells[low[-1]]) + 1 if low.size else 0
    delta = float(mags[ells >= L0].min())
    return BoundaryOperator(cls, rule=rule, ess_gap=delta, tail_index=L0, label=label)


@dataclass(frozen=True)
class Neumann:
    name = "neumann"


@dataclass(frozen=True)
class Dirichlet:
    name = "dirichlet"


@dataclass(frozen=True)
class Robin:
    theta: BoundaryOperator
    name = "robin"


NEUMANN = Neumann()
DIRICHLET = Dirichlet()
Realization = Union[Neumann, Dirichlet, Robin]


def describe(real: Realization) -> str:
    if isinstance(real, Robin):
        return f"robin[{real.theta.label}, {real.theta.symmetry_class.value}]"
    return real.name


@dataclass(frozen=True)
class ExtensionPair:
    """Realizations whose resolvents are differenced: ``R_left - R_right``."""

    left: Realization
    right: Realization

    @property
    def trivial(self) -> bool:
        """Both sides are the same realization: the difference vanishes."""
        return self.left == self.right

    def participants(self):
        return (("left", self.left), ("right", self.right))

    @property
    def is_dense(self) -> bool:
        return any(isinstance(r, Robin) and not r.theta.is_diagonal for _, r in self.participants())


def admissible_lambda(pair: ExtensionPair, lam) -> None:
    """Raise :class:`InadmissibleSpectralPoint` unless the resolvent formula is
    guaranteed at ``lam`` for every Robin participant.

    Self-adjoint Theta: any nonreal ``lam`` (or real ``lam < 0``); dissipative:
    ``Im lam < 0``; accumulative: ``Im lam > 0``.
    """
    lam = complex(lam)
    classes = {}
    for side, real in pair.participants():
        if isinstance(real, Robin):
            classes[side] = real.theta.symmetry_class
    kinds = set(classes.values())
    if {SymmetryClass.DISSIPATIVE, SymmetryClass.ACCUMULATIVE} <= kinds:
        raise InadmissibleSpectralPoint(
            "pair mixes a dissipative and an accumulative Theta: no common half-plane where "
            "(Theta - M(lambda))^{-1} is guaranteed bounded; compare each against its real part instead")
    if lam.imag == 0:
        # below the Neumann/Dirichlet spectrum a self-adjoint pair is still
        # evaluable; a Robin eigenvalue there surfaces as EigenvalueHitError
        if lam.real >= 0:
            raise InadmissibleSpectralPoint(
                f"lambda={lam} lies on [0, inf), inside the spectrum of the reference realizations")
        for side, cls in classes.items():
            if cls is not SymmetryClass.SELF_ADJOINT:
                raise InadmissibleSpectralPoint(
                    f"{side} participant is {cls.value}: lambda must be nonreal, got {lam}")
        return
    for side, cls in classes.items():
        if cls is SymmetryClass.DISSIPATIVE and lam.imag >= 0:
            raise InadmissibleSpectralPoint(
                f"{side} participant is dissipative: lambda must lie in the lower half-plane, got {lam}")
        if cls is SymmetryClass.ACCUMULATIVE and lam.imag <= 0:
            raise InadmissibleSpectralPoint(
                f"{side} participant is accumulative: lambda must lie in the upper half-plane, got {lam}")


def default_lambda(pair: ExtensionPair) -> complex:
    for _, real in pair.participants():
        if isinstance(real, Robin) and real.theta.symmetry_class is SymmetryClass.DISSIPATIVE:
            return -1j
    return 1j


def _hit_check(diff, theta, ells, lam):
    bad = np.abs(diff) < _HIT_RTOL * (1.0 + np.abs(theta))
    if np.any(bad):
        ell = int(np.asarray(ells)[np.argmax(bad)])
        raise EigenvalueHitError(
            f"theta - M(lambda) vanishes for mode ell={ell}: lambda={lam} is an eigenvalue",
            ell=ell, lam=lam)


def _coefficients(pair: ExtensionPair, ells, m_values, lam) -> np.ndarray:
    m_values = np.asarray(m_values, dtype=complex)
    if pair.trivial:
        return np.zeros_like(m_values)
    left, right = pair.left, pair.right

    def theta_of(real):
        if isinstance(real, Dirichlet):
            return np.zeros_like(m_values)
        return real.theta.values(ells)

    for real in (left, right):
        if not isinstance(real, Neumann):
            th = theta_of(real)
            _hit_check(th - m_values, th, ells, lam)

    if isinstance(left, Robin) and isinstance(right, Robin):
        t1, t2 = theta_of(left), theta_of(right)
        return (t2 - t1) / ((t1 - m_values) * (t2 - m_values))
    if isinstance(left, Robin) and isinstance(right, Dirichlet):
        t = theta_of(left)
        return t / (m_values * (t - m_values))
    if isinstance(left, Dirichlet) and isinstance(right, Robin):
        t = theta_of(right)
        return -t / (m_values * (t - m_values))

    def against_neumann(real):
        if isinstance(real, Neumann):
            return np.zeros_like(m_values)
        if isinstance(real, Dirichlet):
            return -1.0 / m_values
        return 1.0 / (theta_of(real) - m_values)

    return against_neumann(left) - against_neumann(right)


def correction_coefficient(pair: ExtensionPair, domain: md.Domain, mode, lam) -> complex:
    """Scalar ``c_ell`` of the rank-one resolvent difference on one harmonic."""
    admissible_lambda(pair, lam)
    if pair.is_dense:
        raise ValidationError("dense Theta has no per-mode coefficient; use dense_gram_reduction")
    mode = md._mode_of(domain, mode)
    m_value = md.weyl_value(domain, mode, lam)
    return complex(_coefficients(pair, np.array([mode.ell]), np.array([m_value]), complex(lam))[0])


@dataclass
class SingularSpectrum:
    """Multiplicity-expanded s-numbers in non-increasing order."""

    values: np.ndarray
    lam: complex
    pair: ExtensionPair
    cutoff: int
    provenance: str
    ells: np.ndarray | None = field(default=None, repr=False)

    def __len__(self):
        return self.values.size


def _sorted_expanded(per_mode: np.ndarray, mult: np.ndarray):
    ells = np.arange(per_mode.size)
    order = np.lexsort((ells, -per_mode))  # value desc, ell asc
    return np.repeat(per_mode[order], mult[order]), np.repeat(ells[order], mult[order])


def per_mode_singular_values(pair: ExtensionPair, domain: md.Domain, lam, cutoff: int,
                             threads: int = 1) -> np.ndarray:
    """``s(ell) = |c_ell| ||gamma(lam) e|| ||gamma(conj lam) e||`` for ``ell <= cutoff``."""
    lam = complex(lam)
    m_values, gamma_sq = md.mode_table(domain, cutoff, lam, threads=threads)
    # ||gamma(conj lam) e|| = ||gamma(lam) e|| by reflection symmetry
    ells = np.arange(cutoff + 1)
    c = _coefficients(pair, ells, m_values, lam)
    return np.abs(c) * gamma_sq


def singular_spectrum(pair: ExtensionPair, domain: md.Domain, lam=None, cutoff: int = 100,
                      threads: int = 1) -> SingularSpectrum:
    """s-numbers of the truncated resolvent difference ``R_left(lam) - R_right(lam)``."""
    lam = default_lambda(pair) if lam is None else complex(lam)
    admissible_lambda(pair, lam)
    if cutoff < 0:
        raise ValidationError("cutoff must be >= 0")
    if pair.is_dense:
        mat = dense_gram_reduction(pair, domain, lam, cutoff)
        vals = np.linalg.svd(mat, compute_uv=False)
        return SingularSpectrum(np.sort(vals)[::-1], lam, pair, cutoff, "dense_gram")
    mult = md.multiplicities(domain, cutoff)
    if mult.sum() > MAX_EXPANDED:
        raise ValidationError(
            f"cutoff {cutoff} in n={domain.n} expands to {int(mult.sum())} s-numbers "
            f"(limit {MAX_EXPANDED}); use per_mode_singular_values")
    per_mode = per_mode_singular_values(pair, domain, lam, cutoff, threads=threads)
    values, ells = _sorted_expanded(per_mode, mult)
    return SingularSpectrum(values, lam, pair, cutoff, "diagonal", ells)


def _inverse_checked(mat: np.ndarray, lam, what: str) -> np.ndarray:
    if np.linalg.cond(mat) > 1.0 / _HIT_RTOL:
        raise EigenvalueHitError(f"{what} is singular: lambda={lam} is an eigenvalue", lam=lam)
    return np.linalg.inv(mat)


def dense_gram_reduction(pair: ExtensionPair, domain: md.Domain, lam, cutoff: int) -> np.ndarray:
    """Finite matrix with the same s-numbers as the truncated resolvent difference.

    ``G^{1/2} [a_left - a_right] G^{1/2}`` where ``G`` holds the squared
    gamma-field column norms and ``a`` is the per-realization coefficient matrix.
    """
    lam = complex(lam)
    admissible_lambda(pair, lam)
    mult = md.multiplicities(domain, cutoff)
    m_diag, gamma_sq = md.mode_table(domain, cutoff, lam)
    m_exp = np.repeat(m_diag, mult)
    root = np.sqrt(np.repeat(gamma_sq, mult))
    dim = m_exp.size
    mmat = np.diag(m_exp)
    if pair.trivial:
        return np.zeros((dim, dim), dtype=complex)

    def theta_mat(real):
        return real.theta.dense(domain, cutoff)

    left, right = pair.left, pair.right
    if isinstance(left, Robin) and isinstance(right, Robin):
        t1, t2 = theta_mat(left), theta_mat(right)
        inv1 = _inverse_checked(t1 - mmat, lam, "Theta_left - M(lambda)")
        inv2 = _inverse_checked(t2 - mmat, lam, "Theta_right - M(lambda)")
        core = inv1 @ (t2 - t1) @ inv2
    else:
        def coeff(real, side):
            if isinstance(real, Neumann):
                return np.zeros((dim, dim), dtype=complex)
            if isinstance(real, Dirichlet):
                return -np.diag(1.0 / m_exp)
            return _inverse_checked(theta_mat(real) - mmat, lam, f"Theta_{side} - M(lambda)")
        core = coeff(left, "left") - coeff(right, "right")
    return root[:, None] * core * root[None, :]


def _reduced_pair(domain: md.Domain, mode: md.Mode, lam):
    from .special_functions import reduced_bessel_j_array
    lam = np.asarray(lam, dtype=complex)
    R = domain.R
    w = lam * R * R
    e0 = reduced_bessel_j_array(mode.nu, w)
    e1 = reduced_bessel_j_array(mode.nu + 1.0, w)
    value = e0
    slope = (mode.ell / R) * e0 - lam * R * e1 / (2.0 * (mode.nu + 1.0))
    return value, slope


def robin_function(domain: md.Domain, theta, mode, lam) -> np.ndarray:
    """Entire function ``u(R) - theta u'(R)`` (up to a nonvanishing factor);
    its zeros are the eigenvalues of the Robin realization on the mode.
    ``theta=None`` gives the Neumann condition ``u'(R)``."""
    mode = md._mode_of(domain, mode)
    value, slope = _reduced_pair(domain, mode, lam)
    if theta is None:
        return slope
    return value - theta * slope


def _theta_scalar(theta, mode: md.Mode):
    if isinstance(theta, Dirichlet):
        return 0.0
    if isinstance(theta, Neumann):
        return None
    if isinstance(theta, Robin):
        theta = theta.theta
    if isinstance(theta, BoundaryOperator):
        if not theta.is_diagonal:
            raise ValidationError("robin_eigenvalues needs a diagonal Theta")
        return theta.value(mode.ell)
    return complex(theta)


def robin_eigenvalues(domain: md.Domain, theta, mode, window, *, tol: float = 1e-10) -> np.ndarray:
    """Real eigenvalues in ``window`` of the Robin realization on one mode.

    Sign changes of the pole-free function ``g = u(R) - theta u'(R)`` are
    bracketed on a grid that resolves the Bessel-zero spacing, then bisected
    to absolute tolerance ``tol``.
    """
    mode = md._mode_of(domain, mode)
    th = _theta_scalar(theta, mode)
    if th is not None:
        th = complex(th)
        if abs(th.imag) > _SYMMETRY_TOL * (1 + abs(th)):
            raise ValidationError("robin_eigenvalues needs a self-adjoint (real) theta")
        th = th.real
    a, b = map(float, window)
    if not a < b:
        raise ValidationError("window must be an increasing interval")

    def g(lam):
        return robin_function(domain, th, mode, np.asarray(lam, dtype=float)).real

    R = domain.R
    s_lo = math.copysign(math.sqrt(abs(a)), a) * R
    s_hi = math.copysign(math.sqrt(abs(b)), b) * R
    count = max(256, int(math.ceil((s_hi - s_lo) / (math.pi / 64))) + 1)
    s = np.linspace(s_lo, s_hi, count)
    lam_grid = np.sign(s) * s * s / (R * R)
    lam_grid[0], lam_grid[-1] = a, b
    vals = g(lam_grid)
    for end in (a, b):
        eps = 1e3 * tol * (1.0 + abs(end))
        lo_v, mid_v, hi_v = g(np.array([end - eps, end, end + eps]))
        if mid_v == 0 or lo_v * hi_v < 0:
            raise ValidationError(f"window endpoint {end} is (numerically) an eigenvalue; perturb the window")
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        lo, hi = lam_grid[i], lam_grid[i + 1]
        glo = vals[i]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            gm = g(np.array([mid]))[0]
            if gm == 0:
                lo = hi = mid
                break
            if (gm > 0) == (glo > 0):
                lo, glo = mid, gm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return np.array(sorted(roots))


def count_robin_eigenvalues(domain: md.Domain, theta, mode, re_range, im_range,
                            *, samples: int = 2048, max_samples: int = 2 ** 18) -> int:
    """Number of zeros of ``theta - M(lambda)`` (equivalently of the entire
    Robin function) inside a rectangle, by the argument principle."""
    mode = md._mode_of(domain, mode)
    th = _theta_scalar(theta, mode)
    x0, x1 = map(float, re_range)
    y0, y1 = map(float, im_range)
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1), complex(x0, y0)]
    n = samples
    while True:
        t = np.linspace(0.0, 1.0, n, endpoint=False)
        path = np.concatenate([c0 + (c1 - c0) * t for c0, c1 in zip(corners[:-1], corners[1:])])
        path = np.append(path, corners[0])
        vals = robin_function(domain, th, mode, path)
        if np.any(vals == 0):
            raise ValidationError("contour passes through an eigenvalue")
        steps = np.angle(vals[1:] / vals[:-1])
        if np.abs(steps).max() < 0.5 or n >= max_samples:
            break
        n *= 2
    return int(round(steps.sum() / (2.0 * math.pi)))
