"""Finite-volume discretization of one radial mode, used as an independent oracle.

The operator ``-r^{1-n}(r^{n-1}u')' + ell(ell+n-2) r^{-2} u`` is discretized on
``r_j = j h``, ``j = 1..N``, ``h = R/N`` in conservative form with half-node
coefficients.  The boundary node ``r_N = R`` owns a half cell, so the
quadrature weights are ``r_j^{n-1} h`` with the last one halved (trapezoid);
with these weights the matrix is self-adjoint for every real boundary
condition.  At the origin ``ell = 0`` uses zero flux and ``ell >= 1`` uses
``u(0) = 0``.

All boundary conditions differ only in the last diagonal entry, so every
resolvent is a rank-one update of the Neumann one and each solve is a single
tridiagonal sweep.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import model_domains as md
from . import triple_engine as te
from ._backend import kernels
from .errors import SolveError, ValidationError

_MIN_N = 16
DEFAULT_GRIDS = (1024, 2048, 4096)


@dataclass(frozen=True)
class RadialGrid:
    N: int
    R: float
    n: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < _MIN_N:
            raise ValidationError(f"grid needs N >= {_MIN_N} points, got {self.N}")

    @property
    def h(self) -> float:
        return self.R / self.N

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(1, self.N + 1) * self.h

    @property
    def weights(self) -> np.ndarray:
        w = self.nodes ** (self.n - 1) * self.h
        w[-1] *= 0.5
        return w

    def inner(self, f, g) -> complex:
        return complex(np.sum(self.weights * np.asarray(f) * np.conj(g)))

    def norm(self, f) -> float:
        return math.sqrt(max(self.inner(f, f).real, 0.0))


def make_grid(domain: md.Domain, N: int) -> RadialGrid:
    return RadialGrid(int(N), domain.R, domain.n)


def _bc_beta(bc):
    """Return ``beta`` with ``u'(R) = beta u(R)``; ``None`` for Dirichlet."""
    if isinstance(bc, te.Neumann):
        return 0.0
    if isinstance(bc, te.Dirichlet):
        return None
    theta = complex(bc)
    if theta == 0:
        return None
    return 1.0 / theta


@dataclass
class RadialOperator:
    """Tridiagonal operator; ``lower[i]`` couples row ``i+1`` to ``i``."""

    grid: RadialGrid
    ell: int
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    bc: object

    def matrix(self) -> np.ndarray:
        return (np.diag(self.diag) + np.diag(self.lower, -1) + np.diag(self.upper, 1))

    @property
    def dirichlet(self) -> bool:
        return isinstance(self.bc, te.Dirichlet)

    def shifted_solve(self, lam, rhs) -> np.ndarray:
        """``(A - lam)^{-1} rhs``; Dirichlet keeps the boundary node at zero."""
        rhs = np.asarray(rhs, dtype=complex)
        m = self.grid.N - 1 if self.dirichlet else self.grid.N
        diag = self.diag[:m] - complex(lam)
        try:
            sol = kernels.tridiag_solve(self.lower[:m - 1], diag, self.upper[:m - 1], rhs[:m])
        except ZeroDivisionError:
            raise SolveError(f"singular solve: lambda={lam} is a discrete eigenvalue of mode "
                             f"ell={self.ell}") from None
        sol = np.asarray(sol)
        if not np.isfinite(sol).all():
            raise SolveError(f"solve overflowed near lambda={lam} (mode ell={self.ell})")
        if self.dirichlet:
            sol = np.append(sol, 0.0)
        return sol


def _as_bc(bc):
    if isinstance(bc, (te.Neumann, te.Dirichlet)):
        return bc
    if isinstance(bc, str):
        name = bc.lower()
        if name == "neumann":
            return te.NEUMANN
        if name == "dirichlet":
            return te.DIRICHLET
        raise ValidationError(f"unknown boundary condition {bc!r}")
    if isinstance(bc, te.Robin):
        return bc
    theta = complex(bc)
    return te.DIRICHLET if theta == 0 else theta


def _theta_of(bc, ell):
    if isinstance(bc, te.Robin):
        return bc.theta.value(ell)
    return bc


def build_radial_operator(domain: md.Domain, mode, bc, grid) -> RadialOperator:
    """Discretize one mode with boundary condition ``bc``.

    ``bc`` is ``NEUMANN``, ``DIRICHLET``, a :class:`Robin` with a diagonal Theta,
    or a scalar theta (the condition ``u(R) = theta u'(R)``).
    """
    mode = md._mode_of(domain, mode)
    if not isinstance(grid, RadialGrid):
        grid = make_grid(domain, grid)
    bc = _as_bc(bc)
    N, h, n = grid.N, grid.h, domain.n
    r = grid.nodes
    w = grid.weights
    half = (np.arange(0, N + 1) + 0.5) * h       # r_{1/2} .. r_{N+1/2}
    p = half ** (n - 1)
    if mode.ell == 0:
        p_left = np.concatenate([[0.0], p[1:N]])  # zero flux through r_{1/2}
    else:
        p_left = p[:N]
    p_right = np.concatenate([p[1:N], [0.0]])     # boundary flux handled below
    vol = w / h                                   # w_j / h
    diag = (p_left + p_right) / (vol * h * h) + mode.ell * (mode.ell + n - 2) / r ** 2
    upper = -p[1:N] / (vol[:-1] * h * h)
    lower = -p[1:N] / (vol[1:] * h * h)
    diag = diag.astype(complex)
    beta = _bc_beta(bc if not isinstance(bc, te.Robin) else _theta_of(bc, mode.ell))
    if beta:
        # -R^{n-1} u'(R) / w_N with u'(R) = beta u_N
        diag[-1] -= domain.R ** (n - 1) * beta / w[-1]
    return RadialOperator(grid, mode.ell, lower.astype(complex), diag, upper.astype(complex), bc)


def _neumann_column(domain, mode, lam, grid):
    """Neumann solution with unit outward flux ``u'(R) = 1``."""
    op = build_radial_operator(domain, mode, te.NEUMANN, grid)
    rhs = np.zeros(grid.N, dtype=complex)
    rhs[-1] = domain.R ** (domain.n - 1) / grid.weights[-1]
    return op, op.shifted_solve(lam, rhs)


def fd_weyl_value(domain: md.Domain, mode, lam, grid) -> complex:
    """Boundary value of the unit-flux Neumann solution (the discrete ``M_ell``)."""
    grid = grid if isinstance(grid, RadialGrid) else make_grid(domain, grid)
    _, u = _neumann_column(domain, mode, complex(lam), grid)
    return complex(u[-1])


def fd_gamma_vector(domain: md.Domain, mode, lam, grid) -> np.ndarray:
    """Grid samples of ``gamma(lambda) e`` (radial profile)."""
    grid = grid if isinstance(grid, RadialGrid) else make_grid(domain, grid)
    _, u = _neumann_column(domain, mode, complex(lam), grid)
    return u * domain.R ** (-(domain.n - 1) / 2.0)


def fd_gamma_norm(domain: md.Domain, mode, lam, grid) -> float:
    grid = grid if isinstance(grid, RadialGrid) else make_grid(domain, grid)
    return grid.norm(fd_gamma_vector(domain, mode, lam, grid))


def _update_coefficient(bc, ell, domain, grid, g_nn):
    """``a`` with ``(A_bc - lam)^{-1} = G_N + a x x^T W / w_N``, ``x = G_N e_N``."""
    bc = _as_bc(bc)
    if isinstance(bc, te.Neumann):
        return 0j
    if isinstance(bc, te.Dirichlet):
        return -1.0 / g_nn
    beta = _bc_beta(_theta_of(bc, ell))
    if beta is None:
        return -1.0 / g_nn
    delta = -domain.R ** (domain.n - 1) * beta / grid.weights[-1]
    den = 1.0 + delta * g_nn
    if abs(den) < 1e-14 * (1.0 + abs(delta * g_nn)):
        raise SolveError(f"singular solve: lambda is a discrete Robin eigenvalue of mode ell={ell}")
    return -delta / den


@dataclass
class ResolventDifference:
    """``(A_1 - lam)^{-1} - (A_2 - lam)^{-1} = coeff * x x^T W / w_N``."""

    grid: RadialGrid
    coeff: complex
    x: np.ndarray

    @property
    def singular_value(self) -> float:
        """Largest (and only nonzero) weighted singular value."""
        w = self.grid.weights
        return abs(self.coeff) * float(np.sum(w * np.abs(self.x) ** 2)) / w[-1]

    def dense(self) -> np.ndarray:
        w = self.grid.weights
        return self.coeff * np.outer(self.x, self.x * w) / w[-1]

    def apply(self, f) -> np.ndarray:
        w = self.grid.weights
        return self.coeff * self.x * (np.sum(self.x * w * np.asarray(f)) / w[-1])


def fd_resolvent_difference(domain: md.Domain, mode, lam, bc1, bc2, grid) -> ResolventDifference:
    grid = grid if isinstance(grid, RadialGrid) else make_grid(domain, grid)
    mode = md._mode_of(domain, mode)
    lam = complex(lam)
    op = build_radial_operator(domain, mode, te.NEUMANN, grid)
    e_n = np.zeros(grid.N, dtype=complex)
    e_n[-1] = 1.0
    x = op.shifted_solve(lam, e_n)
    g_nn = x[-1]
    a1 = _update_coefficient(bc1, mode.ell, domain, grid, g_nn)
    a2 = _update_coefficient(bc2, mode.ell, domain, grid, g_nn)
    return ResolventDifference(grid, a1 - a2, x)


def dense_resolvent_difference(domain: md.Domain, mode, lam, bc1, bc2, grid):
    """Explicit inverses (O(N^3)); returns the matrix and its weighted singular values."""
    grid = grid if isinstance(grid, RadialGrid) else make_grid(domain, grid)

    def resolvent(bc):
        op = build_radial_operator(domain, mode, bc, grid)
        m = grid.N - 1 if op.dirichlet else grid.N
        out = np.zeros((grid.N, grid.N), dtype=complex)
        a = op.matrix()[:m, :m] - complex(lam) * np.eye(m)
        try:
            out[:m, :m] = np.linalg.inv(a)
        except np.linalg.LinAlgError:
            raise SolveError(f"singular solve at lambda={lam}") from None
        return out

    diff = resolvent(bc1) - resolvent(bc2)
    sw = np.sqrt(grid.weights)
    svals = np.linalg.svd(sw[:, None] * diff / sw[None, :], compute_uv=False)
    return diff, svals


def _rank_one_norm(u1, v1, u2, v2) -> float:
    """Spectral norm of ``u1 v1^H - u2 v2^H``, written as
    ``(u1 - u2) v1^H + u2 (v1 - v2)^H`` so near-cancellation stays accurate."""
    _, ru = np.linalg.qr(np.column_stack([u1 - u2, u2]))
    _, rv = np.linalg.qr(np.column_stack([v1, v1 - v2]))
    return float(np.linalg.norm(ru @ rv.conj().T, 2))


def krein_identity_residual(domain: md.Domain, mode, lam, pair: te.ExtensionPair, grid) -> float:
    """Weighted operator-norm distance between the discrete resolvent
    difference and the analytic rank-one Krein correction sampled on the grid."""
    grid = grid if isinstance(grid, RadialGrid) else make_grid(domain, grid)
    mode = md._mode_of(domain, mode)
    lam = complex(lam)
    if pair.trivial:
        return 0.0
    diff = fd_resolvent_difference(domain, mode, lam, pair.left, pair.right, grid)
    c = te.correction_coefficient(pair, domain, mode, lam)
    g = md.gamma_profile(domain, mode, lam, grid.nodes)
    g_bar = md.gamma_profile(domain, mode, lam.conjugate(), grid.nodes)
    sw = np.sqrt(grid.weights)
    # discrete: coeff/w_N * (W^{1/2} x)(W^{1/2} conj x)^H
    u1 = diff.coeff / grid.weights[-1] * sw * diff.x
    v1 = sw * np.conj(diff.x)
    u2 = c * sw * g
    v2 = sw * g_bar
    return _rank_one_norm(u1, v1, u2, v2)


def gamma_adjoint_identity_check(domain: md.Domain, mode, lam, grid, f) -> float:
    """``|<f, gamma(conj lam) e> - Gamma1 (A_N - lam)^{-1} f|`` with the
    analytic gamma-field sampled on the grid."""
    grid = grid if isinstance(grid, RadialGrid) else make_grid(domain, grid)
    mode = md._mode_of(domain, mode)
    lam = complex(lam)
    f = np.asarray(f(grid.nodes) if callable(f) else f, dtype=complex)
    g_bar = md.gamma_profile(domain, mode, lam.conjugate(), grid.nodes)
    lhs = grid.inner(f, g_bar)
    op = build_radial_operator(domain, mode, te.NEUMANN, grid)
    u = op.shifted_solve(lam, f)
    rhs = u[-1] * domain.R ** ((domain.n - 1) / 2.0)
    return abs(lhs - rhs)


def fd_eigenvalues(domain: md.Domain, mode, bc, grid, count: int = 3) -> np.ndarray:
    """Smallest ``count`` eigenvalues for a real boundary condition."""
    grid = grid if isinstance(grid, RadialGrid) else make_grid(domain, grid)
    op = build_radial_operator(domain, mode, bc, grid)
    m = grid.N - 1 if op.dirichlet else grid.N
    if np.abs(op.diag.imag).max() > 0:
        raise ValidationError("fd_eigenvalues needs a real boundary condition")
    # symmetrize with W^{1/2}: off-diagonal sqrt(lower*upper)
    diag = op.diag.real[:m]
    off = -np.sqrt(op.lower.real[:m - 1] * op.upper.real[:m - 1])
    return eigh_tridiagonal(diag, off, eigvals_only=True, select="i",
                            select_range=(0, min(count, m) - 1))


def fd_robin_eigenvalues(domain: md.Domain, mode, theta, grid, count: int = 3) -> np.ndarray:
    return fd_eigenvalues(domain, mode, theta, grid, count)


def weighted_symmetry_residual(op: RadialOperator) -> float:
    """``max |(W A) - (W A)^T|`` scaled by ``max |W A|``."""
    a = op.matrix()
    wa = op.grid.weights[:, None] * a
    return float(np.abs(wa - wa.T).max() / np.abs(wa).max())


def observed_order(errors, grids) -> float:
    """Least-squares slope of ``log error`` against ``log h``."""
    errors = np.asarray(errors, dtype=float)
    grids = np.asarray(grids, dtype=float)
    if errors.size < 2 or np.any(errors <= 0):
        raise ValidationError("observed_order needs at least two positive errors")
    slope, _ = np.polyfit(np.log(1.0 / grids), np.log(errors), 1)
    return float(slope)


def richardson_order(values, ratio: float = 2.0) -> float:
    """Order from three successive approximations on grids refined by ``ratio``."""
    v = np.asarray(values, dtype=complex)
    if v.size != 3:
        raise ValidationError("richardson_order needs exactly three values")
    d1, d2 = abs(v[0] - v[1]), abs(v[1] - v[2])
    if d2 == 0 or d1 == 0:
        raise ValidationError("successive values coincide; order is undefined")
    return math.log(d1 / d2) / math.log(ratio)
