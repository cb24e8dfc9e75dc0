"""Named verification suites: exponent checks and finite-difference oracles.

Every suite returns a JSON-ready dict with a boolean ``passed``.
"""
from __future__ import annotations

import math

import numpy as np

from . import fd_oracle as fd
from . import model_domains as md
from . import schatten_analysis as sa
from . import triple_engine as te

SUITES = ("robin_exponent", "dirichlet_exponent", "composite_exponent", "composite_trace", "krein", "gamma", "weyl", "eigen",
          "crosspath")
ORDER_TARGET, ORDER_TOL = 2.0, 0.4


def robin(rule, cls="self_adjoint") -> te.Robin:
    return te.Robin(te.make_boundary_operator(rule, cls))


def exponent_check(pair, n, lam, cutoff, window, kind, expected, tol, p0=None, threads=1) -> dict:
    domain = md.make_ball(n)
    spectrum = te.singular_spectrum(pair, domain, lam, cutoff, threads=threads)
    fit = sa.fit_decay_exponent(spectrum, window)
    bound = sa.threshold(kind, n, p0)
    v = sa.verdict(fit, bound)
    return {
        "n": n, "cutoff": cutoff, "length": len(spectrum),
        "fit": fit.to_dict(), "threshold": bound.to_dict(),
        "verdict": v.label, "margin": v.margin,
        "expected_exponent": expected, "exponent_tolerance": tol,
        "passed": abs(fit.exponent - expected) <= tol and v.consistent,
    }


def suite_robin_exponent(n=None, threads=1) -> dict:
    checks = []
    if n in (None, 2):
        checks.append(exponent_check(te.ExtensionPair(robin(2), robin(-1)), 2, 1j, 2000,
                                     (200, 2000), "robin_neumann", 3.0, 0.15, threads=threads))
    if n in (None, 3):
        checks.append(exponent_check(te.ExtensionPair(robin(1), te.NEUMANN), 3, 1j, 300,
                                     None, "robin_neumann", 1.5, 0.1, threads=threads))
    return {"suite": "robin_exponent", "checks": checks, "passed": all(c["passed"] for c in checks)}


def suite_dirichlet_exponent(n=None, threads=1) -> dict:
    pair = te.ExtensionPair(te.DIRICHLET, te.NEUMANN)
    checks = []
    if n in (None, 2):
        c = exponent_check(pair, 2, 1j, 2000, None, "dirichlet_neumann", 2.0, 0.15,
                           threads=threads)
        c["trace"] = trace_stabilization(pair, md.make_ball(2), 1j, 2000)
        c["passed"] = c["passed"] and c["trace"]["passed"]
        checks.append(c)
    if n in (None, 3):
        checks.append(exponent_check(pair, 3, 1j, 300, None, "dirichlet_neumann", 1.0, 0.1,
                                     threads=threads))
    return {"suite": "dirichlet_exponent", "checks": checks, "passed": all(c["passed"] for c in checks)}


def trace_stabilization(pair, domain, lam, cutoff) -> dict:
    """Partial sums at p=1 over ``K/4, K/2, K``: converging iff the increments
    shrink (a log-divergent sum keeps them constant) and the last is small."""
    spectrum = te.singular_spectrum(pair, domain, lam, cutoff)
    K = len(spectrum)
    sums = sa.schatten_partial_sums(spectrum, 1.0, [K // 4, K // 2, K])
    d1, d2 = sums[1] - sums[0], sums[2] - sums[1]
    rel = d2 / sums[2]
    return {"checkpoints": [K // 4, K // 2, K], "sums": sums.tolist(), "relative_change": rel,
            "increment_ratio": d2 / d1,
            "passed": bool(rel <= 1e-3 and d2 / d1 <= 0.6)}


def suite_composite_exponent(n=None, threads=1) -> dict:
    pair = te.ExtensionPair(robin(2), robin("2-(1+l)^(-2)"))
    # difference lies in S_p0 for every p0 > 1/2; take p0 just above
    check = exponent_check(pair, 2, 1j, 2000, None, "composite", 5.0, 0.3, p0=0.5 + 1e-6,
                           threads=threads)
    return {"suite": "composite_exponent", "checks": [check], "passed": check["passed"]}


def suite_composite_trace(n=None, threads=1) -> dict:
    pair = te.ExtensionPair(robin(2), robin("2-(1+l)^(-2)"))
    spectrum = te.singular_spectrum(pair, md.make_ball(4), 1j, 60, threads=threads)
    K = 20000
    sums = sa.schatten_partial_sums(spectrum, 1.0, [K, 2 * K])
    rel = abs(sums[1] - sums[0]) / abs(sums[1])
    return {"suite": "composite_trace", "n": 4, "length": len(spectrum), "checkpoints": [K, 2 * K],
            "sums": sums.tolist(), "relative_change": rel, "tolerance": 1e-4,
            "passed": bool(rel <= 1e-4)}


def _krein_pair():
    return te.ExtensionPair(robin(1), te.NEUMANN)


def krein_check(ell, grids=fd.DEFAULT_GRIDS, fine=8192, lam=1j) -> dict:
    domain = md.make_ball(2)
    pair = _krein_pair()
    res = [fd.krein_identity_residual(domain, ell, lam, pair, N) for N in grids]
    order = fd.observed_order(res, grids)
    out = {"ell": ell, "grids": list(grids), "residuals": res, "observed_order": order}
    ok = abs(order - ORDER_TARGET) <= ORDER_TOL
    if fine:
        out["fine_grid"] = fine
        out["fine_residual"] = fd.krein_identity_residual(domain, ell, lam, pair, fine)
        ok = ok and out["fine_residual"] <= 1e-6
    out["passed"] = bool(ok)
    return out


def suite_krein(n=None, threads=1, ells=(0, 1, 5), grids=fd.DEFAULT_GRIDS) -> dict:
    checks = [krein_check(ell, grids) for ell in ells]
    return {"suite": "krein", "checks": checks, "passed": all(c["passed"] for c in checks)}


def test_functions(domain: md.Domain, mode, lam):
    """Three fixed smooth radial functions (the last is the gamma field itself)."""
    rng = np.random.default_rng(20240607)
    coeffs = rng.normal(size=4) + 1j * rng.normal(size=4)
    return {
        "cosine": lambda r: np.cos(np.pi * r / (2 * domain.R)) * (r / domain.R) ** mode,
        "random_poly": lambda r: np.polyval(coeffs, r / domain.R) * (r / domain.R) ** mode,
        "gamma_field": lambda r: md.gamma_profile(domain, mode, complex(lam).conjugate(), r),
    }


def gamma_check(ell=1, grids=fd.DEFAULT_GRIDS, lam=1j) -> dict:
    domain = md.make_ball(2)
    checks = []
    for name, f in test_functions(domain, ell, lam).items():
        res = [fd.gamma_adjoint_identity_check(domain, ell, lam, N, f) for N in grids]
        order = fd.observed_order(res, grids)
        checks.append({"function": name, "ell": ell, "grids": list(grids), "residuals": res,
                       "observed_order": order,
                       "passed": bool(abs(order - ORDER_TARGET) <= ORDER_TOL)})
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}


def suite_gamma(n=None, threads=1, ells=(1,), grids=fd.DEFAULT_GRIDS) -> dict:
    checks = []
    for ell in ells:
        checks.extend(gamma_check(ell, grids)["checks"])
    return {"suite": "gamma", "checks": checks, "passed": all(c["passed"] for c in checks)}


WEYL_SAMPLES = (1j, 1 + 2j, -3 + 0.5j, 0.25 + 1e-3j, 50 + 10j)


def suite_weyl(n=None, threads=1, cutoff=200) -> dict:
    domain = md.make_ball(n or 2)
    worst_im, worst_conj, worst_branch = math.inf, 0.0, 0.0
    for lam in WEYL_SAMPLES:
        m = md.weyl_values(domain, cutoff, lam, threads=threads)
        mc = md.weyl_values(domain, cutoff, complex(lam).conjugate(), threads=threads)
        worst_im = min(worst_im, float(m.imag.min()))
        worst_conj = max(worst_conj, float(np.max(np.abs(mc - m.conj()) / np.abs(m))))
        k = md.wavenumber(lam)
        for ell in range(cutoff + 1):
            a = md.weyl_value(domain, ell, lam, k=k)
            b = md.weyl_value(domain, ell, lam, k=-k)
            worst_branch = max(worst_branch, abs(a - b) / abs(a))
    return {"suite": "weyl", "n": domain.n, "cutoff": cutoff,
            "lambdas": [[z.real, z.imag] for z in map(complex, WEYL_SAMPLES)],
            "min_im_M": worst_im, "conjugate_symmetry": worst_conj,
            "branch_independence": worst_branch,
            "passed": bool(worst_im > 0 and worst_conj <= 1e-12 and worst_branch <= 1e-12)}


DIRICHLET_GROUND = 2.404825557695773 ** 2


def suite_eigen(n=None, threads=1, grids=fd.DEFAULT_GRIDS) -> dict:
    domain = md.make_ball(2)
    dirichlet = te.robin_eigenvalues(domain, te.DIRICHLET, 0, (0.0, 10.0))
    d_ok = dirichlet.size == 1 and abs(dirichlet[0] - DIRICHLET_GROUND) <= 1e-4
    analytic = te.robin_eigenvalues(domain, 1.0, 0, (-10.0, 60.0))[:3]
    errors = []
    for N in grids:
        num = fd.fd_robin_eigenvalues(domain, 0, 1.0, N, count=analytic.size)
        errors.append(np.abs(num - analytic))
    errors = np.array(errors)
    h = np.array([domain.R / N for N in grids])
    envelope = (errors / h[:, None] ** 2).max(axis=0)   # C in |err| <= C h^2
    orders = [fd.observed_order(errors[:, j], grids) for j in range(analytic.size)]
    r_ok = all(abs(o - ORDER_TARGET) <= ORDER_TOL for o in orders)
    return {"suite": "eigen", "dirichlet_ground": float(dirichlet[0]) if dirichlet.size else None,
            "dirichlet_reference": DIRICHLET_GROUND,
            "robin_theta": 1.0, "robin_eigenvalues": analytic.tolist(),
            "fd_errors": errors.tolist(), "h2_constants": envelope.tolist(),
            "observed_orders": orders, "passed": bool(d_ok and r_ok)}


def suite_crosspath(n=None, threads=1) -> dict:
    domain = md.make_ball(2)
    pairs = {
        "robin_robin": te.ExtensionPair(robin(2), robin(-1)),
        "robin_neumann": te.ExtensionPair(robin(1), te.NEUMANN),
        "composite": te.ExtensionPair(robin(2), robin("2-(1+l)^(-2)")),
    }
    worst = 0.0
    for pair in pairs.values():
        diag = te.singular_spectrum(pair, domain, 1j, 100).values
        dense_pair = te.ExtensionPair(*[
            te.Robin(te.make_boundary_operator(r.theta.dense(domain, 100),
                                               r.theta.symmetry_class))
            if isinstance(r, te.Robin) else r for r in (pair.left, pair.right)])
        dense = te.singular_spectrum(dense_pair, domain, 1j, 100).values
        worst = max(worst, float(np.max(np.abs(diag - dense))))
    fd_checks = []
    for ell in (0, 1, 5):
        analytic = te.per_mode_singular_values(pairs["robin_neumann"], domain, 1j, ell)[ell]
        numeric = fd.fd_resolvent_difference(domain, ell, 1j, 1.0, te.NEUMANN, 4096).singular_value
        fd_checks.append({"ell": ell, "analytic": float(analytic), "fd": numeric,
                          "difference": abs(numeric - analytic)})
    fd_ok = all(c["difference"] <= 1e-4 for c in fd_checks)
    return {"suite": "crosspath", "dense_vs_diagonal": worst, "fd_top_singular": fd_checks,
            "passed": bool(worst <= 1e-10 and fd_ok)}


RUNNERS = {
    "robin_exponent": suite_robin_exponent, "dirichlet_exponent": suite_dirichlet_exponent,
    "composite_exponent": suite_composite_exponent, "composite_trace": suite_composite_trace, "krein": suite_krein, "gamma": suite_gamma, "weyl": suite_weyl,
    "eigen": suite_eigen, "crosspath": suite_crosspath,
}


def run_suite(name: str, n=None, threads=1) -> dict:
    if name == "all":
        results = [RUNNERS[s](n=n, threads=threads) for s in SUITES]
        return {"suite": "all", "results": results, "passed": all(r["passed"] for r in results)}
    return RUNNERS[name](n=n, threads=threads)
