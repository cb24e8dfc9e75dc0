"""Command-line front end.

    robinlap [--config FILE] [--threads N] [--no-timestamp] COMMAND [options]

Commands: weyl, snum, fit, eig, oracle, verify.  Options given on the command
line override the JSON config; every JSON result embeds the fully resolved
config so it can be fed back with ``--config`` to reproduce the run.

Exit codes: 0 ok, 1 bad configuration, 2 inadmissible lambda or missing
essential-spectrum gap, 3 numerical failure (pole or eigenvalue hit).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import fd_oracle as fd
from . import model_domains as md
from . import schatten_analysis as sa
from . import triple_engine as te
from . import verification
from .errors import (BesselOverflowError, EigenvalueHitError, EssentialSpectrumGapError,
                     InadmissibleSpectralPoint, PoleError, QuadratureError, RobinLapError,
                     SolveError)

EXIT_OK, EXIT_CONFIG, EXIT_INADMISSIBLE, EXIT_NUMERICAL = 0, 1, 2, 3

DEFAULTS = {
    "domain": {"n": 2, "R": 1.0},
    "lambda": None,
    "pair": {"left": "robin:2", "right": "robin:-1"},
    "cutoff": 100,
    "fit_window": None,
    "threshold": {"kind": None, "p0": None},
    "grids": list(fd.DEFAULT_GRIDS),
    "format": "json",
}


class ConfigError(RobinLapError):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def parse_complex(text) -> complex:
    if isinstance(text, dict):
        return complex(float(text.get("re", 0.0)), float(text.get("im", 0.0)))
    if isinstance(text, (int, float, complex)):
        return complex(text)
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"cannot parse complex number {text!r}") from None


def parse_realization(value):
    """``neumann`` | ``dirichlet`` | ``robin:<rule>[:<class>]``."""
    text = str(value).strip()
    low = text.lower()
    if low in ("neumann", "n"):
        return te.NEUMANN
    if low in ("dirichlet", "d"):
        return te.DIRICHLET
    if low.startswith("robin:"):
        parts = text.split(":")
        rule = parts[1]
        cls = parts[2] if len(parts) > 2 else "self_adjoint"
        return te.Robin(te.make_boundary_operator(rule, cls))
    raise ConfigError(f"unknown realization {value!r}; use neumann, dirichlet or robin:<rule>[:<class>]")


def _merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(path) -> dict:
    if path is None:
        return json.loads(json.dumps(DEFAULTS))
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    data = data.get("config", data)   # accept a previous result file
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return _merge(json.loads(json.dumps(DEFAULTS)), data)


def apply_overrides(cfg: dict, args) -> dict:
    cfg = json.loads(json.dumps(cfg))
    for attr, path in (("n", ("domain", "n")), ("R", ("domain", "R")),
                       ("left", ("pair", "left")), ("right", ("pair", "right")),
                       ("kind", ("threshold", "kind")), ("p0", ("threshold", "p0"))):
        value = getattr(args, attr, None)
        if value is not None:
            cfg[path[0]][path[1]] = value
    if getattr(args, "lam", None) is not None:
        z = parse_complex(args.lam)
        cfg["lambda"] = {"re": z.real, "im": z.imag}
    if getattr(args, "cutoff", None) is not None:
        cfg["cutoff"] = args.cutoff
    if getattr(args, "window", None) is not None:
        cfg["fit_window"] = _int_list(args.window, 2)
    if getattr(args, "grids", None) is not None:
        cfg["grids"] = _int_list(args.grids)
    return cfg


def _int_list(text, length=None):
    try:
        values = [int(v) for v in str(text).split(",")] if isinstance(text, str) else list(text)
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None
    if length is not None and len(values) != length:
        raise ConfigError(f"expected {length} integers, got {text!r}")
    return values


class Experiment:
    """Validated view of a config dict."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        try:
            self.domain = md.make_ball(cfg["domain"]["n"], cfg["domain"]["R"])
            self.cutoff = int(cfg["cutoff"])
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"bad domain/cutoff: {exc}") from None
        self.pair = te.ExtensionPair(parse_realization(cfg["pair"]["left"]),
                                     parse_realization(cfg["pair"]["right"]))
        if cfg["lambda"] is None:
            self.lam = te.default_lambda(self.pair)
            cfg["lambda"] = {"re": self.lam.real, "im": self.lam.imag}
        else:
            self.lam = parse_complex(cfg["lambda"])
        te.admissible_lambda(self.pair, self.lam)

    def threshold(self) -> sa.ThresholdSpec:
        kind = self.cfg["threshold"]["kind"] or infer_kind(self.pair)
        self.cfg["threshold"]["kind"] = sa.ThresholdKind.parse(kind).value
        return sa.threshold(kind, self.domain.n, self.cfg["threshold"]["p0"])


def infer_kind(pair: te.ExtensionPair) -> str:
    if pair.trivial:
        return "robin_neumann"
    if any(isinstance(r, te.Dirichlet) for r in (pair.left, pair.right)):
        return "dirichlet_neumann"
    return "robin_neumann"


def _result(cfg: dict, args, **payload) -> dict:
    out = {"config": cfg}
    out.update(payload)
    if not args.no_timestamp:
        out["metadata"] = {"generated_at": datetime.now(timezone.utc).isoformat(),
                           "version": __version__}
    return out


def _emit_json(obj, dest):
    text = json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"
    if dest not in (None, "-"):
        Path(dest).write_text(text)
    else:
        sys.stdout.write(text)


def spectrum_csv(values) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "s"])
    for k, s in enumerate(values, start=1):
        writer.writerow([k, fmt(s)])
    return buf.getvalue()


def _write_spectrum(values, dest):
    text = spectrum_csv(values)
    if dest in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text)


# -- commands ---------------------------------------------------------------


def cmd_weyl(args, cfg):
    exp = Experiment(cfg)
    lams = [parse_complex(t) for t in args.lambdas.split(",")] if args.lambdas else [exp.lam]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["ell", "lambda_re", "lambda_im", "M_re", "M_im", "gamma_norm"])
    for lam in lams:
        m_values, gamma_sq = md.mode_table(exp.domain, exp.cutoff, lam, threads=args.threads)
        for ell, (m, g2) in enumerate(zip(m_values, gamma_sq)):
            writer.writerow([ell, fmt(lam.real), fmt(lam.imag), fmt(m.real), fmt(m.imag),
                             fmt(np.sqrt(g2))])
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_snum(args, cfg):
    exp = Experiment(cfg)
    spectrum = te.singular_spectrum(exp.pair, exp.domain, exp.lam, exp.cutoff, threads=args.threads)
    _write_spectrum(spectrum.values, args.out)
    if args.json:
        bound = exp.threshold()
        _emit_json(_result(cfg, args, spectrum_file=args.out, threshold=bound.to_dict(),
                           provenance=spectrum.provenance, length=len(spectrum)), args.json)
    return EXIT_OK


def cmd_fit(args, cfg):
    exp = Experiment(cfg)
    spectrum = te.singular_spectrum(exp.pair, exp.domain, exp.lam, exp.cutoff, threads=args.threads)
    if args.spectrum_out:
        _write_spectrum(spectrum.values, args.spectrum_out)
    fit = sa.fit_decay_exponent(spectrum, cfg["fit_window"])
    bound = exp.threshold()
    v = sa.verdict(fit, bound, args.tolerance)
    payload = {"fit": fit.to_dict(), "threshold": bound.to_dict(), "verdict": v.label,
               "margin": v.margin}
    if args.spectrum_out:
        payload = {"spectrum_file": args.spectrum_out, **payload}
    _emit_json(_result(cfg, args, **payload), args.json)
    return EXIT_OK


def _theta_for_eig(text):
    real = parse_realization(text) if ":" in str(text) or str(text).isalpha() else None
    return real if real is not None else float(text)


def cmd_eig(args, cfg):
    domain = md.make_ball(cfg["domain"]["n"], cfg["domain"]["R"])
    theta = _theta_for_eig(args.theta)
    lo, hi = (float(v) for v in args.eig_window.split(","))
    rows = []
    for ell in _int_list(args.l):
        vals = te.robin_eigenvalues(domain, theta, ell, (lo, hi))
        rows.append({"ell": ell, "eigenvalues": vals.tolist()})
    cfg = dict(cfg, eig={"theta": str(args.theta), "window": [lo, hi]})
    _emit_json(_result(cfg, args, modes=rows), args.json)
    return EXIT_OK


def cmd_oracle(args, cfg):
    grids = cfg["grids"]
    ells = _int_list(args.l)
    if args.check == "krein":
        checks = [verification.krein_check(ell, grids, fine=None) for ell in ells]
    elif args.check == "gamma":
        checks = [c for ell in ells for c in verification.gamma_check(ell, grids)["checks"]]
    elif args.check == "weyl":
        exp = Experiment(cfg)
        checks = []
        for ell in ells:
            values = [fd.fd_weyl_value(exp.domain, ell, exp.lam, N) for N in grids]
            exact = md.weyl_value(exp.domain, ell, exp.lam)
            errors = [abs(v - exact) for v in values]
            checks.append({"ell": ell, "grids": grids, "analytic": [exact.real, exact.imag],
                           "errors": errors, "observed_order": fd.observed_order(errors, grids)})
            checks[-1]["passed"] = bool(abs(checks[-1]["observed_order"] - 2.0) <= 0.4)
    else:
        exp = Experiment(cfg)
        checks = []
        for ell in ells:
            analytic = float(te.per_mode_singular_values(exp.pair, exp.domain, exp.lam, ell)[ell])
            values = [fd.fd_resolvent_difference(exp.domain, ell, exp.lam, exp.pair.left,
                                                 exp.pair.right, N).singular_value for N in grids]
            errors = [abs(v - analytic) for v in values]
            checks.append({"ell": ell, "grids": grids, "analytic": analytic, "fd": values,
                           "errors": errors})
            checks[-1]["passed"] = bool(errors[-1] <= 1e-4)
    _emit_json(_result(cfg, args, check=args.check, checks=checks,
                       passed=all(c["passed"] for c in checks)), args.json)
    return EXIT_OK


def cmd_verify(args, cfg):
    report = verification.run_suite(args.suite, n=args.n, threads=args.threads)
    cfg = dict(cfg, verify={"suite": args.suite, "n": args.n})
    _emit_json(_result(cfg, args, **report), args.json)
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robinlap", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON config file (a previous result file also works)")
    parser.add_argument("--threads", type=int, default=1, help="cap on worker threads")
    parser.add_argument("--no-timestamp", action="store_true",
                        help="omit the metadata block so output is byte-identical across runs")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pair=True):
        p.add_argument("--n", type=int)
        p.add_argument("--R", type=float)
        p.add_argument("--lambda", dest="lam", help="spectral point, e.g. 1j, -1, 1-2j")
        p.add_argument("--cutoff", type=int)
        if pair:
            p.add_argument("--left", help="neumann | dirichlet | robin:<rule>[:<class>]")
            p.add_argument("--right")
        p.add_argument("--json", help="write the JSON result here instead of stdout")

    p = sub.add_parser("weyl", help="M_ell(lambda) and gamma-field norms per mode (CSV)")
    common(p)
    p.add_argument("--lambdas", help="comma-separated spectral points")
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("snum", help="singular spectrum as CSV")
    common(p)
    p.add_argument("--out", help="CSV destination (default stdout)")
    p.add_argument("--kind")
    p.add_argument("--p0", type=float)
    p.set_defaults(func=cmd_snum)

    p = sub.add_parser("fit", help="decay exponent, threshold and verdict (JSON)")
    common(p)
    p.add_argument("--window", help="k range lo,hi (1-based, inclusive)")
    p.add_argument("--kind", help="robin_neumann | dirichlet_neumann | composite")
    p.add_argument("--p0", type=float)
    p.add_argument("--tolerance", type=float, default=sa.DEFAULT_TOLERANCE)
    p.add_argument("--spectrum-out", help="also write the spectrum CSV here")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eig", help="real Robin eigenvalues in a window")
    common(p, pair=False)
    p.add_argument("--theta", default="1", help="real theta, dirichlet or neumann")
    p.add_argument("--l", default="0", help="comma-separated modes")
    p.add_argument("--window", dest="eig_window", default="-10,60")
    p.set_defaults(func=cmd_eig)

    p = sub.add_parser("oracle", help="finite-difference convergence checks")
    common(p)
    p.add_argument("--check", choices=("krein", "gamma", "weyl", "resolvent"), default="krein")
    p.add_argument("--l", default="0")
    p.add_argument("--grids", help="comma-separated N values")
    p.set_defaults(func=cmd_oracle, left=None, right=None)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("--suite", choices=verification.SUITES + ("all",), default="all")
    p.add_argument("--n", type=int)
    p.add_argument("--json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        cfg = apply_overrides(load_config(args.config), args)
        return args.func(args, cfg)
    except (InadmissibleSpectralPoint, EssentialSpectrumGapError) as exc:
        print(f"robinlap: inadmissible: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except (PoleError, EigenvalueHitError, SolveError, QuadratureError, BesselOverflowError) as exc:
        print(f"robinlap: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError) as exc:
        print(f"robinlap: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
