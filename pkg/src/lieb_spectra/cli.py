"""Command-line surface: butterfly sweeps, band sets, verification suites,
regime classification, Lyapunov scans, localization reports, Weyl residuals.

All commands are deterministic: fixed grids, no randomness, floats printed
with 17 significant digits, sweep output sorted before writing.  Exit codes:
0 success / all checks pass, 1 any check failed, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .arithmetic import Flux
from .dynamics import eig_localization_profile, lyapunov, write_localization_csv
from .operators import GeneralParams, LiebParams, build_lieb_1d
from .spectra import (
    amo_bands_rational,
    bands_to_json,
    general_bands_rational,
    lieb_bands_rational,
    write_bands_csv,
)
from .verify import (
    check_gap_bound,
    check_mapping,
    check_mapping_round_trip,
    check_reduction_identity,
    check_symmetry,
    classify_regime,
    reports_to_json,
    weyl_zero_residual,
)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def parse_flux(spec: str, cf: str | None = None) -> Flux:
    """Flux from a CLI token: named shortcut, p/q, decimal, or --cf quotients."""
    if cf:
        return Flux.from_quotients([int(a) for a in cf.split(",")])
    if spec in ("golden", "silver", "e2"):
        return Flux.named(spec)
    if "/" in spec:
        p, q = spec.split("/", 1)
        return Flux.rational(int(p), int(q))
    return Flux.from_value(float(spec))


def _workers() -> int:
    cap = os.environ.get("LIEB_SPECTRA_THREADS")
    hard = max(1, min(4, os.cpu_count() or 1))
    if cap is None:
        return hard
    try:
        return max(1, min(int(cap), hard))
    except ValueError:
        return hard


def _open_output(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", newline=""), True
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _reduced_fractions(q_max: int):
    out = []
    for q in range(1, q_max + 1):
        for p in range(q):
            if math.gcd(p, q) == 1:
                out.append((p, q))
    return out


def _validate(args) -> None:
    if getattr(args, "qmax", 1) > 500:
        raise ValueError("qmax must be <= 500")
    if not (1 <= getattr(args, "qmax", 1)):
        raise ValueError("qmax must be >= 1")
    if getattr(args, "grid", 64) < 8:
        raise ValueError("grid must be >= 8")


def cmd_butterfly(args) -> int:
    _validate(args)
    fractions = _reduced_fractions(args.qmax)

    def compute(pq):
        p, q = pq
        if args.model == "amo":
            return pq, amo_bands_rational(p, q, args.lam)
        if args.model == "lieb":
            return pq, lieb_bands_rational(p, q, args.t)
        params = GeneralParams(
            alpha=Flux.rational(p, q), theta=0.0, t2=args.t2, t3=args.t3, t4=args.t4
        )
        return pq, general_bands_rational(p, q, params)

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        results = dict(pool.map(compute, fractions))
    fh, own = _open_output(args.output)
    try:
        if args.format == "json":
            fh.write(bands_to_json([results[pq] for pq in fractions]))
            fh.write("\n")
        else:
            write_bands_csv([results[pq] for pq in fractions], fh)
    finally:
        if own:
            fh.close()
    return 0


def cmd_bands(args) -> int:
    _validate(args)
    if args.model == "amo":
        bands = amo_bands_rational(args.p, args.q, args.lam)
    elif args.model == "lieb":
        bands = lieb_bands_rational(args.p, args.q, args.t, method=args.method, n_grid=args.grid)
    else:
        params = GeneralParams(
            alpha=Flux.rational(args.p, args.q), theta=0.0, t2=args.t2, t3=args.t3, t4=args.t4
        )
        bands = general_bands_rational(args.p, args.q, params, method=args.method, n_grid=args.grid)
    fh, own = _open_output(args.output)
    try:
        if args.format == "json":
            fh.write(bands_to_json([bands]))
            fh.write("\n")
        else:
            write_bands_csv([bands], fh)
    finally:
        if own:
            fh.close()
    return 0


def _model_params(args) -> LiebParams | GeneralParams:
    alpha = parse_flux(args.alpha, getattr(args, "cf", None))
    if getattr(args, "t2", None) is not None:
        return GeneralParams(alpha=alpha, theta=args.theta, t2=args.t2, t3=args.t3, t4=args.t4)
    return LiebParams(alpha=alpha, theta=args.theta, t=args.t)


def cmd_verify(args) -> int:
    reports = []
    suites = args.suite
    if "all" in suites:
        suites = ["reduction", "symmetry", "mapping", "gap", "weyl", "roundtrip"]
    for suite in suites:
        if suite == "reduction":
            params = _model_params(args)
            reports.append(check_reduction_identity(params, args.N))
        elif suite == "symmetry":
            params = _model_params(args)
            reports.append(check_symmetry(params, args.N))
        elif suite == "mapping":
            reports.append(check_mapping(args.p, args.q, args.t, grid=args.grid))
        elif suite == "gap":
            reports.append(check_gap_bound(args.p, args.q, args.t**-2))
        elif suite == "weyl":
            params = _model_params(args)
            reports.append(weyl_zero_residual(params, args.k))
        elif suite == "roundtrip":
            energies = np.linspace(-2 - 2 * args.t**-2, 2 + 2 * args.t**-2, 17)
            reports.append(check_mapping_round_trip(args.t, energies))
        else:
            print(f"error: unknown suite {suite!r}", file=sys.stderr)
            return 2
    fh, own = _open_output(args.output)
    try:
        fh.write(reports_to_json(reports))
        fh.write("\n")
    finally:
        if own:
            fh.close()
    return 0 if all(r.passed for r in reports) else 1


def cmd_classify(args) -> int:
    params = _model_params(args)
    label = classify_regime(params.alpha, args.theta, params, scan_depth=args.depth)
    print(label.regime.value)
    detail = {
        "threshold": label.threshold,
        "beta_hat": label.beta_hat,
        "beta_unc": label.beta_unc,
        "gamma_hat": label.gamma_hat,
        "gamma_unc": label.gamma_unc,
    }
    for key, val in detail.items():
        if val is not None:
            print(f"  {key} = {_fmt(val)}")
    if label.note:
        print(f"  note: {label.note}")
    return 0


def cmd_lyapunov(args) -> int:
    alpha = parse_flux(args.alpha, args.cf)
    energies = [float(e) for e in args.energy.split(",")]
    fh, own = _open_output(args.output)
    try:
        fh.write("energy,lyapunov\n")
        for e in energies:
            le = lyapunov(e, args.lam, alpha, args.theta, args.steps)
            fh.write(f"{_fmt(e)},{_fmt(le)}\n")
    finally:
        if own:
            fh.close()
    return 0


def cmd_localize(args) -> int:
    params = _model_params(args)
    M = build_lieb_1d(params, args.N)
    lo, hi = (float(x) for x in args.window.split(","))
    rows = []
    for energy, fit, ipr in eig_localization_profile(M, (lo, hi)):
        rows.append(
            {
                "model": "lieb",
                "alpha_desc": params.alpha.describe(),
                "theta": _fmt(params.theta),
                "t": _fmt(params.t),
                "N": args.N,
                "eigenvalue": _fmt(energy),
                "ipr": _fmt(ipr),
                "decay_rate": _fmt(fit.rate),
                "fit_residual": _fmt(fit.residual),
            }
        )
    fh, own = _open_output(args.output)
    try:
        write_localization_csv(rows, fh)
    finally:
        if own:
            fh.close()
    return 0


def cmd_weyl(args) -> int:
    params = _model_params(args)
    report = weyl_zero_residual(params, args.k)
    print(f"m = {report.details['m']}")
    print(f"residual = {_fmt(report.measured)} (threshold {_fmt(report.threshold)})")
    return 0 if report.passed else 1


def _add_flux_args(sub, theta_default=0.0):
    sub.add_argument("--alpha", default="golden", help="golden|silver|e2, p/q, or a decimal")
    sub.add_argument("--cf", default=None, help="comma-separated partial quotients")
    sub.add_argument("--theta", type=float, default=theta_default)


def _add_coupling_args(sub):
    sub.add_argument("--t", type=float, default=1.0)
    sub.add_argument("--t2", type=float, default=None)
    sub.add_argument("--t3", type=float, default=None)
    sub.add_argument("--t4", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lieb-spectra", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("butterfly", help="band sets over all reduced fractions up to qmax")
    b.add_argument("--model", choices=["lieb", "amo", "general"], default="lieb")
    b.add_argument("--qmax", type=int, default=20)
    b.add_argument("--t", type=float, default=1.0)
    b.add_argument("--lambda", dest="lam", type=float, default=1.0)
    b.add_argument("--t2", type=float, default=1.0)
    b.add_argument("--t3", type=float, default=1.0)
    b.add_argument("--t4", type=float, default=1.0)
    b.add_argument("--format", choices=["csv", "json"], default="csv")
    b.add_argument("-o", "--output", default=None)
    b.set_defaults(func=cmd_butterfly)

    d = sub.add_parser("bands", help="band set at a single rational flux")
    d.add_argument("--model", choices=["lieb", "amo", "general"], default="lieb")
    d.add_argument("--p", type=int, required=True)
    d.add_argument("--q", type=int, required=True)
    d.add_argument("--t", type=float, default=1.0)
    d.add_argument("--lambda", dest="lam", type=float, default=1.0)
    d.add_argument("--t2", type=float, default=1.0)
    d.add_argument("--t3", type=float, default=1.0)
    d.add_argument("--t4", type=float, default=1.0)
    d.add_argument("--method", choices=["Mapped", "Direct"], default="Mapped")
    d.add_argument("--grid", type=int, default=64)
    d.add_argument("--format", choices=["csv", "json"], default="csv")
    d.add_argument("-o", "--output", default=None)
    d.set_defaults(func=cmd_bands)

    v = sub.add_parser("verify", help="run verification suites, emit a JSON report")
    v.add_argument("--suite", nargs="+", default=["all"])
    _add_flux_args(v, theta_default=0.13)
    _add_coupling_args(v)
    v.add_argument("--N", type=int, default=200)
    v.add_argument("--p", type=int, default=2)
    v.add_argument("--q", type=int, default=5)
    v.add_argument("--k", type=int, default=100)
    v.add_argument("--grid", type=int, default=64)
    v.add_argument("-o", "--output", default=None)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("classify", help="spectral-regime label for (flux, phase, couplings)")
    _add_flux_args(c)
    _add_coupling_args(c)
    c.add_argument("--depth", type=int, default=32)
    c.set_defaults(func=cmd_classify)

    ly = sub.add_parser("lyapunov", help="transfer-matrix Lyapunov exponents")
    ly.add_argument("--energy", required=True, help="comma-separated energies")
    ly.add_argument("--lambda", dest="lam", type=float, required=True)
    _add_flux_args(ly)
    ly.add_argument("--steps", type=int, default=100000)
    ly.add_argument("-o", "--output", default=None)
    ly.set_defaults(func=cmd_lyapunov)

    lo = sub.add_parser("localize", help="eigenvector localization report")
    _add_flux_args(lo, theta_default=0.1)
    lo.add_argument("--t", type=float, default=0.5)
    lo.add_argument("--N", type=int, default=500)
    lo.add_argument("--window", required=True, help="lo,hi energy window")
    lo.add_argument("-o", "--output", default=None)
    lo.set_defaults(func=cmd_localize)

    w = sub.add_parser("weyl", help="near-resonant flat-band trial vector residual")
    w.add_argument("--k", type=int, required=True)
    _add_flux_args(w)
    w.add_argument("--t", type=float, default=1.0)
    w.set_defaults(func=cmd_weyl)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
