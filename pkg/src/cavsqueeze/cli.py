"""Command-line interface.

Subcommands
-----------
fig2            squeezing-vs-Q curves for one S and several cooperativities
validate-oracle closed forms vs brute-force Dicke sums over the standard grid
raman-mc        telegraph-jump Monte Carlo of the time-averaged S_z
design          operating-point report from a config file
sweep           (S, eta) grid scan of limits, optima and regimes

Exit codes: 0 success, 1 usage/config error, 2 validation-suite failure.
All data outputs are byte-identical for identical invocation + seed,
regardless of worker count; the run manifest (wall time) is the only
exception.
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .design import classify_regime, curvature_optimum, design_report, full_curve_minimum, scattering_optimum
from .feedback import analytic_moments
from .oracle import oracle_moments_sum
from .params import EnsembleSpec, load_config, system_from_config
from .raman import RamanProcess, fig2_curve, sample_trajectories
from .serialize import RunManifest, SCHEMA_VERSION, write_csv, write_json

ORACLE_TOL = 1e-10
_ORACLE_S_GRID = (0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0, 200.0)


def _relative_error(a, b):
    diff = abs(a - b)
    scale = max(abs(a), abs(b))
    return diff / scale if scale > 0.0 else 0.0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cavsqueeze",
        description="Cavity-feedback spin squeezing calculations with machine-readable outputs.",
    )
    parser.add_argument("--version", action="version", version=f"cavsqueeze {__version__}")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("fig2", help="squeezing-vs-Q curves (CSV)")
    p.add_argument("--S", type=float, required=True, help="total spin S")
    p.add_argument("--eta", type=float, action="append", required=True,
                   help="single-atom cooperativity; repeatable")
    p.add_argument("--qmin", type=float, default=1.0)
    p.add_argument("--qmax", type=float, default=1000.0)
    p.add_argument("--qpoints", type=int, default=200)
    p.add_argument("--log-grid", action="store_true", default=True,
                   help="logarithmic Q grid (default)")
    p.add_argument("--linear-grid", dest="log_grid", action="store_false")
    p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("validate-oracle", help="closed forms vs brute-force sums (CSV)")
    p.add_argument("--smax", type=float, default=200.0, help="largest S of the grid")
    p.add_argument("--tol", type=float, default=ORACLE_TOL, help="relative-error tolerance")
    p.add_argument("--out", default="out")

    p = sub.add_parser("raman-mc", help="telegraph Monte Carlo statistics (JSON + optional CSV)")
    p.add_argument("--S", type=float, required=True)
    p.add_argument("--r", type=float, required=True, help="scattered photons per atom over the pulse")
    p.add_argument("--traj", type=int, default=10000)
    p.add_argument("--steps", type=int, default=4, help="lag intervals across the pulse")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mode", choices=("exact", "gaussian"), default="exact")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--corr-csv", action="store_true", help="also write the per-lag correlation CSV")
    p.add_argument("--out", default="out")

    p = sub.add_parser("design", help="operating-point report from a config file (JSON)")
    p.add_argument("--config", required=True)
    p.add_argument("--eps-max", type=float, default=1e-5)
    p.add_argument("--q-target", type=float, default=None)
    p.add_argument("--out", default="out")

    p = sub.add_parser("sweep", help="(S, eta) grid scan of limits and regimes (CSV)")
    p.add_argument("--s-min", type=float, default=1e2)
    p.add_argument("--s-max", type=float, default=1e6)
    p.add_argument("--s-points", type=int, default=9)
    p.add_argument("--eta-min", type=float, default=1e-4)
    p.add_argument("--eta-max", type=float, default=10.0)
    p.add_argument("--eta-points", type=int, default=11)
    p.add_argument("--full-minimum", action="store_true",
                   help="also minimize the full modified curve per grid point")
    p.add_argument("--out", default="out")
    return parser


def _outdir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_fig2(args, argv):
    out = _outdir(args)
    manifest = RunManifest(command=["fig2"] + argv)
    if args.qmin <= 0 or args.qmax <= args.qmin or args.qpoints < 2:
        print("fig2: need 0 < qmin < qmax and qpoints >= 2", file=sys.stderr)
        return 1
    if args.log_grid:
        q_grid = np.geomspace(args.qmin, args.qmax, args.qpoints)
    else:
        q_grid = np.linspace(args.qmin, args.qmax, args.qpoints)
    rows = []
    for eta in args.eta:
        for q, sig, sig_curv, sig_ideal in fig2_curve(args.S, eta, q_grid):
            rows.append((eta, q, sig, sig_curv, sig_ideal))
    path = out / "fig2.csv"
    write_csv(path, ("eta", "Q", "sigma_min_sq", "sigma_curv_sq", "sigma_ideal_sq"), rows)
    manifest.add_output(path.name)
    manifest.write(out / "manifest.json")
    print(f"wrote {path}")
    return 0


def cmd_validate_oracle(args, argv):
    out = _outdir(args)
    manifest = RunManifest(command=["validate-oracle"] + argv)
    rows = []
    n_fail = 0
    for s in [s for s in _ORACLE_S_GRID if s <= args.smax]:
        for q in (0.0, 0.1, 1.0, 5.0, 0.5 * s):
            closed = analytic_moments(s, q)
            oracle = oracle_moments_sum(s, q)
            err_v = _relative_error(closed.var_y, oracle.var_y)
            err_w = _relative_error(closed.cov_w, oracle.cov_w)
            ok = err_v <= args.tol and err_w <= args.tol
            n_fail += 0 if ok else 1
            rows.append((s, q, closed.var_y, oracle.var_y, err_v,
                         closed.cov_w, oracle.cov_w, err_w, ok))
    path = out / "validate_oracle.csv"
    # duplicated rel_err column name is the documented schema
    write_csv(path, ("S", "Q", "var_y_closed", "var_y_oracle", "rel_err",
                     "cov_closed", "cov_oracle", "rel_err", "pass"), rows)
    manifest.add_output(path.name)
    manifest.write(out / "manifest.json")
    print(f"{len(rows) - n_fail}/{len(rows)} grid points within {args.tol:g}; wrote {path}")
    return 0 if n_fail == 0 else 2


def cmd_raman_mc(args, argv):
    out = _outdir(args)
    manifest = RunManifest(command=["raman-mc"] + argv, seed=args.seed)
    spec = EnsembleSpec(total_spin=args.S)
    process = RamanProcess(r=args.r, pulse_time=1.0, n_atoms=spec.atom_count)
    try:
        stats = sample_trajectories(process, spec.total_spin, args.traj, args.steps,
                                    seed=args.seed, mode=args.mode, workers=args.workers)
    except ValueError as exc:
        print(f"raman-mc: {exc}", file=sys.stderr)
        return 1
    payload = {
        "schema_version": SCHEMA_VERSION,
        "total_spin": args.S,
        "r": args.r,
        "mode": args.mode,
        "seed": args.seed,
        "pulse_time_s": process.pulse_time,
        "flip_rate_per_atom": process.flip_rate,
        "stats": stats.as_dict(),
    }
    path = out / "raman_stats.json"
    write_json(path, payload)
    manifest.add_output(path.name)
    if args.corr_csv:
        target = np.exp(-2.0 * args.r * stats.lags / process.pulse_time)
        rows = [
            (float(lag), float(c), float(se), float(tg))
            for lag, c, se, tg in zip(stats.lags, stats.corr, stats.corr_se, target)
        ]
        cpath = out / "raman_corr.csv"
        write_csv(cpath, ("lag", "corr", "corr_se", "target"), rows)
        manifest.add_output(cpath.name)
    manifest.write(out / "manifest.json")
    print(f"wrote {path}")
    return 0


def cmd_design(args, argv):
    out = _outdir(args)
    try:
        cfg = load_config(args.config)
        ensemble, params, drive = system_from_config(cfg)
    except (OSError, ValueError) as exc:
        print(f"design: {exc}", file=sys.stderr)
        return 1
    manifest = RunManifest(command=["design"] + argv, config=cfg)
    from .design import DesignTargets

    targets = DesignTargets(max_excited_pop=args.eps_max, q_target=args.q_target)
    try:
        report = design_report(ensemble, params, drive.pulse_time, targets)
    except ValueError as exc:
        print(f"design: {exc}", file=sys.stderr)
        return 1
    path = out / "design_report.json"
    write_json(path, report.as_dict())
    manifest.add_output(path.name)
    manifest.write(out / "manifest.json")
    print(f"wrote {path}")
    return 0


def cmd_sweep(args, argv):
    out = _outdir(args)
    manifest = RunManifest(command=["sweep"] + argv)
    s_grid = np.geomspace(args.s_min, args.s_max, args.s_points)
    eta_grid = np.geomspace(args.eta_min, args.eta_max, args.eta_points)
    header = ["S", "eta", "s_eta5", "regime", "near_boundary",
              "q_curv", "sigma_curv_sq", "q_scatt", "r_opt", "sigma_scatt_sq"]
    if args.full_minimum:
        header += ["q_full", "sigma_full_sq"]
    rows = []
    import warnings as _warnings

    for s in s_grid:
        q_curv, sigma_curv_sq = curvature_optimum(max(s, 1.0))
        for eta in eta_grid:
            with _warnings.catch_warnings():
                _warnings.simplefilter("ignore", RuntimeWarning)
                q_scatt, r_opt, sigma_scatt_sq = scattering_optimum(s, eta)
            cls = classify_regime(s, eta)
            row = [float(s), float(eta), cls.s_eta5, cls.regime, cls.near_boundary,
                   q_curv, sigma_curv_sq, q_scatt, r_opt, sigma_scatt_sq]
            if args.full_minimum:
                q_full, sigma_full = full_curve_minimum(s, eta)
                row += [q_full, sigma_full]
            rows.append(tuple(row))
    path = out / "sweep.csv"
    write_csv(path, header, rows)
    manifest.add_output(path.name)
    manifest.write(out / "manifest.json")
    print(f"wrote {path}")
    return 0


_HANDLERS = {
    "fig2": cmd_fig2,
    "validate-oracle": cmd_validate_oracle,
    "raman-mc": cmd_raman_mc,
    "design": cmd_design,
    "sweep": cmd_sweep,
}


def run(argv=None):
    """Entry point returning the process exit code (0/1/2)."""
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help/--version, 2 for usage errors; usage
        # errors are exit code 1 here
        return 0 if exc.code == 0 else 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        print("cavsqueeze: a subcommand is required", file=sys.stderr)
        return 1
    return _HANDLERS[args.command](args, argv)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
