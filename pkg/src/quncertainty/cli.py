"""Command-line front end.

Exit codes: 0 success, 1 output could not be written, 2 invalid flags or
input file, 3 an invariant was violated during the run (output is still
written).
"""

import argparse
import math
import os
import sys

from . import gamesim, serialize
from .gamesim import ESTIMATORS, ExperimentConfig, InvariantViolation
from .states import uhlmann_fidelity
from .tomography import mle_reconstruct, overcomplete_settings, simulate_counts

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _angle(parser, name, default, what):
    """``--name`` in radians and ``--name-deg`` in degrees, mutually exclusive."""
    g = parser.add_mutually_exclusive_group()
    g.add_argument(f"--{name}", type=float, default=None, metavar="RAD",
                   help=f"{what} in radians (default {default:.6g} rad)")
    g.add_argument(f"--{name}-deg", type=float, default=None, metavar="DEG",
                   help=f"{what} in degrees")
    parser.set_defaults(**{f"_{name}_default": default})


def _resolve_angle(args, name):
    rad = getattr(args, name.replace("-", "_"))
    deg = getattr(args, f"{name.replace('-', '_')}_deg")
    if deg is not None:
        return math.radians(deg)
    return getattr(args, f"_{name.replace('-', '_')}_default") if rad is None else rad


def _common(parser, fidelity=1.0, fmt="csv"):
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (integer)")
    parser.add_argument("--shots", type=int, default=gamesim.DEFAULT_SHOTS,
                        help="game rounds per point, or coincidences per setting for tomo "
                             "(default %(default)s)")
    parser.add_argument("--fidelity", type=float, default=fidelity,
                        help="source fidelity F in (1/4, 1]; white-noise mixing "
                             "p = (4F-1)/3 (dimensionless, default %(default)s)")
    parser.add_argument("--exact", action="store_true",
                        help="use expected counts instead of sampling")
    parser.add_argument("--out", default="-", help="output path ('-' for stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default=fmt,
                        help="output format (default %(default)s)")


def _sweep_flags(parser, points):
    parser.add_argument("--points", type=int, default=points,
                        help="number of sweep points K >= 2 (default %(default)s)")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker threads; output does not depend on this")
    parser.add_argument("--resamples", type=int, default=200,
                        help="bootstrap resamples B >= 100 (default %(default)s)")
    parser.add_argument("--estimator", choices=ESTIMATORS, default="measurement",
                        help="estimator used for the witness column (default %(default)s)")
    parser.add_argument("--tomography", action="store_true",
                        help="estimate the tomographic value from simulated conditional "
                             "tomography instead of the true state (sampled mode only)")


def _state_flags(parser):
    g = parser.add_mutually_exclusive_group()
    g.add_argument("--tangle", type=float, default=None,
                   help="tangle in [0, 1] (dimensionless, default 1)")
    g.add_argument("--zeta", type=float, default=None, metavar="RAD",
                   help="Schmidt angle zeta in radians")
    g.add_argument("--zeta-deg", type=float, default=None, metavar="DEG",
                   help="Schmidt angle zeta in degrees")
    _angle(parser, "theta", 0.0, "Schmidt basis polar angle theta")
    _angle(parser, "phi", 0.0, "Schmidt basis phase phi")


def build_parser():
    p = argparse.ArgumentParser(
        prog="quncertainty",
        description="Entropic uncertainty with quantum memory: sweeps, tomography, "
                    "witness thresholds and single games.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep-tangle", help="estimators versus tangle (conjugate bases by default)")
    _common(s)
    _sweep_flags(s, 41)
    _angle(s, "omega", math.pi / 4, "angle of R relative to S = Z")

    s = sub.add_parser("sweep-omega", help="estimators versus omega, or versus tangle at a fixed omega")
    _common(s)
    _sweep_flags(s, None)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--fixed-omega-deg", type=float, default=None, metavar="DEG",
                   help="sweep tangle at this fixed omega in degrees instead of sweeping omega")
    g.add_argument("--fixed-omega", type=float, default=None, metavar="RAD",
                   help="as --fixed-omega-deg but in radians")
    g.add_argument("--tangle", type=float, default=gamesim.OMEGA_SWEEP_TANGLE,
                   help="tangle held fixed while omega sweeps 0..pi/4 (default %(default)s)")

    s = sub.add_parser("tomo", help="simulate (or read) 36-setting counts and reconstruct by MLE")
    _common(s, fmt="json")
    _state_flags(s)
    s.add_argument("--counts-in", default=None, help="reconstruct from this counts CSV")
    s.add_argument("--counts-out", default=None, help="also write the simulated counts CSV here")
    s.add_argument("--max-iter", type=int, default=2000, help="MLE iteration cap")

    s = sub.add_parser("witness", help="witness threshold tangle for each estimator")
    _common(s, fidelity=gamesim.DEFAULT_FIDELITY_NOISY, fmt="json")
    s.add_argument("--estimator", choices=ESTIMATORS + ("all",), default="all",
                   help="estimator(s) to scan (default %(default)s)")
    s.add_argument("--error-seeds", type=int, default=20,
                   help="sampled replicates for the threshold error (default %(default)s)")
    s.add_argument("--tol", type=float, default=1e-9,
                   help="bisection tolerance on tangle (default %(default)s)")

    s = sub.add_parser("game", help="play one uncertainty game")
    _common(s, fmt="json")
    _state_flags(s)
    _angle(s, "omega", math.pi / 4, "angle of R relative to S = Z")
    s.add_argument("--resamples", type=int, default=200,
                   help="bootstrap resamples B >= 100 (default %(default)s)")
    s.add_argument("--estimator", choices=ESTIMATORS, default="measurement",
                   help="estimator used for the witness verdict (default %(default)s)")
    s.add_argument("--tomography", action="store_true",
                   help="simulate conditional tomography for the tomographic value")
    return p


# helpers -----------------------------------------------------------------


def _check_out(path):
    if path == "-":
        return
    if os.path.isdir(path):
        raise OSError(f"{path} is a directory")
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise OSError(f"cannot write to {path}")
    if os.path.exists(path) and not os.access(path, os.W_OK):
        raise OSError(f"cannot write to {path}")


def _say(args, msg):
    print(msg, file=sys.stderr if args.out == "-" else sys.stdout)


def _template(args, **kw):
    if args.shots < 1:
        raise UsageError("--shots must be >= 1")
    try:
        return ExperimentConfig(fidelity=args.fidelity, shots=args.shots, seed=args.seed,
                                exact_counts=args.exact, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _state_config(args, **kw):
    zeta = None
    if args.zeta is not None:
        zeta = args.zeta
    elif args.zeta_deg is not None:
        zeta = math.radians(args.zeta_deg)
    tangle = None if zeta is not None else (1.0 if args.tangle is None else args.tangle)
    return _template(args, tangle=tangle, zeta=zeta, theta=_resolve_angle(args, "theta"),
                     phi=_resolve_angle(args, "phi"), **kw)


def _check_sweep_flags(args):
    if args.points is not None and args.points < 2:
        raise UsageError("--points must be >= 2")
    if args.resamples < 100:
        raise UsageError("--resamples must be >= 100")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")


def _emit_sweep(args, result, extra=""):
    text = serialize.sweep_to_csv(result) if args.format == "csv" else serialize.sweep_to_json(result)
    serialize.write_text(args.out, text)
    rng = result.entangled_range()
    where = "none" if rng is None else f"{result.x_label} in [{rng[0]:.6f}, {rng[1]:.6f}]"
    _say(args, f"{result.kind}: {len(result.rows)} points; witness entangled: {where}{extra}")
    for v in result.violations:
        print(f"invariant violation: {v}", file=sys.stderr)
    return EXIT_INVARIANT if result.violations else EXIT_OK


# subcommands -------------------------------------------------------------


def cmd_sweep_tangle(args):
    _check_sweep_flags(args)
    omega = _resolve_angle(args, "omega")
    if not 0.0 <= omega <= math.pi / 2:
        raise UsageError("omega must lie in [0, pi/2]")
    tpl = _template(args, tomography=args.tomography)
    _check_out(args.out)
    result = gamesim.sweep_tangle(tpl, omega=omega, points=args.points, resamples=args.resamples,
                                  witness_estimator=args.estimator, workers=args.workers)
    return _emit_sweep(args, result)


def cmd_sweep_omega(args):
    _check_sweep_flags(args)
    tpl = _template(args, tomography=args.tomography)
    fixed = args.fixed_omega
    if args.fixed_omega_deg is not None:
        fixed = math.radians(args.fixed_omega_deg)
    kw = dict(resamples=args.resamples, witness_estimator=args.estimator, workers=args.workers)
    if fixed is not None:
        if not 0.0 <= fixed <= math.pi / 2:
            raise UsageError("fixed omega must lie in [0, pi/2]")
        _check_out(args.out)
        result = gamesim.sweep_tangle_fixed_angle(tpl, omega=fixed, points=args.points or 41, **kw)
        gaps = [r.lhs_tomo - r.rhs_raw for r in result.rows if 0.0 < r.x < 1.0]
        extra = ""
        if gaps:
            tight = "non-tight" if min(gaps) > 1e-6 else "tight"
            extra = f"; min interior gap lhs_tomo - rhs_raw = {min(gaps):.6f} ({tight})"
        return _emit_sweep(args, result, extra)
    if not 0.0 <= args.tangle <= 1.0:
        raise UsageError("--tangle must lie in [0, 1]")
    _check_out(args.out)
    result = gamesim.sweep_omega(tpl, tangle=args.tangle, points=args.points or 46, **kw)
    return _emit_sweep(args, result)


def cmd_tomo(args):
    if args.format != "json":
        raise UsageError("tomo writes JSON; use --format json (counts CSV via --counts-out)")
    if args.max_iter < 1:
        raise UsageError("--max-iter must be >= 1")
    truth = None
    if args.counts_in is not None:
        try:
            with open(args.counts_in, encoding="utf-8") as fh:
                table = serialize.counts_from_csv(fh.read())
        except serialize.CountsFormatError as exc:
            raise UsageError(f"{args.counts_in}: {exc}") from None
        except OSError as exc:
            raise UsageError(f"cannot read {args.counts_in}: {exc.strerror}") from None
        _check_out(args.out)
    else:
        cfg = _state_config(args)
        _check_out(args.out)
        if args.counts_out is not None:
            _check_out(args.counts_out)
        rho = cfg.state()
        truth = (cfg, rho)
        table = simulate_counts(rho, overcomplete_settings(), args.shots, seed=args.seed,
                                exact=args.exact)
        if args.counts_out is not None:
            serialize.write_text(args.counts_out, serialize.counts_to_csv(table))
    res = mle_reconstruct(table, max_iter=args.max_iter)
    out = {
        "rho_hat": serialize.density_to_json(res.rho_hat),
        "iterations": res.iterations,
        "converged": res.converged,
        "final_loglik": serialize.clean9(res.final_loglik),
        "floored": res.floored,
        "settings": len(table.settings),
        "total_counts": serialize.clean9(table.total),
    }
    if truth is not None:
        cfg, rho = truth
        out["zeta"] = serialize.fmt_angle(cfg.zeta_value)
        out["theta"] = serialize.fmt_angle(cfg.theta)
        out["phi"] = serialize.fmt_angle(cfg.phi)
        out["source_fidelity"] = serialize.clean9(cfg.fidelity)
        out["fidelity"] = serialize.clean9(uhlmann_fidelity(res.rho_hat, rho))
    serialize.write_text(args.out, serialize.dumps(out))
    msg = f"tomo: {res.iterations} iterations, converged={res.converged}"
    if truth is not None:
        msg += f", fidelity to the true state {out['fidelity']:.9f}"
    _say(args, msg)
    return EXIT_OK


def cmd_witness(args):
    if args.format != "json":
        raise UsageError("witness writes JSON; use --format json")
    if args.error_seeds < 0:
        raise UsageError("--error-seeds must be >= 0")
    if not 0.0 < args.tol < 0.5:
        raise UsageError("--tol must lie in (0, 0.5)")
    tpl = _template(args)
    _check_out(args.out)
    names = ESTIMATORS if args.estimator == "all" else (args.estimator,)
    results = {}
    for name in names:
        r = gamesim.witness_threshold_scan(tpl, name, tol=args.tol, error_seeds=args.error_seeds)
        results[name] = {
            "tau_star": None if r.tau_star is None else serialize.clean9(r.tau_star),
            "error": serialize.clean9(r.error),
            "replicates": len(r.replicates),
            "reported_tau_star": r.reported[0],
            "reported_error": r.reported[1],
        }
    taus = [results[n]["tau_star"] for n in names]
    ordered = all(t is not None for t in taus) and all(
        a <= b + args.tol for a, b in zip(taus, taus[1:])
    )
    strict = ordered and all(a < b for a, b in zip(taus, taus[1:]))
    out = {
        "fidelity": serialize.clean9(args.fidelity),
        "shots": args.shots,
        "seed": args.seed,
        "bisection_tol": args.tol,
        "thresholds": results,
        "ordering_ok": ordered,
        "strict_ordering": strict,
    }
    serialize.write_text(args.out, serialize.dumps(out))
    parts = [f"{n}={'none' if t is None else f'{t:.6f}'}" for n, t in zip(names, taus)]
    _say(args, "witness thresholds: " + ", ".join(parts))
    if len(names) > 1 and not ordered:
        print("invariant violation: threshold ordering", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_game(args):
    if args.format != "json":
        raise UsageError("game writes JSON; use --format json")
    if args.resamples < 100:
        raise UsageError("--resamples must be >= 100")
    omega = _resolve_angle(args, "omega")
    if not 0.0 <= omega <= math.pi / 2:
        raise UsageError("omega must lie in [0, pi/2]")
    cfg = _state_config(args, omega=omega, tomography=args.tomography)
    _check_out(args.out)
    rec = gamesim.run_game(cfg, witness_estimator=args.estimator)
    errs = gamesim.bootstrap_errors(rec, args.resamples, seed=args.seed)
    rep = rec.report
    out = {
        "config": {
            "zeta": serialize.fmt_angle(cfg.zeta_value),
            "theta": serialize.fmt_angle(cfg.theta),
            "phi": serialize.fmt_angle(cfg.phi),
            "omega": serialize.fmt_angle(cfg.omega),
            "fidelity": serialize.clean9(cfg.fidelity),
            "shots": cfg.shots,
            "seed": cfg.seed,
            "exact_counts": cfg.exact_counts,
        },
        "counts": {
            b: [serialize.clean9(v) for v in rec.counts[k].ravel()]
            for k, b in enumerate(("R", "S"))
        },
        "q_r": serialize.clean9(rec.q_r),
        "q_s": serialize.clean9(rec.q_s),
        "report": rep.to_dict(),
        "bootstrap_errors": {k: serialize.clean9(v) for k, v in errs.items()},
        "bootstrap_resamples": args.resamples,
    }
    serialize.write_text(args.out, serialize.dumps(out))
    _say(args, f"game: lhs_meas={round(rep.lhs_measurement, 6) + 0.0:.6f} "
               f"rhs_raw={round(rep.rhs_raw, 6) + 0.0:.6f} "
               f"witness={rep.witness_verdict}")
    ok = rep.ordering_ok() if cfg.exact_counts else True
    if not ok:
        print("invariant violation: estimator ordering", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


COMMANDS = {
    "sweep-tangle": cmd_sweep_tangle,
    "sweep-omega": cmd_sweep_omega,
    "tomo": cmd_tomo,
    "witness": cmd_witness,
    "game": cmd_game,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
