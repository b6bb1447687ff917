"""Command-line interface.

Subcommands: compute, extremal, verify, sweep, compare.  All randomness
derives from --seed; identical configurations produce byte-identical output.
Exit codes: 0 success, 1 verification-suite failure, 2 input/domain error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys
from pathlib import Path

from .divergence import (
    QuadratureSpec,
    compute_divergence,
    d_f_hockey,
    hockey_stick,
    s_hat_direct,
)
from .errors import MaxFDivError
from .extremal import orbit_extremal_report
from .functions import parse_function_spec
from .io import json_dumps, load_density
from .linalg import DensityState, random_density
from .rng import make_rng
from .verify import VerifyConfig, run_suites


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_pair(args) -> tuple[DensityState, DensityState]:
    if args.rho and args.sigma:
        return load_density(args.rho), load_density(args.sigma)
    if args.rho or args.sigma:
        raise MaxFDivError("provide both --rho and --sigma, or neither with --n")
    if not args.n:
        raise MaxFDivError("need --rho/--sigma files or --n to generate a pair")
    rng = make_rng(args.seed, args.n, 0)
    return random_density(args.n, args.n, rng), random_density(args.n, args.n, rng)


def cmd_compute(args) -> int:
    rho, sigma = _load_pair(args)
    f = parse_function_spec(args.f)
    result = compute_divergence(rho, sigma, f)
    _emit(json_dumps(result.to_dict()) + "\n", args.out)
    return 0


def cmd_extremal(args) -> int:
    rho, sigma = _load_pair(args)
    f = parse_function_spec(args.f)
    s_nodes = None
    if args.s_nodes:
        s_nodes = tuple(float(s) for s in args.s_nodes.split(","))
    report = orbit_extremal_report(rho, sigma, f, s_nodes=s_nodes)
    if args.format == "csv":
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["s", "pairing", "quotient_term", "rho_term",
                         "sigma_term", "quadratic_term"])
        for row in report.per_s_components:
            writer.writerow([row["s"], row["pairing"], repr(row["quotient_term"]),
                             repr(row["rho_term"]), repr(row["sigma_term"]),
                             repr(row["quadratic_term"])])
        _emit(buf.getvalue(), args.out)
    else:
        _emit(json_dumps(report.to_dict()) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    cfg = VerifyConfig(seed=args.seed, inject_perturbation=args.inject_perturbation)
    if args.trials:
        cfg = cfg.scaled(args.trials)
    names = args.suites.split(",") if args.suites else None
    try:
        results = run_suites(names, cfg)
    except KeyError as e:
        raise MaxFDivError(str(e)) from e
    lines = [f"{'suite':<18} {'status':<6} {'worst residual':<15} runtime"]
    for r in results:
        lines.append(f"{r.name:<18} {'pass' if r.passed else 'FAIL':<6} "
                     f"{r.worst_residual:<15.3e} {r.runtime_s:.1f}s")
        for msg in r.failures[:5]:
            lines.append(f"    {msg}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if all(r.passed for r in results) else 1


def _sweep_rows(args):
    f_name = args.f
    values = [v for v in args.values.split(",") if v]
    prev_min = prev_max = None
    for v in values:
        if args.axis == "n":
            n = int(v)
            rng = make_rng(args.seed, n, 0)
            rho, sigma = random_density(n, n, rng), random_density(n, n, rng)
            f = parse_function_spec(f_name)
        else:
            rho, sigma = _load_pair(args)
            if args.axis == "s":
                f = parse_function_spec(f"pure_kernel:{float(v)}")
            elif args.axis == "alpha":
                f = parse_function_spec(f"power_alpha:{float(v)}")
            else:
                raise MaxFDivError(f"unknown sweep axis {args.axis!r}")
        report = orbit_extremal_report(rho, sigma, f, s_nodes=())
        at_identity = s_hat_direct(rho, sigma, f).value
        df = d_f_hockey(rho, sigma, f, QuadratureSpec())
        e1 = hockey_stick(rho, sigma, 1.0)
        d_min = "" if prev_min is None else repr(report.min_value - prev_min)
        d_max = "" if prev_max is None else repr(report.max_value - prev_max)
        prev_min, prev_max = report.min_value, report.max_value
        yield [v, repr(report.min_value), repr(report.max_value),
               repr(at_identity), repr(df), repr(e1), d_min, d_max]


def cmd_sweep(args) -> int:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([args.axis, "s_hat_min", "s_hat_max", "s_hat_identity",
                     "d_f_hockey", "e_1", "delta_min", "delta_max"])
    for row in _sweep_rows(args):
        writer.writerow(row)
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_compare(args) -> int:
    rho, sigma = _load_pair(args)
    f = parse_function_spec(args.f)
    report = orbit_extremal_report(rho, sigma, f, s_nodes=())
    out = {
        "f": f.label,
        "s_hat": compute_divergence(rho, sigma, f).to_dict(),
        "s_hat_orbit_min": report.min_value if math.isfinite(report.min_value) else "inf",
        "s_hat_orbit_max": report.max_value if math.isfinite(report.max_value) else "inf",
        "d_f_hockey": d_f_hockey(rho, sigma, f, QuadratureSpec()),
        "hockey_stick_e1": hockey_stick(rho, sigma, 1.0),
    }
    _emit(json_dumps(out) + "\n", args.out)
    return 0


def _add_pair_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rho", help="density state JSON file")
    p.add_argument("--sigma", help="density state JSON file")
    p.add_argument("--n", type=int, help="dimension for a generated random pair")
    p.add_argument("--f", default="t_log_t",
                   help="function spec NAME[:param], e.g. t_log_t, power_alpha:0.5")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="maxfdiv",
                                description="Maximal quantum f-divergence toolkit")
    p.add_argument("--seed", type=int, default=0, help="global 64-bit seed")
    p.add_argument("--out", default=None, help="write output to this path instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    # the same flags are accepted after the subcommand; SUPPRESS keeps the
    # subparser from clobbering values given before it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)

    sub = p.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("compute", parents=[common],
                        help="evaluate the divergence of a pair")
    _add_pair_args(pc)
    pc.set_defaults(fn=cmd_compute)

    pe = sub.add_parser("extremal", parents=[common],
                        help="orbit extremal report for a pair")
    _add_pair_args(pe)
    pe.add_argument("--s-nodes", help="comma-separated s nodes for the component table")
    pe.set_defaults(fn=cmd_extremal)

    pv = sub.add_parser("verify", parents=[common], help="run verification suites")
    pv.add_argument("--suites", help="comma-separated suite names (default: all)")
    pv.add_argument("--trials", type=int,
                    help="shrink per-suite trial counts for a quick run")
    pv.add_argument("--inject-perturbation", action="store_true",
                    help="test hook: corrupt sampled values so the sandwich suite fails")
    pv.set_defaults(fn=cmd_verify)

    ps = sub.add_parser("sweep", parents=[common], help="CSV sweep over s, alpha, or n")
    _add_pair_args(ps)
    ps.add_argument("--axis", choices=("s", "alpha", "n"), required=True)
    ps.add_argument("--values", required=True, help="comma-separated axis values")
    ps.set_defaults(fn=cmd_sweep)

    pp = sub.add_parser("compare", parents=[common],
                        help="divergence vs hockey-stick comparison")
    _add_pair_args(pp)
    pp.set_defaults(fn=cmd_compare)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except MaxFDivError as e:
        sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e)},
                                    sort_keys=True) + "\n")
        return 2
    except OSError as e:
        sys.stderr.write(json.dumps({"error": "IOError", "message": str(e)},
                                    sort_keys=True) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
