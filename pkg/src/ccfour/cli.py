"""Command-line interface: solve, sweep, census, verify, realize."""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .census import census
from .dziobek import MassVector, SquaredDistances
from .errors import CCFourError
from .geometry import canonicalize, realize
from .jsonio import csv_lines, dumps, format_float
from .solver import (SolveOptions, newton_solve, seed_vector, solve_kite,
                     solve_rhombus, sweep, _state_from_vector)
from .verifier import (DEFAULT_SEED, check_lemma1_nu_positive,
                       check_lemma2_albouy, check_lemma3_sign,
                       check_lemma4_orderings, check_theorem_identities,
                       newtonian_oracle, run_theorem1_suite,
                       run_theorem2_suite)

SWEEP_COLUMNS = ["alpha", "beta", "a", "b", "c", "d", "e", "f", "nu", "xi",
                 "lambda_cc", "symmetry", "iterations", "residual"]


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if value <= 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(
            f"must be a strictly positive finite number, got {text!r}")
    return value


def parse_grid(text: str) -> list[float]:
    """Either comma-separated values or start:stop:step (inclusive)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(
                f"grid ranges use start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"bad grid range {text!r}")
        n = int(round((stop - start) / step))
        values = [start + k * step for k in range(n + 1)]
    else:
        values = [float(p) for p in text.split(",") if p]
    if not values or min(values) <= 0:
        raise argparse.ArgumentTypeError(
            f"grid values must be strictly positive, got {text!r}")
    return values


def parse_sq(text: str) -> SquaredDistances:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 6:
        raise argparse.ArgumentTypeError(
            "expected six comma-separated squared distances a,b,c,d,e,f")
    if min(parts) <= 0:
        raise argparse.ArgumentTypeError("squared distances must be positive")
    return SquaredDistances(*parts)


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=positive_float, default=1e-12,
                   help="residual tolerance (default 1e-12)")
    p.add_argument("--max-iterations", type=int, default=100,
                   help="Newton iteration budget (default 100)")
    p.add_argument("--normalization", choices=["fix_inertia_one", "fix_a_one"],
                   default="fix_inertia_one",
                   help="scale gauge (default fix_inertia_one)")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["json", "csv"], default="json",
                   help="output format (default json)")
    p.add_argument("--output", default=None,
                   help="output path (default stdout)")
    p.add_argument("--plot-data", default=None,
                   help="also write plot-ready CSV to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccfour",
        description="Convex four-body central configurations in "
                    "squared-distance coordinates: solvers, census and "
                    "verification suites.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve for one mass vector")
    p_solve.add_argument("--alpha", type=positive_float, required=True)
    p_solve.add_argument("--beta", type=positive_float, required=True)
    p_solve.add_argument("--ansatz", choices=["kite", "rhombus", "full"],
                         default="kite")
    _add_solver_flags(p_solve)
    _add_output_flags(p_solve)

    p_sweep = sub.add_parser("sweep", help="mass-parameter sweep")
    p_sweep.add_argument("--alpha-grid", type=parse_grid, required=True,
                         help="comma list or start:stop:step")
    p_sweep.add_argument("--beta-grid", type=parse_grid, required=True)
    _add_solver_flags(p_sweep)
    _add_output_flags(p_sweep)

    p_census = sub.add_parser("census",
                              help="count solution classes for fixed masses")
    p_census.add_argument("--alpha", type=positive_float, required=True)
    p_census.add_argument("--beta", type=positive_float, required=True)
    p_census.add_argument("--resolution", type=int, default=8)
    p_census.add_argument("--threads", type=int,
                          default=int(os.environ.get("CCFOUR_THREADS", "1")),
                          help="worker threads for seed batches "
                               "(default $CCFOUR_THREADS or 1)")
    _add_solver_flags(p_census)
    _add_output_flags(p_census)

    p_verify = sub.add_parser("verify", help="run the verification suites")
    p_verify.add_argument("--trials", type=int, default=1000)
    p_verify.add_argument("--rng-seed", type=int, default=DEFAULT_SEED)
    p_verify.add_argument("--resolution", type=int, default=6,
                          help="census resolution for the theorem suites")
    p_verify.add_argument("--theorem1-grid", default=None,
                          help="semicolon-separated alpha,beta pairs; "
                               "omit to skip the theorem 1 census suite")
    p_verify.add_argument("--theorem2-grid", type=parse_grid, default=None,
                          help="alpha grid; omit to skip the theorem 2 suite")
    _add_output_flags(p_verify)

    p_realize = sub.add_parser(
        "realize", help="realize six squared distances as planar points")
    p_realize.add_argument("--sq", type=parse_sq, required=True,
                           help="a,b,c,d,e,f")
    p_realize.add_argument("--alpha", type=positive_float, required=True)
    p_realize.add_argument("--beta", type=positive_float, required=True)
    _add_output_flags(p_realize)

    return parser


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def emit_plot_data(payload: dict, path: str) -> None:
    """Plot-ready CSV: canonical vertex coordinates and/or sweep curves."""
    lines: list[str] = []
    kind = payload["kind"]
    if kind in ("solve", "census"):
        lines.append("# columns: class,vertex,x,y,mass")
        lines.append("class,vertex,x,y,mass")
        for ci, entry in enumerate(payload["configs"]):
            masses = entry["masses"]
            for vi, (px, py) in enumerate(entry["points"]):
                lines.append(",".join([
                    str(ci), str(vi + 1), format_float(px),
                    format_float(py), format_float(masses[vi])]))
        if len(payload["configs"]) == 0:
            sys.stderr.write("warning: no converged classes; "
                             "plot data contains headers only\n")
    elif kind == "sweep":
        lines.append("# columns: alpha,beta,u,v,t,s,theta "
                     "(canonical frame shape parameters per grid cell)")
        lines.append("alpha,beta,u,v,t,s,theta")
        for row in payload["frames"]:
            lines.append(",".join(format_float(x) for x in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _solver_config(args) -> dict:
    return {
        "tol": args.tol,
        "max_iterations": args.max_iterations,
        "normalization": args.normalization,
    }


def _opts(args) -> SolveOptions:
    return SolveOptions(max_iterations=args.max_iterations,
                        residual_tol=args.tol,
                        normalization=args.normalization)


def _cmd_solve(args) -> int:
    m = MassVector(alpha=args.alpha, beta=args.beta)
    opts = _opts(args)
    if args.ansatz == "rhombus":
        if abs(args.alpha - args.beta) > 0:
            raise CCFourError("--ansatz rhombus requires --alpha == --beta")
        report = solve_rhombus(args.alpha, opts)
    elif args.ansatz == "kite":
        report = solve_kite(m, opts)
    else:
        seed = _state_from_vector(
            seed_vector(_square_seed_sq(m), m), m)
        report = newton_solve(seed, m, opts)
    config = realize(report.state.sq, m)
    lam, resid = newtonian_oracle(config, m)
    doc = {
        "command": "solve",
        "config": {"alpha": args.alpha, "beta": args.beta,
                   "ansatz": args.ansatz, **_solver_config(args)},
        "report": report.to_json_dict(),
        "lambda_cc": lam,
        "oracle_residual": resid,
        "points": config.to_json_dict()["points"],
    }
    if args.format == "json":
        _emit(dumps(doc), args.output)
    else:
        row = {"alpha": args.alpha, "beta": args.beta}
        row.update(dict(zip("abcdef", report.state.sq)))
        row.update({"nu": report.state.nu, "xi": report.state.xi,
                    "lambda_cc": lam, "symmetry": report.symmetry,
                    "iterations": report.iterations,
                    "residual": report.final_residual})
        _emit("\n".join(csv_lines(SWEEP_COLUMNS, [row])) + "\n", args.output)
    if args.plot_data:
        emit_plot_data({"kind": "solve",
                        "configs": [config.to_json_dict()]}, args.plot_data)
    return 0


def _square_seed_sq(m: MassVector) -> SquaredDistances:
    sq = np.array([2.0, 1.0, 1.0, 1.0, 1.0, 2.0])
    m1, m2, m3, m4 = m.masses
    w = np.array([m1 * m2, m1 * m3, m1 * m4,
                  m2 * m3, m2 * m4, m3 * m4]) / m.mprime
    return SquaredDistances(*(sq / float(sq @ w)))


def _cmd_sweep(args) -> int:
    cells = sweep(args.alpha_grid, args.beta_grid, _opts(args))
    rows = [cell.to_row() for cell in cells]
    if args.format == "csv":
        _emit("\n".join(csv_lines(SWEEP_COLUMNS, rows)) + "\n", args.output)
    else:
        doc = {
            "command": "sweep",
            "config": {"alpha_grid": list(args.alpha_grid),
                       "beta_grid": list(args.beta_grid),
                       **_solver_config(args)},
            "rows": rows,
        }
        _emit(dumps(doc), args.output)
    if args.plot_data:
        frames = []
        for cell in cells:
            if cell.report is None:
                continue
            m = MassVector(alpha=cell.alpha, beta=cell.beta)
            fr = canonicalize(realize(cell.report.state.sq, m))
            frames.append([cell.alpha, cell.beta, fr.u, fr.v, fr.t, fr.s,
                           fr.theta])
        emit_plot_data({"kind": "sweep", "frames": frames}, args.plot_data)
    return 0


def _cmd_census(args) -> int:
    m = MassVector(alpha=args.alpha, beta=args.beta)
    report = census(m, args.resolution, _opts(args), threads=args.threads)
    doc = {
        "command": "census",
        "config": {"alpha": args.alpha, "beta": args.beta,
                   "resolution": args.resolution,
                   "threads": args.threads, **_solver_config(args)},
        **report.to_json_dict(),
    }
    if args.format == "json":
        _emit(dumps(doc), args.output)
    else:
        columns = ["class", "symmetry", "basin", "a", "b", "c", "d", "e", "f",
                   "nu", "xi"]
        rows = []
        for k, cls in enumerate(report.classes):
            row = {"class": k, "symmetry": cls.symmetry.label,
                   "basin": cls.basin}
            row.update(dict(zip("abcdef", cls.state.sq)))
            row.update({"nu": cls.state.nu, "xi": cls.state.xi})
            rows.append(row)
        _emit("\n".join(csv_lines(columns, rows)) + "\n", args.output)
    if args.plot_data:
        configs = [realize(cls.state.sq, m).to_json_dict()
                   for cls in report.classes]
        emit_plot_data({"kind": "census", "configs": configs},
                       args.plot_data)
    return 0


def _cmd_verify(args) -> int:
    results = [
        check_lemma3_sign(args.trials, args.rng_seed),
        check_lemma4_orderings(args.trials, args.rng_seed),
    ]
    # solved states feed the state-dependent lemma checks
    pairs = []
    for alpha, beta in ((1.0, 1.0), (0.5, 0.8), (0.7, 0.7)):
        m = MassVector(alpha=alpha, beta=beta)
        pairs.append((solve_kite(m).state, m))
    results.append(check_lemma1_nu_positive([st for st, _ in pairs]))
    results.append(check_lemma2_albouy(pairs))
    for st, m in pairs:
        results.append(check_theorem_identities(st, m))
    if args.theorem1_grid:
        grid = []
        for chunk in args.theorem1_grid.split(";"):
            alpha, beta = (float(x) for x in chunk.split(","))
            grid.append((alpha, beta))
        results.append(run_theorem1_suite(grid, args.resolution))
    if args.theorem2_grid:
        results.append(run_theorem2_suite(args.theorem2_grid,
                                          args.resolution))
    doc = {
        "command": "verify",
        "config": {"trials": args.trials, "rng_seed": args.rng_seed,
                   "resolution": args.resolution},
        "all_passed": all(r.passed for r in results),
        "checks": [r.to_json_dict() for r in results],
    }
    _emit(dumps(doc), args.output)
    return 0 if doc["all_passed"] else 1


def _cmd_realize(args) -> int:
    m = MassVector(alpha=args.alpha, beta=args.beta)
    config = realize(args.sq, m)
    doc = {
        "command": "realize",
        "config": {"sq": list(args.sq), "alpha": args.alpha,
                   "beta": args.beta},
        **config.to_json_dict(),
    }
    _emit(dumps(doc), args.output)
    if args.plot_data:
        emit_plot_data({"kind": "solve",
                        "configs": [config.to_json_dict()]}, args.plot_data)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "sweep": _cmd_sweep,
        "census": _cmd_census,
        "verify": _cmd_verify,
        "realize": _cmd_realize,
    }
    try:
        return handlers[args.command](args)
    except CCFourError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
