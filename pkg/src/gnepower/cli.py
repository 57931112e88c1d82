"""Command-line front end.

Commands: check, solve, montecarlo, convergence, gen.  Exit codes form a
contract shell pipelines can branch on:

    0  success / converged / certificate passed
    1  input error (malformed file, bad parameters)
    2  certificate failure
    3  solver did not converge within its iteration budget

Rates cross this boundary in bits; the library works in nats internally.
The environment variable GNE_SEED, when set, overrides config seeds so CI
can pin all randomness externally.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .conditions import diagnose
from .experiments import (
    SweepConfig,
    condition_probability_sweep,
    convergence_experiment,
    convergence_to_csv,
    sweep_to_csv,
)
from .model import LN2, Scenario
from .netgen import hex_network, scenario_from_geometry
from .solvers import (
    NotPMatrixError,
    SolverOptions,
    sequential_iwfa,
    simultaneous_iwfa,
    solve_single_subchannel,
    trace_to_csv,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CERTIFICATE = 2
EXIT_NO_CONVERGENCE = 3


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_INPUT


def _load_scenario(path: str) -> Scenario:
    if not Path(path).exists():
        raise ValueError(f"scenario file not found: {path}")
    return Scenario.from_json(path)


def _seed_override(seed: int) -> int:
    env = os.environ.get("GNE_SEED")
    return int(env) if env else seed


def cmd_check(args) -> int:
    try:
        scn = _load_scenario(args.scenario)
    except ValueError as exc:
        return _fail(str(exc))
    report = diagnose(scn)
    payload = json.dumps(report.to_json_dict(), indent=1)
    if args.output:
        Path(args.output).write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload)
    return EXIT_OK if report.zk_all_p else EXIT_CERTIFICATE


def cmd_solve(args) -> int:
    try:
        scn = _load_scenario(args.scenario)
    except ValueError as exc:
        return _fail(str(exc))
    opts = SolverOptions(max_iterations=args.max_iters,
                         residual_tol=args.tol,
                         record_trace=bool(args.trace))

    if args.algorithm == "n1":
        if scn.num_subchannels != 1:
            return _fail("algorithm 'n1' requires a single-subchannel scenario")
        try:
            p = solve_single_subchannel(scn)
        except NotPMatrixError as exc:
            print(f"certificate failure: {exc}", file=sys.stderr)
            return EXIT_CERTIFICATE
        converged = True
        trace = None
        iterations = 0
        residual = 0.0
    else:
        solver = sequential_iwfa if args.algorithm == "seq" else simultaneous_iwfa
        p, trace, converged = solver(scn, None, opts)
        iterations = trace.num_sweeps
        residual = trace.residuals[-1] if trace.residuals else 0.0
        if args.trace:
            trace_to_csv(trace, args.trace)

    from .model import rate, total_power

    rates = [rate(scn, p, q) for q in range(scn.num_users)]
    totals = [total_power(p, q) for q in range(scn.num_users)]
    print(json.dumps({
        "algorithm": args.algorithm,
        "converged": converged,
        "iterations": iterations,
        "residual": residual,
        "powers": p.tolist(),
        "rates_nats": rates,
        "rates_bits": [r / LN2 for r in rates],
        "total_power": [t[0] for t in totals],
        "average_power": [t[1] for t in totals],
    }, indent=1))
    return EXIT_OK if converged else EXIT_NO_CONVERGENCE


def cmd_montecarlo(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as f:
            obj = json.load(f)
        if not isinstance(obj, dict):
            raise ValueError("sweep config JSON must be an object")
        cfg = SweepConfig.from_json_dict(obj)
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        return _fail(f"bad sweep config: {exc}")
    cfg = SweepConfig.from_json_dict(
        {**cfg.to_json_dict(), "master_seed": _seed_override(cfg.master_seed)})

    threads = args.threads if args.threads else (os.cpu_count() or 1)
    rows = condition_probability_sweep(cfg, threads=threads)
    sweep_to_csv(rows, args.output)
    if args.plot:
        from .plots import sweep_figure
        sweep_figure(rows, Path(args.output).with_suffix(".png"))
    return EXIT_OK


def cmd_convergence(args) -> int:
    try:
        scn = _load_scenario(args.scenario)
    except ValueError as exc:
        return _fail(str(exc))
    opts = SolverOptions(max_iterations=args.max_iters, residual_tol=args.tol)
    result = convergence_experiment(scn, opts)
    convergence_to_csv(result, args.output)
    if args.plot:
        from .plots import convergence_figure
        convergence_figure(result, scn.rate_target_bits(),
                           Path(args.output).with_suffix(".png"))
    summary = {
        "sweeps_sequential": result.sweeps_sequential,
        "sweeps_simultaneous": result.sweeps_simultaneous,
        "converged_sequential": result.converged_sequential,
        "converged_simultaneous": result.converged_simultaneous,
        "predicted_contraction_sequential": result.predicted_sequential,
        "predicted_contraction_simultaneous": result.predicted_simultaneous,
    }
    print(json.dumps(summary, indent=1))
    if not (result.converged_sequential and result.converged_simultaneous):
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        seed = _seed_override(args.seed)
        geom = hex_network(args.proximity, seed, args.cell_radius, args.gamma)
        scn = scenario_from_geometry(
            geom, args.taps, args.subchannels, seed,
            rate_bits_per_subchannel=args.rate_bits,
            noise_power=args.noise)
    except ValueError as exc:
        return _fail(str(exc))
    scn.to_json(args.output)
    if args.geometry_csv:
        from .netgen import geometry_to_csv
        geometry_to_csv(geom, args.geometry_csv)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gnepower",
        description="Rate-constrained power games on parallel interference "
                    "channels: certificates, waterfilling solvers, experiments.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate every certificate on a scenario")
    p.add_argument("scenario")
    p.add_argument("-o", "--output", help="write the report JSON here instead of stdout")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="compute an equilibrium")
    p.add_argument("scenario")
    p.add_argument("--algorithm", choices=("seq", "sim", "n1"), default="seq")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iters", type=int, default=10000)
    p.add_argument("--trace", help="write the per-sweep trace CSV here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("montecarlo", help="certificate-probability sweep")
    p.add_argument("config", help="sweep config JSON")
    p.add_argument("output", help="output CSV path")
    p.add_argument("--threads", type=int, default=0,
                   help="worker processes (default: available parallelism)")
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG figure next to the CSV")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("convergence", help="compare both solvers on one scenario")
    p.add_argument("scenario")
    p.add_argument("output", help="output CSV path")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iters", type=int, default=10000)
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG figure next to the CSV")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("gen", help="generate a multicell scenario file")
    p.add_argument("output", help="scenario JSON path")
    p.add_argument("--proximity", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--taps", type=int, default=6)
    p.add_argument("--subchannels", type=int, default=32)
    p.add_argument("--gamma", type=float, default=2.5)
    p.add_argument("--cell-radius", type=float, default=1.0)
    p.add_argument("--noise", type=float, default=1.0)
    p.add_argument("--rate-bits", type=float, default=1.0,
                   help="rate target per subchannel, bits")
    p.add_argument("--geometry-csv", help="also write node positions here")
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        return _fail(str(exc))


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
