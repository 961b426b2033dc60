"""Command-line entry point: generate, solve, metrics and eaf subcommands.

Exit status is 0 on success, 1 when a solve produces no feasible point and
2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import glob
import os
import sys
from typing import Optional, Sequence

from .. import metrics
from .experiment import ALGORITHMS, METRIC_HEADER, RunConfig, emit_metrics, run_experiment
from .generator import GeneratorParams, generate_instance
from .io import (FormatError, read_front, read_instance, read_points, read_schedules, sidecar_path, write_instance,
                 write_rows)

EXIT_OK, EXIT_EMPTY, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _backend(text: str) -> str:
    if text == "builtin" or text == "highs" or (text.startswith("external:") and len(text) > 9):
        return text
    raise argparse.ArgumentTypeError("expected builtin, highs or external:PATH")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tousched", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--p-max", type=int, default=12)
    g.add_argument("--u-max", type=int, default=6)
    g.add_argument("--c-max", type=int, default=8)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="compute fronts for an instance file")
    s.add_argument("--algo", choices=ALGORITHMS, required=True)
    s.add_argument("--instance", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--time-limit", type=float)
    s.add_argument("--warm-start", action="store_true")
    s.add_argument("--backend", type=_backend, default="builtin")
    s.add_argument("--kmax", type=int, help="solve on the first KMAX slots only")
    s.add_argument("--out-dir", required=True)

    m = sub.add_parser("metrics", help="score front CSVs against a reference front")
    m.add_argument("--fronts", required=True, help="glob of front CSV files")
    m.add_argument("--ref", help="reference front CSV (default: union of the fronts)")
    m.add_argument("--ref-point", type=float, nargs=2, metavar=("X", "Y"))
    m.add_argument("--instance", help="instance file; enables fm1/fm2 from schedule sidecars")
    m.add_argument("--out", required=True)

    e = sub.add_parser("eaf", help="attainment fractions of query points over several runs")
    e.add_argument("--fronts", required=True, help="glob of front CSV files")
    e.add_argument("--queries", required=True, help="file of query points, one 'makespan,tec' per line")
    e.add_argument("--out", required=True)
    return parser


def _glob(pattern: str) -> list[str]:
    paths = sorted(glob.glob(pattern))
    if not paths:
        raise UsageError(f"no files match {pattern!r}")
    return paths


def cmd_generate(args) -> int:
    params = GeneratorParams(args.n, args.m, args.k, args.p_max, args.u_max, args.c_max, args.seed)
    write_instance(generate_instance(params), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    instance = read_instance(args.instance)
    config = RunConfig(args.algo, args.seed, args.runs, args.time_limit, args.warm_start, args.backend, args.kmax)
    result = run_experiment(config, instance, args.out_dir)
    for path, front in zip(result.paths, result.fronts):
        print(f"{path}: {len(front)} points" + (" (truncated)" if front.truncated else ""))
    return EXIT_OK if any(len(f) for f in result.fronts) else EXIT_EMPTY


def _flags(instance, path):
    side = sidecar_path(path)
    if not os.path.exists(side):
        return None
    return [metrics.annotate(instance, schedule) for _, schedule in read_schedules(instance, side)]


def cmd_metrics(args) -> int:
    paths = _glob(args.fronts)
    fronts = [read_front(p) for p in paths]
    reference = read_front(args.ref) if args.ref else None
    flags, n_jobs = None, None
    if args.instance:
        instance = read_instance(args.instance)
        n_jobs = instance.n_jobs
        flags = [_flags(instance, p) for p in paths]
    labels = [os.path.basename(p) for p in paths]
    rows = emit_metrics(fronts, reference, args.ref_point, labels, flags, n_jobs)
    write_rows(args.out, METRIC_HEADER, rows)
    return EXIT_OK


def cmd_eaf(args) -> int:
    fronts = [read_front(p) for p in _glob(args.fronts)]
    queries = read_points(args.queries)
    values = metrics.eaf(fronts, queries)
    write_rows(args.out, ["makespan", "tec", "attainment"], [[q[0], q[1], v] for q, v in zip(queries, values)])
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "solve": cmd_solve, "metrics": cmd_metrics, "eaf": cmd_eaf}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (UsageError, FormatError, ValueError, OSError) as exc:
        print(f"tousched: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
