"""Command-line interface: ``solve``, ``bench``, ``oracle`` and ``gen-tiny``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import _kernels
from .bench import CSV_COLUMNS, BenchmarkConfig, run_benchmark
from .eda import SolverParams, run_solver
from .errors import ConfigurationError, InfeasibleInstance, PsplibFormatError
from .model import generate_tiny_instance
from .oracle import brute_force_optimum
from .psplib_io import read_instance, write_instance

log = logging.getLogger("mrcpsp_eda")


def _solver_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("solver")
    g.add_argument("--schedules", type=int, default=5000, help="schedule budget (default 5000); 0 disables")
    g.add_argument("--time-limit", type=float, default=None, help="wall-clock limit in seconds")
    g.add_argument("--pop", type=int, default=100, help="population size P (default 100)")
    g.add_argument("--elite-frac", type=float, default=0.2, help="best_P as a fraction of P (default 0.2)")
    g.add_argument("--alpha", type=float, default=0.5, help="learning speed (default 0.5)")
    g.add_argument("--rw", type=float, default=0.5, help="local-search acceptance rate (default 0.5)")
    g.add_argument("--no-dirw", action="store_true", help="disable the random-walk local search")
    g.add_argument("--no-mdj", action="store_true", help="disable double justification")
    g.add_argument("--dirw-skip-last", action="store_true", help="leave the last real activity out of the walk")


def _params(args, seed: int) -> SolverParams:
    return SolverParams(
        pop_size=args.pop,
        elite_frac=args.elite_frac,
        alpha=args.alpha,
        rw=args.rw,
        max_schedules=args.schedules or None,
        time_limit=args.time_limit,
        seed=seed,
        use_dirw=not args.no_dirw,
        use_mdj=not args.no_mdj,
        dirw_skip_last=args.dirw_skip_last,
    )


def _seeds(text: str) -> tuple[int, ...]:
    return tuple(int(s) for s in text.split(",") if s.strip())


def cmd_solve(args) -> int:
    inst = read_instance(args.file)
    params = _params(args, args.seed)
    res = run_solver(inst, params)
    print(f"wall time {res.wall_time:.3f}s ({_kernels.BACKEND} kernels)", file=sys.stderr)
    if args.json:
        print(json.dumps(res.record(params, inst.name), sort_keys=True))
    else:
        status = f"makespan {res.makespan}" if res.feasible_found else f"no feasible schedule (v_E={res.schedule.nonrenewable_excess:.4f})"
        print(f"{inst.name}: {status}")
        print(f"schedules {res.schedules_generated}, generations {res.generations}, seed {res.seed}")
        print("activity list:", " ".join(map(str, res.aml.al)))
        print("mode list    :", " ".join(map(str, res.aml.ml)))
        print("start times  :", " ".join(map(str, res.schedule.start)))
    return 0


def cmd_bench(args) -> int:
    seeds = tuple(range(args.runs)) if args.runs else _seeds(args.seeds)
    cfg = BenchmarkConfig(
        instance_dir=Path(args.dir),
        params=_params(args, seeds[0] if seeds else 0),
        seeds=seeds,
        bounds_path=Path(args.bounds) if args.bounds else None,
        bounds_are_optimal=args.bounds_kind == "opt",
        restrict_to_bounds=args.restrict_to_bounds,
        limit=args.limit,
        workers=args.workers,
        out=Path(args.out) if args.out else None,
    )
    report = run_benchmark(cfg)
    print(report.summary())
    if args.json:
        print(json.dumps(report.aggregates(), sort_keys=True))
    return 0


def cmd_oracle(args) -> int:
    inst = read_instance(args.file)
    opt = brute_force_optimum(inst)
    print("infeasible" if opt is None else opt)
    return 0


def cmd_gen_tiny(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for i in range(1, args.count + 1):
        seed = args.seed + i - 1
        inst = generate_tiny_instance(
            seed,
            min_activities=args.min_activities,
            max_activities=args.max_activities,
            max_modes=args.max_modes,
        )
        (out / f"tiny1_{i}.mm").write_text(write_instance(inst))
        if not args.no_bounds:
            opt = brute_force_optimum(inst)
            if opt is not None:
                rows.append(f"1 {i} {opt}")
    if not args.no_bounds:
        (out / "tiny_opt.txt").write_text("Parameter Instance Makespan\n" + "\n".join(rows) + "\n")
    print(f"wrote {args.count} instances to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mrcpsp-eda", description=__doc__)
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one PSPLIB .mm instance")
    s.add_argument("file")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json", action="store_true", help="print a JSON result record (no timing fields)")
    _solver_flags(s)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser(
        "bench",
        help="run a directory of instances",
        description="Results file columns: " + ",".join(CSV_COLUMNS)
        + ". Aggregates follow as '# key,value' lines.",
    )
    b.add_argument("dir")
    b.add_argument("--bounds", help="PSPLIB optimum / best-known table")
    b.add_argument("--bounds-kind", choices=("opt", "lb"), default="opt", help="'lb' reports the optimal rate as n/a")
    b.add_argument("--seeds", default="0", help="comma-separated seeds (default 0)")
    b.add_argument("--runs", type=int, default=0, help="shorthand for seeds 0..N-1")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out", help="results CSV; a .summary.txt is written next to it")
    b.add_argument("--restrict-to-bounds", action="store_true", help="only instances listed in the bounds table")
    b.add_argument("--limit", type=int, default=None, help="first N instances only")
    b.add_argument("--json", action="store_true", help="also print aggregates as JSON")
    _solver_flags(b)
    b.set_defaults(func=cmd_bench)

    o = sub.add_parser("oracle", help="exact optimum of a tiny instance by enumeration")
    o.add_argument("file")
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("gen-tiny", help="write random tiny instances plus an optimum table")
    g.add_argument("--out", required=True)
    g.add_argument("--count", type=int, default=20)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--min-activities", type=int, default=4)
    g.add_argument("--max-activities", type=int, default=6)
    g.add_argument("--max-modes", type=int, default=3)
    g.add_argument("--no-bounds", action="store_true", help="skip the exhaustive optimum table")
    g.set_defaults(func=cmd_gen_tiny)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, PsplibFormatError, InfeasibleInstance, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
