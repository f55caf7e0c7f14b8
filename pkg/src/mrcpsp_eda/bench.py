"""Benchmark metrics and the batch runner over directories of PSPLIB instances."""

from __future__ import annotations

import csv
import logging
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .eda import SolverParams, run_solver
from .errors import ConfigurationError, EmptyResultSet, MissingBound
from .psplib_io import instance_key, read_bounds_table, read_instance

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "instance",
    "parameter",
    "instance_no",
    "seed",
    "feasible",
    "makespan",
    "bound",
    "deviation_pct",
    "schedules",
    "generations",
    "runtime_s",
    "error",
)


@dataclass
class InstanceResult:
    name: str
    key: tuple[int, int] | None
    makespan: int | None
    feasible_found: bool
    bound: int | None = None
    schedules: int = 0
    seed: int | None = None
    runtime: float = 0.0
    generations: int = 0
    error: str | None = None

    @property
    def deviation(self) -> float | None:
        if not self.feasible_found or self.bound is None:
            return None
        return (self.makespan - self.bound) / self.bound


@dataclass
class BenchmarkReport:
    runs: list[InstanceResult]
    per_instance: list[InstanceResult]
    ard_best: float | None
    ard_mean: float | None
    optimal_rate: float | None
    feasible_rate: float | None
    params: dict = field(default_factory=dict)
    stopping: str = ""
    failures: list[str] = field(default_factory=list)

    def aggregates(self) -> dict:
        return {
            "instances": len(self.per_instance),
            "runs": len(self.runs),
            "ard_best_pct": self.ard_best,
            "ard_mean_pct": self.ard_mean,
            "optimal_rate_pct": self.optimal_rate,
            "feasible_rate_pct": self.feasible_rate,
            "failures": len(self.failures),
        }

    def summary(self) -> str:
        def pct(v):
            return "n/a" if v is None else f"{v:.3f}"

        lines = [
            f"instances          : {len(self.per_instance)}",
            f"runs               : {len(self.runs)}",
            f"stopping rule      : {self.stopping}",
            f"Av.dev best-of-runs: {pct(self.ard_best)} %",
            f"Av.dev mean-of-runs: {pct(self.ard_mean)} %",
            f"optimal rate       : {pct(self.optimal_rate)} %",
            f"feasible rate      : {pct(self.feasible_rate)} %",
        ]
        if "time_limit" in self.stopping:
            lines.append("note: wall-clock budgets depend on hardware; compare across machines with care")
        if self.failures:
            lines.append(f"failures ({len(self.failures)}):")
            lines.extend(f"  {f}" for f in self.failures)
        return "\n".join(lines)


def compute_ard(results, bounds) -> float:
    """Mean relative deviation from the bounds over feasible results, in percent."""
    if not results:
        raise EmptyResultSet("no results")
    devs = []
    for r in results:
        if not r.feasible_found:
            continue
        if r.key not in bounds:
            raise MissingBound(f"no bound for {r.name} {r.key}")
        opt = bounds[r.key]
        devs.append((r.makespan - opt) / opt)
    if not devs:
        raise EmptyResultSet("no feasible results")
    return 100.0 * sum(devs) / len(devs)


def compute_rates(results, bounds, bounds_are_optimal: bool = True) -> tuple[float | None, float | None]:
    """(optimal rate, feasible rate) in percent; the optimal rate is ``None`` when not defined."""
    if not results:
        return None, None
    feasible = 100.0 * sum(r.feasible_found for r in results) / len(results)
    bounded = [r for r in results if r.key in bounds] if bounds else []
    if not bounds_are_optimal or not bounded:
        return None, feasible
    hits = sum(1 for r in bounded if r.feasible_found and r.makespan == bounds[r.key])
    return 100.0 * hits / len(bounded), feasible


def mean_of_runs_ard(runs, bounds) -> float | None:
    """Average over instances of each instance's mean deviation across its feasible runs, in percent."""
    by_inst: dict[str, list[float]] = {}
    for r in runs:
        if r.feasible_found and r.key in bounds:
            by_inst.setdefault(r.name, []).append((r.makespan - bounds[r.key]) / bounds[r.key])
    if not by_inst:
        return None
    return 100.0 * statistics.fmean(statistics.fmean(v) for v in by_inst.values())


def best_of_runs(runs) -> list[InstanceResult]:
    best: dict[str, InstanceResult] = {}
    for r in runs:
        cur = best.get(r.name)
        if cur is None or _better(r, cur):
            best[r.name] = r
    return [best[n] for n in dict.fromkeys(r.name for r in runs)]


def _better(a: InstanceResult, b: InstanceResult) -> bool:
    if a.feasible_found != b.feasible_found:
        return a.feasible_found
    if a.feasible_found:
        return a.makespan < b.makespan
    return False


@dataclass
class BenchmarkConfig:
    instance_dir: Path
    params: SolverParams = field(default_factory=SolverParams)
    seeds: tuple[int, ...] = (0,)
    bounds_path: Path | None = None
    bounds_are_optimal: bool = True
    restrict_to_bounds: bool = False
    limit: int | None = None
    workers: int = 1
    out: Path | None = None
    pattern: str = "*.mm"


def _sort_key(path: Path):
    key = instance_key(path.stem)
    return (key is None, key or (0, 0), path.name)


def list_instances(config: BenchmarkConfig, bounds) -> list[Path]:
    d = Path(config.instance_dir)
    if not d.is_dir():
        raise ConfigurationError(f"{d} is not a directory")
    files = sorted(d.glob(config.pattern), key=_sort_key)
    if config.restrict_to_bounds:
        files = [f for f in files if instance_key(f.stem) in bounds]
    if config.limit is not None:
        files = files[: config.limit]
    if not files:
        raise ConfigurationError(f"no instances matching {config.pattern} in {d}")
    return files


def _solve_one(path: str, params: SolverParams, bound: int | None) -> InstanceResult:
    p = Path(path)
    key = instance_key(p.stem)
    t0 = time.perf_counter()
    try:
        inst = read_instance(p)
        res = run_solver(inst, params)
    except Exception as exc:  # recorded and skipped, never fatal for the batch
        return InstanceResult(p.stem, key, None, False, bound, seed=params.seed, error=f"{type(exc).__name__}: {exc}")
    return InstanceResult(
        name=p.stem,
        key=key,
        makespan=res.makespan,
        feasible_found=res.feasible_found,
        bound=bound,
        schedules=res.schedules_generated,
        seed=params.seed,
        runtime=time.perf_counter() - t0,
        generations=res.generations,
    )


def run_benchmark(config: BenchmarkConfig) -> BenchmarkReport:
    bounds = {}
    if config.bounds_path is not None:
        try:
            bounds = read_bounds_table(config.bounds_path)
        except (OSError, ValueError) as exc:
            raise ConfigurationError(f"cannot read bounds {config.bounds_path}: {exc}") from exc
    if not config.seeds:
        raise ConfigurationError("at least one seed is required")
    config.params.check()
    files = list_instances(config, bounds)

    jobs = [
        (str(f), replace(config.params, seed=s), bounds.get(instance_key(f.stem)))
        for f in files
        for s in config.seeds
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            runs = list(pool.map(_solve_one, *zip(*jobs), chunksize=max(1, len(jobs) // (4 * config.workers))))
    else:
        runs = [_solve_one(*job) for job in jobs]

    failures = [f"{r.name} (seed {r.seed}): {r.error}" for r in runs if r.error]
    ok_runs = [r for r in runs if not r.error]
    per_instance = best_of_runs(ok_runs)
    report = _aggregate(runs, per_instance, bounds, config, failures)
    if config.out is not None:
        write_results_csv(config.out, report)
        Path(config.out).with_suffix(".summary.txt").write_text(report.summary() + "\n")
    return report


def _aggregate(runs, per_instance, bounds, config, failures) -> BenchmarkReport:
    feasible_bounded = [r for r in per_instance if r.feasible_found and r.key in bounds]
    ard_best = compute_ard(feasible_bounded, bounds) if feasible_bounded else None
    ard_mean = mean_of_runs_ard([r for r in runs if not r.error], bounds)
    optimal_rate, feasible_rate = compute_rates(per_instance, bounds, config.bounds_are_optimal)
    p = config.params
    stopping = []
    if p.max_schedules is not None:
        stopping.append(f"max_schedules={p.max_schedules}")
    if p.time_limit is not None:
        stopping.append(f"time_limit={p.time_limit}s")
    params = {k: v for k, v in asdict(p).items() if k != "seed"}
    params["seeds"] = list(config.seeds)
    return BenchmarkReport(
        runs=runs,
        per_instance=per_instance,
        ard_best=ard_best,
        ard_mean=ard_mean,
        optimal_rate=optimal_rate,
        feasible_rate=feasible_rate,
        params=params,
        stopping=", ".join(stopping),
        failures=failures,
    )


def write_results_csv(path, report: BenchmarkReport):
    """One row per (instance, seed), then ``# key,value`` aggregate lines."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in report.runs:
            dev = r.deviation
            w.writerow(
                [
                    r.name,
                    "" if r.key is None else r.key[0],
                    "" if r.key is None else r.key[1],
                    r.seed,
                    int(r.feasible_found),
                    "" if r.makespan is None else r.makespan,
                    "" if r.bound is None else r.bound,
                    "" if dev is None else repr(100.0 * dev),
                    r.schedules,
                    r.generations,
                    f"{r.runtime:.4f}",
                    r.error or "",
                ]
            )
        fh.write("# aggregate\n")
        for k, v in report.aggregates().items():
            fh.write(f"# {k},{'' if v is None else repr(v)}\n")
        fh.write(f"# stopping,{report.stopping}\n")


def read_results_csv(path) -> tuple[list[InstanceResult], dict]:
    """Inverse of :func:`write_results_csv`: per-run results and the aggregate footer."""
    runs, footer = [], {}
    with open(path, newline="") as fh:
        body = []
        for line in fh:
            if line.startswith("#"):
                if "," in line:
                    k, v = line[1:].strip().split(",", 1)
                    footer[k] = v
            else:
                body.append(line)
    for row in csv.DictReader(body):
        key = (int(row["parameter"]), int(row["instance_no"])) if row["parameter"] else None
        runs.append(
            InstanceResult(
                name=row["instance"],
                key=key,
                makespan=int(row["makespan"]) if row["makespan"] else None,
                feasible_found=row["feasible"] == "1",
                bound=int(row["bound"]) if row["bound"] else None,
                schedules=int(row["schedules"]),
                seed=int(row["seed"]),
                runtime=float(row["runtime_s"]),
                generations=int(row["generations"]),
                error=row["error"] or None,
            )
        )
    return runs, footer


def aggregate_runs(runs, bounds, bounds_are_optimal: bool = True) -> dict:
    """Recompute the headline aggregates from per-run results."""
    ok = [r for r in runs if not r.error]
    per_instance = best_of_runs(ok)
    feasible_bounded = [r for r in per_instance if r.feasible_found and r.key in bounds]
    opt, feas = compute_rates(per_instance, bounds, bounds_are_optimal)
    return {
        "ard_best_pct": compute_ard(feasible_bounded, bounds) if feasible_bounded else None,
        "ard_mean_pct": mean_of_runs_ard(ok, bounds),
        "optimal_rate_pct": opt,
        "feasible_rate_pct": feas,
    }
