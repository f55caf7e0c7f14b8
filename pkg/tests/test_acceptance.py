"""Acceptance criteria, one test and one printed PASS/FAIL line each.

The J10 criteria need the PSPLIB J10 multi-mode set, which is not shipped:
point ``MRCPSP_J10_DIR`` at the directory of ``j10*.mm`` files and
``MRCPSP_J10_BOUNDS`` at the optimum table (``j10opt.sm`` layout).
"""

import os
import random
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from helpers import DATA, random_aml
from mrcpsp_eda.bench import BenchmarkConfig, list_instances, run_benchmark
from mrcpsp_eda.dirw import dirw_pass
from mrcpsp_eda.eda import SolverParams, init_model, run_solver, sample_individual, update_model
from mrcpsp_eda.errors import NoFeasibleModeAssignment
from mrcpsp_eda.model import generate_tiny_instance, reduce_instance
from mrcpsp_eda.oracle import brute_force_optimum
from mrcpsp_eda.psplib_io import read_bounds_table, write_instance
from mrcpsp_eda.schedule import decode_forward, double_justify, nonrenewable_excess, verify_schedule

pytestmark = pytest.mark.slow

TINY_SEEDS = range(10_000, 10_100)


def tiny_suite():
    return [generate_tiny_instance(s, 4 + s % 3) for s in TINY_SEEDS]


def j10_paths():
    d, b = os.environ.get("MRCPSP_J10_DIR"), os.environ.get("MRCPSP_J10_BOUNDS")
    if not d or not b or not Path(d).is_dir() or not Path(b).is_file():
        return None
    return Path(d), Path(b)


def j10_subset(d, bounds_path, n=50):
    """Every k-th bounded instance so all parameter groups are represented."""
    cfg = BenchmarkConfig(d, SolverParams(), bounds_path=bounds_path, restrict_to_bounds=True)
    files = list_instances(cfg, read_bounds_table(bounds_path))
    step = max(1, len(files) // n)
    return files[::step][:n]


def _solve_or_none(inst, params):
    try:
        return run_solver(inst, params).makespan
    except NoFeasibleModeAssignment:
        return None


def test_c1_oracle_equivalence(verdict):
    t0 = time.perf_counter()
    matches = undercuts = 0
    for inst in tiny_suite():
        opt = brute_force_optimum(inst)
        got = _solve_or_none(inst, SolverParams(max_schedules=5000, seed=0))
        matches += got == opt
        undercuts += opt is not None and got is not None and got < opt
    dt = time.perf_counter() - t0
    verdict(
        "C1 oracle equivalence",
        matches >= 95 and undercuts == 0 and dt < 120,
        f"{matches}/100 match brute force, {undercuts} undercut, {dt:.1f}s (need >=95, 0, <120s)",
    )


def _j10_run(files_dir, bounds, seeds, budget):
    params = SolverParams(max_schedules=budget)
    cfg = BenchmarkConfig(files_dir, params, seeds=seeds, bounds_path=bounds, restrict_to_bounds=True)
    return run_benchmark(cfg)


def _stage(files, where):
    # symlinks, so the runner sees a plain directory holding just the subset
    for f in files:
        (where / f.name).symlink_to(f.resolve())
    return where


MISSING = "PSPLIB J10 set not available (set MRCPSP_J10_DIR and MRCPSP_J10_BOUNDS)"


def test_c2_j10_subset(verdict, tmp_path):
    paths = j10_paths()
    if paths is None:
        verdict("C2 J10 reproduction, 50-instance subset", False, MISSING)
    d, b = paths
    rep = _j10_run(_stage(j10_subset(d, b), tmp_path), b, (0,), 5000)
    ok = rep.feasible_rate == 100 and rep.ard_best is not None and rep.ard_best <= 0.5
    verdict(
        "C2 J10 reproduction, 50-instance subset",
        ok,
        f"feasible {rep.feasible_rate}%, ARD {rep.ard_best}% over {len(rep.per_instance)} instances (need 100%, <=0.5%)",
    )


def test_c2_j10_full(verdict):
    paths = j10_paths()
    if paths is None:
        verdict("C2 J10 reproduction, full set", False, MISSING)
    d, b = paths
    t0 = time.perf_counter()
    rep = _j10_run(d, b, (0,), 5000)
    dt = time.perf_counter() - t0
    ok = rep.feasible_rate == 100 and rep.ard_best is not None and rep.ard_best <= 0.5 and dt <= 1800
    verdict(
        "C2 J10 reproduction, full set",
        ok,
        f"{len(rep.per_instance)} instances, feasible {rep.feasible_rate}%, ARD {rep.ard_best}%, {dt:.0f}s"
        " (need 100%, <=0.5%, <=1800s)",
    )


def test_c3_budget_monotonicity(verdict, tmp_path):
    paths = j10_paths()
    if paths is None:
        verdict("C3 budget monotonicity", False, MISSING)
    d, b = paths
    subset = _stage(j10_subset(d, b), tmp_path)
    low = _j10_run(subset, b, (0, 1, 2), 5000).ard_mean
    high = _j10_run(subset, b, (0, 1, 2), 20000).ard_mean
    verdict("C3 budget monotonicity", high <= low, f"mean ARD {high:.4f}% at 20000 vs {low:.4f}% at 5000")


def _mean_ard(insts, opts, use_dirw):
    devs = []
    for seed in range(5):
        for inst, opt in zip(insts, opts):
            mk = run_solver(inst, SolverParams(max_schedules=2000, seed=seed, use_dirw=use_dirw)).makespan
            devs.append((mk - opt) / opt if mk is not None else float("inf"))
    return 100 * float(np.mean(devs))


def test_c4_dirw_ablation(verdict):
    pairs = [(inst, brute_force_optimum(inst)) for inst in tiny_suite()]
    pairs = [(i, o) for i, o in pairs if o]
    insts, opts = zip(*pairs)
    with_ls = _mean_ard(insts, opts, True)
    without = _mean_ard(insts, opts, False)
    verdict(
        "C4 DIRW ablation direction",
        with_ls <= without,
        f"mean ARD {with_ls:.4f}% with DIRW vs {without:.4f}% without ({len(insts)} instances x 5 seeds, 2000 schedules)",
    )


def test_c5_decoder_soundness(verdict):
    rng = random.Random(2024)
    nprng = np.random.default_rng(2024)
    bad = {"verify": 0, "justify": 0, "dirw": 0, "excess": 0}
    pairs = 0
    seed = 0
    while pairs < 10_000:
        inst, _ = reduce_instance(generate_tiny_instance(seed, rng.randint(1, 7)))
        seed += 1
        for _ in range(20):
            aml = random_aml(inst, rng)
            s = decode_forward(aml, inst)
            if any(p.startswith(("precedence", "renewable")) for p in verify_schedule(s, s.modes, inst)):
                bad["verify"] += 1
            if double_justify(aml, inst, schedule=s)[1].makespan > s.makespan:
                bad["justify"] += 1
            out = dirw_pass(aml, inst, rng.random(), nprng)
            if sorted(out.al) != sorted(aml.al) or out.violations(inst):
                bad["dirw"] += 1
            modes = s.modes
            fits = all(
                sum(inst.mode(j, modes[j]).nonrenewable[l] for j in range(1, inst.sink)) <= cap
                for l, cap in enumerate(inst.nonrenewable_capacity)
            )
            if (nonrenewable_excess(modes, inst) == 0) != fits:
                bad["excess"] += 1
            pairs += 1
    verdict("C5 decoder soundness", not any(bad.values()), f"{pairs} pairs, violations {bad}")


def test_c6_model_hygiene(verdict):
    rng = np.random.default_rng(6)
    inst, _ = reduce_instance(generate_tiny_instance(66, 7, max_modes=3))
    model = init_model(inst)
    for _ in range(1000):
        elite = [sample_individual(model, inst, rng) for _ in range(int(rng.integers(1, 8)))]
        model = update_model(model, elite, float(rng.random()))
    act_err = float(np.abs(model.act.sum(axis=1) - 1).max())
    mod_err = float(np.abs(model.mod.sum(axis=1) - 1).max())
    negative = bool((model.act < 0).any() or (model.mod < 0).any())
    verdict(
        "C6 model hygiene",
        act_err <= 1e-9 and mod_err <= 1e-9 and not negative,
        f"max row-sum error act {act_err:.2e}, mode {mod_err:.2e}, negatives {negative}",
    )


def test_c7_determinism(verdict, tmp_path):
    inst = tmp_path / "tiny.mm"
    inst.write_text(write_instance(generate_tiny_instance(77, 6)))
    outs = []
    for path in (DATA / "j10_layout.mm", inst):
        cmd = [sys.executable, "-m", "mrcpsp_eda", "solve", str(path), "--json", "--seed", "13", "--schedules", "3000"]
        a = subprocess.run(cmd, capture_output=True, check=True).stdout
        b = subprocess.run(cmd, capture_output=True, check=True).stdout
        outs.append(a == b and len(a) > 0)
    verdict("C7 determinism", all(outs), f"byte-identical solve --json records: {outs}")


def test_c8_reduction_safety(verdict):
    mismatched = not_idempotent = 0
    for inst in tiny_suite():
        red, _ = reduce_instance(inst)
        again, rep = reduce_instance(red)
        not_idempotent += again != red or rep.changed
        mismatched += brute_force_optimum(inst) != brute_force_optimum(red)
    verdict(
        "C8 reduction safety",
        mismatched == 0 and not_idempotent == 0,
        f"100 instances: {mismatched} optimum changes, {not_idempotent} non-idempotent",
    )
