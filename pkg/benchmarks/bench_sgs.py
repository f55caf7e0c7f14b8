"""Time the serial SGS kernels (Cython vs pure Python) and a short solver run with each.

    python benchmarks/bench_sgs.py [--decodes 20000] [--schedules 5000]
"""

import argparse
import os
import random
import subprocess
import sys
import time
from pathlib import Path

from mrcpsp_eda import _kernels
from mrcpsp_eda.model import generate_tiny_instance, reduce_instance
from mrcpsp_eda.psplib_io import read_instance

HERE = Path(__file__).resolve().parent
DATA = HERE.parent / "tests" / "data"


def random_lists(instance, n, seed=0):
    rng = random.Random(seed)
    J = instance.n_jobs
    out = []
    for _ in range(n):
        placed, left = [], set(range(1, J + 1))
        while left:
            elig = sorted(j for j in left if all(p in placed for p in instance.real_predecessors[j]))
            j = rng.choice(elig)
            placed.append(j)
            left.remove(j)
        modes = [0] + [rng.randrange(instance.n_modes(j)) for j in range(1, J + 1)] + [0]
        out.append((placed, modes))
    return out


def time_kernel(impl, instance, lists):
    data = _kernels.kernel_data(instance, impl)
    t0 = time.perf_counter()
    for order, modes in lists:
        start = impl.forward(data, order, modes)
        impl.backward(data, order, modes, start[-1])
    return time.perf_counter() - t0


SOLVE_SNIPPET = """
import sys
from mrcpsp_eda import SolverParams, read_instance, run_solver
inst = read_instance(sys.argv[1])
best = min(
    run_solver(inst, SolverParams(max_schedules=int(sys.argv[2]), seed=s)).wall_time for s in range(3)
)
print(best)
"""


def time_solver(path, schedules, pure):
    # a fresh interpreter, so the backend choice at import is honoured; best of 3 in-process runs
    env = dict(os.environ)
    if pure:
        env["MRCPSP_EDA_PURE"] = "1"
    cmd = [sys.executable, "-c", SOLVE_SNIPPET, str(path), str(schedules)]
    out = subprocess.run(cmd, env=env, check=True, capture_output=True, text=True)
    return float(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--decodes", type=int, default=20000)
    ap.add_argument("--schedules", type=int, default=5000)
    args = ap.parse_args()

    backends = _kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the Python kernel is available")

    cases = [
        ("tiny (6 activities)", reduce_instance(generate_tiny_instance(1, 6))[0]),
        ("j10 layout (10 activities)", reduce_instance(read_instance(DATA / "j10_layout.mm"))[0]),
        ("m11_1 (16 activities)", reduce_instance(read_instance(DATA / "m11_1.mm"))[0]),
    ]
    print(f"forward+backward decode pairs: {args.decodes}")
    print(f"{'instance':28s}" + "".join(f"{name:>12s}" for name in sorted(backends)) + "     speedup")
    for label, inst in cases:
        lists = random_lists(inst, args.decodes)
        times = {name: time_kernel(impl, inst, lists) for name, impl in sorted(backends.items())}
        row = f"{label:28s}" + "".join(f"{times[n]:11.3f}s" for n in sorted(times))
        if len(times) == 2:
            row += f"  {times['python'] / times['cython']:9.1f}x"
        print(row)

    print(f"\nrun_solver with {args.schedules} schedules (best of 3 seeds)")
    for path in (DATA / "j10_layout.mm", DATA / "m11_1.mm"):
        row = f"{path.stem:28s}"
        if "cython" in backends:
            row += f"  cython {time_solver(path, args.schedules, False):7.3f}s"
        row += f"  python {time_solver(path, args.schedules, True):7.3f}s"
        print(row)


if __name__ == "__main__":
    main()
