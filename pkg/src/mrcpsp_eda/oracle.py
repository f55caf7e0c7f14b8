"""Exhaustive optimum for tiny instances, used as a test oracle.

Enumerates every mode assignment that fits the nonrenewable budgets and,
for each, every precedence-feasible activity order, placing activities
serially at their earliest feasible start. The search walks orders as a
tree so shared prefixes are placed once, and prunes a branch once a
critical-path bound reaches the incumbent. Placement code here is kept
separate from the solver's decoders on purpose.
"""

from __future__ import annotations

import itertools

from .errors import TooLarge
from .model import ProjectInstance

MAX_ACTIVITIES = 7
MAX_MODES = 3


def brute_force_solve(instance: ProjectInstance):
    """Return ``(makespan, start_times, modes)`` of an optimal schedule, or ``None`` if infeasible.

    ``modes`` is a per-activity vector of mode ids (dummies included).
    """
    J = instance.n_jobs
    if J > MAX_ACTIVITIES or any(len(ms) > MAX_MODES for ms in instance.modes[1:-1]):
        raise TooLarge(f"enumeration bound is {MAX_ACTIVITIES} activities with {MAX_MODES} modes each")
    sink = J + 1
    cap_r = instance.renewable_capacity
    cap_n = instance.nonrenewable_capacity
    preds = [set(p) for p in instance.predecessors]

    # longest path from each activity's start to the sink under a given duration vector
    def tails(dur):
        tail = [0] * (J + 2)
        for j in range(J, 0, -1):
            tail[j] = dur[j] + max((tail[s] for s in instance.successors[j] if s != sink), default=0)
        return tail

    candidates = []
    for combo in itertools.product(*(range(1, len(ms) + 1) for ms in instance.modes[1:-1])):
        chosen = [instance.modes[0][0]] + [instance.modes[j][m - 1] for j, m in enumerate(combo, start=1)]
        if any(any(r > c for r, c in zip(md.renewable, cap_r)) for md in chosen):
            continue
        if any(sum(md.nonrenewable[l] for md in chosen) > cap_n[l] for l in range(len(cap_n))):
            continue
        dur = [md.duration for md in chosen] + [0]
        tail = tails(dur)
        lb = max(tail[1:sink], default=0)
        candidates.append((lb, combo, chosen, dur, tail))
    if not candidates:
        return None
    candidates.sort(key=lambda c: c[0])

    best = [None, None, None]  # makespan, starts, modes

    for lb, combo, chosen, dur, tail in candidates:
        if best[0] is not None and lb >= best[0]:
            break
        horizon = sum(dur) + 1
        usage = [[0] * horizon for _ in cap_r]
        start = [0] * (J + 2)
        finish = [0] * (J + 2)

        def fits(j, t):
            req = chosen[j].renewable
            for k, r in enumerate(req):
                if r:
                    row = usage[k]
                    for tau in range(t, t + dur[j]):
                        if row[tau] + r > cap_r[k]:
                            return False
            return True

        def place(j, t, sign):
            for k, r in enumerate(chosen[j].renewable):
                if r:
                    row = usage[k]
                    for tau in range(t, t + dur[j]):
                        row[tau] += sign * r

        def search(placed, end):
            if len(placed) == J:
                if best[0] is None or end < best[0]:
                    best[0] = end
                    best[1] = start[:]
                    best[2] = [1] + list(combo) + [1]
                return
            bound = end
            open_acts = [j for j in range(1, sink) if j not in placed]
            for j in open_acts:
                ready = max((finish[p] for p in preds[j]), default=0)
                bound = max(bound, ready + tail[j])
            if best[0] is not None and bound >= best[0]:
                return
            for j in open_acts:
                if not preds[j] <= placed | {0}:
                    continue
                t = max((finish[p] for p in preds[j]), default=0)
                while not fits(j, t):
                    t += 1
                start[j], finish[j] = t, t + dur[j]
                place(j, t, 1)
                search(placed | {j}, max(end, finish[j]))
                place(j, t, -1)
                start[j] = finish[j] = 0

        search(frozenset(), 0)

    makespan, starts, modes = best
    starts[sink] = makespan
    return makespan, starts, modes


def brute_force_optimum(instance: ProjectInstance) -> int | None:
    """Optimal makespan, or ``None`` when no feasible schedule exists."""
    found = brute_force_solve(instance)
    return None if found is None else found[0]
