"""Problem representation, validation, mode/resource reduction and a tiny-instance generator.

Activities are numbered ``0..J+1``; ``0`` and ``J+1`` are the dummy source
and sink. Mode ids are 1-based everywhere in the public API.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import InfeasibleInstance


@dataclass(frozen=True)
class Mode:
    duration: int
    renewable: tuple[int, ...]
    nonrenewable: tuple[int, ...]


def dummy_mode(n_renewable: int, n_nonrenewable: int) -> Mode:
    return Mode(0, (0,) * n_renewable, (0,) * n_nonrenewable)


@dataclass(frozen=True)
class ProjectInstance:
    """Immutable MRCPSP instance.

    ``modes[j]`` lists the execution modes of activity ``j``; mode id ``m``
    is ``modes[j][m - 1]``. ``precedences`` holds direct (predecessor,
    successor) pairs. ``mode_origin`` maps surviving mode ids back to the
    ids of the instance this one was reduced from. ``horizon`` is the file's
    planning horizon, kept for writing only. Neither takes part in equality.
    """

    modes: tuple[tuple[Mode, ...], ...]
    precedences: frozenset[tuple[int, int]]
    renewable_capacity: tuple[int, ...]
    nonrenewable_capacity: tuple[int, ...]
    horizon: int | None = field(default=None, compare=False)
    mode_origin: tuple[tuple[int, ...], ...] | None = field(default=None, compare=False)
    nonrenewable_origin: tuple[int, ...] | None = field(default=None, compare=False)
    name: str = field(default="", compare=False)

    def __getstate__(self):
        # drop cached_property values (compiled kernel data is not picklable)
        return {f: self.__dict__[f] for f in self.__dataclass_fields__}

    def __setstate__(self, state):
        for k, v in state.items():
            object.__setattr__(self, k, v)

    @property
    def n_jobs(self) -> int:
        """Number of real activities J."""
        return len(self.modes) - 2

    @property
    def sink(self) -> int:
        return len(self.modes) - 1

    @property
    def n_renewable(self) -> int:
        return len(self.renewable_capacity)

    @property
    def n_nonrenewable(self) -> int:
        return len(self.nonrenewable_capacity)

    def n_modes(self, j: int) -> int:
        return len(self.modes[j])

    def mode(self, j: int, m: int) -> Mode:
        return self.modes[j][m - 1]

    def original_mode_id(self, j: int, m: int) -> int:
        if self.mode_origin is None:
            return m
        return self.mode_origin[j][m - 1]

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        preds: list[list[int]] = [[] for _ in self.modes]
        for i, j in self.precedences:
            preds[j].append(i)
        return tuple(tuple(sorted(p)) for p in preds)

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        succs: list[list[int]] = [[] for _ in self.modes]
        for i, j in self.precedences:
            succs[i].append(j)
        return tuple(tuple(sorted(s)) for s in succs)

    @cached_property
    def real_predecessors(self) -> tuple[tuple[int, ...], ...]:
        sink = self.sink
        return tuple(tuple(p for p in ps if 0 < p < sink) for ps in self.predecessors)

    @cached_property
    def real_successors(self) -> tuple[tuple[int, ...], ...]:
        sink = self.sink
        return tuple(tuple(s for s in ss if 0 < s < sink) for ss in self.successors)

    @cached_property
    def max_duration_sum(self) -> int:
        """D_max: sum over real activities of their longest mode duration."""
        return sum(max(m.duration for m in ms) for ms in self.modes[1:-1]) if self.n_jobs else 0

    @cached_property
    def nonrenewable_table(self) -> np.ndarray:
        """Array ``[j, m-1, l]`` of nonrenewable requests, zero-padded past M_j."""
        n = len(self.modes)
        width = max(len(ms) for ms in self.modes)
        out = np.zeros((n, width, self.n_nonrenewable), dtype=np.int64)
        for j, ms in enumerate(self.modes):
            for m, mode in enumerate(ms):
                out[j, m, :] = mode.nonrenewable
        return out

    def min_duration_mode(self, j: int) -> int:
        ms = self.modes[j]
        return min(range(len(ms)), key=lambda i: (ms[i].duration, i)) + 1

    def min_nonrenewable_mode(self, j: int) -> int:
        ms = self.modes[j]
        return min(range(len(ms)), key=lambda i: (sum(ms[i].nonrenewable), i)) + 1


def validate_instance(instance: ProjectInstance) -> list[str]:
    """Return every violated structural invariant; an empty list means valid."""
    problems: list[str] = []
    n = len(instance.modes)
    if n < 2:
        return ["instance must contain the two dummy activities"]
    sink = n - 1
    R, N = instance.n_renewable, instance.n_nonrenewable

    if any(c < 0 for c in instance.renewable_capacity + instance.nonrenewable_capacity):
        problems.append("negative resource capacity")
    for j, ms in enumerate(instance.modes):
        if not ms:
            problems.append(f"activity {j} has no modes")
            continue
        if j in (0, sink):
            if len(ms) != 1 or ms[0].duration != 0 or any(ms[0].renewable) or any(ms[0].nonrenewable):
                problems.append(f"dummy activity {j} must have one zero-duration, zero-request mode")
        for m, mode in enumerate(ms, start=1):
            if len(mode.renewable) != R or len(mode.nonrenewable) != N:
                problems.append(f"activity {j} mode {m}: request vector length mismatch")
            if mode.duration < 0:
                problems.append(f"activity {j} mode {m}: negative duration")
            if any(r < 0 for r in mode.renewable + mode.nonrenewable):
                problems.append(f"activity {j} mode {m}: negative request")

    for i, j in sorted(instance.precedences):
        if not (0 <= i < n and 0 <= j < n):
            problems.append(f"precedence ({i}, {j}) references unknown activity")
            continue
        if i >= j:
            problems.append(f"non-topological numbering: precedence ({i}, {j})")
        if j == 0:
            problems.append("dummy start activity 0 has a predecessor")
        if i == sink:
            problems.append(f"dummy end activity {sink} has a successor")

    if _has_cycle(n, instance.precedences):
        problems.append("cycle in precedence graph")
    return problems


def _has_cycle(n: int, pairs) -> bool:
    indeg = [0] * n
    out: list[list[int]] = [[] for _ in range(n)]
    for i, j in pairs:
        if 0 <= i < n and 0 <= j < n:
            out[i].append(j)
            indeg[j] += 1
    stack = [v for v in range(n) if indeg[v] == 0]
    seen = 0
    while stack:
        v = stack.pop()
        seen += 1
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(w)
    return seen != n


@dataclass
class ReductionReport:
    removed_nonexecutable_modes: list[tuple[int, int]] = field(default_factory=list)
    removed_inefficient_modes: list[tuple[int, int]] = field(default_factory=list)
    removed_redundant_nonrenewables: list[int] = field(default_factory=list)
    rounds: int = 0

    @property
    def changed(self) -> bool:
        return bool(
            self.removed_nonexecutable_modes
            or self.removed_inefficient_modes
            or self.removed_redundant_nonrenewables
        )


def reduce_instance(instance: ProjectInstance) -> tuple[ProjectInstance, ReductionReport]:
    """Drop non-executable and inefficient modes and redundant nonrenewable resources.

    The three rules are applied in that order and repeated until nothing
    changes. Reported activity/mode ids and resource indices refer to the
    original instance (resources 1-based). Raises ``InfeasibleInstance``
    if an activity is left without modes.
    """
    sink = instance.sink
    # working state: per activity, list of (original mode id, Mode)
    acts: list[list[tuple[int, Mode]]] = [
        [(instance.original_mode_id(j, m), mode) for m, mode in enumerate(ms, start=1)]
        for j, ms in enumerate(instance.modes)
    ]
    res_origin = list(instance.nonrenewable_origin or range(1, instance.n_nonrenewable + 1))
    keep_res = list(range(instance.n_nonrenewable))  # positions into the input's nonrenewables
    cap_r = instance.renewable_capacity
    cap_n = instance.nonrenewable_capacity
    report = ReductionReport()

    def nr(mode: Mode, pos: int) -> int:
        return mode.nonrenewable[pos]

    while True:
        report.rounds += 1
        changed = False

        # non-executable modes
        for j in range(1, sink):
            survivors = []
            for orig, mode in acts[j]:
                bad = any(r > c for r, c in zip(mode.renewable, cap_r))
                if not bad:
                    for pos in keep_res:
                        others = sum(
                            min(nr(md, pos) for _, md in acts[i]) for i in range(1, sink) if i != j and acts[i]
                        )
                        if nr(mode, pos) + others > cap_n[pos]:
                            bad = True
                            break
                if bad:
                    report.removed_nonexecutable_modes.append((j, orig))
                    changed = True
                else:
                    survivors.append((orig, mode))
            acts[j] = survivors
            if not survivors:
                raise InfeasibleInstance(f"activity {j} has no executable mode")

        # redundant nonrenewable resources
        for pos in list(keep_res):
            total_max = sum(max(nr(md, pos) for _, md in acts[j]) for j in range(1, sink))
            if total_max <= cap_n[pos]:
                keep_res.remove(pos)
                report.removed_redundant_nonrenewables.append(res_origin[pos])
                changed = True

        # inefficient modes
        for j in range(1, sink):
            modes_j = acts[j]
            survivors = []
            for a, (orig, mode) in enumerate(modes_j):
                dominated = False
                for b, (_, other) in enumerate(modes_j):
                    if a == b:
                        continue
                    if _dominates_on(other, mode, keep_res):
                        same = _dominates_on(mode, other, keep_res)
                        # identical duplicates: the later (higher id) one goes
                        if not same or b < a:
                            dominated = True
                            break
                if dominated:
                    report.removed_inefficient_modes.append((j, orig))
                    changed = True
                else:
                    survivors.append((orig, mode))
            acts[j] = survivors

        if not changed:
            break

    new_modes = []
    origin = []
    for j, lst in enumerate(acts):
        new_modes.append(
            tuple(Mode(md.duration, md.renewable, tuple(md.nonrenewable[p] for p in keep_res)) for _, md in lst)
        )
        origin.append(tuple(o for o, _ in lst))
    reduced = replace(
        instance,
        modes=tuple(new_modes),
        nonrenewable_capacity=tuple(cap_n[p] for p in keep_res),
        mode_origin=tuple(origin),
        nonrenewable_origin=tuple(res_origin[p] for p in keep_res),
    )
    return reduced, report


def _dominates_on(a: Mode, b: Mode, nonrenewable_positions) -> bool:
    return (
        a.duration <= b.duration
        and all(x <= y for x, y in zip(a.renewable, b.renewable))
        and all(a.nonrenewable[p] <= b.nonrenewable[p] for p in nonrenewable_positions)
    )


def generate_tiny_instance(
    seed: int,
    n_activities: int | None = None,
    *,
    min_activities: int = 1,
    max_activities: int = 7,
    max_modes: int = 3,
    n_modes: int | None = None,
    edge_prob: float = 0.35,
) -> ProjectInstance:
    """Random small instance with R=2 renewable and N=2 nonrenewable resources.

    Every activity gets one designated mode; renewable capacities admit
    every designated mode and nonrenewable capacities cover the designated
    assignment, so at least one feasible schedule exists.
    """
    rng = np.random.default_rng(seed)
    if n_activities is None:
        n_activities = int(rng.integers(min_activities, max_activities + 1))
    if not 1 <= n_activities <= 7:
        raise ValueError("tiny instances have 1..7 real activities")
    if not 1 <= max_modes <= 3:
        raise ValueError("tiny instances have at most 3 modes per activity")
    J = n_activities
    R = N = 2
    sink = J + 1

    pairs: set[tuple[int, int]] = set()
    for i in range(1, J + 1):
        for j in range(i + 1, J + 1):
            if rng.random() < edge_prob:
                pairs.add((i, j))
    has_pred = {j for _, j in pairs}
    has_succ = {i for i, _ in pairs}
    for j in range(1, J + 1):
        if j not in has_pred:
            pairs.add((0, j))
        if j not in has_succ:
            pairs.add((j, sink))

    real_modes = []
    designated = []
    for _ in range(J):
        k = n_modes if n_modes is not None else int(rng.integers(1, max_modes + 1))
        ms = []
        for _ in range(k):
            d = int(rng.integers(1, 11))
            ren = tuple(int(x) for x in rng.integers(0, 6, size=R))
            non = tuple(int(x) for x in rng.integers(0, 11, size=N))
            ms.append(Mode(d, ren, non))
        real_modes.append(tuple(ms))
        designated.append(ms[int(rng.integers(0, k))])

    ren_cap = []
    for k in range(R):
        lo = max(1, max(m.renewable[k] for m in designated))
        hi = max(lo, max(m.renewable[k] for ms in real_modes for m in ms))
        ren_cap.append(int(rng.integers(lo, hi + 1)))
    non_cap = []
    for l in range(N):
        base = sum(m.nonrenewable[l] for m in designated)
        non_cap.append(max(1, base + int(rng.integers(0, 4))))

    dm = dummy_mode(R, N)
    return ProjectInstance(
        modes=((dm,),) + tuple(real_modes) + ((dm,),),
        precedences=frozenset(pairs),
        renewable_capacity=tuple(ren_cap),
        nonrenewable_capacity=tuple(non_cap),
        horizon=sum(max(m.duration for m in ms) for ms in real_modes),
        name=f"tiny-{seed}",
    )
