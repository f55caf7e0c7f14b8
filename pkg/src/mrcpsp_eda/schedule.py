"""Activity-mode lists, multi-mode serial SGS decoding, fitness and justification."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from . import _kernels
from .errors import DeadlineTooTight, ZeroCapacity
from .model import ProjectInstance


@dataclass(frozen=True)
class ActivityModeList:
    """Precedence-feasible order of the real activities plus aligned mode ids.

    ``ml[i]`` is the (1-based) mode of activity ``al[i]``.
    """

    al: tuple[int, ...]
    ml: tuple[int, ...]

    @classmethod
    def from_modes(cls, al: Sequence[int], modes: Sequence[int]) -> ActivityModeList:
        """Build from an order and a per-activity mode vector indexed by activity id."""
        al = tuple(al)
        return cls(al, tuple(modes[j] for j in al))

    def mode_vector(self, n_activities: int) -> list[int]:
        """Mode id per activity ``0..J+1`` (dummies get mode 1)."""
        out = [1] * n_activities
        for j, m in zip(self.al, self.ml):
            out[j] = m
        return out

    def violations(self, instance: ProjectInstance) -> list[str]:
        problems = []
        J = instance.n_jobs
        if sorted(self.al) != list(range(1, J + 1)):
            problems.append("AL is not a permutation of the real activities")
            return problems
        if len(self.ml) != len(self.al):
            problems.append("ML length differs from AL length")
            return problems
        pos = {j: i for i, j in enumerate(self.al)}
        for i, j in instance.precedences:
            if i in pos and j in pos and pos[i] > pos[j]:
                problems.append(f"precedence ({i}, {j}) violated by AL order")
        for j, m in zip(self.al, self.ml):
            if not 1 <= m <= instance.n_modes(j):
                problems.append(f"activity {j} has no mode {m}")
        return problems


@dataclass(frozen=True)
class Schedule:
    start: tuple[int, ...]
    finish: tuple[int, ...]
    modes: tuple[int, ...]
    makespan: int
    nonrenewable_excess: float
    feasible: bool


@dataclass(frozen=True)
class FitnessValue:
    scalar: float
    feasible: bool


class ScheduleCounter:
    """Counts generated schedules; one per forward or backward decode."""

    __slots__ = ("count",)

    def __init__(self, count: int = 0):
        self.count = count

    def tick(self):
        self.count += 1


def nonrenewable_excess(modes, instance: ProjectInstance) -> float:
    """Nonrenewable infeasibility degree of a mode assignment.

    ``modes`` is either an ActivityModeList or a per-activity vector of
    mode ids indexed ``0..J+1``. Each resource contributes its relative
    overshoot ``max(0, (used - capacity) / capacity)``.
    """
    if isinstance(modes, ActivityModeList):
        pairs = zip(modes.al, modes.ml)
    else:
        pairs = ((j, modes[j]) for j in range(1, instance.sink))
    N = instance.n_nonrenewable
    if N == 0:
        return 0.0
    used = [0] * N
    for j, m in pairs:
        req = instance.modes[j][m - 1].nonrenewable
        for l in range(N):
            used[l] += req[l]
    total = 0.0
    for l, cap in enumerate(instance.nonrenewable_capacity):
        over = used[l] - cap
        if over > 0:
            if cap == 0:
                raise ZeroCapacity(f"nonrenewable resource {l + 1} has zero capacity but is requested")
            total += over / cap
    return total


def _kernel_modes(aml: ActivityModeList, n: int) -> list[int]:
    out = [0] * n
    for j, m in zip(aml.al, aml.ml):
        out[j] = m - 1
    return out


def _build(instance, start, modes, excess) -> Schedule:
    finish = tuple(s + instance.modes[j][modes[j] - 1].duration for j, s in enumerate(start))
    return Schedule(
        start=tuple(start),
        finish=finish,
        modes=tuple(modes),
        makespan=finish[-1],
        nonrenewable_excess=excess,
        feasible=excess == 0,
    )


def decode_forward(
    aml: ActivityModeList, instance: ProjectInstance, counter: ScheduleCounter | None = None, *, backend=None
) -> Schedule:
    """Serial SGS: place activities in AL order, each at its earliest precedence- and
    renewable-feasible start. Nonrenewable capacities are only measured."""
    data = _kernels.kernel_data(instance, backend)
    kernel = backend or _kernels.impl
    n = len(instance.modes)
    start = kernel.forward(data, aml.al, _kernel_modes(aml, n))
    if counter is not None:
        counter.tick()
    modes = aml.mode_vector(n)
    return _build(instance, start, modes, nonrenewable_excess(aml, instance))


def decode_backward(
    aml: ActivityModeList,
    instance: ProjectInstance,
    deadline: int,
    counter: ScheduleCounter | None = None,
    *,
    backend=None,
) -> Schedule:
    """Backward serial SGS against ``deadline``, then shifted left so the earliest start is 0."""
    data = _kernels.kernel_data(instance, backend)
    kernel = backend or _kernels.impl
    n = len(instance.modes)
    start = kernel.backward(data, aml.al, _kernel_modes(aml, n), deadline)
    if counter is not None:
        counter.tick()
    if start is None:
        raise DeadlineTooTight(f"no right-justified placement finishes by {deadline}")
    sink = n - 1
    real = start[1:sink]
    shift = min(real) if real else deadline
    start = [s - shift for s in start]
    start[0] = 0
    modes = aml.mode_vector(n)
    finish_max = 0
    for j in range(1, sink):
        f = start[j] + instance.modes[j][modes[j] - 1].duration
        if f > finish_max:
            finish_max = f
    start[sink] = finish_max
    return _build(instance, start, modes, nonrenewable_excess(aml, instance))


def fitness_of(schedule: Schedule, instance: ProjectInstance) -> FitnessValue:
    """Makespan when nonrenewable-feasible, otherwise ``D_max * (1 + v_E)``.

    ``D_max`` is floored at 1 so that a zero-duration instance still ranks
    infeasible assignments behind feasible ones.
    """
    if schedule.nonrenewable_excess == 0:
        return FitnessValue(float(schedule.makespan), True)
    d_max = max(instance.max_duration_sum, 1)
    return FitnessValue(d_max * (1.0 + schedule.nonrenewable_excess), False)


def double_justify(
    aml: ActivityModeList,
    instance: ProjectInstance,
    budget: int | None = None,
    *,
    counter: ScheduleCounter | None = None,
    schedule: Schedule | None = None,
) -> tuple[ActivityModeList, Schedule]:
    """Alternate backward and forward justification until the makespan stops improving.

    Modes stay fixed. The backward pass takes activities by decreasing
    finish time of the current schedule with the makespan as deadline; the
    forward pass takes them by increasing start time of the right-justified
    schedule. ``budget`` caps the number of decodes spent here (``None`` for
    no cap); pass the already decoded ``schedule`` of ``aml`` to avoid a
    redundant decode.
    """
    spent = 0
    if schedule is None:
        schedule = decode_forward(aml, instance, counter)
        spent += 1
    real = aml.al
    modes = schedule.modes

    def remaining():
        return budget is None or spent < budget

    best_aml, best = aml, schedule
    while remaining():
        # ascending (finish, start, id), processed in reverse by the backward decoder
        back_al = sorted(real, key=lambda j: (best.finish[j], best.start[j], j))
        right = decode_backward(ActivityModeList.from_modes(back_al, modes), instance, best.makespan, counter)
        spent += 1
        fwd_al = sorted(real, key=lambda j: (right.start[j], j))
        if remaining():
            cand_aml = ActivityModeList.from_modes(fwd_al, modes)
            cand = decode_forward(cand_aml, instance, counter)
            spent += 1
        else:
            cand_aml, cand = ActivityModeList.from_modes(fwd_al, modes), right
        if cand.makespan < best.makespan:
            best_aml, best = cand_aml, cand
        else:
            break
    return best_aml, best


def verify_schedule(schedule: Schedule, modes, instance: ProjectInstance) -> list[str]:
    """Check a schedule from first principles and list every violation.

    Violations are prefixed with their category: ``duration``, ``precedence``,
    ``renewable``, ``nonrenewable`` or ``makespan``. ``modes`` is a
    per-activity vector of mode ids (or an ActivityModeList).
    """
    n = len(instance.modes)
    if isinstance(modes, ActivityModeList):
        modes = modes.mode_vector(n)
    problems = []
    if len(schedule.start) != n or len(schedule.finish) != n or len(modes) != n:
        return [f"shape: expected {n} activities"]

    dur = {}
    for j in range(n):
        m = modes[j]
        if not 1 <= m <= len(instance.modes[j]):
            problems.append(f"mode: activity {j} has no mode {m}")
            return problems
        dur[j] = instance.modes[j][m - 1].duration
        if schedule.start[j] < 0:
            problems.append(f"duration: activity {j} starts before 0")
        if schedule.finish[j] != schedule.start[j] + dur[j]:
            problems.append(f"duration: activity {j} finish {schedule.finish[j]} != start + {dur[j]}")

    for i, j in sorted(instance.precedences):
        if schedule.start[i] + dur[i] > schedule.start[j]:
            problems.append(f"precedence: ({i}, {j}) finish {schedule.start[i] + dur[i]} > start {schedule.start[j]}")

    usage = defaultdict(int)
    for j in range(n):
        req = instance.modes[j][modes[j] - 1].renewable
        for t in range(schedule.start[j], schedule.start[j] + dur[j]):
            for k, r in enumerate(req):
                usage[t, k] += r
    for (t, k), u in sorted(usage.items()):
        if u > instance.renewable_capacity[k]:
            problems.append(f"renewable: resource {k + 1} uses {u} > {instance.renewable_capacity[k]} at t={t}")

    for l, cap in enumerate(instance.nonrenewable_capacity):
        total = sum(instance.modes[j][modes[j] - 1].nonrenewable[l] for j in range(n))
        if total > cap:
            problems.append(f"nonrenewable: resource {l + 1} consumes {total} > {cap}")

    last = max(schedule.start[j] + dur[j] for j in range(n))
    if schedule.makespan != last:
        problems.append(f"makespan: reported {schedule.makespan}, latest finish {last}")
    return problems
