"""Delete-then-insert random-walk local search over activity-mode lists."""

from __future__ import annotations

from typing import NamedTuple

from .model import ProjectInstance
from .schedule import ActivityModeList, nonrenewable_excess


class InsertionWindow(NamedTuple):
    """Inclusive range of 1-based insertion slots; slot ``p`` puts the activity at position ``p``."""

    lo: int
    hi: int


def insertion_window(al_after_delete, activity: int, instance: ProjectInstance) -> InsertionWindow:
    """Slots where ``activity`` can be re-inserted without breaking precedence order."""
    pos = {a: i for i, a in enumerate(al_after_delete, start=1)}
    lo = max((pos[p] for p in instance.real_predecessors[activity] if p in pos), default=0) + 1
    hi = min((pos[s] for s in instance.real_successors[activity] if s in pos), default=len(al_after_delete) + 1)
    return InsertionWindow(lo, hi)


def reassign_mode(modes, activity: int, instance: ProjectInstance) -> int:
    """Shortest mode if the current assignment fits the nonrenewable budgets,
    otherwise the mode with the smallest total nonrenewable request.

    ``modes`` is an ActivityModeList or a per-activity vector of mode ids.
    Ties go to the lowest mode id.
    """
    if nonrenewable_excess(modes, instance) == 0:
        return instance.min_duration_mode(activity)
    return instance.min_nonrenewable_mode(activity)


def dirw_pass(
    aml: ActivityModeList,
    instance: ProjectInstance,
    rw: float,
    rng,
    *,
    skip_last: bool = False,
) -> ActivityModeList:
    """One random-walk pass over the real activities in increasing id order.

    Random draws: one uniform ``q`` per real activity up front, then one
    integer slot for every activity with ``q < rw``. Each such activity gets
    its mode reassigned, is removed from the list and re-inserted at a
    uniformly chosen feasible slot; moves are kept unconditionally.
    ``skip_last`` leaves the highest-numbered real activity untouched.
    """
    J = instance.n_jobs
    if J == 0 or rw <= 0:
        return aml
    q = rng.random(J)
    al = list(aml.al)
    modes = aml.mode_vector(len(instance.modes))
    last = J - 1 if skip_last else J
    for j in range(1, last + 1):
        if q[j - 1] < rw:
            modes[j] = reassign_mode(modes, j, instance)
            al.remove(j)
            lo, hi = insertion_window(al, j, instance)
            slot = int(rng.integers(lo, hi + 1))
            al.insert(slot - 1, j)
    return ActivityModeList.from_modes(al, modes)
