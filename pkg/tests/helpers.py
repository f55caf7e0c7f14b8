import random
from pathlib import Path

from mrcpsp_eda.model import Mode, ProjectInstance, dummy_mode, generate_tiny_instance, reduce_instance
from mrcpsp_eda.schedule import ActivityModeList

DATA = Path(__file__).parent / "data"


def random_aml(instance, rng: random.Random) -> ActivityModeList:
    """Uniformly random eligible-choice order with uniformly random modes."""
    J = instance.n_jobs
    placed, remaining = [], set(range(1, J + 1))
    while remaining:
        eligible = sorted(j for j in remaining if all(p in placed for p in instance.real_predecessors[j]))
        j = rng.choice(eligible)
        placed.append(j)
        remaining.remove(j)
    modes = [1] + [rng.randint(1, instance.n_modes(j)) for j in range(1, J + 1)] + [1]
    return ActivityModeList.from_modes(placed, modes)


def build(real_modes, pairs, ren_cap, non_cap):
    """Instance from per-activity mode lists ``[(d, (r..), (n..)), ...]``; dummies and
    source/sink arcs are added automatically."""
    J = len(real_modes)
    R, N = len(ren_cap), len(non_cap)
    pairs = set(pairs)
    has_pred = {j for _, j in pairs}
    has_succ = {i for i, _ in pairs}
    for j in range(1, J + 1):
        if j not in has_pred:
            pairs.add((0, j))
        if j not in has_succ:
            pairs.add((j, J + 1))
    dm = dummy_mode(R, N)
    modes = [(dm,)]
    for ms in real_modes:
        modes.append(tuple(Mode(d, tuple(r), tuple(n)) for d, r, n in ms))
    modes.append((dm,))
    return ProjectInstance(
        modes=tuple(modes),
        precedences=frozenset(pairs),
        renewable_capacity=tuple(ren_cap),
        nonrenewable_capacity=tuple(non_cap),
    )


def reduced(seed, n_activities=None):
    return reduce_instance(generate_tiny_instance(seed, n_activities))[0]
