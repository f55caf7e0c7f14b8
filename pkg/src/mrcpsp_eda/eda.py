"""Estimation of distribution algorithm over activity-mode lists.

One run: sample a population from the position/mode probability model,
decode it, keep the best individuals, improve them with double
justification and the random-walk local search, then move the model
towards them.
"""

from __future__ import annotations

import logging
import time
from bisect import insort
from dataclasses import asdict, dataclass, field

import numpy as np

from .dirw import dirw_pass
from .errors import BudgetZero, InfeasibleInstance, NoFeasibleModeAssignment
from .model import ProjectInstance, ReductionReport, reduce_instance
from .schedule import (
    ActivityModeList,
    FitnessValue,
    Schedule,
    ScheduleCounter,
    decode_forward,
    double_justify,
    fitness_of,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProbabilityModel:
    """``act[i, j-1]``: probability that activity j sits at position i+1.
    ``mod[j-1, m-1]``: probability that activity j runs in mode m (zero past M_j).
    """

    act: np.ndarray
    mod: np.ndarray
    t: int = 0


@dataclass(frozen=True)
class SolverParams:
    pop_size: int = 100
    elite_frac: float = 0.2
    alpha: float = 0.5
    rw: float = 0.5
    max_schedules: int | None = 5000
    time_limit: float | None = None
    seed: int = 0
    use_dirw: bool = True
    use_mdj: bool = True
    dirw_skip_last: bool = False

    @property
    def elite_size(self) -> int:
        return max(1, int(round(self.pop_size * self.elite_frac)))

    def check(self):
        if self.pop_size < 1:
            raise ValueError("population size must be at least 1")
        if not 1 <= self.elite_size <= self.pop_size:
            raise ValueError("elite size must lie in 1..population size")
        if not 0 <= self.alpha <= 1 or not 0 <= self.rw <= 1:
            raise ValueError("alpha and rw must lie in [0, 1]")
        if self.max_schedules is None and self.time_limit is None:
            raise BudgetZero("no stopping rule: set max_schedules or time_limit")
        if self.max_schedules is not None and self.max_schedules <= 0:
            raise BudgetZero("schedule budget must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise BudgetZero("time limit must be positive")


@dataclass
class SolveResult:
    """Best individual found. ``aml`` and ``schedule`` use the input instance's mode ids."""

    aml: ActivityModeList
    schedule: Schedule
    fitness: FitnessValue
    feasible_found: bool
    schedules_generated: int
    generations: int
    seed: int
    wall_time: float
    reduction: ReductionReport
    history: list[float] = field(default_factory=list)

    @property
    def makespan(self) -> int | None:
        return self.schedule.makespan if self.feasible_found else None

    def record(self, params: SolverParams | None = None, name: str = "") -> dict:
        """Deterministic summary (no timing) suitable for JSON output."""
        rec = {
            "instance": name,
            "seed": self.seed,
            "feasible": self.feasible_found,
            "makespan": self.makespan,
            "fitness": self.fitness.scalar,
            "nonrenewable_excess": self.schedule.nonrenewable_excess,
            "schedules_generated": self.schedules_generated,
            "generations": self.generations,
            "activity_list": list(self.aml.al),
            "mode_list": list(self.aml.ml),
            "start_times": list(self.schedule.start),
        }
        if params is not None:
            rec["params"] = asdict(params)
        return rec


def init_model(instance: ProjectInstance) -> ProbabilityModel:
    J = instance.n_jobs
    act = np.full((J, J), 1.0 / J) if J else np.zeros((0, 0))
    width = max((instance.n_modes(j) for j in range(1, J + 1)), default=1)
    mod = np.zeros((J, width))
    for j in range(1, J + 1):
        mod[j - 1, : instance.n_modes(j)] = 1.0 / instance.n_modes(j)
    return ProbabilityModel(act, mod, 0)


def sample_individual(model: ProbabilityModel, instance: ProjectInstance, rng) -> ActivityModeList:
    """Draw a precedence-feasible activity list and a mode per activity.

    Position ``i`` picks among the eligible activities (all real
    predecessors placed) with probabilities ``act[i]`` renormalised over
    that set, uniformly if the set carries no mass. Draw order: one block
    of ``2J`` uniforms; the first J drive the positions, the rest the modes
    of activities 1..J.
    """
    J = instance.n_jobs
    if J == 0:
        return ActivityModeList((), ())
    u = rng.random(2 * J).tolist()
    act = model.act.tolist()
    preds = instance.real_predecessors
    succs = instance.real_successors
    missing = [len(p) for p in preds]
    eligible = [j for j in range(1, J + 1) if missing[j] == 0]
    al = []
    for i in range(J):
        row = act[i]
        total = 0.0
        for j in eligible:
            total += row[j - 1]
        if total > 0:
            r = u[i] * total
            pick = eligible[-1]
            acc = 0.0
            for j in eligible:
                acc += row[j - 1]
                if r < acc:
                    pick = j
                    break
        else:
            pick = eligible[min(int(u[i] * len(eligible)), len(eligible) - 1)]
        eligible.remove(pick)
        al.append(pick)
        for s in succs[pick]:
            missing[s] -= 1
            if missing[s] == 0:
                insort(eligible, s)

    mod = model.mod.tolist()
    modes = [1] * (J + 2)
    for j in range(1, J + 1):
        row = mod[j - 1]
        k = instance.n_modes(j)
        r = u[J + j - 1]
        m = k
        acc = 0.0
        for idx in range(k):
            acc += row[idx]
            if r < acc:
                m = idx + 1
                break
        modes[j] = m
    return ActivityModeList.from_modes(al, modes)


def rank_select(population, best_p: int) -> list:
    """The ``best_p`` entries with the smallest fitness; earlier entries win ties.

    Entries are ``(aml, fitness, ...)`` tuples.
    """
    order = sorted(range(len(population)), key=lambda i: population[i][1].scalar)
    return [population[i] for i in order[:best_p]]


def update_model(model: ProbabilityModel, elite, alpha: float) -> ProbabilityModel:
    """Move both matrices towards the elite's empirical frequencies by ``alpha``."""
    J = model.act.shape[0]
    if not elite:
        raise ValueError("update_model needs at least one elite individual")
    counts_act = np.zeros_like(model.act)
    counts_mod = np.zeros_like(model.mod)
    positions = np.arange(J)
    for aml in elite:
        al = np.asarray(aml.al, dtype=np.intp) - 1
        ml = np.asarray(aml.ml, dtype=np.intp) - 1
        counts_act[positions, al] += 1.0
        counts_mod[al, ml] += 1.0
    w = alpha / len(elite)
    act = (1.0 - alpha) * model.act + w * counts_act
    mod = (1.0 - alpha) * model.mod + w * counts_mod
    return ProbabilityModel(act, mod, model.t + 1)


def run_solver(instance: ProjectInstance, params: SolverParams | None = None) -> SolveResult:
    """Solve one instance. The instance is reduced first; results use its original mode ids.

    All randomness comes from ``numpy.random.default_rng(params.seed)``,
    consumed in this order each generation: population sampling, then the
    local-search draws of each elite member in rank order.
    """
    params = params or SolverParams()
    params.check()
    t0 = time.perf_counter()
    try:
        red, report = reduce_instance(instance)
    except InfeasibleInstance as exc:
        raise NoFeasibleModeAssignment(str(exc)) from exc

    rng = np.random.default_rng(params.seed)
    model = init_model(red)
    counter = ScheduleCounter()
    budget = params.max_schedules
    stop_at = t0 + params.time_limit if params.time_limit is not None else None
    P, best_p = params.pop_size, params.elite_size

    def exhausted():
        if budget is not None and counter.count >= budget:
            return True
        return stop_at is not None and time.perf_counter() >= stop_at

    best = None
    history = []

    def consider(aml, sched, fit):
        nonlocal best
        if best is None or fit.scalar < best[1].scalar:
            best = (aml, fit, sched)

    generations = 0
    while best is None or not exhausted():
        population = []
        for _ in range(P):
            if best is not None and exhausted():
                break
            aml = sample_individual(model, red, rng)
            sched = decode_forward(aml, red, counter)
            fit = fitness_of(sched, red)
            consider(aml, sched, fit)
            population.append((aml, fit, sched))
        if len(population) < P:
            break
        generations += 1

        elite = rank_select(population, best_p)
        if params.use_mdj:
            for k, (aml, fit, sched) in enumerate(elite):
                if exhausted():
                    break
                left = None if budget is None else budget - counter.count
                aml, sched = double_justify(aml, red, left, counter=counter, schedule=sched)
                fit = fitness_of(sched, red)
                consider(aml, sched, fit)
                elite[k] = (aml, fit, sched)
        if params.use_dirw:
            for k, (aml, fit, sched) in enumerate(elite):
                aml = dirw_pass(aml, red, params.rw, rng, skip_last=params.dirw_skip_last)
                if not exhausted():
                    sched = decode_forward(aml, red, counter)
                    fit = fitness_of(sched, red)
                    consider(aml, sched, fit)
                elite[k] = (aml, fit, sched)

        model = update_model(model, [e[0] for e in elite], params.alpha)
        history.append(best[1].scalar)

    aml, fit, sched = best
    orig_modes = tuple(red.original_mode_id(j, m) for j, m in enumerate(sched.modes))
    result = SolveResult(
        aml=ActivityModeList.from_modes(aml.al, orig_modes),
        schedule=Schedule(sched.start, sched.finish, orig_modes, sched.makespan, sched.nonrenewable_excess, sched.feasible),
        fitness=fit,
        feasible_found=fit.feasible,
        schedules_generated=counter.count,
        generations=generations,
        seed=params.seed,
        wall_time=time.perf_counter() - t0,
        reduction=report,
        history=history,
    )
    logger.debug(
        "%s: fitness %.3f after %d schedules, %d generations",
        instance.name, fit.scalar, counter.count, generations,
    )
    return result
