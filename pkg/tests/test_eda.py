import itertools
import math

import numpy as np
import pytest

from helpers import build, reduced
from mrcpsp_eda.eda import (
    ProbabilityModel,
    SolverParams,
    init_model,
    rank_select,
    run_solver,
    sample_individual,
    update_model,
)
from mrcpsp_eda.errors import BudgetZero, NoFeasibleModeAssignment
from mrcpsp_eda.schedule import ActivityModeList, FitnessValue

FREE = (1, (0,), (0,))


def test_init_uniform():
    inst = build([[FREE]] * 10, [], [1], [1])
    m = init_model(inst)
    assert m.act.shape == (10, 10)
    assert np.allclose(m.act, 0.1)
    assert m.t == 0


def test_init_mode_rows():
    inst = build([[FREE, (2, (0,), (0,)), (3, (0,), (0,))], [FREE]], [], [1], [1])
    m = init_model(inst)
    assert np.allclose(m.mod[0], [1 / 3] * 3)
    assert np.allclose(m.mod[1], [1.0, 0, 0])


def test_chain_forces_order():
    inst = build([[FREE]] * 2, [(1, 2)], [1], [1])
    model = ProbabilityModel(np.array([[0.0, 1.0], [1.0, 0.0]]), np.ones((2, 1)), 0)
    rng = np.random.default_rng(0)
    assert all(sample_individual(model, inst, rng).al == (1, 2) for _ in range(50))


def test_two_independent_equally_likely():
    inst = build([[FREE]] * 2, [], [1], [1])
    rng = np.random.default_rng(1)
    n = 10_000
    first = sum(sample_individual(init_model(inst), inst, rng).al[0] == 1 for _ in range(n))
    assert abs(first - n / 2) < 3 * math.sqrt(n / 4)


def _expected_distribution(act, inst):
    """Probability of every activity list under eligible-set renormalisation."""
    J = inst.n_jobs
    out = {}
    for perm in itertools.permutations(range(1, J + 1)):
        p, placed = 1.0, set()
        for i, j in enumerate(perm):
            elig = [a for a in range(1, J + 1) if a not in placed and set(inst.real_predecessors[a]) <= placed]
            if j not in elig:
                p = 0.0
                break
            mass = sum(act[i][a - 1] for a in elig)
            p *= act[i][j - 1] / mass if mass > 0 else 1 / len(elig)
            placed.add(j)
        if p:
            out[perm] = p
    return out


def test_sampling_matches_renormalised_distribution():
    inst = build([[FREE], [FREE, (2, (0,), (0,))], [FREE], [FREE]], [(1, 3)], [1], [1])
    act = np.array([[0.1, 0.2, 0.3, 0.4], [0.4, 0.3, 0.2, 0.1], [0.0, 0.5, 0.5, 0.0], [0.25, 0.25, 0.25, 0.25]])
    mod = np.array([[1.0, 0], [0.3, 0.7], [1.0, 0], [1.0, 0]])
    model = ProbabilityModel(act, mod, 0)
    expected = _expected_distribution(act.tolist(), inst)
    rng = np.random.default_rng(2024)
    n = 10_000
    counts, mode2 = {}, 0
    for _ in range(n):
        aml = sample_individual(model, inst, rng)
        assert aml.violations(inst) == []
        counts[aml.al] = counts.get(aml.al, 0) + 1
        mode2 += aml.mode_vector(6)[2] == 2
    assert set(counts) <= set(expected)
    for perm, p in expected.items():
        assert abs(counts.get(perm, 0) - n * p) <= 3 * math.sqrt(n * p * (1 - p)) + 1
    chi2 = sum((counts.get(k, 0) - n * p) ** 2 / (n * p) for k, p in expected.items())
    # 99.9th percentile of chi-square with len-1 degrees of freedom, generous bound
    assert chi2 < 3 * len(expected) + 30
    assert abs(mode2 - 0.7 * n) < 3 * math.sqrt(n * 0.21)


def test_zero_mass_falls_back_to_uniform():
    inst = build([[FREE]] * 2, [], [1], [1])
    model = ProbabilityModel(np.array([[0.0, 0.0], [0.5, 0.5]]), np.ones((2, 1)), 0)
    rng = np.random.default_rng(3)
    firsts = {sample_individual(model, inst, rng).al[0] for _ in range(200)}
    assert firsts == {1, 2}


def _pop(values):
    return [(f"ind{i}", FitnessValue(v, True)) for i, v in enumerate(values)]


def test_rank_select_stable():
    chosen = rank_select(_pop([5, 3, 9, 3]), 2)
    assert [c[0] for c in chosen] == ["ind1", "ind3"]


def test_rank_select_all():
    pop = _pop([5, 3, 9])
    assert len(rank_select(pop, 3)) == 3


def test_rank_select_infeasible_least_violating():
    pop = [("a", FitnessValue(70.0, False)), ("b", FitnessValue(55.0, False)), ("c", FitnessValue(60.0, False))]
    assert [c[0] for c in rank_select(pop, 2)] == ["b", "c"]


def _two_model():
    return ProbabilityModel(np.full((2, 2), 0.5), np.ones((2, 1)), 0)


def test_update_half_rate():
    elite = [ActivityModeList((2, 1), (1, 1))] * 3
    new = update_model(_two_model(), elite, 0.5)
    assert np.allclose(new.act[0], [0.25, 0.75])
    assert new.t == 1


def test_update_zero_rate():
    m = _two_model()
    new = update_model(m, [ActivityModeList((2, 1), (1, 1))], 0.0)
    assert np.array_equal(new.act, m.act) and np.array_equal(new.mod, m.mod)


def test_update_full_rate():
    elite = [ActivityModeList((2, 1), (1, 1)), ActivityModeList((1, 2), (1, 1))] * 2 + [ActivityModeList((2, 1), (1, 1))]
    new = update_model(_two_model(), elite, 1.0)
    assert np.allclose(new.act, [[0.4, 0.6], [0.6, 0.4]])


def test_single_activity_solved_first_generation():
    inst = build([[(4, (1,), (1,)), (2, (1,), (1,)), (3, (1,), (1,))]], [], [1], [1])
    res = run_solver(inst, SolverParams(seed=3))
    assert res.makespan == 2
    assert res.history[0] == 2
    assert res.aml.ml == (2,)


def test_solver_deterministic():
    inst = reduced(42, 6)
    a = run_solver(inst, SolverParams(seed=9, max_schedules=1500))
    b = run_solver(inst, SolverParams(seed=9, max_schedules=1500))
    assert a.record() == b.record()
    assert a.history == b.history


def test_incumbent_monotone_and_budget():
    inst = reduced(8, 6)
    params = SolverParams(seed=1, max_schedules=3000)
    res = run_solver(inst, params)
    assert all(x >= y for x, y in zip(res.history, res.history[1:]))
    # overshoot bounded by one in-flight justification pass
    assert res.schedules_generated <= params.max_schedules + 1


def test_result_uses_original_modes():
    # mode 1 is never executable, so reduction renumbers the survivors
    inst = build([[(1, (9,), (0,)), (5, (1,), (0,)), (3, (1,), (0,))]], [], [1], [1])
    res = run_solver(inst, SolverParams(seed=0, max_schedules=200))
    assert res.aml.ml == (3,)
    assert res.schedule.modes[1] == 3


def test_time_limit_stops():
    inst = reduced(2, 6)
    res = run_solver(inst, SolverParams(max_schedules=None, time_limit=0.2))
    assert res.wall_time < 5
    assert res.generations >= 1


def test_budget_errors():
    inst = reduced(1)
    with pytest.raises(BudgetZero):
        run_solver(inst, SolverParams(max_schedules=0))
    with pytest.raises(BudgetZero):
        run_solver(inst, SolverParams(max_schedules=None))


def test_infeasible_instance_raises():
    inst = build([[(1, (0,), (5,))], [(1, (0,), (5,))]], [], [1], [8])
    with pytest.raises(NoFeasibleModeAssignment):
        run_solver(inst)


def test_model_rows_stay_stochastic():
    inst = reduced(4, 6)
    rng = np.random.default_rng(0)
    m = init_model(inst)
    for _ in range(200):
        elite = [sample_individual(m, inst, rng) for _ in range(rng.integers(1, 6))]
        m = update_model(m, elite, float(rng.random()))
    assert np.allclose(m.act.sum(axis=1), 1, atol=1e-9)
    assert np.allclose(m.mod.sum(axis=1), 1, atol=1e-9)
    assert (m.act >= 0).all() and (m.mod >= 0).all()
