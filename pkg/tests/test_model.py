import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import DATA, build
from mrcpsp_eda.errors import InfeasibleInstance
from mrcpsp_eda.model import generate_tiny_instance, reduce_instance, validate_instance
from mrcpsp_eda.psplib_io import read_instance


def test_valid_j10_layout():
    assert validate_instance(read_instance(DATA / "j10_layout.mm")) == []


def test_non_topological_pair():
    inst = build([[(1, (0,), (0,))]] * 5, [(5, 3)], [1], [1])
    assert any("non-topological" in v for v in validate_instance(inst))


def test_cycle():
    inst = build([[(1, (0,), (0,))]] * 2, [(1, 2), (2, 1)], [1], [1])
    problems = validate_instance(inst)
    assert any("cycle" in v for v in problems)


def test_bad_dummy_and_negative_values():
    inst = build([[(-1, (0,), (0,))]], [], [-1], [1])
    problems = validate_instance(inst)
    assert any("negative duration" in v for v in problems)
    assert any("negative resource capacity" in v for v in problems)


def test_generator_is_deterministic():
    assert generate_tiny_instance(7, 4) == generate_tiny_instance(7, 4)
    assert generate_tiny_instance(7, 4).n_jobs == 4


def test_generator_single_activity():
    inst = generate_tiny_instance(3, 1)
    assert inst.n_jobs == 1
    assert validate_instance(inst) == []


def test_generated_instances_validate():
    for seed in range(100):
        inst = generate_tiny_instance(seed)
        assert validate_instance(inst) == []
        assert (inst.n_renewable, inst.n_nonrenewable) == (2, 2)
        assert all(1 <= m.duration <= 10 for ms in inst.modes[1:-1] for m in ms)


def test_generator_rejects_large():
    with pytest.raises(ValueError):
        generate_tiny_instance(0, 8)


def test_inefficient_mode_removed():
    # same duration, second mode asks for less nonrenewable
    inst = build([[(3, (2,), (2,)), (3, (2,), (1,))], [(1, (0,), (5,)), (1, (0,), (6,))]], [], [4], [7])
    red, rep = reduce_instance(inst)
    assert (1, 1) in rep.removed_inefficient_modes
    assert red.n_modes(1) == 1
    assert red.mode_origin[1] == (2,)


def test_nonexecutable_renewable():
    inst = build([[(2, (5,), (0,)), (4, (4,), (1,))]], [], [4], [10])
    _, rep = reduce_instance(inst)
    assert (1, 1) in rep.removed_nonexecutable_modes


def test_nonexecutable_nonrenewable_strong_form():
    # mode 1 of activity 1 needs 6; activity 2 needs at least 5; capacity 10
    inst = build(
        [[(1, (0,), (6,)), (5, (0,), (3,))], [(2, (0,), (5,)), (1, (0,), (7,))]],
        [],
        [1],
        [10],
    )
    _, rep = reduce_instance(inst)
    assert (1, 1) in rep.removed_nonexecutable_modes


def test_redundant_nonrenewable():
    # resource 1: sum of per-activity maxima = 4 + 3 = 7 <= 10; resource 2 stays binding
    inst = build(
        [[(2, (0,), (4, 1)), (1, (0,), (2, 9))], [(3, (0,), (3, 9)), (5, (0,), (3, 0))]], [], [1], [10, 10]
    )
    red, rep = reduce_instance(inst)
    assert rep.removed_redundant_nonrenewables == [1]
    assert red.n_nonrenewable == 1
    assert red.nonrenewable_origin == (2,)


def test_duplicate_modes_keep_lowest_id():
    inst = build([[(2, (1,), (1,)), (2, (1,), (1,))]], [], [2], [1])
    red, rep = reduce_instance(inst)
    assert rep.removed_inefficient_modes == [(1, 2)]


def test_infeasible_instance():
    inst = build([[(2, (5,), (0,))]], [], [4], [1])
    with pytest.raises(InfeasibleInstance):
        reduce_instance(inst)


def test_rounds_reported():
    inst = generate_tiny_instance(0)
    _, rep = reduce_instance(inst)
    assert rep.rounds >= 1
    cats = [set(rep.removed_nonexecutable_modes), set(rep.removed_inefficient_modes)]
    assert not cats[0] & cats[1]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_reduction_idempotent_and_monotone(seed):
    inst = generate_tiny_instance(seed)
    red, _ = reduce_instance(inst)
    again, rep = reduce_instance(red)
    assert again == red
    assert not rep.changed
    assert red.precedences == inst.precedences
    assert red.n_nonrenewable <= inst.n_nonrenewable
    assert all(red.n_modes(j) <= inst.n_modes(j) for j in range(len(inst.modes)))
    assert validate_instance(red) == []
