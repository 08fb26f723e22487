from types import SimpleNamespace

from hypothesis import given, strategies as st

from twovalue_nsw import Allocation, Instance, solve
from twovalue_nsw.properties import (
    Check,
    check_phase3_invariants,
    decompose_difference,
    is_ef1,
    is_efx,
    is_pareto_optimal,
    path_end_counts,
    phase3_terminated,
    replay_moves,
)

from conftest import heavy_only_allocation, instance_and_allocation, instances


def test_check_truthiness():
    assert Check(True) and not Check(False, (0, 1))


def test_ef1_examples(i1):
    assert is_ef1(i1, Allocation([0, 0, 1, 1, 1]))
    light = Instance(2, 3, 2)
    c = is_ef1(light, Allocation([1, 1, 1]))
    assert not c and c.witness == (0, 1)
    assert is_ef1(Instance(1, 4, 3), Allocation([0, 0, 0, 0]))


def test_efx_examples(i3):
    assert is_efx(i3, solve(i3).allocation)
    light = Instance(2, 2, 2)
    c = is_efx(light, Allocation([1, 1]))
    assert not c and c.witness == (0, 1)


def test_efx_stricter_than_ef1():
    # a1 holds one heavy and one light good for a0; dropping the heavy one leaves 1 <= 1
    inst = Instance(2, 3, 3, [(0, 0), (1, 2)])
    alloc = Allocation([1, 1, 0])
    assert is_ef1(inst, alloc)
    assert not is_efx(inst, alloc)


def test_pareto_examples(i1):
    assert is_pareto_optimal(i1, solve(i1).allocation)
    inst = Instance(2, 2, 2, [(0, 0), (1, 1)])
    c = is_pareto_optimal(inst, Allocation([1, 0]))
    assert not c and c.witness == Allocation([0, 1])
    assert is_pareto_optimal(Instance(1, 3, 2), Allocation([0, 0, 0]))


@given(instance_and_allocation(complete=True))
def test_efx_implies_ef1(ia):
    inst, alloc = ia
    if is_efx(inst, alloc):
        assert is_ef1(inst, alloc)


def test_decompose_worked_example():
    inst = Instance(2, 3, 2, [(0, 0), (0, 1), (1, 1), (1, 2)])
    dec = decompose_difference(inst, Allocation([0, 1, None]), Allocation([0, 0, None]))
    assert dec.cycles == []
    (path,) = dec.paths
    assert path.nodes == (("a", 0), ("g", 1), ("a", 1))
    assert path.in_allocation == (False, True)


def test_decompose_trivial_cases(overlap):
    a = Allocation([0, 1, 1])
    dec = decompose_difference(overlap, a, a)
    assert dec.paths == [] and dec.cycles == []
    dec = decompose_difference(overlap, Allocation([0, None, None]), Allocation([None, None, 1]))
    assert len(dec.paths) == 2
    assert all(len(p) == 1 for p in dec.paths)


def test_decompose_finds_cycles():
    inst = Instance(2, 2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)])
    dec = decompose_difference(inst, Allocation([0, 1]), Allocation([1, 0]))
    assert dec.paths == [] and len(dec.cycles) == 1
    assert len(dec.cycles[0]) == 4


@given(instances(max_n=4, max_m=7), st.data())
def test_decomposition_covers_difference(inst, data):
    a = data.draw(heavy_only_allocation(inst))
    b = data.draw(heavy_only_allocation(inst))
    dec = decompose_difference(inst, a, b)
    got = dec.edges()
    assert len(got) == len(set(got))
    assert {e for e, in_a in got if in_a} == a.edges() - b.edges()
    assert {e for e, in_a in got if not in_a} == b.edges() - a.edges()


@given(instances(max_n=4, max_m=7), st.data())
def test_path_end_counts_match_degree_change(inst, data):
    """An agent's surplus of a-edges over b-edges equals its surplus of a-ends over b-ends."""
    from twovalue_nsw.core import heavy_degrees

    a = data.draw(heavy_only_allocation(inst))
    b = data.draw(heavy_only_allocation(inst))
    ends = path_end_counts(decompose_difference(inst, a, b))
    da, db = heavy_degrees(inst, a), heavy_degrees(inst, b)
    for i in range(inst.n):
        ea, eb = ends.get(i, (0, 0))
        assert ea - eb == da[i] - db[i]
        # pairing leaves unmatched ends of only one side at each agent
        assert ea == 0 or eb == 0


def _solver_trace(inst):
    r = solve(inst)
    return r, list(replay_moves(r.phase3_start, r.phase3_moves))


def test_solver_traces_are_clean(i3):
    inst = Instance(3, 3, 2, [(0, 0), (0, 1), (0, 2)])
    for case in (i3, inst):
        r, steps = _solver_trace(case)
        assert steps
        for before, mv, after in steps:
            assert check_phase3_invariants(case, before, mv, after, r.phase3_order, use_oracle=True) == []
        assert phase3_terminated(case, r.allocation, r.phase3_order)


@given(instances(max_n=4, max_m=8, ps=(2, 3, 5, 7), min_n=2, m_at_least_n=True))
def test_random_solver_traces_are_clean(inst):
    r, steps = _solver_trace(inst)
    for before, mv, after in steps:
        assert check_phase3_invariants(inst, before, mv, after, r.phase3_order) == []
    assert phase3_terminated(inst, r.allocation, r.phase3_order)


def test_light_for_donor_move_is_flagged():
    inst = Instance(2, 3, 2, [(0, 0)])
    before = Allocation([0, 0, 0])
    after = Allocation([0, 1, 0])
    mv = SimpleNamespace(good=1, from_agent=0, to_agent=1)
    problems = check_phase3_invariants(inst, before, mv, after, (1, 0))
    assert any(p.startswith("d:") for p in problems)


def test_equal_utility_move_is_flagged():
    inst = Instance(2, 2, 2, [(0, 0), (1, 1)])
    before = Allocation([0, 1])
    after = Allocation([1, 1])
    mv = SimpleNamespace(good=0, from_agent=0, to_agent=1)
    problems = check_phase3_invariants(inst, before, mv, after, (0, 1))
    assert any(p.startswith("strict:") for p in problems)
    assert not any(p.startswith("d:") for p in problems)


def test_inconsistent_move_is_flagged():
    inst = Instance(2, 2, 2)
    mv = SimpleNamespace(good=0, from_agent=1, to_agent=0)
    problems = check_phase3_invariants(inst, Allocation([0, 1]), mv, Allocation([0, 0]), (0, 1))
    assert any(p.startswith("move:") for p in problems)
