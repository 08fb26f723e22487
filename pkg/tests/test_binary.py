import pytest
from hypothesis import given, strategies as st

from twovalue_nsw import (
    Allocation,
    Instance,
    UsageError,
    apply_path,
    binary_max_nsw,
    binary_max_nsw_fast,
    find_improving_path,
    max_heavy_multimatching,
    peel_heavy,
)
from twovalue_nsw.binary import balanced_heavy_start
from twovalue_nsw.core import heavy_degrees, is_heavy_only
from twovalue_nsw.oracle import brute_force_heavy_profiles

from conftest import instances


def profile(inst, alloc):
    return tuple(sorted(heavy_degrees(inst, alloc)))


def test_max_heavy_multimatching_examples(overlap, i1):
    a = max_heavy_multimatching(overlap)
    assert a.complete and is_heavy_only(overlap, a)
    assert a == Allocation([0, 0, 1])
    assert max_heavy_multimatching(Instance(3, 4, 2)) == Allocation.empty(4)
    assert max_heavy_multimatching(i1) == Allocation([0, 0, None, None, None])


def test_find_improving_path_examples(overlap):
    assert find_improving_path(overlap, Allocation([0, 0, 1])) is None

    both = Instance(2, 2, 3, [(0, 0), (0, 1), (1, 0), (1, 1)])
    path = find_improving_path(both, Allocation([1, 1]))
    assert path is not None
    assert path.nodes == (("a", 0), ("g", 0), ("a", 1))
    assert path.in_allocation == (False, True)
    assert find_improving_path(both, Allocation([0, 1])) is None


def test_find_improving_path_skips_closed_low_level():
    # agent 0 (deg 0) is isolated; agents 1..2 have degrees 1 and 3 and are connected
    inst = Instance(3, 4, 2, [(1, 0), (2, 0), (2, 1), (2, 2), (2, 3), (1, 3)])
    alloc = Allocation([1, 2, 2, 2])
    assert heavy_degrees(inst, alloc) == [0, 1, 3]
    path = find_improving_path(inst, alloc)
    assert path is not None
    assert path.nodes[0] == ("a", 1) and path.nodes[-1] == ("a", 2)


def test_binary_max_nsw_examples(overlap, i1):
    assert profile(overlap, binary_max_nsw(overlap)) == (1, 2)
    # disjoint markets: agent 0 alone with 1 good, agent 1 alone with 3
    split = Instance(2, 4, 2, [(0, 0), (1, 1), (1, 2), (1, 3)])
    assert heavy_degrees(split, binary_max_nsw(split)) == [1, 3]
    assert heavy_degrees(i1, binary_max_nsw(i1)) == [2, 0]


def test_binary_max_nsw_rejects_bad_start(overlap):
    with pytest.raises(UsageError):
        binary_max_nsw(overlap, Allocation([0, None, 1]))
    with pytest.raises(UsageError):
        binary_max_nsw(overlap, Allocation([1, 0, 1]))


def test_fast_examples(overlap):
    alloc, groups = binary_max_nsw_fast(overlap)
    assert profile(overlap, alloc) == (1, 2)
    assert 1 <= len(groups) <= 2
    light = Instance(3, 2, 2)
    alloc, groups = binary_max_nsw_fast(light)
    assert alloc == Allocation.empty(2)
    assert len(groups) == 1
    assert groups[0].agents == {0, 1, 2} and groups[0].min_degree == 0


def test_peel_examples():
    inst = Instance(2, 3, 2, [(0, 0), (0, 1), (1, 1), (1, 2)])
    peeled = peel_heavy(inst, Allocation([0, 1, 1]))
    assert profile(inst, peeled) == (1, 1)
    assert peeled == Allocation([0, None, 1])

    four = Instance(2, 4, 2, [(0, 0), (0, 1), (1, 2), (1, 3), (0, 2)])
    peeled = peel_heavy(four, Allocation([0, 0, 1, 1]))
    assert heavy_degrees(four, peeled) == [1, 2]
    ref = brute_force_heavy_profiles(four)
    assert profile(four, peeled) == ref[3]

    single = Instance(1, 1, 2, [(0, 0)])
    assert peel_heavy(single, Allocation([0])) == Allocation([None])
    with pytest.raises(UsageError):
        peel_heavy(single, Allocation([None]))


def test_peel_rejects_light_edges():
    inst = Instance(2, 1, 2)
    with pytest.raises(UsageError):
        peel_heavy(inst, Allocation([0]))


@given(instances(max_n=5, max_m=7))
def test_binary_matches_oracle(inst):
    ref = brute_force_heavy_profiles(inst, allow_unassigned=False)
    (card, best), = ref.items()
    out = binary_max_nsw(inst)
    assert is_heavy_only(inst, out)
    assert len(out) == card == len(inst.heavy_good_ids())
    assert profile(inst, out) == best
    assert find_improving_path(inst, out) is None
    # either start reaches the same (unique) profile
    assert profile(inst, binary_max_nsw(inst, max_heavy_multimatching(inst))) == best
    assert profile(inst, binary_max_nsw_fast(inst)[0]) == best


@given(instances(max_n=5, max_m=8))
def test_literal_augmentation_loop_potential(inst):
    """Each augmentation lowers the sum of squared degrees by at least 2."""
    alloc = max_heavy_multimatching(inst)
    card = len(alloc)
    pot = sum(d * d for d in heavy_degrees(inst, alloc))
    steps = 0
    while (path := find_improving_path(inst, alloc)) is not None:
        assert path.is_heavy(inst) and len(path) % 2 == 0
        before = heavy_degrees(inst, alloc)
        alloc = apply_path(alloc, path)
        after = heavy_degrees(inst, alloc)
        start, end = path.nodes[0][1], path.nodes[-1][1]
        assert before[start] <= before[end] - 2
        assert after[start] == before[start] + 1 and after[end] == before[end] - 1
        assert all(after[i] == before[i] for i in range(inst.n) if i not in (start, end))
        assert len(alloc) == card
        new_pot = sum(d * d for d in after)
        assert new_pot <= pot - 2
        pot = new_pot
        steps += 1
    assert steps <= inst.m ** 2 / 2
    assert profile(inst, alloc) == profile(inst, binary_max_nsw(inst))


@given(instances(max_n=5, max_m=8))
def test_no_improving_pair_after_binary(inst):
    """Any agent that can pull a good along a heavy path is at most one below the source."""
    from twovalue_nsw.properties import reachable_agents

    out = binary_max_nsw(inst)
    deg = heavy_degrees(inst, out)
    for i in range(inst.n):
        for j in reachable_agents(inst, out, i):
            assert deg[i] >= deg[j] - 1


@given(instances(max_n=5, max_m=8))
def test_fast_groups_are_saturated(inst):
    alloc, groups = binary_max_nsw_fast(inst)
    deg = heavy_degrees(inst, alloc)
    seen = set()
    for grp in groups:
        assert not (grp.agents & seen)
        seen |= grp.agents
        sizes = [deg[i] for i in grp.agents]
        assert max(sizes) - min(sizes) <= 1
        assert min(sizes) == grp.min_degree
        assert grp.goods == {g for g, o in enumerate(alloc.owner) if o in grp.agents}
    assert seen == set(range(inst.n))
    mins = [g.min_degree for g in groups]
    assert mins == sorted(mins)


@given(instances(max_n=4, max_m=7))
def test_peeling_tracks_leximax_at_every_cardinality(inst):
    ref = brute_force_heavy_profiles(inst)
    alloc = binary_max_nsw(inst)
    prev = None
    while True:
        prof = profile(inst, alloc)
        assert prof == ref[len(alloc)]
        if prev is not None:
            assert all(x <= y for x, y in zip(prof, prev))
        prev = prof
        if len(alloc) == 0:
            break
        alloc = peel_heavy(inst, alloc)


def test_balanced_start_is_maximum(overlap):
    a = balanced_heavy_start(overlap)
    assert a.complete and is_heavy_only(overlap, a)
    assert profile(overlap, a) == (1, 2)


@pytest.mark.parametrize("seed", range(5))
def test_fast_agrees_on_medium_instances(seed):
    from twovalue_nsw.fileio import GenSpec, generate

    inst = generate(GenSpec(30, 200, 2, 0.1, seed))
    assert profile(inst, binary_max_nsw(inst)) == profile(inst, binary_max_nsw_fast(inst)[0])
    assert profile(inst, binary_max_nsw(inst)) == profile(inst, binary_max_nsw(inst, max_heavy_multimatching(inst)))
