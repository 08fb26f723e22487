from fractions import Fraction

import hypothesis
import hypothesis.strategies as st
import pytest

from twovalue_nsw import Allocation, Instance

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=500, deadline=None)
hypothesis.settings.load_profile("default")


@pytest.fixture
def i1():
    """Two agents, five goods, p=5; only agent 0 values goods 0 and 1 heavily."""
    return Instance(2, 5, 5, [(0, 0), (0, 1)])


@pytest.fixture
def overlap():
    return Instance(2, 3, 2, [(0, 0), (0, 1), (1, 1), (1, 2)])


@pytest.fixture
def i3():
    return Instance(2, 2, 2, [(0, 0), (0, 1)])


@pytest.fixture
def i4():
    return Instance(2, 5, Fraction(3, 2), [(0, 0), (0, 1), (1, 0), (1, 1)])


@st.composite
def instances(draw, max_n=4, max_m=6, ps=(2, 3, 5), min_n=1, min_m=0, m_at_least_n=False):
    n = draw(st.integers(min_n, max_n))
    lo = max(min_m, n) if m_at_least_n else min_m
    m = draw(st.integers(lo, max(lo, max_m)))
    p = draw(st.sampled_from(ps))
    pairs = [(i, g) for i in range(n) for g in range(m)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Instance(n, m, p, [e for e, keep in zip(pairs, mask) if keep])


@st.composite
def instance_and_allocation(draw, complete=False, **kw):
    inst = draw(instances(**kw))
    choices = st.integers(0, inst.n - 1) if complete else st.one_of(st.none(), st.integers(0, inst.n - 1))
    owner = draw(st.lists(choices, min_size=inst.m, max_size=inst.m))
    return inst, Allocation(owner)


@st.composite
def heavy_only_allocation(draw, inst):
    owner = []
    for g in range(inst.m):
        agents = inst.heavy_agents_of[g]
        owner.append(draw(st.sampled_from((None,) + agents)))
    return Allocation(owner)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" or "test_acceptance.py" not in rep.nodeid:
                continue
            detail = dict(rep.user_properties).get("criterion", rep.nodeid.split("::")[-1])
            lines.append((rep.nodeid, f"[{'PASS' if outcome == 'passed' else 'FAIL'}] {detail}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
