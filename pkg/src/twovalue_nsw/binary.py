"""Heavy-only phase: leximax multi-matching of heavy goods.

The heavy graph is viewed as directed: an allocated heavy edge points from
the good to its owner, an unallocated heavy edge from the agent to the good.
An improving path is a directed agent-to-agent path whose end agent holds at
least two more heavy goods than its start agent; reversing it moves one good
along each step and evens the two endpoint degrees by one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .core import (
    UNASSIGNED,
    Allocation,
    AlternatingPath,
    Instance,
    UsageError,
    heavy_degrees,
    is_heavy_only,
)


@dataclass(frozen=True)
class SaturatedGroup:
    agents: frozenset[int]
    goods: frozenset[int]
    min_degree: int


def max_heavy_multimatching(instance: Instance) -> Allocation:
    """Give every heavy good to its lowest-id heavy agent."""
    return Allocation(agents[0] if agents else UNASSIGNED for agents in instance.heavy_agents_of)


def balanced_heavy_start(instance: Instance) -> Allocation:
    """Maximum-cardinality start that hands each heavy good (ascending id) to
    its currently least-loaded heavy agent, lowest id on ties.

    Any maximum multi-matching is a valid start for augmentation; this one
    usually leaves few improving paths on dense instances.
    """
    deg = [0] * instance.n
    owner: list = [UNASSIGNED] * instance.m
    for g, agents in enumerate(instance.heavy_agents_of):
        if not agents:
            continue
        best = min(agents, key=lambda a: (deg[a], a))
        owner[g] = best
        deg[best] += 1
    return Allocation(owner)


def _search(instance: Instance, owner: list, deg: list[int],
            active: Optional[list[bool]] = None, levels=None):
    """Breadth-first search for an improving path.

    Sources are processed one degree level at a time, ascending. Agents
    reached from a failed level form a closed set whose degrees are at most
    level + 1, so they are never re-expanded from a higher level.

    Returns ``(agents, goods)`` of the path, or ``(None, reached_agents)``
    when the first searched level fails and ``levels`` is limited to it.
    """
    n = instance.n
    adj = instance.heavy_goods_of
    seen_agent = [False] * n
    seen_good: dict[int, int] = {}
    agent_via: dict[int, int] = {}
    if active is None:
        live = range(n)
    else:
        live = [i for i in range(n) if active[i]]
    if levels is None:
        levels = sorted({deg[i] for i in live})
    for d in levels:
        sources = [i for i in live if deg[i] == d and not seen_agent[i]]
        if not sources:
            continue
        reached = list(sources)
        for s in sources:
            seen_agent[s] = True
        queue = deque(sources)
        while queue:
            a = queue.popleft()
            for g in adj[a]:
                if g in seen_good:
                    continue
                b = owner[g]
                if b == a or b is UNASSIGNED or (active is not None and not active[b]):
                    continue
                seen_good[g] = a
                if seen_agent[b]:
                    continue
                seen_agent[b] = True
                agent_via[b] = g
                reached.append(b)
                if deg[b] >= d + 2:
                    agents = [b]
                    goods = []
                    while b in agent_via:
                        g = agent_via[b]
                        goods.append(g)
                        b = seen_good[g]
                        agents.append(b)
                    agents.reverse()
                    goods.reverse()
                    return agents, goods
                queue.append(b)
        if len(levels) == 1:
            return None, reached
    return None, None


def _augment(owner: list, deg: list[int], agents: list[int], goods: list[int]) -> None:
    for prev, g in zip(agents, goods):
        owner[g] = prev
    deg[agents[0]] += 1
    deg[agents[-1]] -= 1


def find_improving_path(instance: Instance, allocation: Allocation) -> Optional[AlternatingPath]:
    """Shortest improving heavy alternating path, or ``None`` if there is none."""
    allocation.validate(instance)
    owner = list(allocation.owner)
    deg = heavy_degrees(instance, allocation)
    agents, goods = _search(instance, owner, deg)
    if agents is None:
        return None
    return AlternatingPath.from_agents_goods(agents, goods)


def _run_augmentation(instance: Instance, owner: list) -> tuple[list, int]:
    deg = [0] * instance.n
    for g, o in enumerate(owner):
        if o is not UNASSIGNED:
            deg[o] += 1
    steps = 0
    while max(deg, default=0) - min(deg, default=0) >= 2:
        agents, goods = _search(instance, owner, deg)
        if agents is None:
            break
        _augment(owner, deg, agents, goods)
        steps += 1
    return owner, steps


def binary_max_nsw(instance: Instance, start: Optional[Allocation] = None) -> Allocation:
    """Heavy-only allocation maximizing NSW among heavy-only allocations.

    Starts from ``start`` (default :func:`balanced_heavy_start`), which must be
    a heavy-only allocation assigning every heavy good, and augments improving
    paths until none remain. The resulting heavy-degree profile is leximax
    among maximum-cardinality heavy-only allocations.
    """
    if start is None:
        start = balanced_heavy_start(instance)
    else:
        start.validate(instance)
        if not is_heavy_only(instance, start):
            raise UsageError("start allocation must be heavy-only")
        if any(o is UNASSIGNED and instance.heavy_agents_of[g] for g, o in enumerate(start.owner)):
            raise UsageError("start allocation must assign every heavy good")
    owner, _ = _run_augmentation(instance, list(start.owner))
    return Allocation(owner)


def binary_max_nsw_fast(instance: Instance) -> tuple[Allocation, list[SaturatedGroup]]:
    """Phase 1 by repeated search from minimum-degree agents, peeling saturated groups.

    Each round searches from every active agent of minimum heavy degree. A hit
    is augmented; a miss closes the reached agents into a group whose bundles
    differ by at most one, and those agents and their goods leave the graph.
    """
    owner = list(max_heavy_multimatching(instance).owner)
    deg = [0] * instance.n
    for o in owner:
        if o is not UNASSIGNED:
            deg[o] += 1
    active = [True] * instance.n
    groups: list[SaturatedGroup] = []
    remaining = instance.n
    while remaining:
        d = min(deg[i] for i in range(instance.n) if active[i])
        agents, extra = _search(instance, owner, deg, active=active, levels=[d])
        if agents is not None:
            _augment(owner, deg, agents, extra)
            continue
        members = frozenset(extra)
        goods = frozenset(g for g, o in enumerate(owner) if o in members)
        groups.append(SaturatedGroup(members, goods, d))
        for i in members:
            active[i] = False
        remaining -= len(members)
    return Allocation(owner), groups


def peel_heavy(instance: Instance, allocation: Allocation) -> Allocation:
    """Drop the lowest-id good of the lowest-id agent with maximum heavy degree."""
    allocation.validate(instance)
    if len(allocation) == 0:
        raise UsageError("cannot peel an empty allocation")
    if not is_heavy_only(instance, allocation):
        raise UsageError("peel_heavy expects a heavy-only allocation")
    deg = heavy_degrees(instance, allocation)
    top = max(deg)
    agent = deg.index(top)
    good = allocation.owner.index(agent)
    owner = list(allocation.owner)
    owner[good] = UNASSIGNED
    return Allocation(owner)
