"""Fairness/efficiency predicates and structural checkers for allocations.

Every predicate returns a :class:`Check`; a failed check carries a witness.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, NamedTuple, Optional, Sequence

from .core import (
    UNASSIGNED,
    Allocation,
    AlternatingPath,
    Edge,
    Instance,
    UsageError,
    heavy_degrees,
    heavy_part,
    is_heavy_only,
    nsw_product,
    utility_vector,
    welfare_key,
)
from .oracle import DEFAULT_MAX_STATES, brute_force_heavy_profiles, brute_force_pareto_dominated


class Check(NamedTuple):
    ok: bool
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok


def _require_complete(instance: Instance, allocation: Allocation) -> None:
    allocation.validate(instance)
    if not allocation.complete:
        raise UsageError("fairness checks need a complete allocation")


def _envy_slack(instance: Instance, allocation: Allocation, drop_best: bool) -> Check:
    _require_complete(instance, allocation)
    bundles = allocation.bundles(instance.n)
    own = utility_vector(instance, allocation)
    for i in range(instance.n):
        for j in range(instance.n):
            if i == j or not bundles[j]:
                continue
            vals = [instance.value(i, g) for g in bundles[j]]
            removed = max(vals) if drop_best else min(vals)
            if own[i] < sum(vals) - removed:
                return Check(False, (i, j))
    return Check(True)


def is_ef1(instance: Instance, allocation: Allocation) -> Check:
    """Envy-free up to the single most valuable good of the envied bundle."""
    return _envy_slack(instance, allocation, drop_best=True)


def is_efx(instance: Instance, allocation: Allocation) -> Check:
    """Envy-free after removing any single good from the envied bundle."""
    return _envy_slack(instance, allocation, drop_best=False)


def is_pareto_optimal(instance: Instance, allocation: Allocation,
                      max_states: int = DEFAULT_MAX_STATES) -> Check:
    dominator = brute_force_pareto_dominated(instance, allocation, max_states=max_states)
    return Check(dominator is None, dominator)


@dataclass(frozen=True)
class Decomposition:
    """Edge-disjoint paths and cycles covering ``a xor b``.

    Labels are relative to ``a``: ``in_allocation`` is True on edges of ``a - b``.
    """

    paths: list[AlternatingPath]
    cycles: list[AlternatingPath]

    def edges(self) -> list[tuple[Edge, bool]]:
        return [e for walk in self.paths + self.cycles for e in walk.edges()]


def decompose_difference(instance: Instance, a: Allocation, b: Allocation) -> Decomposition:
    """Split ``a xor b`` of two heavy-only allocations into alternating walks.

    At every agent its k-th a-only edge is paired with its k-th b-only edge
    (both ascending by good id); a good of degree two pairs its two edges.
    Unpaired edge ends are walk endpoints; what is left over closes into cycles.
    """
    for x in (a, b):
        x.validate(instance)
        if not is_heavy_only(instance, x):
            raise UsageError("decompose_difference expects heavy-only allocations")
    ea, eb = a.edges(), b.edges()
    side = {e: True for e in ea - eb}
    side.update({e: False for e in eb - ea})

    at_agent: dict[Edge, Optional[Edge]] = {}
    at_good: dict[Edge, Optional[Edge]] = {}
    per_agent: dict[int, tuple[list[Edge], list[Edge]]] = {}
    per_good: dict[int, list[Edge]] = {}
    for e in sorted(side):
        per_agent.setdefault(e[0], ([], []))[0 if side[e] else 1].append(e)
        per_good.setdefault(e[1], []).append(e)
    for only_a, only_b in per_agent.values():
        for k, e in enumerate(only_a):
            at_agent[e] = only_b[k] if k < len(only_b) else None
        for k, e in enumerate(only_b):
            at_agent[e] = only_a[k] if k < len(only_a) else None
    for es in per_good.values():
        if len(es) == 1:
            at_good[es[0]] = None
        else:
            at_good[es[0]], at_good[es[1]] = es[1], es[0]

    def walk(e: Edge, from_agent: bool) -> tuple[list, list]:
        nodes = [("a", e[0])] if from_agent else [("g", e[1])]
        labels = []
        start = e
        while e is not None:
            seen.add(e)
            labels.append(side[e])
            if from_agent:
                nodes.append(("g", e[1]))
                e = at_good[e]
            else:
                nodes.append(("a", e[0]))
                e = at_agent[e]
            from_agent = not from_agent
            if e == start:
                break
        return nodes, labels

    seen: set[Edge] = set()
    paths, cycles = [], []
    for e in sorted(side):
        if e in seen:
            continue
        if at_agent[e] is None:
            paths.append(AlternatingPath(*map(tuple, walk(e, True))))
        elif at_good[e] is None:
            paths.append(AlternatingPath(*map(tuple, walk(e, False))))
    for e in sorted(side):
        if e not in seen:
            cycles.append(AlternatingPath(*map(tuple, walk(e, True))))
    return Decomposition(paths, cycles)


def path_end_counts(decomposition: Decomposition) -> dict[int, tuple[int, int]]:
    """Per agent: (#walk ends on an a-side edge, #walk ends on a b-side edge)."""
    out: dict[int, list[int]] = {}
    for path in decomposition.paths:
        edges = list(path.edges())
        ends = []
        if path.nodes[0][0] == "a":
            ends.append((path.nodes[0][1], edges[0][1]))
        if path.nodes[-1][0] == "a":
            ends.append((path.nodes[-1][1], edges[-1][1]))
        for agent, in_a in ends:
            out.setdefault(agent, [0, 0])[0 if in_a else 1] += 1
    return {k: tuple(v) for k, v in out.items()}


def replay_moves(start: Allocation, moves: Sequence) -> Iterator[tuple[Allocation, Any, Allocation]]:
    """Yield ``(before, move, after)`` for a phase-3 move trace."""
    cur = start
    for mv in moves:
        owner = list(cur.owner)
        owner[mv.good] = mv.to_agent
        nxt = Allocation(owner)
        yield cur, mv, nxt
        cur = nxt


def check_phase3_invariants(instance: Instance, before: Allocation, move, after: Allocation,
                            order: Sequence[int], use_oracle: bool = False) -> list[str]:
    """Violations of the phase-3 invariants for one move; empty means all hold.

    ``order`` is the agent numbering frozen at phase-3 entry. Checked: the
    frozen order stays sorted by utility (a), bundles holding a good light for
    their owner sit within one of the minimum (b), the donor's goods are all
    heavy for it and light for the receiver (d), and welfare strictly grows
    under :func:`welfare_key`, so moves out of a zero product still count.
    With ``use_oracle`` the heavy part is also compared to the brute-force
    leximax profile at its cardinality (c).
    """
    problems: list[str] = []
    t, k, g = move.from_agent, move.to_agent, move.good
    if before.owner[g] != t:
        problems.append(f"move: good {g} not held by agent {t} before the move")
    expected = list(before.owner)
    expected[g] = k
    if tuple(expected) != after.owner:
        problems.append("move: allocation after differs from before plus the move")

    u = utility_vector(instance, after)
    for x, y in zip(order, order[1:]):
        if u[x] > u[y]:
            problems.append(f"a: agent {x} (u={u[x]}) above agent {y} (u={u[y]}) in frozen order")
            break

    low = u[order[0]]
    for g2, o in enumerate(after.owner):
        if o is not UNASSIGNED and (o, g2) not in instance.heavy and u[o] > low + 1:
            problems.append(f"b: agent {o} holds light good {g2} with u={u[o]} > min+1={low + 1}")
            break

    for h, o in enumerate(before.owner):
        if o != t:
            continue
        if (t, h) not in instance.heavy:
            problems.append(f"d: donor {t} holds good {h} that is light for it")
        if (k, h) in instance.heavy:
            problems.append(f"d: good {h} of donor {t} is heavy for receiver {k}")

    pb, pa = nsw_product(instance, before), nsw_product(instance, after)
    kb = welfare_key(utility_vector(instance, before))
    ka = welfare_key(utility_vector(instance, after))
    if not ka > kb:
        problems.append(f"strict: welfare did not increase ({kb} -> {ka})")
    if getattr(move, "product_before", None) is not None and move.product_before != pb:
        problems.append("trace: recorded product_before disagrees with recomputation")
    if getattr(move, "product_after", None) is not None and move.product_after != pa:
        problems.append("trace: recorded product_after disagrees with recomputation")

    if use_oracle:
        hp = heavy_part(instance, after)
        ref = brute_force_heavy_profiles(instance)
        got = tuple(sorted(heavy_degrees(instance, hp)))
        if ref.get(len(hp)) != got:
            problems.append(f"c: heavy profile {got} not leximax {ref.get(len(hp))}")
    return problems


def phase3_terminated(instance: Instance, allocation: Allocation, order: Sequence[int]) -> bool:
    """Loop exit condition: last agent's utility is at most p * (first + 1)."""
    u = utility_vector(instance, allocation)
    p = instance.heavy_value
    return u[order[-1]] <= p * u[order[0]] + p


def reachable_agents(instance: Instance, allocation: Allocation, agent: int) -> set[int]:
    """Agents reachable from ``agent`` by a heavy alternating path that leaves
    ``agent`` on a non-allocation edge and enters each good's owner on its
    allocation edge. Along such a path every agent could pass one good back."""
    owner = allocation.owner
    seen = {agent}
    seen_goods: set[int] = set()
    queue = deque([agent])
    while queue:
        a = queue.popleft()
        for g in instance.heavy_goods_of[a]:
            b = owner[g]
            if g in seen_goods or b == a or b is UNASSIGNED or (b, g) not in instance.heavy:
                continue
            seen_goods.add(g)
            if b not in seen:
                seen.add(b)
                queue.append(b)
    seen.discard(agent)
    return seen


def light_goods_only_near_minimum(instance: Instance, allocation: Allocation) -> Check:
    """Only bundles at the minimum utility or one above hold goods light for their owner."""
    u = utility_vector(instance, allocation)
    low = min(u)
    for g, o in enumerate(allocation.owner):
        if o is not UNASSIGNED and (o, g) not in instance.heavy and u[o] > low + 1:
            return Check(False, (o, g))
    return Check(True)


def no_steep_heavy_path(instance: Instance, allocation: Allocation) -> Check:
    """No heavy alternating path lets a bundle pass heavy value to one poorer by more than p."""
    u = utility_vector(instance, allocation)
    p = instance.heavy_value
    for i in range(instance.n):
        for j in reachable_agents(instance, allocation, i):
            if u[j] > u[i] + p:
                return Check(False, (j, i))
    return Check(True)


def wasted_heavy_swap(instance: Instance, allocation: Allocation) -> Optional[tuple[int, int, int, int]]:
    """Find ``(i, g, j, h)``: ``g`` is light for owner ``i`` but heavy for ``j``,
    who holds ``h`` that is light for ``j``. Swapping ``g`` and ``h`` is a
    Pareto improvement."""
    bundles = allocation.bundles(instance.n)
    for g, i in enumerate(allocation.owner):
        if i is UNASSIGNED or (i, g) in instance.heavy:
            continue
        for j in instance.heavy_agents_of[g]:
            for h in bundles[j]:
                if (j, h) not in instance.heavy:
                    return i, g, j, h
    return None


def greedy_complete(instance: Instance, base: Allocation, goods: Iterable[int]) -> Allocation:
    """Give each of ``goods`` in turn to some agent of currently minimum utility."""
    u = list(utility_vector(instance, base))
    heap = [(u[i], i) for i in range(instance.n)]
    heapq.heapify(heap)
    owner = list(base.owner)
    for g in goods:
        util, i = heapq.heappop(heap)
        owner[g] = i
        heapq.heappush(heap, (util + instance.value(i, g), i))
    return Allocation(owner)
