"""Exact NSW maximization for integral p, and the rounding approximation for rational p."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .binary import binary_max_nsw
from .core import (
    UNASSIGNED,
    Allocation,
    Instance,
    NswProduct,
    UsageError,
    nsw_product,
    product_of,
    welfare_key,
    utility_profile,
    utility_vector,
)

OPTIMALITY_NOT_CLAIMED = "optimality-not-claimed"


class SolverInvariantError(AssertionError):
    """A phase-3 invariant failed; this signals a solver bug, not bad input."""


@dataclass(frozen=True)
class Move:
    good: int
    from_agent: int
    to_agent: int
    product_before: NswProduct
    product_after: NswProduct


@dataclass
class SolveResult:
    allocation: Allocation
    nsw: NswProduct
    phase3_moves: list[Move]
    profile: tuple
    phase3_order: tuple[int, ...] = ()
    phase3_start: Optional[Allocation] = None
    flags: list[str] = field(default_factory=list)
    utilities: tuple = ()


@dataclass
class ApproxResult:
    allocation: Allocation
    factor: Fraction
    rounded_p: int
    nsw: NswProduct
    inner: SolveResult


def greedy_light_phase(instance: Instance, allocation: Allocation) -> Allocation:
    """Hand out every unassigned good, ascending id, to a minimum-utility agent.

    Among agents tied at the minimum the highest id wins, which is the last
    minimum in a stable ascending (utility, id) ordering.
    """
    u = list(utility_vector(instance, allocation))
    heap = [(u[i], -i) for i in range(instance.n)]
    heapq.heapify(heap)
    owner = list(allocation.owner)
    for g, o in enumerate(owner):
        if o is not UNASSIGNED:
            continue
        util, neg = heapq.heappop(heap)
        agent = -neg
        owner[g] = agent
        heapq.heappush(heap, (util + instance.value(agent, g), neg))
    return Allocation(owner)


def phase3_rebalance(instance: Instance, allocation: Allocation,
                     check: bool = True) -> tuple[Allocation, list[Move], tuple[int, ...]]:
    """Move heavy goods from the richest to the poorest agent while NSW improves.

    The agent numbering is frozen on entry (ascending utility, then id). Each
    round takes ``k`` as the last agent tied with the first and ``t`` as the
    first agent tied with the last, and moves the lowest-id good of ``t`` to
    ``k``. Returns the final allocation, the move trace and the numbering.
    """
    if not instance.is_integral:
        raise UsageError("phase 3 requires integral p")
    if not allocation.complete:
        raise UsageError("phase 3 requires a complete allocation")
    p = instance.heavy_value
    n = instance.n
    u = list(utility_vector(instance, allocation))
    order = tuple(sorted(range(n), key=lambda i: (u[i], i)))
    owner = list(allocation.owner)
    bundles: list[set[int]] = [set() for _ in range(n)]
    for g, o in enumerate(owner):
        bundles[o].add(g)
    moves: list[Move] = []
    if p == 1:
        return Allocation(owner), moves, order

    first, last = order[0], order[-1]
    before = product_of(u)
    key = welfare_key(u)
    while u[last] > p * u[first] + p:
        lo = u[first]
        kk = 0
        while kk + 1 < n and u[order[kk + 1]] == lo:
            kk += 1
        hi = u[last]
        tt = n - 1
        while tt - 1 >= 0 and u[order[tt - 1]] == hi:
            tt -= 1
        k, t = order[kk], order[tt]
        g = min(bundles[t])
        if check:
            for h in bundles[t]:
                if (t, h) not in instance.heavy:
                    raise SolverInvariantError(f"good {h} held by agent {t} is light for it")
                if (k, h) in instance.heavy:
                    raise SolverInvariantError(f"good {h} of agent {t} is heavy for receiver {k}")
        bundles[t].remove(g)
        bundles[k].add(g)
        owner[g] = k
        u[t] -= p
        u[k] += 1
        after = product_of(u)
        if check:
            new_key = welfare_key(u)
            if not new_key > key:
                raise SolverInvariantError(f"move of good {g} did not increase the welfare key")
            key = new_key
            if any(u[order[j]] > u[order[j + 1]] for j in (kk - 1, kk, tt - 1, tt) if 0 <= j < n - 1):
                raise SolverInvariantError("phase-3 ordering broken")
        moves.append(Move(g, t, k, before, after))
        before = after
    return Allocation(owner), moves, order


def _solve_integral(instance: Instance, check: bool = True) -> SolveResult:
    if instance.p == 1:
        phase1 = Allocation.empty(instance.m)
    else:
        phase1 = binary_max_nsw(instance)
    phase2 = greedy_light_phase(instance, phase1)
    final, moves, order = phase3_rebalance(instance, phase2, check=check)
    u = utility_vector(instance, final)
    flags = [OPTIMALITY_NOT_CLAIMED] if instance.m < instance.n else []
    return SolveResult(
        allocation=final,
        nsw=product_of(u),
        phase3_moves=moves,
        profile=utility_profile(u),
        phase3_order=order,
        phase3_start=phase2,
        flags=flags,
        utilities=u,
    )


def solve(instance: Instance, check: bool = True) -> SolveResult:
    """Maximum-NSW complete allocation for integral ``p >= 1``.

    ``check`` keeps the per-move invariant assertions on; they cost one pass
    over the donor bundle per move.
    """
    if not instance.is_integral:
        raise UsageError(f"p={instance.p} is not integral; use approx_solve")
    if instance.p < 1:
        raise UsageError("p must be at least 1")
    return _solve_integral(instance, check=check)


def round_p(p) -> tuple[int, Fraction]:
    """Pick floor(p) or ceil(p), whichever loses less, and the guaranteed factor."""
    p = Fraction(p)
    if p.denominator == 1:
        raise UsageError(f"p={p} is already integral")
    if p <= 1:
        raise UsageError(f"p must exceed 1, got {p}")
    lo, hi = math.floor(p), math.ceil(p)
    down, up = Fraction(lo) / p, p / hi
    if down >= up:
        return lo, down
    return hi, up


def approx_solve(instance: Instance, check: bool = True) -> ApproxResult:
    """Solve the instance with p rounded to an integer; report under the true p."""
    if instance.is_integral:
        res = solve(instance, check=check)
        return ApproxResult(res.allocation, Fraction(1), int(instance.p), res.nsw, res)
    rounded, factor = round_p(instance.p)
    if factor * factor < Fraction(1, 2):
        raise SolverInvariantError(f"rounding factor {factor} below 1/sqrt(2)")
    inner = solve(instance.with_p(rounded), check=check)
    return ApproxResult(
        allocation=inner.allocation,
        factor=factor,
        rounded_p=rounded,
        nsw=nsw_product(instance, inner.allocation),
        inner=inner,
    )
