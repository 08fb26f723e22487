"""Instances, allocations and exact welfare arithmetic for {1, p} valuations.

Agents and goods are dense 0-based integers. An allocation is an owner array
of length ``m``; ``UNASSIGNED`` (``None``) marks a good nobody holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, total_ordering
from typing import Iterable, Iterator, Sequence, Union

UNASSIGNED = None

Number = Union[int, Fraction]
Edge = tuple[int, int]


class UsageError(ValueError):
    """Raised when an operation is called outside its contract."""


def _as_fraction(p) -> Fraction:
    if isinstance(p, str):
        return Fraction(p.strip())
    return Fraction(p)


@dataclass(frozen=True)
class Instance:
    n: int
    m: int
    p: Fraction
    heavy: frozenset[Edge]

    def __init__(self, n: int, m: int, p, heavy: Iterable[Sequence[int]] = ()):
        edges = [(int(i), int(g)) for i, g in heavy]
        if n < 1:
            raise UsageError(f"need at least one agent, got n={n}")
        if m < 0:
            raise UsageError(f"negative good count m={m}")
        p = _as_fraction(p)
        if p <= 0:
            raise UsageError(f"p must be positive, got {p}")
        heavy_set = frozenset(edges)
        if len(heavy_set) != len(edges):
            raise UsageError("duplicate heavy pair")
        for i, g in heavy_set:
            if not (0 <= i < n and 0 <= g < m):
                raise UsageError(f"heavy pair {(i, g)} out of range for n={n}, m={m}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "heavy", heavy_set)

    @property
    def is_integral(self) -> bool:
        return self.p.denominator == 1

    @property
    def heavy_value(self) -> Number:
        """Value of a heavy edge; a plain int when ``p`` is integral."""
        return self.p.numerator if self.is_integral else self.p

    @cached_property
    def heavy_goods_of(self) -> tuple[tuple[int, ...], ...]:
        """For each agent, the ascending ids of goods it values at ``p``."""
        rows: list[list[int]] = [[] for _ in range(self.n)]
        for i, g in self.heavy:
            rows[i].append(g)
        return tuple(tuple(sorted(r)) for r in rows)

    @cached_property
    def heavy_agents_of(self) -> tuple[tuple[int, ...], ...]:
        """For each good, the ascending ids of agents that value it at ``p``."""
        cols: list[list[int]] = [[] for _ in range(self.m)]
        for i, g in self.heavy:
            cols[g].append(i)
        return tuple(tuple(sorted(c)) for c in cols)

    def is_heavy(self, agent: int, good: int) -> bool:
        return (agent, good) in self.heavy

    def is_heavy_good(self, good: int) -> bool:
        return bool(self.heavy_agents_of[good])

    def is_light_good(self, good: int) -> bool:
        return not self.heavy_agents_of[good]

    def heavy_good_ids(self) -> list[int]:
        return [g for g in range(self.m) if self.heavy_agents_of[g]]

    def light_good_ids(self) -> list[int]:
        return [g for g in range(self.m) if not self.heavy_agents_of[g]]

    def value(self, agent: int, good: int) -> Number:
        return self.heavy_value if (agent, good) in self.heavy else 1

    def with_p(self, p) -> "Instance":
        return Instance(self.n, self.m, p, self.heavy)


@dataclass(frozen=True)
class Allocation:
    """Owner array; ``owner[g]`` is an agent id or ``UNASSIGNED``."""

    owner: tuple

    def __init__(self, owner: Iterable):
        object.__setattr__(self, "owner", tuple(owner))

    @classmethod
    def empty(cls, m: int) -> "Allocation":
        return cls([UNASSIGNED] * m)

    @classmethod
    def from_edges(cls, m: int, edges: Iterable[Edge]) -> "Allocation":
        owner = [UNASSIGNED] * m
        for i, g in edges:
            if owner[g] is not UNASSIGNED:
                raise UsageError(f"good {g} assigned twice")
            owner[g] = i
        return cls(owner)

    @classmethod
    def from_bundles(cls, m: int, bundles: Sequence[Iterable[int]]) -> "Allocation":
        return cls.from_edges(m, ((i, g) for i, b in enumerate(bundles) for g in b))

    @property
    def m(self) -> int:
        return len(self.owner)

    @property
    def complete(self) -> bool:
        return all(o is not UNASSIGNED for o in self.owner)

    def edges(self) -> frozenset[Edge]:
        return frozenset((o, g) for g, o in enumerate(self.owner) if o is not UNASSIGNED)

    def bundles(self, n: int) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(n)]
        for g, o in enumerate(self.owner):
            if o is not UNASSIGNED:
                out[o].append(g)
        return out

    def __len__(self) -> int:
        return sum(o is not UNASSIGNED for o in self.owner)

    def validate(self, instance: Instance) -> None:
        if len(self.owner) != instance.m:
            raise UsageError(f"allocation has {len(self.owner)} goods, instance has {instance.m}")
        for g, o in enumerate(self.owner):
            if o is not UNASSIGNED and not (isinstance(o, int) and 0 <= o < instance.n):
                raise UsageError(f"good {g} owned by out-of-range agent {o!r}")


def utility_vector(instance: Instance, allocation: Allocation) -> tuple[Number, ...]:
    allocation.validate(instance)
    hv = instance.heavy_value
    heavy = instance.heavy
    u: list[Number] = [0] * instance.n
    for g, o in enumerate(allocation.owner):
        if o is not UNASSIGNED:
            u[o] += hv if (o, g) in heavy else 1
    return tuple(u)


def utility_profile(values: Iterable[Number]) -> tuple[Number, ...]:
    return tuple(sorted(values))


def heavy_degrees(instance: Instance, allocation: Allocation) -> list[int]:
    deg = [0] * instance.n
    for g, o in enumerate(allocation.owner):
        if o is not UNASSIGNED and (o, g) in instance.heavy:
            deg[o] += 1
    return deg


@total_ordering
@dataclass(frozen=True)
class NswProduct:
    """Exact product of the ``n`` agent utilities (NSW to the n-th power)."""

    product: Number
    n: int

    def _check(self, other: "NswProduct") -> None:
        if not isinstance(other, NswProduct):
            raise TypeError(f"cannot compare NswProduct with {type(other).__name__}")
        if self.n != other.n:
            raise UsageError(f"NSW products over different agent counts ({self.n} vs {other.n})")

    def __lt__(self, other: "NswProduct") -> bool:
        self._check(other)
        return self.product < other.product

    def __eq__(self, other) -> bool:
        if not isinstance(other, NswProduct):
            return NotImplemented
        self._check(other)
        return self.product == other.product

    def __hash__(self) -> int:
        return hash((self.product, self.n))

    @property
    def geometric_mean(self) -> float:
        """Display-only float NSW; never use for decisions."""
        if self.product == 0:
            return 0.0
        q = Fraction(self.product)
        return math.exp((math.log(q.numerator) - math.log(q.denominator)) / self.n)


def product_of(values: Sequence[Number]) -> NswProduct:
    return NswProduct(math.prod(values, start=1), len(values))


def welfare_key(values: Sequence[Number]) -> tuple[int, Number]:
    """(#agents with positive utility, product over them).

    Orders allocations the same way as the product whenever some allocation
    is all-positive, and still separates allocations whose product is zero.
    """
    pos = [v for v in values if v > 0]
    return len(pos), math.prod(pos, start=1)


def nsw_product(instance: Instance, allocation: Allocation) -> NswProduct:
    return product_of(utility_vector(instance, allocation))


def compare_nsw(a: NswProduct, b: NswProduct) -> int:
    """-1, 0 or 1 as ``a`` is smaller, equal or larger than ``b``."""
    if a.n != b.n:
        raise UsageError(f"NSW products over different agent counts ({a.n} vs {b.n})")
    return (a.product > b.product) - (a.product < b.product)


def leximax_compare(a: Sequence[Number], b: Sequence[Number]) -> int:
    """Compare two ascending utility profiles; the first differing entry decides."""
    if len(a) != len(b):
        raise UsageError(f"profiles of different length ({len(a)} vs {len(b)})")
    for x, y in zip(a, b):
        if x != y:
            return 1 if x > y else -1
    return 0


def heavy_part(instance: Instance, allocation: Allocation) -> Allocation:
    heavy = instance.heavy
    return Allocation(
        o if o is not UNASSIGNED and (o, g) in heavy else UNASSIGNED
        for g, o in enumerate(allocation.owner)
    )


def is_heavy_only(instance: Instance, allocation: Allocation) -> bool:
    return all(o is UNASSIGNED or (o, g) in instance.heavy for g, o in enumerate(allocation.owner))


def allocation_distance(a: Allocation, b: Allocation) -> int:
    if a.m != b.m:
        raise UsageError(f"allocations over different good counts ({a.m} vs {b.m})")
    return len(a.edges() ^ b.edges())


@dataclass(frozen=True)
class AlternatingPath:
    """A walk through the agent/good graph.

    ``nodes`` holds ``("a", id)`` / ``("g", id)`` pairs alternating in kind;
    ``in_allocation[k]`` says whether the edge between ``nodes[k]`` and
    ``nodes[k + 1]`` currently belongs to the allocation.
    """

    nodes: tuple[tuple[str, int], ...]
    in_allocation: tuple[bool, ...]

    def __post_init__(self):
        nodes = tuple((str(k), int(v)) for k, v in self.nodes)
        labels = tuple(bool(x) for x in self.in_allocation)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "in_allocation", labels)
        if len(labels) != max(len(nodes) - 1, 0):
            raise UsageError("need exactly one label per edge")
        for (k1, _), (k2, _) in zip(nodes, nodes[1:]):
            if {k1, k2} != {"a", "g"}:
                raise UsageError("path must alternate between agents and goods")
        for x, y in zip(labels, labels[1:]):
            if x == y:
                raise UsageError("edge labels must alternate")

    @classmethod
    def from_agents_goods(cls, agents: Sequence[int], goods: Sequence[int]) -> "AlternatingPath":
        """Even agent-to-agent path ``a0, g1, a1, ..., gk, ak`` as used by augmentation.

        The first edge ``(a0, g1)`` is outside the allocation; ``(a_l, g_l)``
        is inside it for every ``l >= 1``.
        """
        if len(agents) != len(goods) + 1:
            raise UsageError("agent-to-agent path needs one more agent than goods")
        nodes: list[tuple[str, int]] = [("a", agents[0])]
        for g, a in zip(goods, agents[1:]):
            nodes += [("g", g), ("a", a)]
        labels = [k % 2 == 1 for k in range(2 * len(goods))]
        return cls(tuple(nodes), tuple(labels))

    def edges(self) -> Iterator[tuple[Edge, bool]]:
        """Yield ``((agent, good), in_allocation)`` along the path."""
        for (u, v), lab in zip(zip(self.nodes, self.nodes[1:]), self.in_allocation):
            agent, good = (u[1], v[1]) if u[0] == "a" else (v[1], u[1])
            yield (agent, good), lab

    def __len__(self) -> int:
        return len(self.in_allocation)

    def flipped(self) -> "AlternatingPath":
        """Same walk with labels inverted, i.e. relative to ``A xor P``."""
        return AlternatingPath(self.nodes, tuple(not x for x in self.in_allocation))

    def is_heavy(self, instance: Instance) -> bool:
        return all(e in instance.heavy for e, _ in self.edges())


def apply_path(allocation: Allocation, path: AlternatingPath) -> Allocation:
    """Return ``allocation xor path``; labels must match current membership."""
    owner = list(allocation.owner)
    adds = []
    for (agent, good), inside in path.edges():
        if not 0 <= good < len(owner):
            raise UsageError(f"good {good} out of range")
        if inside:
            if owner[good] != agent:
                raise UsageError(f"edge {(agent, good)} labelled in-allocation but is not")
            owner[good] = UNASSIGNED
        else:
            if owner[good] == agent:
                raise UsageError(f"edge {(agent, good)} labelled out-of-allocation but is in it")
            adds.append((agent, good))
    for agent, good in adds:
        if owner[good] is not UNASSIGNED:
            raise UsageError(f"good {good} would get two owners")
        owner[good] = agent
    return Allocation(owner)
