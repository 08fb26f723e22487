"""Brute-force ground truth by exhaustive enumeration.

Everything here is deliberately naive: owner arrays are enumerated in
lexicographic order and scored exactly. Numpy is only used to score many
owner arrays per call; utilities are scaled by the denominator of ``p`` so
the arithmetic stays in integers, and Python ints take over whenever a
product could overflow 64 bits.

Only complete allocations are enumerated. Every good is worth at least 1 to
every agent, so assigning a leftover good never lowers any utility.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

import numpy as np

from .core import Allocation, Instance, NswProduct, UsageError, utility_vector

DEFAULT_MAX_STATES = 10**7
DEFAULT_MAX_ALLOCATIONS = 1000
_CHUNK = 1 << 16


class BudgetExceeded(UsageError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration needs {required} states, budget is {budget}")
        self.required = required
        self.budget = budget


@dataclass
class OracleReport:
    best_product: NswProduct
    best_allocations: list[Allocation]
    positive_agent_count: int
    state_count: int
    maximizer_count: int = 0
    overflow: bool = False
    note: str = "complete allocations only"
    best_utilities: list[tuple] = field(default_factory=list)


def state_count(instance: Instance) -> int:
    return instance.n ** instance.m


def _check_budget(required: int, budget: int) -> None:
    if required > budget:
        raise BudgetExceeded(required, budget)


def enumerate_complete(instance: Instance, visitor: Callable[[Allocation], object],
                       max_states: int = DEFAULT_MAX_STATES) -> None:
    """Call ``visitor`` on every complete allocation in lexicographic owner order."""
    _check_budget(state_count(instance), max_states)
    for owner in itertools.product(range(instance.n), repeat=instance.m):
        visitor(Allocation(owner))


def _scaled_values(instance: Instance) -> tuple[np.ndarray, int]:
    """Integer value matrix (n x m) and the common scale (denominator of p)."""
    scale = instance.p.denominator
    heavy = instance.p.numerator
    vals = np.full((instance.n, instance.m), scale, dtype=np.int64)
    for i, g in instance.heavy:
        vals[i, g] = heavy
    return vals, scale


def _fits_int64(instance: Instance, vals: np.ndarray) -> bool:
    top = int(vals.max()) * instance.m if vals.size else 0
    return top == 0 or top ** instance.n < 2**62


def _owner_chunks(n: int, m: int, chunk: int = _CHUNK) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(offset, owners)`` blocks covering all n**m owner arrays in order."""
    total = n**m
    weights = np.array([n ** (m - 1 - j) for j in range(m)], dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        yield start, (idx[:, None] // weights[None, :]) % n


def _utilities(owners: np.ndarray, vals: np.ndarray, exact_obj: bool) -> np.ndarray:
    n = vals.shape[0]
    cols = [((owners == i) * vals[i][None, :]).sum(axis=1) for i in range(n)]
    u = np.stack(cols, axis=1) if cols else np.zeros((owners.shape[0], 0), dtype=np.int64)
    return u.astype(object) if exact_obj else u


def _row_products(u: np.ndarray) -> np.ndarray:
    return np.prod(u, axis=1)


def brute_force_mnw(instance: Instance, max_states: int = DEFAULT_MAX_STATES,
                    max_allocations: int = DEFAULT_MAX_ALLOCATIONS) -> OracleReport:
    """Exact maximum NSW product over all complete allocations, with its maximizers.

    When no allocation has a positive product (``m < n``) the maximizers are
    ranked by the number of agents with positive utility, then by the product
    over those agents; ``best_product`` stays 0 in that case.
    """
    n, m = instance.n, instance.m
    total = state_count(instance)
    _check_budget(total, max_states)
    vals, scale = _scaled_values(instance)
    obj = not _fits_int64(instance, vals)

    best_key = None
    winners: list[Allocation] = []
    win_utils: list[tuple] = []
    count = 0
    overflow = False
    for _, owners in _owner_chunks(n, m):
        u = _utilities(owners, vals, obj)
        if m >= n:
            keys = _row_products(u)
        else:
            # no positive product exists: rank by (#positive agents, product over them)
            positive = u > 0
            npos = positive.sum(axis=1)
            pp = np.prod(np.where(positive, u, 1).astype(object), axis=1)
            keys = np.array([None] * len(pp), dtype=object)
            for r, (c, x) in enumerate(zip(npos, pp)):
                keys[r] = (int(c), int(x))
        chunk_best = max(keys)
        if best_key is None or chunk_best > best_key:
            best_key = chunk_best
            winners, win_utils, count, overflow = [], [], 0, False
        if chunk_best == best_key:
            if m >= n:
                rows = np.nonzero(keys == best_key)[0]
            else:
                rows = [r for r in range(len(keys)) if keys[r] == best_key]
            count += len(rows)
            for r in rows:
                if len(winners) >= max_allocations:
                    overflow = True
                    break
                winners.append(Allocation(int(x) for x in owners[r]))
                win_utils.append(tuple(Fraction(int(x), scale) for x in u[r]))

    if m >= n:
        best = Fraction(int(best_key), scale**n)
        positive_count = n
    else:
        best = Fraction(0)
        positive_count = best_key[0]
    product = best.numerator if best.denominator == 1 else best
    return OracleReport(
        best_product=NswProduct(product, n),
        best_allocations=winners,
        positive_agent_count=positive_count,
        state_count=total,
        maximizer_count=count,
        overflow=overflow,
        best_utilities=win_utils,
    )


def _heavy_option_lists(instance: Instance, allow_unassigned: bool) -> list[list[int]]:
    opts = []
    for g in instance.heavy_good_ids():
        agents = list(instance.heavy_agents_of[g])
        opts.append(([-1] if allow_unassigned else []) + agents)
    return opts


def heavy_only_state_count(instance: Instance, allow_unassigned: bool = True) -> int:
    return math.prod(len(o) for o in _heavy_option_lists(instance, allow_unassigned))


def brute_force_heavy_profiles(instance: Instance, max_states: int = DEFAULT_MAX_STATES,
                               allow_unassigned: bool = True) -> dict[int, tuple[int, ...]]:
    """Leximax ascending heavy-degree profile for every feasible cardinality.

    Enumerates every heavy-only allocation (each heavy good unassigned or given
    to one of its heavy agents). With ``allow_unassigned=False`` only the
    maximum cardinality is covered.
    """
    opts = _heavy_option_lists(instance, allow_unassigned)
    total = math.prod(len(o) for o in opts)
    _check_budget(total, max_states)
    n = instance.n
    if not opts:
        return {0: (0,) * n}
    radices = np.array([len(o) for o in opts], dtype=np.int64)
    weights = np.array([int(math.prod(radices[j + 1:])) for j in range(len(opts))], dtype=np.int64)
    table = np.full((len(opts), int(radices.max())), -2, dtype=np.int64)
    for j, o in enumerate(opts):
        table[j, : len(o)] = o
    best: dict[int, tuple[int, ...]] = {}
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = (idx[:, None] // weights[None, :]) % radices[None, :]
        choice = table[np.arange(len(opts))[None, :], digits]
        deg = np.stack([(choice == i).sum(axis=1) for i in range(n)], axis=1)
        card = (choice >= 0).sum(axis=1)
        prof = np.sort(deg, axis=1)
        for c in np.unique(card):
            rows = prof[card == c]
            order = np.lexsort(rows.T[::-1])
            top = tuple(int(x) for x in rows[order[-1]])
            c = int(c)
            if c not in best or top > best[c]:
                best[c] = top
    return best


def brute_force_leximax_heavy(instance: Instance, cardinality: int,
                              max_states: int = DEFAULT_MAX_STATES) -> tuple:
    """Leximax utility profile among heavy-only allocations with exactly ``cardinality`` edges."""
    n_heavy = len(instance.heavy_good_ids())
    if not 0 <= cardinality <= n_heavy:
        raise UsageError(f"cardinality {cardinality} infeasible; {n_heavy} heavy goods")
    profiles = brute_force_heavy_profiles(instance, max_states=max_states)
    hv = instance.heavy_value
    return tuple(hv * d for d in profiles[cardinality])


def brute_force_pareto_dominated(instance: Instance, allocation: Allocation,
                                 max_states: int = DEFAULT_MAX_STATES) -> Optional[Allocation]:
    """First complete allocation (lexicographic order) Pareto-dominating ``allocation``."""
    n, m = instance.n, instance.m
    _check_budget(state_count(instance), max_states)
    vals, scale = _scaled_values(instance)
    base = np.array([int(x * scale) for x in utility_vector(instance, allocation)], dtype=np.int64)
    for _, owners in _owner_chunks(n, m):
        u = _utilities(owners, vals, False)
        ge = (u >= base[None, :]).all(axis=1)
        gt = (u > base[None, :]).any(axis=1)
        hits = np.nonzero(ge & gt)[0]
        if hits.size:
            return Allocation(int(x) for x in owners[hits[0]])
    return None
