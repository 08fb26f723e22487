"""Seeded random corpora used by the acceptance suite and the scripts."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterator, Sequence

from .core import Instance
from .fileio import GenSpec, generate

DENSITIES = (0.2, 0.5, 0.8)


def random_specs(count: int, seed: int, ns: Sequence[int], m_range, ps: Sequence,
                 densities: Sequence[float] = DENSITIES) -> Iterator[GenSpec]:
    """``count`` GenSpecs; ``m_range(n)`` gives the allowed good counts for ``n`` agents."""
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.choice(list(ns))
        m = rng.choice(list(m_range(n)))
        p = Fraction(rng.choice(list(ps)))
        d = rng.choice(list(densities))
        yield GenSpec(n, m, p, d, rng.getrandbits(63))


def exactness_corpus(count: int = 540, seed: int = 20240501) -> list[Instance]:
    """n in {2,3,4}, n <= m <= 8, p in {2,3,5,7}."""
    specs = random_specs(count, seed, (2, 3, 4), lambda n: range(n, 9), (2, 3, 5, 7))
    return [generate(s) for s in specs]


def heavy_only_corpus(count: int = 540, seed: int = 7, max_n: int = 5, max_m: int = 8) -> list[Instance]:
    """Instances for the heavy-only phase; p is irrelevant there and fixed at 2."""
    specs = random_specs(count, seed, range(1, max_n + 1), lambda n: range(0, max_m + 1), (2,))
    return [generate(s) for s in specs]


def rational_corpus(count: int = 240, seed: int = 99) -> list[Instance]:
    """p in {3/2, 5/2, 7/3, 9/4}, n <= 3, m <= 7."""
    ps = (Fraction(3, 2), Fraction(5, 2), Fraction(7, 3), Fraction(9, 4))
    specs = random_specs(count, seed, (1, 2, 3), lambda n: range(0, 8), ps)
    return [generate(s) for s in specs]
