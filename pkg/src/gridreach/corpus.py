"""Deterministic fuzz corpus of random reachability instances."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .grid import GridGraph, generate_random

DENSITIES = (0.3, 0.5, 0.7, 0.9)


@dataclass(frozen=True)
class Instance:
    index: int
    m: int
    p: float
    seed: int
    s: tuple[int, int]
    t: tuple[int, int]

    def grid(self) -> GridGraph:
        return generate_random(self.m, self.p, self.seed)


def instance(index: int, m_range: tuple[int, int] = (8, 64), salt: int = 0) -> Instance:
    """Instance ``index`` of the corpus: size, density and endpoints drawn
    from a generator seeded by ``(salt, index)``."""
    rng = random.Random(f"{salt}:{index}")
    m = rng.randint(*m_range)
    p = rng.choice(DENSITIES)
    seed = rng.randrange(1 << 31)
    s = (rng.randint(0, m), rng.randint(0, m))
    t = (rng.randint(0, m), rng.randint(0, m))
    return Instance(index, m, p, seed, s, t)


def corpus(n: int = 10_000, m_range: tuple[int, int] = (8, 64), salt: int = 0):
    for i in range(n):
        yield instance(i, m_range, salt)
