"""Random chains and divisors shared by the oracle tests."""

from __future__ import annotations

import random
from fractions import Fraction

from tropchain.chain_model import (
    BridgePoint,
    ChainOfCycles,
    CycleGeometry,
    CyclePoint,
    Divisor,
    IntegerClass,
    RationalPoint,
)

# (circumference, arc): ratios 2, 3, 4, 5 and 5/2
SHAPES = [(2, 1), (3, 1), (4, 1), (5, 1), (5, 2)]
BRIDGES = [Fraction(1), Fraction(1, 2), Fraction(2), Fraction(3, 2)]


def random_chain(rng: random.Random, max_genus: int = 5) -> ChainOfCycles:
    g = rng.randint(1, max_genus)
    cycles = tuple(CycleGeometry(*rng.choice(SHAPES)) for _ in range(g))
    bridges = tuple(rng.choice(BRIDGES) for _ in range(g - 1))
    return ChainOfCycles(cycles, bridges)


def random_divisor(rng: random.Random, chain: ChainOfCycles, degree: int, negatives: int = 0) -> Divisor:
    """``degree + negatives`` positive chips and ``negatives`` negative ones."""
    items = []
    for n in range(degree + 2 * negatives):
        mult = -1 if n < negatives else 1
        if chain.genus > 1 and rng.random() < 0.15:
            b = rng.randint(1, chain.genus - 1)
            length = chain.bridges[b - 1]
            items.append((BridgePoint(b, rng.choice([Fraction(0), length / 2, length])), mult))
            continue
        i = rng.randint(1, chain.genus)
        if rng.random() < 0.6:
            pos = IntegerClass(rng.randint(-4, 4))
        else:
            pos = RationalPoint(Fraction(rng.randint(-6, 6), 2))
        items.append((CyclePoint(i, pos), mult))
    return Divisor(tuple(items))
