"""Tropical Abel map and representing divisors on a chain of cycles.

The Abel map is evaluated combinatorially.  With base point ``d * w_g``,
the ``j``-th coordinate of a divisor ``D`` in units of ``l(v_j, w_j)`` is

    I_j(D) = sum of xi_P over chips P on C_j  -  (number of chips left of C_j)

because a path from ``w_g`` to a point left of ``C_j`` crosses ``C_j`` from
``w_j`` back to ``v_j`` and a point right of ``C_j`` is reached without
touching it.  The representing divisor ``sum <xi_j>_j + (d - g) w_g`` has
``xi_j = I_j(D) + (j - 1)``.

Every function here accepts either a :class:`ChainOfCycles` or a
:class:`TorsionProfile`; only ``genus`` and ``periods`` are consulted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .chain_model import (
    CyclePoint,
    Divisor,
    IntegerClass,
    Position,
    W,
    class_of,
    coordinate,
    make_position,
    normalize_divisor,
)
from .errors import PreconditionError


@dataclass(frozen=True)
class AbelCoordinates:
    """``values[j-1]`` is the point ``<I_j(D)>_j`` on ``C_j``."""

    values: tuple[Position, ...]
    degree: int


@dataclass(frozen=True)
class RepresentingDivisor:
    positions: tuple[Position, ...]
    degree: int

    @property
    def genus(self) -> int:
        return len(self.positions)

    @property
    def tail(self) -> int:
        return self.degree - self.genus

    def classes(self) -> tuple[int | None, ...]:
        return tuple(class_of(p) for p in self.positions)

    def as_divisor(self) -> Divisor:
        g = self.genus
        items = [(CyclePoint(j, pos), 1) for j, pos in enumerate(self.positions, start=1)]
        items.append((CyclePoint(g, W), self.tail))
        return Divisor(tuple(items))


def _shifted_coordinates(space, divisor: Divisor, shift) -> tuple[Position, ...]:
    D = normalize_divisor(space, divisor)
    g = space.genus
    periods = space.periods
    offsets = [Fraction(0)] * g
    terms: list[dict[str, int]] = [{} for _ in range(g)]
    counts = [0] * (g + 1)
    for loc, k in D.entries:
        j = loc.cycle
        off, sym = coordinate(loc.position)
        offsets[j - 1] += k * off
        for s, c in sym.items():
            terms[j - 1][s] = terms[j - 1].get(s, 0) + k * c
        counts[j] += k
    out = []
    left = 0
    for j in range(1, g + 1):
        out.append(make_position(offsets[j - 1] - left + shift(j), terms[j - 1], periods[j - 1]))
        left += counts[j]
    return tuple(out)


def abel_map(space, divisor: Divisor) -> AbelCoordinates:
    return AbelCoordinates(_shifted_coordinates(space, divisor, lambda j: 0), divisor.degree)


def representing_divisor(space, divisor: Divisor) -> RepresentingDivisor:
    """The unique ``sum <xi_j>_j + (d-g) w_g`` equivalent to ``divisor``."""
    return RepresentingDivisor(_shifted_coordinates(space, divisor, lambda j: j - 1), divisor.degree)


@dataclass(frozen=True)
class Equivalence:
    equivalent: bool
    reason: str

    def __bool__(self):
        return self.equivalent


def is_equivalent(space, d1: Divisor, d2: Divisor) -> Equivalence:
    if d1.degree != d2.degree:
        return Equivalence(False, "degree-mismatch")
    r1 = representing_divisor(space, d1)
    r2 = representing_divisor(space, d2)
    if r1 == r2:
        return Equivalence(True, "same-representing-divisor")
    return Equivalence(False, "different-representing-divisor")


def reduce_to_distinct_cycles(space, divisor: Divisor) -> tuple[Divisor, tuple[int, ...]]:
    """An equivalent effective divisor with at most one chip per cycle.

    Picks a set ``S`` of ``deg`` cycles such that, for every cycle ``j``
    outside ``S``, the Abel coordinate ``I_j`` plus the number of chosen
    cycles left of ``j`` is the class of ``w_j``; the chip on each chosen
    cycle is then forced.  Among valid ``S`` the one sharing the most
    cycles with the input wins, ties broken lexicographically, so an input
    that already has distinct cycles is returned unchanged.
    """
    if not divisor.is_effective():
        raise PreconditionError("reduction needs an effective divisor")
    g = space.genus
    d = divisor.degree
    if d > g:
        raise PreconditionError(f"degree {d} > genus {g}: reduction to distinct cycles is not guaranteed")
    D = normalize_divisor(space, divisor)
    abel = _shifted_coordinates(space, D, lambda j: 0)
    periods = space.periods
    support = set(D.occupied_cycles())

    def offset(j, s):
        off, terms = coordinate(abel[j - 1])
        return make_position(off + s, terms, periods[j - 1])

    # best[j][s]: (overlap, chosen) for cycles j..g given s chosen so far
    best: dict[tuple[int, int], tuple[int, tuple[int, ...]] | None] = {}

    def solve(j: int, s: int):
        if (j, s) in best:
            return best[j, s]
        if j > g:
            result = (0, ()) if s == d else None
        else:
            result = None
            if s < d:
                sub = solve(j + 1, s + 1)
                if sub is not None:
                    result = (sub[0] + (j in support), (j,) + sub[1])
            if offset(j, s) == IntegerClass(0):
                sub = solve(j + 1, s)
                if sub is not None and (result is None or sub[0] > result[0]):
                    result = sub
        best[j, s] = result
        return result

    found = solve(1, 0)
    if found is None:
        raise AssertionError("no distinct-cycle representative found")
    chosen = found[1]
    items = []
    for n, j in enumerate(chosen):
        items.append((CyclePoint(j, offset(j, n)), 1))
    return Divisor(tuple(items)), chosen


def principal_moves(space) -> list[Divisor]:
    """Divisors of the elementary rational functions used to move chips.

    * ``w_i - v_{i+1}``: slope 1 along bridge ``i``;
    * ``<x>_j + <y>_j - <0>_j - <x+y>_j``: a function on ``C_j`` extended
      by constants, for a few sample integers ``x, y``.
    """
    g = space.genus
    periods = space.periods
    moves = []
    for i in range(1, g):
        moves.append(Divisor.point(i, W) - Divisor.point(i + 1, IntegerClass(-1)))
    for j in range(1, g + 1):
        for x, y in ((1, 1), (-1, 2), (2, 3)):
            s = make_position(Fraction(x + y), {}, periods[j - 1])
            moves.append(
                Divisor.point(j, IntegerClass(x))
                + Divisor.point(j, IntegerClass(y))
                - Divisor.point(j, W)
                - Divisor.point(j, s)
            )
    return moves
