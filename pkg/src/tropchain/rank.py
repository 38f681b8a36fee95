"""Divisor ranks from displacement tableaux, and completion to a given rank.

``D`` of degree ``d`` has rank at least ``r`` exactly when some tableau on
``[(g-d+r) x (r+1)]`` has every cell value ``i = t(x, y)`` sitting on a
coordinate ``xi_i`` of the representing divisor equal to ``<x-y>_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .abel import RepresentingDivisor, representing_divisor
from .chain_model import (
    CyclePoint,
    Divisor,
    W,
    IntegerClass,
    coordinate,
    make_position,
    normalize_divisor,
    normalize_position,
)
from .dhar import FiniteGraphModel, dhar_rank  # re-exported for callers
from .errors import PreconditionError
from .tableaux import DisplacementTableau, SearchStats, _moduli, find_tableau, rectangle

__all__ = [
    "Completion",
    "FiniteGraphModel",
    "RankCertificate",
    "complete_to_rank",
    "dhar_rank",
    "divisor_rank",
    "satisfies_tableau",
]


def satisfies_tableau(repdiv: RepresentingDivisor, t: DisplacementTableau, space) -> bool:
    """True iff ``xi_{t(x,y)}`` is the point ``<x-y>`` on its cycle for every cell."""
    periods = space.periods
    for x, y, v in t.cells():
        target = normalize_position(IntegerClass(x - y), periods[v - 1])
        if repdiv.positions[v - 1] != target:
            return False
    return True


@dataclass(frozen=True)
class RankCertificate:
    rank: int
    degree: int
    witness: DisplacementTableau | None  # certifies rank >= self.rank
    refuted: int  # rank + 1, for which the search came back empty
    states: int = 0

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "degree": self.degree,
            "witness": None if self.witness is None else self.witness.to_json(),
            "exhausted": {"rank": self.refuted, "search_states": self.states},
        }


def _search_rank(moduli, classes, d: int, r: int, stats: SearchStats | None):
    g = len(moduli)
    cols, rows = rectangle(g, d, r)
    return find_tableau(moduli, cols, rows, classes, 0, stats)


def divisor_rank(space, divisor: Divisor) -> RankCertificate:
    """Rank via tableau search, climbing ``r`` from ``max(0, d - g)``."""
    repdiv = representing_divisor(space, divisor)
    moduli = _moduli(space)
    g = len(moduli)
    d = repdiv.degree
    classes = repdiv.classes()
    stats = SearchStats()
    if d < 0:
        return RankCertificate(-1, d, None, 0, 0)
    r = max(0, d - g)
    hit = _search_rank(moduli, classes, d, r, stats)
    if hit is None:
        return RankCertificate(-1, d, None, 0, stats.states)
    while True:
        nxt = _search_rank(moduli, classes, d, r + 1, stats)
        if nxt is None:
            return RankCertificate(r, d, hit.tableau, r + 1, stats.states)
        r, hit = r + 1, nxt


@dataclass(frozen=True)
class Completion:
    """``E + F`` has degree ``d`` and rank at least ``r``, certified by ``tableau``."""

    F: Divisor
    tableau: DisplacementTableau
    hosts: tuple[int, ...]
    stats: dict = field(default_factory=dict, compare=False)


def complete_to_rank(space, E: Divisor, d: int, r: int, stats: SearchStats | None = None) -> Completion | None:
    """Find effective ``F`` of degree ``d - deg E`` with ``rank(E + F) >= r``.

    Returns None exactly when no such ``F`` exists.  Free points only ever
    go on cycles: a bridge chip is equivalent to one at ``w_i``.
    """
    if not E.is_effective():
        raise PreconditionError("E must be effective")
    n = d - E.degree
    if n < 0:
        return None
    moduli = _moduli(space)
    g = len(moduli)
    E = normalize_divisor(space, E)
    base = representing_divisor(space, E).classes()
    cols, rows = rectangle(g, d, r)
    stats = stats if stats is not None else SearchStats()
    hit = find_tableau(moduli, cols, rows, base, n, stats)
    if hit is None:
        return None
    return Completion(_place_free_points(space, E, hit.tableau, hit.hosts), hit.tableau, hit.hosts,
                      {"search_states": stats.states})


def _place_free_points(space, E: Divisor, t: DisplacementTableau, hosts) -> Divisor:
    """Concrete free points realizing the search hit.

    On a hosting cycle ``i`` in the image of ``t`` all but one free point
    sit at ``w_i`` and the last one is placed so that ``xi_i`` lands on the
    class the tableau asks for; elsewhere the free points sit at ``w_i``.
    """
    periods = space.periods
    wanted = {}
    for x, y, v in t.cells():
        wanted.setdefault(v, x - y)
    items = []
    left = 0  # chips of E + F strictly left of the current cycle
    for i, h in enumerate(hosts, start=1):
        on_cycle = E.on_cycle(i)
        if h:
            if h > 1:
                items.append((CyclePoint(i, W), h - 1))
            if i in wanted:
                off = Fraction(wanted[i] - (i - 1) + left)
                terms: dict[str, int] = {}
                for pos, k in on_cycle:
                    o, sym = coordinate(pos)
                    off -= k * o
                    for s, c in sym.items():
                        terms[s] = terms.get(s, 0) - k * c
                items.append((CyclePoint(i, make_position(off, terms, periods[i - 1])), 1))
            else:
                items.append((CyclePoint(i, W), 1))
        left += h + sum(k for _, k in on_cycle)
    return Divisor(tuple(items))
