"""Chip-firing on a finite subdivision of a rational chain of cycles.

This is an independent rank oracle: it never looks at tableaux or at the
Abel map.  The chain is subdivided with a step that divides every length
and every chip offset, so all chips sit on vertices; ranks on such a
subdivision agree with ranks on the metric graph (Hladky-Kral-Norine).

Ranks are computed with the recursion ``rank(D) = 1 + min_t rank(D - t)``
over a test set ``t``, memoized on q-reduced representatives.  By default
the test set is the vertices ``v_i, w_i`` of the coarse model, which is
rank-determining (Luo); ``test_set="all"`` uses every vertex instead.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .chain_model import (
    BridgePoint,
    ChainOfCycles,
    CyclePoint,
    Divisor,
    Generic,
    IntegerClass,
    RationalPoint,
)
from .errors import OracleUnavailable


def _rational_gcd(values) -> Fraction:
    values = [Fraction(v) for v in values if v]
    den = lcm(*(v.denominator for v in values))
    num = gcd(*(int(v * den) for v in values))
    return Fraction(num, den)


@dataclass
class FiniteGraphModel:
    chain: ChainOfCycles
    unit: Fraction
    n_vertices: int
    adjacency: list[list[tuple[int, int]]]
    cycle_base: list[int]  # vertex id of w_i is cycle_base[i-1]
    cycle_size: list[int]
    bridge_vertices: list[list[int]]  # interior vertices of each bridge, from w_i onward

    @classmethod
    def from_chain(cls, chain: ChainOfCycles, *divisors: Divisor) -> "FiniteGraphModel":
        if any(c.irrational for c in chain.cycles):
            raise OracleUnavailable("the oracle needs rational ratios on every cycle")
        lengths = []
        for c in chain.cycles:
            lengths += [c.circumference, c.arc]
        lengths += list(chain.bridges)
        for D in divisors:
            for loc, _ in D.entries:
                if isinstance(loc, BridgePoint):
                    lengths.append(loc.offset)
                else:
                    lengths.append(_arc_distance(chain, loc))
        unit = _rational_gcd(lengths)

        cycle_base, cycle_size = [], []
        edges: dict[tuple[int, int], int] = {}

        def add_edge(a, b):
            key = (min(a, b), max(a, b))
            edges[key] = edges.get(key, 0) + 1

        n = 0
        for c in chain.cycles:
            size = int(c.circumference / unit)
            cycle_base.append(n)
            cycle_size.append(size)
            for k in range(size):
                add_edge(n + k, n + (k + 1) % size)
            n += size
        bridge_vertices = []
        for i, b in enumerate(chain.bridges, start=1):
            steps = int(b / unit)
            start = cycle_base[i - 1]
            c = chain.cycles[i]
            end = cycle_base[i] + int((c.circumference - c.arc) / unit)
            inner = list(range(n, n + steps - 1))
            n += steps - 1
            path = [start] + inner + [end]
            for a, b2 in zip(path, path[1:]):
                add_edge(a, b2)
            bridge_vertices.append(inner)
        adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for (a, b), mult in edges.items():
            adjacency[a].append((b, mult))
            adjacency[b].append((a, mult))
        return cls(chain, unit, n, adjacency, cycle_base, cycle_size, bridge_vertices)

    def cycle_vertex(self, i: int, distance: Fraction) -> int:
        """Vertex at ``distance`` from ``w_i`` along the positive orientation."""
        k = distance / self.unit
        if k.denominator != 1:
            raise OracleUnavailable(f"point at distance {distance} on C_{i} is not a vertex")
        return self.cycle_base[i - 1] + int(k) % self.cycle_size[i - 1]

    def w(self, i: int) -> int:
        return self.cycle_base[i - 1]

    def v(self, i: int) -> int:
        c = self.chain.cycles[i - 1]
        return self.cycle_vertex(i, c.circumference - c.arc)

    def model_vertices(self) -> list[int]:
        g = self.chain.genus
        return sorted({self.w(i) for i in range(1, g + 1)} | {self.v(i) for i in range(1, g + 1)})

    def vertex_of(self, loc) -> int:
        if isinstance(loc, BridgePoint):
            k = loc.offset / self.unit
            if k.denominator != 1:
                raise OracleUnavailable(f"bridge offset {loc.offset} is not a vertex")
            k = int(k)
            path = [self.w(loc.bridge)] + self.bridge_vertices[loc.bridge - 1] + [self.v(loc.bridge + 1)]
            return path[k]
        return self.cycle_vertex(loc.cycle, _arc_distance(self.chain, loc))

    def vector(self, divisor: Divisor) -> list[int]:
        vec = [0] * self.n_vertices
        for loc, k in divisor.entries:
            vec[self.vertex_of(loc)] += k
        return vec


def _arc_distance(chain: ChainOfCycles, loc: CyclePoint) -> Fraction:
    pos = loc.position
    c = chain.cycles[loc.cycle - 1]
    if isinstance(pos, Generic):
        raise OracleUnavailable("generic positions have no place on a finite graph")
    xi = Fraction(pos.n) if isinstance(pos, IntegerClass) else pos.xi
    return (xi * c.arc) % c.circumference


# --------------------------------------------------------------------------
# chip-firing


def _fire(adj, vec, group: set[int], times: int):
    for a in group:
        for b, mult in adj[a]:
            if b not in group:
                vec[a] -= times * mult
                vec[b] += times * mult


def q_reduce(model: FiniteGraphModel, divisor: Sequence[int], q: int = 0) -> list[int]:
    """The q-reduced divisor equivalent to ``divisor``."""
    adj = model.adjacency
    vec = list(divisor)
    n = len(vec)

    # make every vertex other than q non-negative, outermost BFS layer first
    dist = [-1] * n
    dist[q] = 0
    queue = deque([q])
    layers = [[q]]
    while queue:
        a = queue.popleft()
        for b, _ in adj[a]:
            if dist[b] < 0:
                dist[b] = dist[a] + 1
                if dist[b] == len(layers):
                    layers.append([])
                layers[dist[b]].append(b)
                queue.append(b)
    inner: list[set[int]] = []
    acc: set[int] = set()
    for layer in layers:
        acc = acc | set(layer)
        inner.append(acc)
    for j in range(len(layers) - 2, -1, -1):
        group = inner[j]
        need = 0
        for b in layers[j + 1]:
            if vec[b] < 0:
                gain = sum(m for a, m in adj[b] if a in group)
                need = max(need, -(vec[b] // gain))  # ceil(-vec[b] / gain)
        if need:
            _fire(adj, vec, group, need)

    # Dhar burning: fire the unburnt set for as long as it is legal
    while True:
        burnt = {q}
        pressure = [0] * n
        queue = deque([q])
        while queue:
            a = queue.popleft()
            for b, mult in adj[a]:
                if b in burnt:
                    continue
                pressure[b] += mult
                if pressure[b] > vec[b]:
                    burnt.add(b)
                    queue.append(b)
        if len(burnt) == n:
            return vec
        group = set(range(n)) - burnt
        times = min(vec[a] // pressure[a] for a in group if pressure[a])
        _fire(adj, vec, group, max(times, 1))


def effective_class(model: FiniteGraphModel, vec: Sequence[int], q: int = 0) -> bool:
    return q_reduce(model, vec, q)[q] >= 0


def equivalent(model: FiniteGraphModel, a: Sequence[int], b: Sequence[int], q: int = 0) -> bool:
    if sum(a) != sum(b):
        return False
    return q_reduce(model, a, q) == q_reduce(model, b, q)


def dhar_rank(model: FiniteGraphModel, divisor: Divisor | Sequence[int], test_set: str = "model") -> int:
    """Baker-Norine rank of ``divisor`` on the subdivided graph."""
    vec = model.vector(divisor) if isinstance(divisor, Divisor) else list(divisor)
    targets = model.model_vertices() if test_set == "model" else list(range(model.n_vertices))
    q = 0
    memo: dict[tuple[int, ...], int] = {}

    def rank(v: list[int]) -> int:
        red = q_reduce(model, v, q)
        if red[q] < 0:
            return -1
        key = tuple(red)
        if key in memo:
            return memo[key]
        best = None
        for t in targets:
            red[t] -= 1
            sub = rank(red)
            red[t] += 1
            if best is None or sub < best:
                best = sub
            if best == -1:
                break
        memo[key] = best + 1
        return best + 1

    return rank(vec)
