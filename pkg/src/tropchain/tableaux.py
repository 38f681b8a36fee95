"""Displacement tableaux on rectangles and the tori they cut out of W^r_d.

Cell ``(x, y)`` is column ``x`` and row ``y``, both 1-based, with ``(1, 1)``
in the lower left corner.  A tableau is stored row by row from the bottom.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence

from .errors import MalformedInput


@dataclass(frozen=True)
class DisplacementTableau:
    cols: int
    rows: int
    entries: tuple[tuple[int, ...], ...]  # entries[y-1][x-1] = t(x, y)

    def __post_init__(self):
        entries = tuple(tuple(int(v) for v in row) for row in self.entries)
        object.__setattr__(self, "entries", entries)
        if self.cols < 0 or self.rows < 0:
            raise MalformedInput("tableau dimensions must be non-negative")
        if self.cols == 0 or self.rows == 0:
            if any(entries):
                raise MalformedInput("an empty rectangle carries no entries")
            object.__setattr__(self, "entries", ())
            return
        if len(entries) != self.rows or any(len(row) != self.cols for row in entries):
            raise MalformedInput(f"entries do not fill a [{self.cols} x {self.rows}] rectangle")

    @classmethod
    def empty(cls) -> "DisplacementTableau":
        return cls(0, 0, ())

    @classmethod
    def from_cells(cls, cols: int, rows: int, cells: dict[tuple[int, int], int]) -> "DisplacementTableau":
        return cls(cols, rows, tuple(tuple(cells[x, y] for x in range(1, cols + 1)) for y in range(1, rows + 1)))

    def __getitem__(self, cell: tuple[int, int]) -> int:
        x, y = cell
        return self.entries[y - 1][x - 1]

    def cells(self) -> Iterator[tuple[int, int, int]]:
        for y, row in enumerate(self.entries, start=1):
            for x, value in enumerate(row, start=1):
                yield x, y, value

    @property
    def image(self) -> frozenset[int]:
        return frozenset(v for _, _, v in self.cells())

    def is_empty(self) -> bool:
        return self.cols == 0 or self.rows == 0

    def to_json(self) -> dict:
        return {"cols": self.cols, "rows": self.rows, "entries": [list(r) for r in self.entries]}

    @classmethod
    def from_json(cls, doc, path: str = "$") -> "DisplacementTableau":
        if not isinstance(doc, dict):
            raise MalformedInput("tableau must be an object", path=path)
        try:
            cols, rows = doc["cols"], doc["rows"]
            entries = doc.get("entries", [])
        except KeyError as exc:
            raise MalformedInput(f"tableau needs {exc.args[0]!r}", path=path) from None
        if not all(isinstance(v, int) for v in (cols, rows)):
            raise MalformedInput("cols and rows must be integers", path=path)
        if not isinstance(entries, list) or not all(isinstance(r, list) for r in entries):
            raise MalformedInput("entries must be a list of rows", path=path + ".entries")
        try:
            return cls(cols, rows, tuple(tuple(r) for r in entries))
        except (MalformedInput, TypeError, ValueError) as exc:
            raise MalformedInput(str(exc), path=path + ".entries") from None

    def __str__(self):
        return "\n".join(" ".join(f"{v:>2}" for v in row) for row in reversed(self.entries))


def _moduli(space) -> tuple[int, ...]:
    if isinstance(space, (tuple, list)):
        return tuple(space)
    return tuple(space.moduli)


def congruent(a: int, b: int, m: int) -> bool:
    """``a == b mod m`` with mod 0 meaning equality."""
    return a == b if m == 0 else (a - b) % m == 0


@dataclass(frozen=True)
class Validation:
    valid: bool
    violation: tuple | None = None
    reason: str = ""

    def __bool__(self):
        return self.valid


def validate_tableau(space, t: DisplacementTableau) -> Validation:
    """Check both displacement conditions; report the first offending cell pair."""
    moduli = _moduli(space)
    g = len(moduli)
    for x, y, v in t.cells():
        if not 1 <= v <= g:
            raise MalformedInput(f"entry t({x},{y}) = {v} outside 1..{g}")
    for x, y, v in t.cells():
        if x > 1 and t[x - 1, y] >= v:
            return Validation(False, ((x - 1, y), (x, y)), "row not strictly increasing")
        if y > 1 and t[x, y - 1] >= v:
            return Validation(False, ((x, y - 1), (x, y)), "column not strictly increasing")
    first: dict[int, tuple[int, int]] = {}
    for x, y, v in t.cells():
        if v in first:
            x0, y0 = first[v]
            if not congruent(x - y, x0 - y0, moduli[v - 1]):
                return Validation(False, ((x0, y0), (x, y)), f"x-y not congruent mod m_{v}")
        else:
            first[v] = (x, y)
    return Validation(True)


def rectangle(genus: int, d: int, r: int) -> tuple[int, int]:
    """``(cols, rows) = (g - d + r, r + 1)``; non-positive cols means the empty rectangle."""
    return genus - d + r, r + 1


def enumerate_tableaux(space, d: int, r: int) -> Iterator[DisplacementTableau]:
    """Every displacement tableau on ``[(g-d+r) x (r+1)]``, in a fixed order.

    Cells are filled row by row from the bottom, left to right, smallest
    value first; a value is pruned as soon as it breaks monotonicity, leaves
    too little room above and to the right, or clashes with an earlier cell
    holding the same value.
    """
    moduli = _moduli(space)
    g = len(moduli)
    if r < 0:
        raise MalformedInput("r must be non-negative")
    cols, rows = rectangle(g, d, r)
    if cols <= 0:
        yield DisplacementTableau.empty()
        return
    cells = [(x, y) for y in range(1, rows + 1) for x in range(1, cols + 1)]
    grid: dict[tuple[int, int], int] = {}
    first: dict[int, int] = {}  # value -> x - y of its first cell

    def fill(k: int):
        if k == len(cells):
            yield DisplacementTableau.from_cells(cols, rows, grid)
            return
        x, y = cells[k]
        low = max(grid.get((x - 1, y), 0), grid.get((x, y - 1), 0)) + 1
        high = g - (cols - x) - (rows - y)
        for v in range(low, high + 1):
            seen = first.get(v)
            if seen is not None and not congruent(seen, x - y, moduli[v - 1]):
                continue
            grid[x, y] = v
            if seen is None:
                first[v] = x - y
            yield from fill(k + 1)
            if seen is None:
                del first[v]
        grid.pop((x, y), None)

    yield from fill(0)


@dataclass(frozen=True)
class TorusStratum:
    tableau: DisplacementTableau
    genus: int
    free: tuple[int, ...]
    determined: dict = field(hash=False, compare=False)

    @property
    def dimension(self) -> int:
        return len(self.free)


def torus_of(t: DisplacementTableau, genus: int) -> TorusStratum:
    """The torus ``T(t)``: free cycles are those missing from the image of ``t``."""
    determined = {}
    for x, y, v in t.cells():
        determined.setdefault(v, x - y)
    free = tuple(i for i in range(1, genus + 1) if i not in determined)
    return TorusStratum(t, genus, free, determined)


def wrd_dim(space, d: int, r: int) -> int:
    """``dim W^r_d``: the largest torus over all tableaux, -1 when there is none."""
    moduli = _moduli(space)
    g = len(moduli)
    cols, rows = rectangle(g, d, r)
    if cols <= 0:
        return g
    ceiling = g - (cols + rows - 1)  # every tableau uses a hook's worth of values
    best = -1
    for t in enumerate_tableaux(moduli, d, r):
        best = max(best, g - len(t.image))
        if best == ceiling:
            break
    return best


def hyperelliptic_tableau(genus: int) -> DisplacementTableau:
    """``t(x, 1) = x`` and ``t(x, 2) = x + 1`` on ``[(g-1) x 2]``."""
    if genus < 2:
        raise MalformedInput("the hyperelliptic tableau needs genus >= 2")
    return DisplacementTableau(genus - 1, 2, (tuple(range(1, genus)), tuple(range(2, genus + 1))))


# --------------------------------------------------------------------------
# constrained search


@dataclass(frozen=True)
class SearchHit:
    tableau: DisplacementTableau
    hosts: tuple[int, ...]  # free points placed on each cycle


@dataclass
class SearchStats:
    states: int = 0


@lru_cache(maxsize=None)
def _corners(shape: tuple[int, ...], cols: int) -> tuple[tuple[int, int], ...]:
    out = []
    for y, length in enumerate(shape, start=1):
        if length < cols and (y == 1 or shape[y - 2] > length):
            out.append((length + 1, y))
    return tuple(out)


@lru_cache(maxsize=None)
def _moves(shape: tuple[int, ...], cols: int, m: int) -> tuple[tuple[tuple[int, ...], tuple[tuple[int, int], ...]], ...]:
    """Ways to place one value on simultaneously addable corners of ``shape``.

    All chosen cells must share ``x - y`` modulo ``m``.  Larger sets first.
    """
    corners = _corners(shape, cols)
    out = []
    for size in range(len(corners), 0, -1):
        for subset in combinations(corners, size):
            d0 = subset[0][0] - subset[0][1]
            if all(congruent(x - y, d0, m) for x, y in subset[1:]):
                new = list(shape)
                for _, y in subset:
                    new[y - 1] += 1
                out.append((tuple(new), subset))
    return tuple(out)


@lru_cache(maxsize=None)
def _chain_left(shape: tuple[int, ...], cols: int) -> int:
    """Length of the longest strictly increasing chain still to be filled."""
    rows = len(shape)
    return max(((cols - x) + (rows - y) + 1 for x, y in _corners(shape, cols)), default=0)


def find_tableau(
    moduli: Sequence[int],
    cols: int,
    rows: int,
    base: Sequence[int | None],
    free: int = 0,
    stats: SearchStats | None = None,
) -> SearchHit | None:
    """Search a tableau compatible with a partially determined divisor.

    ``base[i-1]`` is the class of ``xi_i`` before any free point is added
    (None when it is not an integer class).  Placing ``h > 0`` of the
    ``free`` points on ``C_i`` makes ``xi_i`` arbitrary; otherwise ``xi_i``
    equals ``base[i-1]`` minus the number of free points already placed on
    cycles left of ``C_i``.  The tableau is grown value by value as a
    sequence of order ideals of the rectangle, so states are
    ``(cycle, shape, free points used)``.
    """
    g = len(moduli)
    if cols <= 0:
        hosts = [0] * g
        hosts[-1] = free
        return SearchHit(DisplacementTableau.empty(), tuple(hosts))
    full = (cols,) * rows
    dead: set[tuple[int, tuple[int, ...], int]] = set()
    plan: list[tuple[int, tuple[tuple[int, int], ...]]] = []

    def go(i: int, shape: tuple[int, ...], used: int) -> bool:
        if shape == full:
            if used == free or i < g:
                plan.append((free - used, ()))
                return True
            return False
        if i == g or _chain_left(shape, cols) > g - i:
            return False
        key = (i, shape, used)
        if key in dead:
            return False
        if stats is not None:
            stats.states += 1
        m = moduli[i]
        last = i == g - 1
        # most free points on the earliest cycle first: lexicographic assignment order
        for h in ([free - used] if last else range(free - used, -1, -1)):
            if h:
                options = _moves(shape, cols, m)
            else:
                c = base[i]
                if c is None:
                    options = ()
                else:
                    c -= used
                    options = tuple(
                        (new, cells) for new, cells in _moves(shape, cols, m)
                        if all(congruent(x - y, c, m) for x, y in cells)
                    )
            for new, cells in options + ((shape, ()),):
                plan.append((h, cells))
                if go(i + 1, new, used + h):
                    return True
                plan.pop()
        dead.add(key)
        return False

    if not go(0, (0,) * rows, 0):
        return None
    # one plan entry per visited cycle, plus a closing entry holding the
    # leftover free points; once the shape is full they may sit anywhere
    cells: dict[tuple[int, int], int] = {}
    hosts = [0] * g
    for i, (h, placed) in enumerate(plan):
        hosts[min(i, g - 1)] += h
        for cell in placed:
            cells[cell] = i + 1
    return SearchHit(DisplacementTableau.from_cells(cols, rows, cells), tuple(hosts))
