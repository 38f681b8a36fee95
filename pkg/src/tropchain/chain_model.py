"""Chains of cycles, torsion profiles, positions on cycles and divisors.

A point on cycle ``C_i`` is addressed by a coordinate ``xi`` measured from
``w_i`` along the positive orientation in units of the arc length
``l(v_i, w_i)``; so ``<0>_i = w_i`` and ``<-1>_i = v_i``.  Coordinates live
modulo the ratio ``rho_i = l_i / l(v_i, w_i)``.

Only three kinds of position are supported:

* :class:`IntegerClass` -- ``<n>_i`` for an integer ``n``;
* :class:`RationalPoint` -- ``<xi>_i`` for a rational ``xi`` that is not an
  integer class;
* :class:`Generic` -- an integer combination of symbols (plus a rational
  offset) whose symbols are algebraically independent of every length.

Everything downstream only ever asks whether a coordinate is an integer
class and which one, so all arithmetic stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import MalformedInput, UnsupportedCoordinate

Number = Union[int, Fraction]


def as_fraction(value, *, path: str | None = None) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string into a Fraction.

    Floats are refused: they would silently corrupt exact lengths.
    """
    if isinstance(value, bool):
        raise MalformedInput(f"expected a rational, got {value!r}", path=path)
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise MalformedInput(f"not a rational: {value!r}", path=path) from None
    raise MalformedInput(f"expected a rational as int or 'p/q' string, got {value!r}", path=path)


def fraction_str(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


# --------------------------------------------------------------------------
# geometry


@dataclass(frozen=True)
class CycleGeometry:
    """One cycle: its circumference and the positive arc from v to w.

    ``arc=None`` is the irrational marker: the circumference is an
    irrational multiple of the arc.
    """

    circumference: Fraction
    arc: Fraction | None = Fraction(1)

    def __post_init__(self):
        circ = as_fraction(self.circumference)
        object.__setattr__(self, "circumference", circ)
        if circ <= 0:
            raise MalformedInput(f"circumference must be positive, got {circ}")
        if self.arc is not None:
            arc = as_fraction(self.arc)
            object.__setattr__(self, "arc", arc)
            if not 0 < arc <= circ / 2:
                raise MalformedInput(
                    f"arc v->w must satisfy 0 < arc <= circumference/2, got arc={arc}, circumference={circ}"
                )

    @property
    def irrational(self) -> bool:
        return self.arc is None

    @property
    def ratio(self) -> Fraction | None:
        """``rho = circumference / arc``, or None for the irrational marker."""
        if self.arc is None:
            return None
        return self.circumference / self.arc


def torsion_from_geometry(cycle: CycleGeometry) -> int:
    """Least ``m > 0`` with ``m * arc`` a multiple of the circumference; 0 if irrational."""
    ratio = cycle.ratio
    if ratio is None:
        return 0
    return ratio.numerator


@dataclass(frozen=True)
class TorsionProfile:
    """The torsions ``m_2, ..., m_{g-1}`` of a chain of genus ``g``."""

    genus: int
    m: tuple[int, ...] = ()

    def __post_init__(self):
        m = tuple(int(x) for x in self.m)
        object.__setattr__(self, "m", m)
        if self.genus < 1:
            raise MalformedInput(f"genus must be >= 1, got {self.genus}")
        if len(m) != max(self.genus - 2, 0):
            raise MalformedInput(
                f"a genus-{self.genus} profile has {max(self.genus - 2, 0)} entries, got {len(m)}"
            )
        for i, value in enumerate(m, start=2):
            if value < 0 or value == 1:
                raise MalformedInput(f"m_{i} must be 0 or >= 2, got {value}")

    @classmethod
    def of(cls, m: Iterable[int]) -> "TorsionProfile":
        """Profile from the interior torsions alone; the genus is ``len(m) + 2``."""
        m = tuple(m)
        return cls(len(m) + 2, m)

    def torsion(self, i: int) -> int:
        """``m_i`` for ``1 <= i <= g``; the end cycles use the exact (mod 0) convention."""
        if not 1 <= i <= self.genus:
            raise IndexError(i)
        if i == 1 or i == self.genus:
            return 0
        return self.m[i - 2]

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.torsion(i) for i in range(1, self.genus + 1))

    @property
    def periods(self) -> tuple[Fraction | None, ...]:
        # a cycle of circumference m_i and unit arc realizes m_i; m = 0 stays symbolic
        return tuple(Fraction(m) if m else None for m in self.moduli)

    def reversed(self) -> "TorsionProfile":
        return TorsionProfile(self.genus, self.m[::-1])

    def __str__(self):
        return "(" + ",".join(str(x) for x in self.m) + ")"


@dataclass(frozen=True)
class ChainOfCycles:
    cycles: tuple[CycleGeometry, ...]
    bridges: tuple[Fraction, ...] = ()

    def __post_init__(self):
        cycles = tuple(self.cycles)
        object.__setattr__(self, "cycles", cycles)
        if not cycles:
            raise MalformedInput("a chain needs at least one cycle")
        bridges = tuple(as_fraction(b) for b in self.bridges)
        if not bridges:
            bridges = (Fraction(1),) * (len(cycles) - 1)
        object.__setattr__(self, "bridges", bridges)
        if len(bridges) != len(cycles) - 1:
            raise MalformedInput(f"genus {len(cycles)} needs {len(cycles) - 1} bridges, got {len(bridges)}")
        if any(b <= 0 for b in bridges):
            raise MalformedInput("bridge lengths must be positive")

    @property
    def genus(self) -> int:
        return len(self.cycles)

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(torsion_from_geometry(c) for c in self.cycles)

    @property
    def periods(self) -> tuple[Fraction | None, ...]:
        return tuple(c.ratio for c in self.cycles)

    def with_bridges(self, bridges: Sequence[Number]) -> "ChainOfCycles":
        return ChainOfCycles(self.cycles, tuple(as_fraction(b) for b in bridges))


def profile_of(chain: ChainOfCycles) -> TorsionProfile:
    m = tuple(torsion_from_geometry(c) for c in chain.cycles[1:-1])
    return TorsionProfile(chain.genus, m)


def synthesize_chain(profile: TorsionProfile) -> ChainOfCycles:
    """Canonical geometry with the given profile: unit arcs, unit bridges,
    circumference ``m_i`` (or irrational when ``m_i = 0``) inside and 2 at the ends."""
    g = profile.genus
    cycles = []
    for i in range(1, g + 1):
        if i == 1 or i == g:
            cycles.append(CycleGeometry(Fraction(2), Fraction(1)))
        else:
            m = profile.torsion(i)
            cycles.append(CycleGeometry(Fraction(m), Fraction(1)) if m else CycleGeometry(Fraction(2), None))
    return ChainOfCycles(tuple(cycles), (Fraction(1),) * (g - 1))


# --------------------------------------------------------------------------
# positions


@dataclass(frozen=True)
class IntegerClass:
    n: int

    def __str__(self):
        return f"<{self.n}>"


@dataclass(frozen=True)
class RationalPoint:
    xi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "xi", as_fraction(self.xi))

    def __str__(self):
        return f"<{self.xi}>"


@dataclass(frozen=True)
class Generic:
    """``offset + sum(coeff * symbol)``; distinct symbols never cancel each other."""

    terms: tuple[tuple[str, int], ...]
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        merged: dict[str, int] = {}
        for name, coeff in self.terms:
            merged[name] = merged.get(name, 0) + int(coeff)
        object.__setattr__(self, "terms", tuple(sorted((k, c) for k, c in merged.items() if c)))
        object.__setattr__(self, "offset", as_fraction(self.offset))

    @classmethod
    def symbol(cls, name: str) -> "Generic":
        return cls(((name, 1),))

    def __str__(self):
        parts = [f"{'' if c == 1 else '-' if c == -1 else c}{s}" for s, c in self.terms]
        if self.offset:
            parts.append(str(self.offset))
        return "<" + "+".join(parts) + ">"


Position = Union[IntegerClass, RationalPoint, Generic]

W = IntegerClass(0)
V = IntegerClass(-1)


def coordinate(pos: Position) -> tuple[Fraction, dict[str, int]]:
    """Split a position into its rational part and its symbolic part."""
    if isinstance(pos, IntegerClass):
        return Fraction(pos.n), {}
    if isinstance(pos, RationalPoint):
        return pos.xi, {}
    if isinstance(pos, Generic):
        return pos.offset, dict(pos.terms)
    raise TypeError(f"not a position: {pos!r}")


def make_position(offset: Fraction, terms: Mapping[str, int], period: Fraction | None) -> Position:
    terms = {k: c for k, c in terms.items() if c}
    if terms:
        return normalize_position(Generic(tuple(terms.items()), offset), period)
    return normalize_position(RationalPoint(offset), period)


def normalize_position(pos: Position, period: Fraction | None) -> Position:
    """Canonical form of ``pos`` on a cycle with ratio ``period`` (None = irrational).

    Integer classes are reduced mod the torsion; rational points in
    ``Z + rho Z`` become integer classes; offsets are reduced mod ``rho``.
    """
    if isinstance(pos, IntegerClass):
        if period is None:
            return pos
        return IntegerClass(pos.n % period.numerator)
    if isinstance(pos, RationalPoint):
        xi = pos.xi
        if period is None:
            if xi.denominator != 1:
                raise UnsupportedCoordinate(
                    f"rational coordinate {xi} on a cycle with irrational ratio"
                )
            return IntegerClass(xi.numerator)
        p, q = period.numerator, period.denominator
        # Z + (p/q)Z = (1/q)Z because gcd(p, q) = 1
        scaled = xi * q
        if scaled.denominator == 1:
            return IntegerClass(scaled.numerator * pow(q, -1, p) % p)
        return RationalPoint(xi % period)
    if isinstance(pos, Generic):
        if not pos.terms:
            return normalize_position(RationalPoint(pos.offset), period)
        if period is None:
            return pos
        return Generic(pos.terms, pos.offset % period)
    raise TypeError(f"not a position: {pos!r}")


def class_of(pos: Position) -> int | None:
    """The integer ``n`` of a normalized ``<n>``, else None."""
    return pos.n if isinstance(pos, IntegerClass) else None


# --------------------------------------------------------------------------
# divisors


@dataclass(frozen=True)
class CyclePoint:
    cycle: int
    position: Position

    def __str__(self):
        return f"{self.position}_{self.cycle}"


@dataclass(frozen=True)
class BridgePoint:
    """A point on the bridge from ``w_i`` to ``v_{i+1}``, ``offset`` length units from ``w_i``."""

    bridge: int
    offset: Fraction

    def __post_init__(self):
        object.__setattr__(self, "offset", as_fraction(self.offset))

    def __str__(self):
        return f"b{self.bridge}@{self.offset}"


Location = Union[CyclePoint, BridgePoint]


def _location_key(loc: Location):
    if isinstance(loc, CyclePoint):
        pos = loc.position
        off, terms = coordinate(pos)
        return (0, loc.cycle, type(pos).__name__, tuple(terms.items()), off)
    return (1, loc.bridge, "", (), loc.offset)


@dataclass(frozen=True)
class Divisor:
    """A finite integer combination of points; zero multiplicities are dropped."""

    entries: tuple[tuple[Location, int], ...] = ()

    def __post_init__(self):
        merged: dict[Location, int] = {}
        for loc, mult in self.entries:
            merged[loc] = merged.get(loc, 0) + int(mult)
        items = sorted(((loc, k) for loc, k in merged.items() if k), key=lambda e: _location_key(e[0]))
        object.__setattr__(self, "entries", tuple(items))

    @classmethod
    def of(cls, items: Iterable[tuple[Location, int]] | Mapping[Location, int]) -> "Divisor":
        if isinstance(items, Mapping):
            items = items.items()
        return cls(tuple(items))

    @classmethod
    def point(cls, cycle: int, position: Position, mult: int = 1) -> "Divisor":
        return cls(((CyclePoint(cycle, position), mult),))

    @classmethod
    def zero(cls) -> "Divisor":
        return cls(())

    @property
    def degree(self) -> int:
        return sum(k for _, k in self.entries)

    def is_effective(self) -> bool:
        return all(k >= 0 for _, k in self.entries)

    def __iter__(self) -> Iterator[tuple[Location, int]]:
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor(self.entries + other.entries)

    def __neg__(self) -> "Divisor":
        return Divisor(tuple((loc, -k) for loc, k in self.entries))

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __rmul__(self, n: int) -> "Divisor":
        return Divisor(tuple((loc, n * k) for loc, k in self.entries))

    def on_cycle(self, i: int) -> list[tuple[Position, int]]:
        return [(loc.position, k) for loc, k in self.entries if isinstance(loc, CyclePoint) and loc.cycle == i]

    def occupied_cycles(self) -> tuple[int, ...]:
        return tuple(sorted({loc.cycle for loc, _ in self.entries if isinstance(loc, CyclePoint)}))

    def __str__(self):
        if not self.entries:
            return "0"
        return " + ".join(f"{k}*{loc}" if k != 1 else str(loc) for loc, k in self.entries)


def sum_points(points: Iterable[tuple[int, Position]]) -> Divisor:
    return Divisor(tuple((CyclePoint(i, pos), 1) for i, pos in points))


def normalize_divisor(chain, divisor: Divisor) -> Divisor:
    """Move bridge chips to the left endpoint ``w_i`` and normalize positions.

    A chip slides freely along a bridge: the function with slope 1 on the
    segment between ``w_i`` and the chip (and constant elsewhere) has
    divisor ``w_i - P``.
    """
    g = chain.genus
    periods = chain.periods
    bridges = getattr(chain, "bridges", None)
    items = []
    for loc, k in divisor.entries:
        if isinstance(loc, BridgePoint):
            if not 1 <= loc.bridge <= g - 1:
                raise MalformedInput(f"bridge index {loc.bridge} outside 1..{g - 1}")
            if loc.offset < 0 or (bridges is not None and loc.offset > bridges[loc.bridge - 1]):
                raise MalformedInput(f"offset {loc.offset} outside bridge {loc.bridge}")
            items.append((CyclePoint(loc.bridge, W), k))
        else:
            if not 1 <= loc.cycle <= g:
                raise MalformedInput(f"cycle index {loc.cycle} outside 1..{g}")
            pos = normalize_position(loc.position, periods[loc.cycle - 1])
            items.append((CyclePoint(loc.cycle, pos), k))
    return Divisor(tuple(items))


# --------------------------------------------------------------------------
# JSON documents


def chain_from_json(doc) -> ChainOfCycles | TorsionProfile:
    """Parse a chain document.

    ``{"torsion_profile": [...]}`` yields a :class:`TorsionProfile`;
    ``{"genus": g, "cycles": [...], "bridges": [...]}`` a :class:`ChainOfCycles`.
    """
    if not isinstance(doc, Mapping):
        raise MalformedInput("chain document must be an object", path="$")
    if "torsion_profile" in doc:
        m = doc["torsion_profile"]
        if not isinstance(m, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in m):
            raise MalformedInput("torsion_profile must be a list of integers", path="$.torsion_profile")
        genus = doc.get("genus", len(m) + 2)
        try:
            return TorsionProfile(genus, tuple(m))
        except MalformedInput as exc:
            raise MalformedInput(str(exc), path="$.torsion_profile") from None
    if "cycles" not in doc:
        raise MalformedInput("chain document needs 'torsion_profile' or 'cycles'", path="$")
    cycles_doc = doc["cycles"]
    if not isinstance(cycles_doc, list):
        raise MalformedInput("cycles must be a list", path="$.cycles")
    cycles = []
    for n, c in enumerate(cycles_doc):
        path = f"$.cycles[{n}]"
        if not isinstance(c, Mapping) or "circumference" not in c:
            raise MalformedInput("cycle needs a circumference", path=path)
        arc = c.get("arc", "1/1")
        try:
            circ = as_fraction(c["circumference"], path=path + ".circumference")
            arc_value = None if arc == "irrational" else as_fraction(arc, path=path + ".arc")
            cycles.append(CycleGeometry(circ, arc_value))
        except MalformedInput as exc:
            raise MalformedInput(str(exc), path=exc.path or path) from None
    if "genus" in doc and doc["genus"] != len(cycles):
        raise MalformedInput(f"genus {doc['genus']} but {len(cycles)} cycles", path="$.genus")
    bridges_doc = doc.get("bridges", [])
    if not isinstance(bridges_doc, list):
        raise MalformedInput("bridges must be a list", path="$.bridges")
    bridges = tuple(as_fraction(b, path=f"$.bridges[{n}]") for n, b in enumerate(bridges_doc))
    try:
        return ChainOfCycles(tuple(cycles), bridges)
    except MalformedInput as exc:
        raise MalformedInput(str(exc), path="$.bridges") from None


def chain_to_json(chain) -> dict:
    if isinstance(chain, TorsionProfile):
        return {"torsion_profile": list(chain.m), "genus": chain.genus}
    return {
        "genus": chain.genus,
        "cycles": [
            {
                "circumference": fraction_str(c.circumference),
                "arc": "irrational" if c.arc is None else fraction_str(c.arc),
            }
            for c in chain.cycles
        ],
        "bridges": [fraction_str(b) for b in chain.bridges],
    }


def position_to_json(pos: Position) -> dict:
    if isinstance(pos, IntegerClass):
        return {"class": pos.n}
    if isinstance(pos, RationalPoint):
        return {"xi": fraction_str(pos.xi)}
    if len(pos.terms) == 1 and pos.terms[0][1] == 1 and pos.offset == 0:
        return {"generic": pos.terms[0][0]}
    return {"generic": {s: c for s, c in pos.terms}, "offset": fraction_str(pos.offset)}


def position_from_json(doc, path: str = "$") -> Position:
    if not isinstance(doc, Mapping):
        raise MalformedInput("position must be an object", path=path)
    if "class" in doc:
        n = doc["class"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise MalformedInput("class must be an integer", path=path + ".class")
        return IntegerClass(n)
    if "xi" in doc:
        return RationalPoint(as_fraction(doc["xi"], path=path + ".xi"))
    if "generic" in doc:
        sym = doc["generic"]
        offset = as_fraction(doc.get("offset", 0), path=path + ".offset")
        if isinstance(sym, str):
            return Generic(((sym, 1),), offset)
        if isinstance(sym, Mapping) and all(isinstance(c, int) for c in sym.values()):
            return Generic(tuple(sym.items()), offset)
        raise MalformedInput("generic must be a symbol name or {symbol: coeff}", path=path + ".generic")
    raise MalformedInput("position needs one of 'class', 'xi', 'generic'", path=path)


def divisor_from_json(doc, path: str = "$") -> Divisor:
    if not isinstance(doc, list):
        raise MalformedInput("divisor must be a list of chips", path=path)
    items = []
    for n, entry in enumerate(doc):
        p = f"{path}[{n}]"
        if not isinstance(entry, Mapping):
            raise MalformedInput("chip must be an object", path=p)
        mult = entry.get("mult", 1)
        if not isinstance(mult, int) or isinstance(mult, bool):
            raise MalformedInput("mult must be an integer", path=p + ".mult")
        if "bridge" in entry:
            b = entry["bridge"]
            if not isinstance(b, int) or isinstance(b, bool):
                raise MalformedInput("bridge must be an integer", path=p + ".bridge")
            items.append((BridgePoint(b, as_fraction(entry.get("offset", 0), path=p + ".offset")), mult))
        elif "cycle" in entry:
            c = entry["cycle"]
            if not isinstance(c, int) or isinstance(c, bool):
                raise MalformedInput("cycle must be an integer", path=p + ".cycle")
            items.append((CyclePoint(c, position_from_json(entry.get("position"), p + ".position")), mult))
        else:
            raise MalformedInput("chip needs 'cycle' or 'bridge'", path=p)
    return Divisor(tuple(items))


def divisor_to_json(divisor: Divisor) -> list[dict]:
    out = []
    for loc, k in divisor.entries:
        if isinstance(loc, BridgePoint):
            out.append({"bridge": loc.bridge, "offset": fraction_str(loc.offset), "mult": k})
        else:
            out.append({"cycle": loc.cycle, "position": position_to_json(loc.position), "mult": k})
    return out
