"""Brill-Noether ranks ``w^r_d`` of chains of cycles and the special profiles
where they misbehave.

``w^r_d`` is the largest ``w`` such that every effective divisor ``E`` of
degree ``w + r`` sits inside some effective divisor of degree ``d`` and
rank at least ``r``.  Everything here works on a :class:`TorsionProfile`:
rank conditions only ever compare coordinates modulo the torsions, so two
chains with the same profile have the same ``w^r_d``.  The finite-graph
oracle in :mod:`tropchain.dhar` is used in the tests to cross-check this.

Adversarial divisors
--------------------
Up to equivalence an effective ``E`` of degree ``s <= g`` has its chips on
``s`` distinct cycles ``S``.  On ``C_j`` the chip is either an integer
class ``<c>`` or something else.  A tableau cell on ``C_j`` only ever
asks for ``xi_j = <x - y>`` with ``x - y`` in ``[-r, g - d + r - 1]``, and

    xi_j = c - K_j + (j - 1) - f

where ``K_j`` counts chips of ``E`` left of ``C_j`` and ``f`` counts
completion points left of it.  ``0 <= K_j + f <= d - 1 - R_j`` with
``R_j`` the chips of ``E`` right of ``C_j``, so only

    K_j - r - j + 1  <=  c  <=  g + r - j - 1 - R_j

can ever match a cell (``d`` cancels).  Outside that window, and for
non-integer chips, the chip behaves like a generic point.  On a cycle
with torsion ``m > 0`` the residues ``0 .. m - 1`` cover everything.  This
makes the set of strata finite.

Generic chips are the hardest adversaries: a chip's tag only enters the
condition on its own cycle, and a generic chip there forbids exactly
what an integer class forbids plus more.  Any completion of the
all-generic stratum on ``S`` therefore completes every tagged stratum on
``S`` as well, and :func:`bn_rank` only needs the ``C(g, s)`` generic
strata.  ``exhaustive=True`` checks every tagged stratum anyway.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator

from .abel import representing_divisor
from .chain_model import CyclePoint, Divisor, Generic, IntegerClass, TorsionProfile, make_position, coordinate
from .errors import PreconditionError, UnsupportedCoordinate
from .rank import Completion, complete_to_rank, divisor_rank, satisfies_tableau
from .tableaux import (
    DisplacementTableau,
    SearchStats,
    enumerate_tableaux,
    hyperelliptic_tableau,
    rectangle,
    validate_tableau,
    wrd_dim,
)


# --------------------------------------------------------------------------
# classification


def is_hyperelliptic(profile: TorsionProfile) -> bool:
    return all(m == 2 for m in profile.m)


def special_indices(profile: TorsionProfile) -> tuple[int, ...]:
    """Interior cycles whose torsion is not 2."""
    return tuple(i for i in range(2, profile.genus) if profile.torsion(i) != 2)


def is_martens_special(profile: TorsionProfile, r: int) -> bool:
    """Every interior torsion is 2 except at ``j_1 < ... < j_k`` (``k >= 1``)
    with ``r + 1 < j_1``, ``j_k < g - r``, gaps at least ``r + 1`` and
    ``g >= 2r + 3``."""
    g = profile.genus
    js = special_indices(profile)
    if r < 1 or g < 2 * r + 3 or not js:
        return False
    if js[0] <= r + 1 or js[-1] >= g - r:
        return False
    return all(b - a >= r + 1 for a, b in zip(js, js[1:]))


@dataclass(frozen=True)
class MartensClassification:
    kind: str  # "hyperelliptic", "martens-special" or "neither"
    rank: int | None = None  # largest r for which the profile is special
    type: int | None = None
    indices: tuple[int, ...] = ()
    ranks: tuple[int, ...] = ()  # every r for which it is special: 1 .. rank

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "martens-special":
            out.update(r=self.rank, k=self.type, j=list(self.indices), special_for_ranks=list(self.ranks))
        return out


def martens_classify(profile: TorsionProfile) -> MartensClassification:
    if profile.genus < 3:
        raise PreconditionError("classification needs genus >= 3")
    if is_hyperelliptic(profile):
        return MartensClassification("hyperelliptic")
    ranks = tuple(r for r in range(1, profile.genus) if is_martens_special(profile, r))
    if not ranks:
        return MartensClassification("neither")
    js = special_indices(profile)
    # the conditions only get weaker as r drops, so the ranks form 1..r*
    assert ranks == tuple(range(1, ranks[-1] + 1))
    return MartensClassification("martens-special", ranks[-1], len(js), js, ranks)


# --------------------------------------------------------------------------
# adversarial strata


@dataclass(frozen=True)
class Stratum:
    """One chip on each cycle of ``cycles``; ``tags[n]`` is its integer class
    on ``cycles[n]``, or None for a generic chip."""

    cycles: tuple[int, ...]
    tags: tuple[int | None, ...]

    @property
    def size(self) -> int:
        return len(self.cycles)

    @property
    def generic(self) -> bool:
        return all(t is None for t in self.tags)

    def divisor(self, prefix: str = "e") -> Divisor:
        items = []
        for j, tag in zip(self.cycles, self.tags):
            pos = Generic.symbol(f"{prefix}{j}") if tag is None else IntegerClass(tag)
            items.append((CyclePoint(j, pos), 1))
        return Divisor(tuple(items))

    def to_json(self) -> dict:
        return {"cycles": list(self.cycles), "tags": ["generic" if t is None else t for t in self.tags]}


def tag_window(profile: TorsionProfile, cycles: tuple[int, ...], j: int, r: int) -> range:
    """Integer classes worth distinguishing for the chip on ``C_j``."""
    m = profile.torsion(j)
    if m:
        return range(m)
    left = sum(1 for c in cycles if c < j)
    right = sum(1 for c in cycles if c > j)
    return range(left - r - j + 1, profile.genus + r - j - 1 - right + 1)


def enumerate_strata(profile: TorsionProfile, s: int, r: int = 0, generic_only: bool = False) -> Iterator[Stratum]:
    g = profile.genus
    if s > g:
        raise UnsupportedCoordinate(f"strata of size {s} > genus {g}: chips cannot be spread over distinct cycles")
    if s < 0:
        raise PreconditionError("stratum size must be non-negative")
    for cycles in combinations(range(1, g + 1), s):
        if generic_only:
            yield Stratum(cycles, (None,) * s)
            continue
        choices = [(None, *tag_window(profile, cycles, j, r)) for j in cycles]
        for tags in product(*choices):
            yield Stratum(cycles, tags)


def count_strata(profile: TorsionProfile, s: int, r: int = 0) -> int:
    total = 0
    for cycles in combinations(range(1, profile.genus + 1), s):
        n = 1
        for j in cycles:
            n *= 1 + len(tag_window(profile, cycles, j, r))
        total += n
    return total


def _adversarial_order(profile: TorsionProfile, s: int) -> list[tuple[int, ...]]:
    """Subsets likely to fail first: those staying away from non-2 cycles."""
    near = {k for i in special_indices(profile) for k in (i - 1, i, i + 1)}
    subsets = list(combinations(range(1, profile.genus + 1), s))
    return sorted(subsets, key=lambda S: (len(near.intersection(S)), S))


# --------------------------------------------------------------------------
# w^r_d


@dataclass
class LevelResult:
    """Outcome of checking every stratum of one size."""

    size: int
    passed: bool
    checked: int = 0
    failing: Stratum | None = None
    witnesses: list[tuple[Stratum, Completion]] = field(default_factory=list)
    search_states: int = 0

    def to_json(self, with_witnesses: bool = True) -> dict:
        out = {"size": self.size, "passed": self.passed, "strata_checked": self.checked,
               "search_states": self.search_states}
        if self.failing is not None:
            out["failing_stratum"] = self.failing.to_json()
        if with_witnesses and self.witnesses:
            out["witnesses"] = [
                {"stratum": S.to_json(), "F": _divisor_json(c.F), "tableau": c.tableau.to_json()}
                for S, c in self.witnesses
            ]
        return out


def _divisor_json(D: Divisor) -> list:
    from .chain_model import divisor_to_json

    return divisor_to_json(D)


def check_level(
    profile: TorsionProfile,
    d: int,
    r: int,
    s: int,
    exhaustive: bool = False,
    keep_witnesses: bool = False,
) -> LevelResult:
    """Is every effective divisor of degree ``s`` completable to degree ``d``, rank ``r``?"""
    result = LevelResult(s, True)
    if s > d:
        result.passed = False
        return result
    stats = SearchStats()
    for cycles in _adversarial_order(profile, s):
        strata = [Stratum(cycles, (None,) * s)]
        if exhaustive:
            strata += [S for S in _tagged(profile, cycles, r) if not S.generic]
        for S in strata:
            result.checked += 1
            done = complete_to_rank(profile, S.divisor(), d, r, stats)
            if done is None:
                result.passed = False
                result.failing = S
                result.search_states = stats.states
                return result
            if keep_witnesses:
                result.witnesses.append((S, done))
    result.search_states = stats.states
    result.witnesses.sort(key=lambda item: (item[0].cycles, [(-1 if t is None else t) for t in item[0].tags]))
    return result


def _tagged(profile: TorsionProfile, cycles: tuple[int, ...], r: int) -> Iterator[Stratum]:
    choices = [(None, *tag_window(profile, cycles, j, r)) for j in cycles]
    for tags in product(*choices):
        yield Stratum(cycles, tags)


def bn_at_least(profile: TorsionProfile, d: int, r: int, w: int, exhaustive: bool = False) -> bool:
    """``w^r_d >= w``, decided by one level check (``w + r <= g`` required)."""
    if w < 0:
        return True
    if w + r > profile.genus:
        raise UnsupportedCoordinate("level beyond the genus")
    return check_level(profile, d, r, w + r, exhaustive).passed


def jensen_len_bound(genus: int, d: int, r: int) -> int | None:
    """``d - 2r`` where the general upper bound applies, else None."""
    if 0 <= r <= genus - 1 and 2 * r <= d <= genus - 1 + r:
        return d - 2 * r
    return None


@dataclass
class BnCertificate:
    genus: int
    d: int
    r: int
    lo: int
    hi: int
    lower: dict
    upper: dict
    lower_level: LevelResult | None = None
    upper_level: LevelResult | None = None

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def value(self) -> int | None:
        return self.lo if self.exact else None

    def to_json(self, with_witnesses: bool = True) -> dict:
        out = {"genus": self.genus, "d": self.d, "r": self.r, "exact": self.exact}
        if self.exact:
            out["value"] = self.lo
        else:
            out["interval"] = [self.lo, self.hi]
        lower = dict(self.lower)
        if self.lower_level is not None:
            lower["level"] = self.lower_level.to_json(with_witnesses)
        upper = dict(self.upper)
        if self.upper_level is not None:
            upper["level"] = self.upper_level.to_json(False)
        out["evidence"] = {"lower": lower, "upper": upper}
        return out


def bn_rank(
    profile: TorsionProfile,
    d: int,
    r: int,
    exhaustive: bool = False,
    keep_witnesses: bool = True,
) -> BnCertificate:
    if r < 0 or d < 0:
        raise PreconditionError("d and r must be non-negative")
    g = profile.genus
    cols, rows = rectangle(g, d, r)
    if cols <= 0:
        # any divisor of degree d >= g + r has rank >= d - g >= r
        return BnCertificate(g, d, r, d - r, d - r, {"kind": "riemann-roch"}, {"kind": "degree"})
    if next(iter(enumerate_tableaux(profile, d, r)), None) is None:
        return BnCertificate(g, d, r, -1, -1, {"kind": "definition"}, {"kind": "no-tableau"})

    top, reason = d - r, "degree"
    if g - r < top:
        top, reason = g - r, "strata-beyond-genus"
    bound = jensen_len_bound(g, d, r)
    if bound is not None and bound <= top:
        top, reason = bound, "jensen-len"

    good, bad = -1, top + 1  # w = good passes, w = bad fails (or is out of range)
    lower_level = upper_level = None
    while bad - good > 1:
        mid = (good + bad) // 2
        res = check_level(profile, d, r, mid + r, exhaustive, keep_witnesses)
        if res.passed:
            good, lower_level = mid, res
        else:
            bad, upper_level = mid, res
    lower = {"kind": "all-strata-completable", "exhaustive": exhaustive}
    if lower_level is None:
        lower = {"kind": "definition"}
    if bad <= top:
        upper = {"kind": "failing-stratum"}
        hi = bad - 1
    else:
        upper = {"kind": reason}
        hi = top
        upper_level = None
    return BnCertificate(g, d, r, good, hi, lower, upper, lower_level, upper_level)


# --------------------------------------------------------------------------
# adversarial points that no completion can absorb


@dataclass
class AdversarialWitness:
    """An ``E`` that admits no completion, so ``w^r_d < deg E - r``."""

    E: Divisor
    cycles: tuple[int, ...]
    completion: Completion | None

    @property
    def refutes(self) -> bool:
        return self.completion is None


def theorem_a_witness(profile: TorsionProfile, d: int, r: int, i: int | None = None) -> AdversarialWitness:
    """Generic chips on the first ``d - r`` cycles avoiding ``i - 1, i, i + 1``.

    ``i`` defaults to the first interior cycle with torsion other than 2.
    """
    g = profile.genus
    if is_hyperelliptic(profile):
        raise PreconditionError("profile is hyperelliptic")
    if not 1 <= r <= g - 2:
        raise PreconditionError(f"need 1 <= r <= g - 2, got r = {r}")
    if not 2 * r <= d <= g - 3 + r:
        raise PreconditionError(f"need 2r <= d <= g - 3 + r, got d = {d}")
    if i is None:
        i = special_indices(profile)[0]
    if not 2 <= i <= g - 1 or profile.torsion(i) == 2:
        raise PreconditionError(f"m_{i} must be an interior torsion other than 2")
    allowed = [j for j in range(1, g + 1) if abs(j - i) > 1]
    if len(allowed) < d - r:
        raise PreconditionError("not enough cycles away from the chosen index")
    J = tuple(allowed[: d - r])
    E = Stratum(J, (None,) * len(J)).divisor()
    return AdversarialWitness(E, J, complete_to_rank(profile, E, d, r))


# --------------------------------------------------------------------------
# explicit completions on special profiles


@dataclass
class TheoremBWitness:
    case: str
    r: int
    complement: tuple[int, int]
    E: Divisor  # the adversarial chips
    completed: Divisor  # E plus the paired chips, degree g - 2 + r
    tableau: DisplacementTableau
    tableau_valid: bool
    satisfied: bool
    rank: int

    @property
    def ok(self) -> bool:
        return self.tableau_valid and self.satisfied and self.rank >= self.r

    def to_json(self) -> dict:
        from .chain_model import divisor_to_json

        return {
            "case": self.case,
            "complement": list(self.complement),
            "divisor": divisor_to_json(self.completed),
            "tableau": self.tableau.to_json(),
            "tableau_valid": self.tableau_valid,
            "satisfies_tableau": self.satisfied,
            "rank": self.rank,
            "ok": self.ok,
        }


def _hook(cols: int, rows: int, overrides: dict[tuple[int, int], int], start: int = 1) -> DisplacementTableau:
    cells = {(x, y): start + x + y - 2 for x in range(1, cols + 1) for y in range(1, rows + 1)}
    cells.update(overrides)
    return DisplacementTableau.from_cells(cols, rows, cells)


def _paired(pos, period, around: int):
    """The point ``P'`` with ``P + P'`` equivalent to twice ``<around>``."""
    off, terms = coordinate(pos)
    return make_position(2 * around - off, {k: -c for k, c in terms.items()}, period)


def _case_b_plan(g: int, r: int, js: tuple[int, ...], a: int, b: int):
    """Cycles receiving a paired chip, and the tableau, for the left-anchored cases."""
    J = set(js)
    if a in J and b in J:
        pair = list(range(a + 1, a + r + 1))
        t = _hook(2, r + 1, {(2, r + 1): b}, start=a)
        return "1", pair, t
    if b in J or a not in J:
        # cases 2 and 4; pairs go on the smallest cycles outside J and {a, b}
        if b in J:
            pair = [i for i in range(1, r + 2) if i != a][:r]
            case = "2"
        else:
            pair = [i for i in range(1, g + 1) if i not in J and i not in (a, b)][:r]
            case = "4"
        if a >= r + 1:
            t = _hook(2, r + 1, {(2, r + 1): b, (1, r + 1): a, (2, r): a})
            return case + "a", pair, t
        if b > r + 1:
            return case + "b", pair, _hook(2, r + 1, {(2, r + 1): b})
        if js and js[0] == r + 2:
            return case + "d", pair, _hook(2, r + 1, {(2, r + 1): r + 3})
        return case + "c", pair, _hook(2, r + 1, {})
    return None


def theorem_b_witness(
    profile: TorsionProfile,
    r: int,
    complement: tuple[int, int],
    tags: dict[int, int] | None = None,
) -> TheoremBWitness:
    """Complete the chips on every cycle except ``complement`` to rank ``r``.

    Chips default to generic points; ``tags`` fixes some of them to
    integer classes.  When ``a`` is special and ``b`` is not, the
    construction is run on the reversed chain and mirrored back.
    """
    g = profile.genus
    if not is_martens_special(profile, r):
        raise PreconditionError(f"profile is not Martens-special for rank {r}")
    a, b = sorted(complement)
    if not 1 <= a < b <= g:
        raise PreconditionError("complement must be two distinct cycles")
    tags = dict(tags or {})
    js = special_indices(profile)
    periods = profile.periods
    cycles = [i for i in range(1, g + 1) if i not in (a, b)]
    chips = {}
    for i in cycles:
        chips[i] = IntegerClass(tags[i]) if i in tags else Generic.symbol(f"p{i}")
    E = Divisor(tuple((CyclePoint(i, p), 1) for i, p in chips.items()))

    plan = _case_b_plan(g, r, js, a, b)
    if plan is not None:
        case, pair, t = plan
        around = {i: 0 for i in pair}
    else:
        # mirror: run the left-anchored construction on the reversed profile
        mj = tuple(sorted(g + 1 - j for j in js))
        case, mpair, mt = _case_b_plan(g, r, mj, g + 1 - b, g + 1 - a)
        case = "3" + case[1:]
        pair = [g + 1 - i for i in mpair]
        around = {i: -1 for i in pair}  # pair against 2v instead of 2w
        t = DisplacementTableau.from_cells(
            2, r + 1, {(x, y): g + 1 - mt[3 - x, r + 2 - y] for x in (1, 2) for y in range(1, r + 2)}
        )
    extra = Divisor(tuple((CyclePoint(i, _paired(chips[i], periods[i - 1], around[i])), 1) for i in pair))
    completed = E + extra
    valid = bool(validate_tableau(profile, t))
    satisfied = satisfies_tableau(representing_divisor(profile, completed), t, profile)
    rank = divisor_rank(profile, completed).rank
    return TheoremBWitness(case, r, (a, b), E, completed, t, valid, satisfied, rank)


# --------------------------------------------------------------------------
# gonality and consequences


@dataclass
class GonalityBound:
    value: int
    tableau: DisplacementTableau
    source: str
    torus_dimension: int | None = None  # dim W^1_value when computed

    def to_json(self) -> dict:
        out = {"value": self.value, "source": self.source, "tableau": self.tableau.to_json()}
        if self.torus_dimension is not None:
            out["dim_W1"] = self.torus_dimension
        return out


def martens_tableau(profile: TorsionProfile) -> DisplacementTableau:
    """Two rows through the non-special cycles: ``t(n, 1) = i_n``, ``t(n, 2) = i_{n+1}``."""
    js = set(special_indices(profile))
    rest = [i for i in range(1, profile.genus + 1) if i not in js]
    n = len(rest) - 1
    return DisplacementTableau(n, 2, (tuple(rest[:n]), tuple(rest[1:])))


def gonality_upper(profile: TorsionProfile) -> GonalityBound:
    """An upper bound for the gonality with a tableau certifying a rank-1 class."""
    g = profile.genus
    if g == 1:
        return GonalityBound(2, DisplacementTableau.empty(), "genus-one")
    if is_hyperelliptic(profile):
        return GonalityBound(2, hyperelliptic_tableau(g), "hyperelliptic", wrd_dim(profile, 2, 1))
    if g >= 3 and martens_classify(profile).kind == "martens-special":
        k = len(special_indices(profile))
        t = martens_tableau(profile)
        if validate_tableau(profile, t):
            return GonalityBound(k + 2, t, "martens-special", wrd_dim(profile, k + 2, 1))
    for d in range(2, g + 2):
        t = next(iter(enumerate_tableaux(profile, d, 1)), None)
        if t is not None:
            return GonalityBound(d, t, "search", wrd_dim(profile, d, 1))
    raise AssertionError("degree g + 1 always carries a rank-1 class")


@dataclass
class WeakMartensReport:
    r: int
    gonality: GonalityBound
    bound: Fraction
    holds: bool
    type_bound: bool | None  # g >= (r+1)(k+1) + 1 for the special type, None otherwise

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "gonality_upper": self.gonality.value,
            "bound": str(self.bound),
            "holds": self.holds,
            "genus_vs_type": self.type_bound,
        }


def weak_martens_check(profile: TorsionProfile, r: int, certificate: BnCertificate | None = None) -> WeakMartensReport:
    """If ``w^r_{g-2+r} = g - 2 - r`` then the gonality is at most ``(g + r)/(r + 1)``."""
    g = profile.genus
    if not 1 <= r <= g - 2:
        raise PreconditionError(f"need 1 <= r <= g - 2, got {r}")
    d = g - 2 + r
    if certificate is None:
        hit = bn_at_least(profile, d, r, g - 2 - r) and not bn_at_least(profile, d, r, g - 1 - r)
    else:
        hit = certificate.value == g - 2 - r
    if not hit:
        raise PreconditionError(f"w^{r}_{d} is not {g - 2 - r}")
    gon = gonality_upper(profile)
    bound = Fraction(g + r, r + 1)
    type_bound = None
    if is_martens_special(profile, r):
        k = len(special_indices(profile))
        type_bound = g >= (r + 1) * (k + 1) + 1
    return WeakMartensReport(r, gon, bound, gon.value <= bound, type_bound)


@dataclass
class DualityGap:
    r: int
    high: BnCertificate  # w^r_{g-2+r}
    low: BnCertificate  # w^1_{g-r}

    @property
    def strict(self) -> bool:
        return self.low.hi < self.high.lo

    def to_json(self) -> dict:
        return {"r": self.r, "w_r": self.high.to_json(False), "w_1": self.low.to_json(False), "strict": self.strict}


def duality_gap(profile: TorsionProfile, r: int) -> DualityGap:
    """Compare ``w^r_{g-2+r}`` with its Serre-dual counterpart ``w^1_{g-r}``."""
    if r < 2:
        raise PreconditionError("the duality gap needs r >= 2")
    if not is_martens_special(profile, r):
        raise PreconditionError(f"profile is not Martens-special for rank {r}")
    g = profile.genus
    high = bn_rank(profile, g - 2 + r, r, keep_witnesses=False)
    low = bn_rank(profile, g - r, 1, keep_witnesses=False)
    return DualityGap(r, high, low)
