"""Per-profile verification reports and family-wide sweeps.

Each check returns a :class:`Check` carrying enough detail to reproduce
the verdict: the cells ``(d, r)`` it covered, and on failure the first
offending cell with whatever certificate the computation produced.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Iterator

from .brill_noether import (
    bn_at_least,
    duality_gap,
    gonality_upper,
    is_hyperelliptic,
    is_martens_special,
    martens_classify,
    martens_tableau,
    special_indices,
    theorem_a_witness,
    theorem_b_witness,
)
from .chain_model import CyclePoint, Divisor, IntegerClass, RationalPoint, TorsionProfile, synthesize_chain
from .rank import divisor_rank
from .tableaux import enumerate_tableaux, torus_of, validate_tableau, wrd_dim


@dataclass
class Check:
    name: str
    passed: bool
    cells: int = 0
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "cells": self.cells}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class ProfileReport:
    profile: TorsionProfile
    classification: dict
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def to_json(self) -> dict:
        return {
            "genus": self.profile.genus,
            "torsion_profile": list(self.profile.m),
            "classification": self.classification,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }


class _Cache:
    """Level checks shared between the checks of one profile."""

    def __init__(self, profile: TorsionProfile):
        self.profile = profile
        self.levels: dict[tuple[int, int, int], bool] = {}

    def at_least(self, d: int, r: int, w: int) -> bool:
        key = (d, r, w)
        if key not in self.levels:
            self.levels[key] = bn_at_least(self.profile, d, r, w)
        return self.levels[key]

    def equals(self, d: int, r: int, w: int) -> bool:
        return self.at_least(d, r, w) and not self.at_least(d, r, w + 1)


def _failure(check: Check, **detail) -> Check:
    if check.passed:
        check.passed = False
        check.detail = detail
    return check


def check_hyperelliptic_criterion(profile: TorsionProfile) -> Check:
    """A tableau on ``[(g-1) x 2]`` exists iff every interior torsion is 2."""
    exists = next(iter(enumerate_tableaux(profile, 2, 1)), None) is not None
    check = Check("hyperelliptic-criterion", True, 1, {"tableau_exists": exists})
    if exists != is_hyperelliptic(profile):
        _failure(check, tableau_exists=exists, hyperelliptic=is_hyperelliptic(profile))
    return check


def check_degree_2r(profile: TorsionProfile) -> Check:
    """A degree-``2r`` class of rank ``r`` with ``1 <= r <= g-2`` forces hyperellipticity."""
    check = Check("degree-2r-rank-r", True)
    for r in range(1, profile.genus - 1):
        check.cells += 1
        t = next(iter(enumerate_tableaux(profile, 2 * r, r)), None)
        if t is not None and not is_hyperelliptic(profile):
            _failure(check, r=r, tableau=t.to_json())
    return check


def check_torus_bound(profile: TorsionProfile) -> Check:
    """Every torus in ``W^r_d`` has dimension at most ``d - 2r``; at equality
    ``t(x, y) = i_{x+y-1}`` and, when the rectangle has at least two rows and
    two columns to force it, the image has torsion 2 strictly inside."""
    g = profile.genus
    check = Check("torus-dimension-bound", True)
    seen = 0
    for r in range(0, g):
        for d in range(2 * r, g + r):
            check.cells += 1
            for t in enumerate_tableaux(profile, d, r):
                seen += 1
                dim = torus_of(t, g).dimension
                if dim > d - 2 * r:
                    return _failure(check, d=d, r=r, tableau=t.to_json(), dimension=dim)
                if dim == d - 2 * r:
                    image = sorted(t.image)
                    hook = all(v == image[x + y - 2] for x, y, v in t.cells())
                    inner = min(t.cols, t.rows) < 2 or all(profile.torsion(i) == 2 for i in image[1:-1])
                    if not (hook and inner):
                        return _failure(check, d=d, r=r, tableau=t.to_json(), hook=hook, inner_twos=inner)
    check.detail = {"tableaux": seen}
    return check


def check_upper_bound(profile: TorsionProfile, cache: _Cache) -> Check:
    """``w^r_d <= d - 2r`` for ``0 <= r <= g-1`` and ``2r <= d <= g-1+r``."""
    g = profile.genus
    check = Check("upper-bound", True)
    for r in range(0, g):
        for d in range(2 * r, g + r):
            check.cells += 1
            if cache.at_least(d, r, d - 2 * r + 1):
                _failure(check, d=d, r=r)
    return check


def check_theorem_a(profile: TorsionProfile, cache: _Cache) -> Check:
    """Inside ``1 <= r <= g-2``, ``2r <= d <= g-3+r`` the bound is attained
    only by hyperelliptic profiles; otherwise an explicit ``E`` refutes it."""
    g = profile.genus
    hyp = is_hyperelliptic(profile)
    check = Check("theorem-a", True)
    for r in range(1, g - 1):
        for d in range(2 * r, g - 2 + r):
            check.cells += 1
            attained = cache.at_least(d, r, d - 2 * r)
            if attained != hyp:
                _failure(check, d=d, r=r, attained=attained, hyperelliptic=hyp)
            if not hyp:
                w = theorem_a_witness(profile, d, r)
                if not w.refutes:
                    _failure(check, d=d, r=r, witness_cycles=list(w.cycles), refuted=False)
    return check


def check_theorem_b(profile: TorsionProfile, cache: _Cache) -> Check:
    """``w^r_{g-2+r} = g-2-r`` iff hyperelliptic or Martens-special for rank ``r``;
    special profiles also get the explicit completion of every complement."""
    g = profile.genus
    hyp = is_hyperelliptic(profile)
    check = Check("theorem-b", True)
    witnesses = 0
    for r in range(1, g - 1):
        check.cells += 1
        d = g - 2 + r
        attained = cache.equals(d, r, g - 2 - r)
        special = is_martens_special(profile, r)
        if attained != (hyp or special):
            _failure(check, r=r, attained=attained, hyperelliptic=hyp, martens_special=special)
        if special:
            for a, b in combinations(range(1, g + 1), 2):
                witnesses += 1
                w = theorem_b_witness(profile, r, (a, b))
                if not w.ok:
                    _failure(check, r=r, witness=w.to_json())
    if check.passed:
        check.detail = {"constructed_witnesses": witnesses}
    return check


def check_flanking(profile: TorsionProfile, cache: _Cache) -> Check:
    """When ``w^r_{g+r-2} = g-2-r``: twos on ``2..r+1`` and ``g-r..g-1``, every
    deep non-2 torsion flanked by ``r`` twos, and small genera hyperelliptic."""
    g = profile.genus
    m = profile.torsion
    check = Check("flanking-conditions", True)
    for r in range(1, g - 1):
        check.cells += 1
        if not cache.equals(g - 2 + r, r, g - 2 - r):
            continue
        edges = [i for i in list(range(2, r + 2)) + list(range(g - r, g)) if 1 < i < g]
        if any(m(i) != 2 for i in edges):
            _failure(check, r=r, rule="edge-twos")
        if g >= 2 * r + 3:
            for i in range(r + 2, g - r):
                if m(i) != 2 and any(m(i - l) != 2 or m(i + l) != 2 for l in range(1, r + 1)):
                    _failure(check, r=r, rule="flanked", index=i)
        if r + 2 <= g <= 2 * r + 2 and not is_hyperelliptic(profile):
            _failure(check, r=r, rule="small-genus-hyperelliptic")
    return check


def check_gonality(profile: TorsionProfile, cache: _Cache) -> Check:
    """Special profiles of type ``k`` carry a ``k``-dimensional ``W^1_{k+2}``,
    and ``w^r_{g-2+r} = g-2-r`` caps the gonality at ``(g+r)/(r+1)``."""
    g = profile.genus
    check = Check("gonality", True)
    gon = gonality_upper(profile)
    check.detail = {"gonality_upper": gon.value, "source": gon.source}
    js = special_indices(profile)
    if is_martens_special(profile, 1):
        k = len(js)
        check.cells += 1
        t = martens_tableau(profile)
        if not validate_tableau(profile, t) or wrd_dim(profile, k + 2, 1) != k or gon.value > k + 2:
            _failure(check, rule="special-type", k=k, tableau=t.to_json())
    for r in range(1, g - 1):
        if cache.equals(g - 2 + r, r, g - 2 - r):
            check.cells += 1
            if gon.value > Fraction(g + r, r + 1):
                _failure(check, r=r, gonality_upper=gon.value, bound=str(Fraction(g + r, r + 1)))
    return check


def check_duality(profile: TorsionProfile) -> Check:
    """Special profiles for some ``r >= 2`` have ``w^r_{g-2+r} > w^1_{g-r}``."""
    check = Check("duality-gap", True)
    for r in range(2, profile.genus):
        if is_martens_special(profile, r):
            check.cells += 1
            gap = duality_gap(profile, r)
            if not gap.strict:
                _failure(check, gap=gap.to_json())
    return check


def _sample_divisor(profile: TorsionProfile, rng: random.Random, degree: int) -> Divisor:
    g = profile.genus
    items = []
    for _ in range(degree):
        i = rng.randint(1, g)
        m = profile.torsion(i)
        if m and 1 < i < g:
            pos = RationalPoint(Fraction(rng.randint(0, 4 * m), rng.choice((1, 2, 3))))
        else:
            pos = IntegerClass(rng.randint(-3, 3))
        items.append((CyclePoint(i, pos), 1))
    return Divisor(tuple(items))


def check_bridge_independence(profile: TorsionProfile, seed: int = 0, samples: int = 4) -> Check:
    """Ranks on the synthesized chain do not move when the bridges change."""
    rng = random.Random(f"{seed}:{profile.genus}:{profile.m}")
    chain = synthesize_chain(profile)
    other = chain.with_bridges([Fraction(rng.randint(1, 9), rng.randint(1, 4)) for _ in chain.bridges])
    check = Check("bridge-independence", True)
    for _ in range(samples):
        check.cells += 1
        D = _sample_divisor(profile, rng, rng.randint(0, 2 * profile.genus))
        a, b = divisor_rank(chain, D).rank, divisor_rank(other, D).rank
        if a != b:
            _failure(check, divisor=str(D), ranks=[a, b])
    return check


def verify_profile(profile: TorsionProfile, seed: int = 0) -> ProfileReport:
    cache = _Cache(profile)
    classification = martens_classify(profile).to_json() if profile.genus >= 3 else {"kind": "hyperelliptic"}
    checks = [
        check_hyperelliptic_criterion(profile),
        check_degree_2r(profile),
        check_torus_bound(profile),
        check_upper_bound(profile, cache),
        check_theorem_a(profile, cache),
        check_theorem_b(profile, cache),
        check_flanking(profile, cache),
        check_gonality(profile, cache),
        check_duality(profile),
        check_bridge_independence(profile, seed),
    ]
    return ProfileReport(profile, classification, checks)


# --------------------------------------------------------------------------
# families


def profile_family(
    max_genus: int = 8,
    torsions: Iterable[int] = (0, 2, 3, 4, 5),
    max_special: int = 2,
    min_genus: int = 2,
) -> Iterator[TorsionProfile]:
    """Profiles with at most ``max_special`` interior torsions other than 2."""
    others = [t for t in torsions if t != 2]
    for g in range(min_genus, max_genus + 1):
        n = max(g - 2, 0)
        for k in range(0, min(max_special, n) + 1):
            for where in combinations(range(n), k):
                for values in product(others, repeat=k):
                    m = [2] * n
                    for i, v in zip(where, values):
                        m[i] = v
                    yield TorsionProfile(g, tuple(m))


def _verify_job(args) -> dict:
    g, m, seed = args
    return verify_profile(TorsionProfile(g, tuple(m)), seed).to_json()


def sweep(profiles: Iterable[TorsionProfile], seed: int = 0, jobs: int = 1) -> list[dict]:
    """Reports in input order, whatever the number of workers."""
    work = [(p.genus, p.m, seed) for p in profiles]
    if jobs <= 1:
        return [_verify_job(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_verify_job, work, chunksize=4))
