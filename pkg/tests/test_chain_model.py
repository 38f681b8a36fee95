from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tropchain.chain_model import (
    BridgePoint,
    ChainOfCycles,
    CycleGeometry,
    CyclePoint,
    Divisor,
    Generic,
    IntegerClass,
    RationalPoint,
    TorsionProfile,
    W,
    chain_from_json,
    chain_to_json,
    divisor_from_json,
    divisor_to_json,
    normalize_divisor,
    normalize_position,
    profile_of,
    synthesize_chain,
    torsion_from_geometry,
)
from tropchain.errors import MalformedInput, UnsupportedCoordinate


def test_torsion_of_simple_cycles():
    assert torsion_from_geometry(CycleGeometry(2, 1)) == 2
    assert torsion_from_geometry(CycleGeometry(5, 1)) == 5
    assert torsion_from_geometry(CycleGeometry(2, None)) == 0


def test_torsion_uses_lowest_terms():
    # rho = 10/4 = 5/2
    assert torsion_from_geometry(CycleGeometry(10, 4)) == 5


@given(st.integers(1, 40), st.integers(1, 40))
def test_torsion_is_least_multiple(p, q):
    circ, arc = Fraction(max(p, q)), Fraction(min(p, q))
    if arc > circ / 2:
        return
    m = torsion_from_geometry(CycleGeometry(circ, arc))
    assert (m * arc / circ).denominator == 1
    assert all((k * arc / circ).denominator != 1 for k in range(1, m))


def test_geometry_rejects_long_arcs_and_floats():
    with pytest.raises(MalformedInput):
        CycleGeometry(2, 3)
    with pytest.raises(MalformedInput):
        CycleGeometry(2.0, 1)


def test_profile_of_chains():
    assert profile_of(ChainOfCycles((CycleGeometry(2, 1),) * 3)) == TorsionProfile.of((2,))
    cycles = [CycleGeometry(2, 1)] * 5
    cycles[2] = CycleGeometry(5, 1)
    assert profile_of(ChainOfCycles(tuple(cycles))) == TorsionProfile.of((2, 5, 2))
    assert profile_of(ChainOfCycles((CycleGeometry(2, 1),) * 2)).m == ()


def test_synthesize_chain():
    assert [c.circumference for c in synthesize_chain(TorsionProfile.of((2,))).cycles] == [2, 2, 2]
    assert synthesize_chain(TorsionProfile.of((2, 0, 2))).cycles[2].irrational
    assert [c.circumference for c in synthesize_chain(TorsionProfile.of((2, 5, 2))).cycles] == [2, 2, 5, 2, 2]


profiles = st.lists(st.sampled_from([0, 2, 3, 4, 5, 7]), max_size=7).map(TorsionProfile.of)


@given(profiles)
def test_profile_round_trip(p):
    assert profile_of(synthesize_chain(p)) == p


def test_profile_validation():
    with pytest.raises(MalformedInput):
        TorsionProfile(5, (2, 2))
    with pytest.raises(MalformedInput):
        TorsionProfile.of((1,))


def test_bridge_chip_slides_to_w():
    chain = synthesize_chain(TorsionProfile.of(()))
    D = Divisor(((BridgePoint(1, Fraction(1, 2)), 1),))
    assert normalize_divisor(chain, D) == Divisor.point(1, W)


def test_class_reduced_mod_torsion():
    chain = synthesize_chain(TorsionProfile.of((2, 2)))
    assert normalize_divisor(chain, Divisor.point(3, IntegerClass(2))) == Divisor.point(3, W)


def test_rational_points_in_lattice_become_classes():
    # rho = 5/2: xi = 1/2 is 3 * (5/2) - 7 = 1/2, so it is <c> with c = 1 * 2^{-1} mod 5 = 3
    assert normalize_position(RationalPoint(Fraction(1, 2)), Fraction(5, 2)) == IntegerClass(3)
    assert normalize_position(RationalPoint(Fraction(1, 3)), Fraction(5, 2)) == RationalPoint(Fraction(1, 3))


def test_irrational_cycles_refuse_rational_offsets():
    with pytest.raises(UnsupportedCoordinate):
        normalize_position(RationalPoint(Fraction(1, 2)), None)
    assert normalize_position(RationalPoint(Fraction(4)), None) == IntegerClass(4)


positions = st.one_of(
    st.integers(-20, 20).map(IntegerClass),
    st.fractions(max_denominator=6).map(lambda x: RationalPoint(Fraction(x))),
    st.integers(-3, 3).map(lambda k: Generic((("s", 1),), Fraction(k, 2))),
)


@given(positions, st.sampled_from([Fraction(2), Fraction(5), Fraction(5, 2), Fraction(7, 3)]))
def test_normalize_position_idempotent(pos, period):
    once = normalize_position(pos, period)
    assert normalize_position(once, period) == once


@given(st.lists(st.tuples(st.integers(1, 5), positions, st.integers(-2, 3)), max_size=6))
def test_normalize_divisor_idempotent_and_degree_preserving(items):
    chain = synthesize_chain(TorsionProfile.of((2, 5, 3)))
    chain = ChainOfCycles(chain.cycles[:2] + (CycleGeometry(5, 2),) + chain.cycles[3:])
    D = Divisor(tuple((CyclePoint(i, p), k) for i, p, k in items))
    once = normalize_divisor(chain, D)
    assert normalize_divisor(chain, once) == once
    assert once.degree == D.degree


def test_divisor_arithmetic():
    a = Divisor.point(1, W)
    b = Divisor.point(2, IntegerClass(1))
    assert (a + b - a) == b
    assert (2 * a).degree == 2
    assert (a - a) == Divisor.zero()
    assert not (a - b).is_effective()


def test_json_round_trip():
    chain = ChainOfCycles((CycleGeometry(2, 1), CycleGeometry(5, 2), CycleGeometry(3, None)), (Fraction(1, 2), 3))
    assert chain_from_json(chain_to_json(chain)) == chain
    D = Divisor((
        (CyclePoint(1, IntegerClass(-1)), 2),
        (CyclePoint(2, RationalPoint(Fraction(1, 3))), 1),
        (CyclePoint(3, Generic.symbol("p")), 1),
        (BridgePoint(1, Fraction(1, 4)), -1),
    ))
    assert divisor_from_json(divisor_to_json(D)) == D


def test_json_errors_carry_paths():
    with pytest.raises(MalformedInput) as err:
        chain_from_json({"cycles": [{"circumference": "2"}, {"circumference": 1.5}]})
    assert err.value.path == "$.cycles[1].circumference"
    with pytest.raises(MalformedInput) as err:
        divisor_from_json([{"cycle": 1, "position": {"class": "x"}}])
    assert err.value.path == "$[0].position.class"
    with pytest.raises(MalformedInput) as err:
        chain_from_json({"torsion_profile": [2, 1]})
    assert err.value.to_json()["code"] == "malformed-input"
