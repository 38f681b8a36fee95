from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_chain, random_divisor
from tropchain.abel import RepresentingDivisor, representing_divisor
from tropchain.chain_model import (
    ChainOfCycles,
    CycleGeometry,
    CyclePoint,
    Divisor,
    Generic,
    IntegerClass,
    TorsionProfile,
    W,
    synthesize_chain,
)
from tropchain.dhar import FiniteGraphModel, dhar_rank
from tropchain.errors import OracleUnavailable, PreconditionError
from tropchain.rank import complete_to_rank, divisor_rank, satisfies_tableau
from tropchain.tableaux import DisplacementTableau, enumerate_tableaux, hyperelliptic_tableau

HYP3 = TorsionProfile.of((2,))


def test_satisfies_hyperelliptic_tableau():
    rep = RepresentingDivisor((IntegerClass(0), IntegerClass(1), IntegerClass(0)), 2)
    assert satisfies_tableau(rep, hyperelliptic_tableau(3), HYP3)


def test_generic_coordinate_blocks_its_value():
    rep = RepresentingDivisor((IntegerClass(0), Generic.symbol("x"), IntegerClass(0)), 2)
    assert not satisfies_tableau(rep, hyperelliptic_tableau(3), HYP3)
    assert satisfies_tableau(rep, DisplacementTableau.empty(), HYP3)


def test_rank_examples():
    chain = synthesize_chain(HYP3)
    D = Divisor.point(1, W) + Divisor.point(2, IntegerClass(1))
    cert = divisor_rank(chain, D)
    assert cert.rank == 1 and cert.refuted == 2
    assert dhar_rank(FiniteGraphModel.from_chain(chain, D), D) == 1
    assert divisor_rank(HYP3, Divisor.point(2, Generic.symbol("p"))).rank == 0
    assert divisor_rank(HYP3, Divisor.zero()).rank == 0


def test_dhar_examples():
    chain = synthesize_chain(TorsionProfile.of(()))
    D = 3 * Divisor.point(2, W)
    assert dhar_rank(FiniteGraphModel.from_chain(chain, D), D) == 1
    neg = -Divisor.point(1, W)
    assert dhar_rank(FiniteGraphModel.from_chain(chain, neg), neg) == -1


def test_dhar_refuses_irrational_cycles():
    chain = synthesize_chain(TorsionProfile.of((0,)))
    with pytest.raises(OracleUnavailable):
        FiniteGraphModel.from_chain(chain)


def test_oracle_agreement_on_random_divisors():
    rng = random.Random(20240611)
    for _ in range(60):
        chain = random_chain(rng, max_genus=4)
        g = chain.genus
        D = random_divisor(rng, chain, rng.randint(0, 2 * g), negatives=rng.choice([0, 0, 1]))
        model = FiniteGraphModel.from_chain(chain, D)
        assert divisor_rank(chain, D).rank == dhar_rank(model, D), (chain, D)


def test_model_vertices_determine_rank():
    rng = random.Random(5)
    for _ in range(15):
        chain = random_chain(rng, max_genus=3)
        D = random_divisor(rng, chain, rng.randint(0, chain.genus + 1))
        model = FiniteGraphModel.from_chain(chain, D)
        assert dhar_rank(model, D) == dhar_rank(model, D, test_set="all")


def test_oracle_on_mixed_ratio_chain():
    chain = ChainOfCycles((CycleGeometry(2, 1), CycleGeometry(5, 2), CycleGeometry(3, 1)), (Fraction(1, 2), 2))
    for n in range(-3, 4):
        D = Divisor.point(2, IntegerClass(n)) + Divisor.point(1, W) + Divisor.point(3, IntegerClass(1))
        model = FiniteGraphModel.from_chain(chain, D)
        assert divisor_rank(chain, D).rank == dhar_rank(model, D)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from([0, 2, 3, 5]), max_size=4), st.data())
def test_riemann_roch_regime(m, data):
    profile = TorsionProfile.of(m)
    g = profile.genus
    d = data.draw(st.integers(2 * g - 1, 2 * g + 3))
    cycles = data.draw(st.lists(st.integers(1, g), min_size=d, max_size=d))
    D = Divisor(tuple((CyclePoint(i, Generic.symbol(f"s{n}")), 1) for n, i in enumerate(cycles)))
    assert divisor_rank(profile, D).rank == d - g


@pytest.mark.parametrize("m", [(3,), (2, 3), (0, 2, 2), (2, 5, 2), (3, 3, 3, 3)])
def test_no_degree_2r_rank_r_off_hyperelliptic(m):
    profile = TorsionProfile.of(m)
    for r in range(1, profile.genus - 1):
        assert next(iter(enumerate_tableaux(profile, 2 * r, r)), None) is None


P252 = TorsionProfile.of((2, 5, 2))


def test_generic_points_at_the_ends_cannot_be_completed():
    E = Divisor.point(1, Generic.symbol("a")) + Divisor.point(5, Generic.symbol("b"))
    assert complete_to_rank(P252, E, 3, 1) is None


def test_generic_point_in_the_middle_completes():
    E = Divisor.point(3, Generic.symbol("a"))
    done = complete_to_rank(P252, E, 3, 1)
    assert done is not None
    assert done.F.is_effective() and done.F.degree == 2
    assert done.tableau.image == {1, 2, 4, 5}
    assert divisor_rank(P252, E + done.F).rank >= 1
    # the completion with both extra points on C_3 works as well
    other = E + 2 * Divisor.point(3, W)
    assert satisfies_tableau(representing_divisor(P252, other), done.tableau, P252)


@pytest.mark.parametrize("c", [0, 1, 2, 3])
def test_every_point_lies_in_a_pencil_on_the_hyperelliptic_chain(c):
    E = Divisor.point(2, IntegerClass(c))
    done = complete_to_rank(HYP3, E, 2, 1)
    assert done is not None and divisor_rank(HYP3, E + done.F).rank >= 1


def test_completion_needs_effective_input():
    with pytest.raises(PreconditionError):
        complete_to_rank(HYP3, -Divisor.point(1, W), 2, 1)
    assert complete_to_rank(HYP3, 3 * Divisor.point(1, W), 2, 1) is None


points = st.tuples(st.integers(1, 5), st.one_of(st.integers(-3, 3).map(IntegerClass), st.just(None)))


@settings(max_examples=40, deadline=None)
@given(st.lists(points, min_size=1, max_size=4), st.integers(2, 6), st.integers(0, 2))
def test_completion_is_monotone_under_removal(chips, d, r):
    def div(items):
        return Divisor(tuple(
            (CyclePoint(i, Generic.symbol(f"q{n}") if pos is None else pos), 1) for n, (i, pos) in enumerate(items)
        ))

    E = div(chips)
    done = complete_to_rank(P252, E, d, r)
    if done is None:
        return
    assert divisor_rank(P252, E + done.F).rank >= r
    smaller = div(chips[:-1])
    assert complete_to_rank(P252, smaller, d, r) is not None
