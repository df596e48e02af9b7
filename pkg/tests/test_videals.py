"""Valuation-ideal chains, ladders, colengths, and the principality bound."""

import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadseq.errors import NotTerminated
from quadseq.monomials import MonomialIdeal, extend_ideal, total_degree
from quadseq.sequence import ParameterFrame, SequenceState
from quadseq.values import RealBasis
from quadseq.videals import (
    colength_step,
    enumerate_values,
    ideal_value,
    membership_index,
    short_chain_report,
    tau_bound,
    value_ladder,
    videal_at,
    videal_chain,
)

B2 = RealBasis.default(2)


def frame_1_sqrt2():
    return ParameterFrame([B2.rational(1), B2.value([0, 1])])


# frozen by an independent Fraction/sign model over a + b*sqrt(2):
# the first four valuation ideals of (1, sqrt2) and their thresholds
CHAIN_GENS = [
    ((0, 0),),
    ((0, 1), (1, 0)),
    ((0, 1), (2, 0)),
    ((0, 2), (1, 1), (2, 0)),
]
CHAIN_THRESHOLDS = [(0, 0), (1, 0), (0, 1), (2, 0)]
# first seven attained values, as (rational, sqrt2) pairs
LADDER7 = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0)]
# least argmin-word prefix making the first n valuation ideals principal
TAU_TABLE = [(1, 0), (2, 1), (3, 2), (4, 2), (5, 2), (6, 3), (7, 3), (8, 3)]


def test_chain_matches_frozen_values():
    chain = videal_chain(frame_1_sqrt2(), 4)
    assert [e["ideal"].generators for e in chain] == CHAIN_GENS
    assert [e["threshold"].coeffs for e in chain] == [
        (F(a), F(b)) for a, b in CHAIN_THRESHOLDS
    ]
    assert [e["colength"] for e in chain] == [1, 1, 1, 1]
    assert [e["n"] for e in chain] == [0, 1, 2, 3]


def test_chain_descends_strictly():
    chain = videal_chain(frame_1_sqrt2(), 10)
    for a, b in zip(chain, chain[1:]):
        assert b["threshold"].cmp(a["threshold"]) > 0
        # proper containment: every generator of the smaller sits in the
        # bigger, and the ideals differ
        assert all(a["ideal"].contains(g) for g in b["ideal"].generators)
        assert a["ideal"] != b["ideal"]


def test_ladder_frozen():
    ladder = value_ladder(frame_1_sqrt2(), 7)
    assert [v.coeffs for v in ladder] == [(F(a), F(b)) for a, b in LADDER7]


def test_ladder_matches_chain_thresholds():
    frame = frame_1_sqrt2()
    ladder = value_ladder(frame, 9)
    chain = videal_chain(frame, 9)
    assert [e["threshold"] for e in chain] == ladder


def test_enumerate_values_rational_frame():
    basis = RealBasis.default(1)
    frame = ParameterFrame([basis.rational(1), basis.rational(F(3, 2))])
    vals = enumerate_values(frame, basis.rational(3))
    assert [v.coeffs[0] for v in vals] == [F(0), F(1), F(3, 2), F(2), F(5, 2), F(3)]


def test_videal_at_nonstrict_vs_strict():
    frame = frame_1_sqrt2()
    one = B2.rational(1)
    at = videal_at(frame, one)                      # {v >= 1} = (x, y)
    above = videal_at(frame, one, strict=True)      # {v > 1}  = (y, x^2)
    assert at == MonomialIdeal.maximal(2)
    assert above.generators == ((0, 1), (2, 0))
    assert all(at.contains(g) for g in above.generators)


def test_videal_at_zero_is_unit():
    assert videal_at(frame_1_sqrt2(), B2.zero()).is_unit


def test_colength_counts_exact_hits():
    frame = frame_1_sqrt2()
    assert colength_step(frame, B2.rational(2)) == 1          # only x^2
    assert colength_step(frame, B2.value([1, 1])) == 1        # only x*y
    assert colength_step(frame, B2.value([F(1, 2), 0])) == 0  # unattained


def test_ideal_value_is_min_over_generators():
    frame = frame_1_sqrt2()
    ideal = MonomialIdeal([(0, 1), (2, 0)])
    assert ideal_value(frame, ideal).coeffs == (F(0), F(1))


def test_membership_routes_agree_for_small_monomials():
    frame = frame_1_sqrt2()
    chain = videal_chain(frame, 12)
    for m in itertools.product(range(6), repeat=2):
        if total_degree(m) > 5:
            continue
        by_ideal, by_threshold = membership_index(frame, chain, m)
        assert by_ideal == by_threshold


def test_tau_bound_frozen_table():
    frame = frame_1_sqrt2()
    assert [(n, tau_bound(frame, n)) for n, _ in TAU_TABLE] == TAU_TABLE


def test_tau_bound_is_minimal():
    frame = frame_1_sqrt2()
    state = SequenceState.from_frame(frame)
    word = []
    for _ in range(10):
        state, w = state.step_argmin()
        word.append(w)
    for n, j in TAU_TABLE:
        ideals = [e["ideal"] for e in videal_chain(frame, n)]
        assert all(extend_ideal(i, word[:j]).is_principal for i in ideals)
        if j > 0:
            assert not all(
                extend_ideal(i, word[: j - 1]).is_principal for i in ideals
            )


def test_tau_bound_not_terminated():
    with pytest.raises(NotTerminated) as exc:
        tau_bound(frame_1_sqrt2(), 6, max_steps=1)
    assert exc.value.steps == 1


def test_short_chain_applies():
    basis = RealBasis.default(1)
    frame = ParameterFrame(
        [basis.rational(1), basis.rational(F(9, 8)), basis.rational(F(5, 4))]
    )
    report = short_chain_report(frame)
    assert report["applies"]
    assert report["starts_at_unit"]
    assert report["second_is_maximal"]
    assert report["ends_at_m_squared"]
    assert report["all_colengths_one"]
    assert len(report["chain"]) == 5
    assert [t.coeffs[0] for t in report["thresholds"]] == [
        F(0), F(1), F(9, 8), F(5, 4), F(2),
    ]


def test_short_chain_rejects_spread_frame():
    basis = RealBasis.default(1)
    frame = ParameterFrame([basis.rational(1), basis.rational(2)])
    report = short_chain_report(frame)
    assert not report["applies"]
    assert "chain" not in report


def test_mixed_d4_chain_colengths_frozen():
    frame = ParameterFrame(
        [B2.rational(1), B2.value([0, 1]), B2.rational(F(3, 2)), B2.value([0, F(5, 4)])]
    )
    chain = videal_chain(frame, 8)
    assert [e["colength"] for e in chain] == [1] * 8
    assert [e["threshold"].coeffs for e in chain] == [
        (F(0), F(0)), (F(1), F(0)), (F(0), F(1)), (F(3, 2), F(0)),
        (F(0), F(5, 4)), (F(2), F(0)), (F(1), F(1)), (F(5, 2), F(0)),
    ]


@st.composite
def small_rational_frames(draw):
    d = draw(st.integers(min_value=2, max_value=3))
    dens = st.integers(min_value=1, max_value=4)
    nums = st.integers(min_value=1, max_value=6)
    vals = [F(draw(nums), draw(dens)) for _ in range(d)]
    return vals


@given(small_rational_frames())
@settings(max_examples=40, deadline=None)
def test_chain_properties_random_rational(vals):
    basis = RealBasis.default(1)
    frame = ParameterFrame([basis.rational(v) for v in vals])
    chain = videal_chain(frame, 6)
    for a, b in zip(chain, chain[1:]):
        assert b["threshold"].cmp(a["threshold"]) > 0
        assert all(a["ideal"].contains(g) for g in b["ideal"].generators)
    for e in chain:
        assert e["colength"] >= 1
        # the chain entry is exactly the nonstrict valuation ideal at its
        # own threshold
        assert videal_at(frame, e["threshold"]) == e["ideal"]


@given(small_rational_frames(), st.integers(min_value=0, max_value=10))
@settings(max_examples=25, deadline=None)
def test_videal_at_matches_pairwise_minimalize(vals, eighths):
    # the fast path derives minimal generators coordinatewise; rebuild the
    # same ideals from raw membership plus the quadratic divisibility scan
    basis = RealBasis.default(1)
    frame = ParameterFrame([basis.rational(v) for v in vals])
    t = F(eighths, 8) * max(vals)  # lands both on and off attained values
    cap = int(t / min(vals)) + 2
    box = list(itertools.product(range(cap + 1), repeat=len(vals)))
    member = [m for m in box if sum(e * v for e, v in zip(m, vals)) >= t]
    strictly = [m for m in box if sum(e * v for e, v in zip(m, vals)) > t]
    tv = basis.rational(t)
    assert videal_at(frame, tv) == MonomialIdeal(member)
    assert videal_at(frame, tv, strict=True) == MonomialIdeal(strictly)


@given(small_rational_frames())
@settings(max_examples=30, deadline=None)
def test_enumerate_values_matches_brute_force(vals):
    basis = RealBasis.default(1)
    frame = ParameterFrame([basis.rational(v) for v in vals])
    bound = F(4)
    got = [v.coeffs[0] for v in enumerate_values(frame, basis.rational(bound))]
    cap = int(bound / min(vals)) + 1
    brute = sorted(
        {
            sum(e * v for e, v in zip(m, vals))
            for m in itertools.product(range(cap + 1), repeat=len(vals))
        }
    )
    assert got == [v for v in brute if v <= bound]
