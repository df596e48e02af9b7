"""Stepping, conservation, bounds, and the sequence-level reports."""

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadseq.errors import (
    AmbiguousDirection,
    DirectionNotMinimal,
    IncompleteCoverage,
    IndexOutOfRange,
    KilledDirectionUsed,
    NonPositiveValue,
)
from quadseq.sequence import ParameterFrame, SequenceState
from quadseq.values import RealBasis

B2 = RealBasis.default(2)


def frame_1_sqrt2():
    return ParameterFrame([B2.rational(1), B2.value([0, 1])])


def run_argmin(state, steps):
    dirs = []
    for _ in range(steps):
        state, d = state.step_argmin()
        dirs.append(d)
    return state, dirs


# frozen by an independent Decimal simulation: the argmin word for (1, sqrt2)
TRACE_DIRS = [0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0]
# and the first six step values as (rational, sqrt2) coefficient pairs
TRACE_MS = [(1, 0), (-1, 1), (-1, 1), (3, -2), (3, -2), (-7, 5)]


def test_argmin_trace_matches_oracle():
    state, dirs = run_argmin(SequenceState.from_frame(frame_1_sqrt2()), 12)
    assert dirs == TRACE_DIRS
    for n, expected in enumerate(TRACE_MS):
        assert state.m_value(n).coeffs == (F(expected[0]), F(expected[1]))


def test_partial_sum_exact():
    state, _ = run_argmin(SequenceState.from_frame(frame_1_sqrt2()), 2)
    # 1 + (sqrt2 - 1) == sqrt2
    assert state.partial_sum.coeffs == (F(0), F(1))


def test_conservation_every_step():
    state = SequenceState.from_frame(frame_1_sqrt2())
    assert state.conservation_check()
    for _ in range(40):
        state, _ = state.step_argmin()
        assert state.conservation_check()


def test_bound_gap_stays_positive():
    state = SequenceState.from_frame(frame_1_sqrt2())
    assert state.series_bound().coeffs == (F(1), F(1))
    for _ in range(60):
        state, _ = state.step_argmin()
        assert state.bound_gap_sign() > 0


def test_ambiguous_tie_raises():
    frame = ParameterFrame([B2.rational(1), B2.rational(1)])
    with pytest.raises(AmbiguousDirection):
        SequenceState.from_frame(frame).step_argmin()


def test_scripted_step_checks_minimality():
    state = SequenceState.from_frame(frame_1_sqrt2())
    with pytest.raises(DirectionNotMinimal):
        state.step_in_direction(1)
    state = state.step_in_direction(0)  # fine: x carries the minimum
    assert state.step_count == 1


def test_scripted_tie_collision_raises():
    # (1, 2) -> x-step -> (1, 1); a further x-step would zero out y
    frame = ParameterFrame([B2.rational(1), B2.rational(2)])
    state = SequenceState.from_frame(frame).step_in_direction(0)
    with pytest.raises(NonPositiveValue):
        state.step_in_direction(0)


def test_run_equals_repeated_steps():
    frame = ParameterFrame([B2.rational(1), B2.value([0, 4])])
    bulk = SequenceState.from_frame(frame).run_in_direction(0, 5)
    slow = SequenceState.from_frame(frame)
    for _ in range(5):
        slow = slow.step_in_direction(0)
    assert bulk.frame_values == slow.frame_values
    assert bulk.partial_sum == slow.partial_sum
    assert bulk.direction_counts() == slow.direction_counts() == {"x": 5, "y": 0}
    assert bulk.step_count == 1 and slow.step_count == 5


def test_run_overshoot_raises():
    frame = ParameterFrame([B2.rational(1), B2.value([0, 4])])
    state = SequenceState.from_frame(frame)
    with pytest.raises(DirectionNotMinimal):
        state.run_in_direction(0, 7)  # 4*sqrt2 < 7
    with pytest.raises(DirectionNotMinimal):
        state.run_in_direction(1, 1)


def test_rescale_replaces_frame_and_resets_segment():
    state, _ = run_argmin(SequenceState.from_frame(frame_1_sqrt2()), 2)
    new_vals = (B2.rational(F(1, 3)), B2.value([0, F(1, 5)]))
    before_E = state.partial_sum
    _, m = state.current_min()
    state = state.rescale(new_vals, direction=0)
    assert state.frame_values == new_vals
    assert state.partial_sum == before_E + m
    assert state.had_rescale
    assert state.conservation_check()  # fresh segment, trivially balanced
    rec = state.history[-1]
    assert rec.kind == "rescale" and rec.direction == 0
    with pytest.raises(ValueError):
        state.bound_gap_sign()


def test_rescale_validates_values():
    state = SequenceState.from_frame(frame_1_sqrt2())
    with pytest.raises(NonPositiveValue):
        state.rescale((B2.rational(0), B2.rational(1)))
    with pytest.raises(ValueError):
        state.rescale((B2.rational(1),))


def test_m_value_index_errors():
    state, _ = run_argmin(SequenceState.from_frame(frame_1_sqrt2()), 3)
    with pytest.raises(IndexOutOfRange):
        state.m_value(3)
    with pytest.raises(IndexOutOfRange):
        state.m_value(-1)


def test_starving_directions_empty_for_active_run():
    state, _ = run_argmin(SequenceState.from_frame(frame_1_sqrt2()), 100)
    assert state.starving_directions(50) == set()
    assert state.starving_directions(1) in ({"x"}, {"y"})
    assert state.starving_directions(0) == set()
    with pytest.raises(ValueError):
        state.starving_directions(-1)


def test_change_of_direction_both_routes():
    state, _ = run_argmin(SequenceState.from_frame(frame_1_sqrt2()), 12)
    assert state.change_of_direction(1, "value") is False
    assert state.change_of_direction(2, "value") is True
    assert state.change_of_direction(1, "ideal") is False
    assert state.change_of_direction(2, "ideal") is True
    for n in range(1, 13):
        assert state.change_of_direction(n, "value") == state.change_of_direction(n, "ideal")
    with pytest.raises(IndexOutOfRange):
        state.change_of_direction(13)


def test_first_use_order_report_frozen_example():
    basis = RealBasis.default(1)
    frame = ParameterFrame(
        [basis.rational(1), basis.rational(F(3, 2)), basis.rational(F(7, 4))]
    )
    state, dirs = run_argmin(SequenceState.from_frame(frame), 3)
    assert dirs == [0, 1, 2]
    report = state.first_use_order_report()
    assert report["order"] == ("x", "y", "z")
    assert report["ascending"] is True
    assert report["gap_integer"] == 1
    assert report["prefix_dominance"] is True
    assert report["all_hold"] is True


def test_first_use_gap_integer_bigger():
    frame = ParameterFrame([B2.rational(1), B2.value([0, F(5, 2)])])
    state, _ = run_argmin(SequenceState.from_frame(frame), 4)
    report = state.first_use_order_report()
    assert report["gap_integer"] == 3  # 3 < 5*sqrt2/2 ~ 3.53 < 4


def test_first_use_requires_coverage():
    state, _ = run_argmin(SequenceState.from_frame(frame_1_sqrt2()), 1)
    with pytest.raises(IncompleteCoverage):
        state.first_use_order_report()


def test_quotient_drops_spectator_direction():
    basis = RealBasis.default(2)
    frame = ParameterFrame(
        [basis.rational(1), basis.value([0, 1]), basis.rational(10)]
    )
    state, _ = run_argmin(SequenceState.from_frame(frame), 10)
    assert state.direction_counts()["z"] == 0
    q = state.quotient_sequence(2)
    flat, _ = run_argmin(SequenceState.from_frame(frame_1_sqrt2()), 10)
    assert [r.m_value.coeffs for r in q.history] == [
        r.m_value.coeffs for r in flat.history
    ]
    with pytest.raises(KilledDirectionUsed):
        state.quotient_sequence(0)


def test_history_branches_do_not_interfere():
    state = SequenceState.from_frame(frame_1_sqrt2())
    a = state.step_in_direction(0)
    b, _ = a.step_argmin()  # extends the shared buffer with a y-step
    c = a.rescale((B2.rational(1), B2.rational(2)))  # sibling branch
    assert len(b.history) == len(c.history) == 2
    assert b.history[0] == c.history[0]
    assert b.history[1].kind == "monomial" and b.history[1].direction == 1
    assert c.history[1].kind == "rescale"


def _random_frame(rng, d):
    basis = RealBasis.default(d)
    vals = [basis.rational(F(rng.randint(1, 9), rng.randint(1, 9)))]
    for i in range(1, d):
        coeffs = [0] * d
        coeffs[i] = F(rng.randint(1, 9), rng.randint(1, 9))
        vals.append(basis.value(coeffs))
    return ParameterFrame(vals)


@given(st.integers(0, 10_000), st.integers(2, 5))
@settings(max_examples=25, deadline=None)
def test_random_runs_keep_invariants(seed, d):
    rng = random.Random(seed)
    state = SequenceState.from_frame(_random_frame(rng, d))
    prev_m = None
    for _ in range(30):
        state, _ = state.step_argmin()
        assert state.conservation_check()
        assert state.bound_gap_sign() > 0
        m = state.m_value(state.step_count - 1)
        if prev_m is not None:
            assert m.cmp(prev_m) <= 0  # step values never increase
        prev_m = m
    for v in state.frame_values:
        assert v.sign() > 0
