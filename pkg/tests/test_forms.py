"""Form transforms, exhaustive order-drop sweeps, ratios, comparability."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadseq.errors import NotTerminated, RatioUndefined
from quadseq.forms import (
    MonomialForm,
    comparability_index,
    enumerate_antichains,
    ord_trace,
    order_drop_report,
    power_bracketing_report,
    ratio_limit_report,
    transform_form,
    value_of_form,
)
from quadseq.monomials import minimalize
from quadseq.sequence import ParameterFrame
from quadseq.values import RealBasis

B2 = RealBasis.default(2)


def frame_1_sqrt2():
    return ParameterFrame([B2.rational(1), B2.value([0, 1])])


def test_form_normalizes_support():
    f = MonomialForm([(1, 1), (0, 2), (1, 1)])
    assert f.support == ((0, 2), (1, 1))
    assert f.order() == 2
    assert not f.is_unit
    assert MonomialForm([(0, 0), (1, 0)]).is_unit


def test_transform_form_example():
    f = MonomialForm([(3, 0), (0, 2)])
    t = transform_form(f, 0)
    # support size is preserved, unlike the ideal transform
    assert t.support == ((0, 2), (1, 0))
    assert ord_trace(f, [0, 1]) == (2, 1, 1)


def test_antichain_counts_frozen():
    assert len(enumerate_antichains(2, 3)) == 40
    assert len(enumerate_antichains(3, 3)) == 2496


def test_order_drop_full_coverage_d2():
    report = order_drop_report(2, [0, 1])
    assert report["full_coverage"]
    assert report["forms_checked"] == 40
    assert report["all_drop"]
    assert report["orders_monotone"]


def test_order_drop_full_coverage_d3():
    report = order_drop_report(3, [2, 0, 1, 0])
    assert report["full_coverage"]
    assert report["forms_checked"] == 2496
    assert report["all_drop"]


def test_order_drop_missing_direction_witness():
    report = order_drop_report(2, [0, 0, 0])
    assert not report["full_coverage"]
    assert report["missing"] == (1,)
    assert report["witness"].support == (((0, 1)),)
    assert report["witness_trace"] == (1, 1, 1, 1)
    assert report["witness_constant"]


def test_value_of_form():
    f = MonomialForm([(2, 0), (0, 1)])
    v = value_of_form(frame_1_sqrt2().values, f)
    assert v.coeffs == (F(0), F(1))  # sqrt2 < 2


# frozen by the independent Decimal oracle
RATIO_TABLE = [
    (1, 2, 1), (2, 3, 2), (3, 4, 3), (4, 7, 5), (5, 10, 7),
    (6, 17, 12), (7, 24, 17), (8, 41, 29), (9, 58, 41), (10, 99, 70),
]


def test_ratio_report_frozen_table():
    report = ratio_limit_report(
        frame_1_sqrt2(), MonomialForm([(0, 1)]), MonomialForm([(1, 0)]), 10
    )
    assert [(r["n"], r["ordF"], r["ordG"]) for r in report["trace"]] == RATIO_TABLE
    limit = report["limit"]
    assert limit["kind"] == "irrational"
    assert limit["value_f"] == ["0", "1"]
    assert limit["value_g"] == ["1", "0"]
    lo = F(limit["interval"]["lo"])
    hi = F(limit["interval"]["hi"])
    assert lo < hi
    # bracket sqrt2: lo^2 < 2 < hi^2
    assert lo * lo < 2 < hi * hi


def test_ratio_report_rational_limit():
    report = ratio_limit_report(
        frame_1_sqrt2(), MonomialForm([(2, 0)]), MonomialForm([(1, 0)]), 5
    )
    assert report["limit"] == {"kind": "rational", "num": 2, "den": 1}


def test_ratio_undefined_for_unit_denominator():
    with pytest.raises(RatioUndefined):
        ratio_limit_report(
            frame_1_sqrt2(), MonomialForm([(0, 1)]), MonomialForm([(0, 0)]), 3
        )


def test_power_bracketing_onset_and_exclusion():
    rows = power_bracketing_report(
        frame_1_sqrt2(), MonomialForm([(0, 1)]), MonomialForm([(1, 0)]),
        p=1414, q=1000, steps=40,
    )
    lower = [r["lower_divides"] for r in rows]
    assert any(lower)
    onset = lower.index(True)
    assert all(lower[onset:])  # once inside, stays inside
    assert not any(r["upper_divides"] for r in rows)


def test_comparability_index_frozen():
    frame = frame_1_sqrt2()
    assert comparability_index(frame, (0, 1), (2, 0)) == (2, "q/p")
    assert comparability_index(frame, (2, 0), (0, 1)) == (2, "p/q")
    assert comparability_index(frame, (1, 0), (2, 0)) == (0, "q/p")
    with pytest.raises(ValueError):
        comparability_index(frame, (1, 0), (1, 0))
    with pytest.raises(NotTerminated):
        comparability_index(frame, (0, 1), (2, 0), max_steps=1)


def test_comparability_side_matches_value_order():
    frame = frame_1_sqrt2()
    vals = frame.values
    from quadseq.monomials import monomial_value

    for p, q in [((0, 1), (2, 0)), ((3, 0), (0, 2)), ((1, 1), (0, 2))]:
        t, side = comparability_index(frame, p, q)
        vp, vq = monomial_value(vals, p), monomial_value(vals, q)
        assert side == ("q/p" if vq.cmp(vp) >= 0 else "p/q")


monomials2 = st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(lambda m: sum(m) > 0)


@given(st.lists(monomials2, min_size=1, max_size=5), st.lists(st.integers(0, 1), min_size=1, max_size=5))
@settings(max_examples=150)
def test_trace_equals_minimal_support_trace(support, word):
    full = MonomialForm(support)
    reduced = MonomialForm(minimalize(support))
    assert ord_trace(full, word) == ord_trace(reduced, word)


@given(st.lists(monomials2, min_size=1, max_size=5), st.integers(0, 1))
@settings(max_examples=150)
def test_transform_preserves_support_size_and_divisibility(support, w):
    form = MonomialForm(support)
    image = transform_form(form, w)
    assert len(image.support) == len(form.support)
    from quadseq.monomials import divides

    before = {
        (a, b): divides(a, b)
        for a in form.support
        for b in form.support
    }
    mapping = {}
    r = form.order()
    for m in form.support:
        mapping[m] = tuple(
            sum(m) - r if i == w else e for i, e in enumerate(m)
        )
    for (a, b), d in before.items():
        if d:
            assert divides(mapping[a], mapping[b])
