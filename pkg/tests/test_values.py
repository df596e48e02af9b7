"""Exact value arithmetic and sign refinement."""

import math
from decimal import Decimal, getcontext
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadseq.errors import BasisMismatch, IndeterminateComparison
from quadseq.values import RealBasis, ValueVector, value_cmp

getcontext().prec = 80

B2 = RealBasis.default(2)  # 1, sqrt2
B3 = RealBasis.default(3)  # 1, sqrt2, sqrt3


def as_decimal(v):
    """Independent numeric oracle: evaluate a value with Decimal arithmetic."""
    total = Decimal(0)
    for c, g in zip(v.coeffs, v.basis.generators):
        d = Decimal(c.numerator) / Decimal(c.denominator)
        if g.to_obj() == "one":
            total += d
        else:
            total += d * Decimal(g.to_obj()["sqrt"]).sqrt()
    return total


def test_default_basis_layout():
    assert B3.size == 3
    assert B3.one_index == 0
    assert B3.to_obj() == ["one", {"sqrt": 2}, {"sqrt": 3}]
    assert RealBasis.from_obj(B3.to_obj()) == B3


def test_coeffs_are_reduced():
    v = B2.value([F(2, 4), F(6, 4)])
    assert v.coeffs == (F(1, 2), F(3, 2))


def test_arithmetic_is_exact():
    a = B2.value([F(3, 2), F(1, 2)])
    b = B2.value([F(1, 2), F(1, 3)])
    assert (a + b).coeffs == (F(2), F(5, 6))
    assert (a - b).coeffs == (F(1), F(1, 6))
    assert (a.scale(F(2, 3))).coeffs == (F(1), F(1, 3))
    assert (-a).coeffs == (F(-3, 2), F(-1, 2))
    assert (a - a).is_zero


def test_equality_is_coefficientwise():
    a = B2.value([F(1, 2), 0])
    b = B2.value(["1/2", "0"])
    assert a == b
    assert hash(a) == hash(b)
    assert a != B2.value([F(1, 2), F(1, 10**9)])


def test_sqrt2_sign_against_decimal_digits():
    # floor(sqrt(2) * 10^17) computed independently via integer sqrt
    lo = F(math.isqrt(2 * 10**34), 10**17)
    hi = lo + F(1, 10**17)
    s2 = B2.value([0, 1])
    assert (s2 - B2.rational(lo)).sign() == 1
    assert (s2 - B2.rational(hi)).sign() == -1


def test_cmp_examples():
    one = B2.rational(1)
    s2 = B2.value([0, 1])
    assert value_cmp(one, s2) == -1
    assert value_cmp(s2, one) == 1
    assert value_cmp(s2, s2) == 0
    # 3 - 2*sqrt2 > 0, 7 - 5*sqrt2 < 0
    assert B2.value([3, -2]).sign() == 1
    assert B2.value([7, -5]).sign() == -1


def test_tiny_separation_still_decided():
    # 665857/470832 is a continued-fraction convergent of sqrt2; the gap is ~ 1e-12
    v = B2.value([F(665857, 470832), -1])
    assert v.sign() == 1
    assert B2.value([F(665857, 470832 + 1), -1]).sign() == -1


def test_large_height_separation():
    # convergents p/q with q ~ 2^200: separation needs precision well past 400 bits
    p, q = 1, 1
    for _ in range(250):
        p, q = p + 2 * q, p + q
    assert B2.value([F(p, q), -1]).sign() == (1 if p * p > 2 * q * q else -1)


def test_dependent_basis_raises_indeterminate():
    basis = RealBasis.from_obj(["one", {"sqrt": 4}])
    v = basis.value([-2, 1])  # sqrt(4) - 2 == 0, but coefficients differ from zero
    assert not v.is_zero
    with pytest.raises(IndeterminateComparison):
        v.sign()


def test_basis_mismatch():
    with pytest.raises(BasisMismatch):
        B2.value([1, 0]).cmp(B3.value([1, 0, 0]))
    with pytest.raises(BasisMismatch):
        B2.value([1, 0]) + B3.value([1, 0, 0])
    assert B2.value([1, 0]) != B3.value([1, 0, 0])


def test_interval_brackets_value():
    v = B3.value([F(1, 3), F(-2, 7), F(5, 11)])
    lo, hi = v.evaluate_interval(F(1, 10**12))
    assert hi - lo <= F(1, 10**12)
    d = as_decimal(v)
    assert Decimal(lo.numerator) / lo.denominator <= d <= Decimal(hi.numerator) / hi.denominator


def test_interval_exact_for_rationals():
    lo, hi = B2.rational(F(22, 7)).evaluate_interval(F(1, 10**30))
    assert lo <= F(22, 7) <= hi
    assert hi - lo <= F(1, 10**30)


def test_serialize_round_trip():
    v = B2.value([F(-3, 2), F(7)])
    assert v.serialize() == ["-3/2", "7"]
    assert ValueVector.deserialize(B2, v.serialize()) == v


rationals = st.fractions(
    min_value=F(-50), max_value=F(50), max_denominator=20
)


@given(st.lists(rationals, min_size=3, max_size=3))
@settings(max_examples=150)
def test_sign_matches_decimal_oracle(coeffs):
    v = B3.value(coeffs)
    d = as_decimal(v)
    if abs(d) < Decimal("1e-40"):
        # too close for the 80-digit oracle to vouch either way
        return
    assert v.sign() == (1 if d > 0 else -1)


@given(st.lists(rationals, min_size=3, max_size=3), st.lists(rationals, min_size=3, max_size=3))
@settings(max_examples=100)
def test_cmp_antisymmetric_and_consistent(c1, c2):
    a, b = B3.value(c1), B3.value(c2)
    assert a.cmp(b) == -b.cmp(a)
    if a == b:
        assert a.cmp(b) == 0
    if a.cmp(b) == 0:
        # independent generators: equal reals have equal coefficients
        assert a == b
    assert ((a - b).sign() == a.cmp(b))


@given(st.lists(rationals, min_size=2, max_size=2), rationals)
@settings(max_examples=100)
def test_scaling_respects_order(coeffs, q):
    v = B2.value(coeffs)
    s = v.sign()
    if q > 0:
        assert v.scale(q).sign() == s
    elif q < 0:
        assert v.scale(q).sign() == -s
    else:
        assert v.scale(q).is_zero
