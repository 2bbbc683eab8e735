import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bdchain.intervals import INF, Interval, format_sig, round_dyadic

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)


@st.composite
def intervals(draw):
    a, b = draw(rationals), draw(rationals)
    return Interval(min(a, b), max(a, b))


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        Interval(Fraction(2), Fraction(1))


@given(intervals(), intervals(), rationals, rationals)
def test_arithmetic_encloses_pointwise_results(I, J, s, t):
    x = I.lo + (I.hi - I.lo) * (s - math.floor(s))
    y = J.lo + (J.hi - J.lo) * (t - math.floor(t))
    assert x + y in I + J
    assert x - y in I - J
    assert x * y in I * J
    assert x * x in I.square()
    if y != 0 and (J.lo > 0 or J.hi < 0):
        assert x / y in I / J


def test_reciprocal_of_limit_zero_endpoint():
    assert Interval(Fraction(0), Fraction(2)).reciprocal() == Interval(Fraction(1, 2), INF)
    with pytest.raises(ZeroDivisionError):
        Interval(Fraction(-1), Fraction(1)).reciprocal()


def test_zero_times_infinity_is_zero():
    assert (Interval(Fraction(0), Fraction(0)) * Interval(Fraction(1), INF)) == Interval.point(0)


@given(st.integers(min_value=-(10 ** 300), max_value=10 ** 300), st.integers(min_value=1, max_value=10 ** 300))
def test_from_ratio_encloses_tightly(num, den):
    I = Interval.from_ratio(num, den, bits=64)
    x = Fraction(num, den)
    assert I.lo <= x <= I.hi
    assert I.hi - I.lo <= abs(x) * Fraction(1, 2 ** 60)


def test_from_ratio_is_exact_for_small_inputs():
    assert Interval.from_ratio(3, 7) == Interval.point(Fraction(3, 7))


@given(st.fractions(), st.integers(min_value=2, max_value=80))
def test_round_dyadic_direction(x, bits):
    assert round_dyadic(x, bits, up=False) <= x <= round_dyadic(x, bits, up=True)
    assert (round_dyadic(x, bits, up=True).denominator & (round_dyadic(x, bits, up=True).denominator - 1)) == 0


def test_tidy_keeps_small_and_rounds_large_outward():
    small = Interval(Fraction(1, 3), Fraction(1, 2))
    assert small.tidy() is small
    big = Fraction(3 ** 2000, 7 ** 900)
    rounded = Interval.point(big).tidy(bits=64)
    assert rounded.lo <= big <= rounded.hi
    assert rounded.lo < rounded.hi


def test_format_sig_handles_huge_and_tiny_magnitudes():
    assert format_sig(Fraction(1, 3)) == "0.333333333333"
    assert format_sig(Fraction(11) ** 20) == "6.72749994933e+20"
    assert format_sig(Fraction(1, 11 ** 600)).endswith("e-625")
    assert format_sig(0) == "0"
    assert format_sig(Interval(Fraction(1), Fraction(3))) == "2"
