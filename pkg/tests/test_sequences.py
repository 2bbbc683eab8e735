from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdchain.errors import DomainError
from bdchain.sequences import (
    Const,
    Geom,
    Poly,
    Table,
    format_scalar,
    monotone_threshold,
    parse_family,
    positive_from,
    shift_sequence,
    to_scalar,
)


@pytest.mark.parametrize(
    "text, value",
    [("3", Fraction(3)), ("-2/6", Fraction(-1, 3)), ("0.1", Fraction(1, 10)), ("+.5", Fraction(1, 2)), ("7.", Fraction(7))],
)
def test_to_scalar_reads_exactly(text, value):
    assert to_scalar(text) == value


@pytest.mark.parametrize("bad", ["1e3", "abc", "1/0", "", "1/2/3"])
def test_to_scalar_rejects_malformed(bad):
    with pytest.raises(DomainError):
        to_scalar(bad)


def test_to_scalar_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        to_scalar(0.5)
    with pytest.raises(TypeError):
        to_scalar(True)


def test_format_scalar():
    assert format_scalar(Fraction(4, 2)) == "2"
    assert format_scalar(Fraction(-3, 6)) == "-1/2"


def test_family_values():
    assert Const(2).values(3) == [2, 2, 2]
    assert Geom(3, Fraction(1, 2)).values(3) == [3, Fraction(3, 2), Fraction(3, 4)]
    assert Poly((1, 0, 1)).values(4) == [1, 2, 5, 10]
    assert Table((7, 8), Geom(1, 2)).values(5) == [7, 8, 1, 2, 4]
    with pytest.raises(DomainError):
        Const(1).at(-1)


@pytest.mark.parametrize(
    "text",
    ["const -1/3", "geom 2 1/11", "poly 1 0 -2 1/2", "table 1 2 3 tail geom 1 1/2", "table 1 tail table 2 tail const 0"],
)
def test_parse_round_trip(text):
    spec = parse_family(text.split())
    assert spec.to_text() == text
    assert parse_family(spec.to_text().split()) == spec


@pytest.mark.parametrize("text", ["", "geom 1", "table 1 2", "poly", "cosh 1", "const 1 2"])
def test_parse_rejects(text):
    with pytest.raises(DomainError):
        parse_family(text.split())


def test_shift_stays_in_grammar_when_possible():
    assert shift_sequence(Const(1), 2) == Const(3)
    assert shift_sequence(Poly((1, 2)), -1) == Poly((0, 2))
    shifted = shift_sequence(Geom(1, 2), 1)
    assert shifted.values(3) == [2, 3, 5]
    with pytest.raises(DomainError):
        shifted.to_text()


def brute_positive(coeffs, start, upto=400):
    return all(sum(c * k ** i for i, c in enumerate(coeffs)) > 0 for k in range(start, upto))


small_coeffs = st.lists(st.integers(min_value=-20, max_value=20), min_size=1, max_size=4).filter(lambda c: c[-1] != 0)


@settings(max_examples=150)
@given(small_coeffs, st.integers(min_value=0, max_value=10))
def test_positive_from_agrees_with_scan(coeffs, start):
    verdict = positive_from([Fraction(c) for c in coeffs], start)
    if verdict is True:
        assert brute_positive(coeffs, start)
    elif verdict is False:
        # a nonpositive value exists, or the leading coefficient is negative
        assert coeffs[-1] < 0 or not brute_positive(coeffs, start, upto=10 ** 4)


@settings(max_examples=150)
@given(small_coeffs, st.integers(min_value=0, max_value=10))
def test_monotone_threshold_is_sound(coeffs, start):
    fr = [Fraction(c) for c in coeffs]
    t = monotone_threshold(fr, start)
    assert t is not None
    p = Poly(tuple(fr))
    sign = 1 if coeffs[-1] > 0 else -1
    assert all(sign * (p.at(k + 1) - p.at(k)) >= 0 for k in range(t, t + 300))


families = st.one_of(
    st.builds(Const, st.fractions(min_value=-5, max_value=5, max_denominator=9)),
    st.builds(
        Geom,
        st.fractions(min_value=-5, max_value=5, max_denominator=9),
        st.fractions(min_value=-3, max_value=3, max_denominator=9),
    ),
    st.builds(lambda c: Poly(tuple(c)), st.lists(st.integers(-6, 6), min_size=1, max_size=3)),
)
specs = st.one_of(
    families,
    st.builds(lambda xs, tail: Table(tuple(xs), tail), st.lists(st.integers(-4, 9), min_size=1, max_size=4), families),
)


@settings(max_examples=200, deadline=None)
@given(specs, st.integers(min_value=0, max_value=6))
def test_envelopes_contain_sampled_tail(spec, k0):
    env = spec.value_env(k0)
    values = [spec.at(k) for k in range(k0, k0 + 60)]
    assert all(v in env for v in values)
    ratio = spec.ratio_env(k0)
    if ratio is not None:
        assert all(v > 0 for v in values)
        assert all(values[i + 1] / values[i] in ratio for i in range(len(values) - 1))
