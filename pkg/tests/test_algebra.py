from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, strategies as st

from cycformality.algebra import (HbarSeries, Polynomial, UPoly, format_polynomial, multi_leibniz,
                                  parse_polynomial)
from conftest import polynomials


def P(text, dim=2):
    return parse_polynomial(text, dim)


def test_power_rule():
    assert P("x1^2 x2").diff(0) == P("2 x1 x2")


def test_difference_of_squares():
    assert P("x1 + x2") * P("x1 - x2") == P("x1^2 - x2^2")


def test_derivative_of_constant():
    assert P("5").diff(1).is_zero()


def test_parse_rationals_and_format_round_trip():
    p = parse_polynomial("3/2 x1^2 x3 - x2 + 5", 3)
    assert p.terms[(2, 0, 1)] == Fraction(3, 2)
    assert parse_polynomial(format_polynomial(p), 3) == p


def test_parse_rejects_out_of_range_variable():
    with pytest.raises(ValueError):
        parse_polynomial("x3", 2)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        P("x1") + parse_polynomial("x1", 3)


def test_float_coefficients_rejected():
    with pytest.raises(TypeError):
        Polynomial(1, {(1,): 0.5})


def test_zero_terms_are_dropped():
    p = P("x1 - x1 + x2")
    assert p.terms == {(0, 1): 1}


def test_evaluation():
    assert P("x1^2 x2 + 1")(Fraction(1, 2), 4) == 2


def test_multi_leibniz_coefficients_are_multinomial():
    # d^(2) over three factors: sum of coefficients is 3^2
    splits = list(multi_leibniz((2,), 3))
    assert sum(c for c, _ in splits) == 9
    assert all(c == factorial(2) // (factorial(a) * factorial(b) * factorial(e))
               for c, ((a,), (b,), (e,)) in splits)


@given(polynomials(), polynomials(), polynomials())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + b == b + a


@given(polynomials(), st.integers(0, 1), st.integers(0, 1))
def test_partials_commute(a, i, j):
    assert a.diff(i).diff(j) == a.diff(j).diff(i)


@given(polynomials(), polynomials(), st.integers(0, 1))
def test_leibniz_rule(a, b, i):
    assert (a * b).diff(i) == a.diff(i) * b + a * b.diff(i)


@given(polynomials(max_terms=3), polynomials(max_terms=3), st.tuples(st.integers(0, 2), st.integers(0, 2)))
def test_multi_leibniz_matches_repeated_derivatives(a, b, alpha):
    lhs = (a * b).diff_multi(alpha)
    rhs = Polynomial(2)
    for c, (al, be) in multi_leibniz(alpha, 2):
        rhs = rhs + (a.diff_multi(al) * b.diff_multi(be)).scale(c)
    assert lhs == rhs


@given(polynomials(max_terms=3))
def test_format_parse_round_trip(a):
    assert parse_polynomial(format_polynomial(a), 2) == a


# -- truncated series

def test_series_truncation_order_one():
    a = HbarSeries([P("1"), P("x1")])
    b = HbarSeries([P("1"), P("-x1")])
    assert a * b == HbarSeries([P("1"), P("0")])


def test_series_square():
    a = HbarSeries([P("1"), P("1"), P("0")])
    assert a * a == HbarSeries([P("1"), P("2"), P("1")])


def test_series_product_truncates_away():
    a = HbarSeries([P("0"), P("x2")])
    assert (a * a) == HbarSeries([P("0"), P("0")])


def test_series_order_mismatch():
    with pytest.raises(ValueError):
        HbarSeries([P("1")]) * HbarSeries([P("1"), P("1")])


@given(st.lists(polynomials(max_terms=2), min_size=3, max_size=3),
       st.lists(polynomials(max_terms=2), min_size=3, max_size=3),
       st.lists(polynomials(max_terms=2), min_size=3, max_size=3))
def test_series_product_associative(a, b, c):
    a, b, c = HbarSeries(a), HbarSeries(b), HbarSeries(c)
    assert (a * b) * c == a * (b * c)


def test_upoly_trims_and_shifts():
    u = UPoly([P("x1"), P("0")])
    assert len(u) == 1
    assert [j for j, _ in u.shift(2).terms()] == [2]
