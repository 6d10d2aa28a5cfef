import math
from fractions import Fraction

import mpmath
from mpmath.libmp import to_rational
import pytest
from hypothesis import given, settings, strategies as st

from shiftlab.poly import PolyZ
from shiftlab.series import (geometric_tail, m_poly, partial_sum, s_minus1_closed, s_neg, s_nonneg,
                             s_value, terms_for_tail)

qs = st.fractions(min_value=Fraction(1, 50), max_value=Fraction(9, 10), max_denominator=100).filter(
    lambda q: 0 < q < 1)


def test_m_poly_small_cases():
    x = PolyZ.x()
    assert m_poly(0) == PolyZ((1,))
    assert m_poly(1) == PolyZ((1,))
    assert m_poly(2) == 1 + x
    assert m_poly(3) == PolyZ((1, 4, 1))


def test_m_poly_recurrence_and_factorial():
    x = PolyZ.x()
    for k in range(32):
        prev = m_poly(k)
        assert m_poly(k + 1) == (x * prev.derivative() + prev) * (1 - x) + (k + 1) * x * prev
    for k in range(1, 21):
        assert m_poly(k)(1) == math.factorial(k)


@given(qs, st.integers(min_value=0, max_value=6))
@settings(max_examples=40)
def test_closed_form_matches_partial_sums(q, k):
    n = terms_for_tail(q, 40) + 40 * (k + 1)
    head = partial_sum(k, q, n)
    exact = s_nonneg(k, q)
    assert head < exact
    assert exact - head < Fraction(1, 2 ** 20) * exact


def test_worked_values():
    q = Fraction(1, 2)
    assert s_nonneg(0, q) == 2
    assert s_nonneg(1, q) == 4
    assert s_nonneg(2, q) == 12
    with pytest.raises(ValueError):
        s_nonneg(1, Fraction(1))


@given(qs, st.integers(min_value=1, max_value=4))
@settings(max_examples=30, deadline=None)
def test_s_neg_contains_polylog(q, m):
    enc = s_neg(m, q, terms_for_tail(q, 80), 96)
    with mpmath.workprec(200):
        ref = mpmath.polylog(m, mpmath.mpf(q.numerator) / q.denominator) / (mpmath.mpf(q.numerator) / q.denominator)
        lo = mpmath.mpf(enc.lo.numerator) / enc.lo.denominator
        hi = mpmath.mpf(enc.hi.numerator) / enc.hi.denominator
        assert lo <= ref <= hi
    assert enc.width < Fraction(1, 2 ** 78)


def test_s_minus1_two_routes_agree():
    for q in (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5), Fraction(7, 8)):
        a = s_minus1_closed(q, 128)
        b = s_value(-1, q, prec=128)
        assert not a.disjoint(b)
        assert a.width <= Fraction(2, 2 ** 128)
    with pytest.raises(ValueError):
        s_minus1_closed(Fraction(1, 2), 8)


def test_s_minus1_against_interval_log():
    q = Fraction(1, 2)
    enc = s_minus1_closed(q, 100)
    mpmath.iv.prec = 120
    ref = -mpmath.iv.log(1 - mpmath.iv.mpf(0.5)) / mpmath.iv.mpf(0.5)
    lo, hi = (Fraction(*to_rational(x)) for x in ref._mpi_)
    assert lo <= hi
    assert lo <= enc.hi and enc.lo <= hi


def test_tail_terms():
    q = Fraction(1, 2)
    n = terms_for_tail(q, 96)
    assert geometric_tail(q, n) < Fraction(1, 2 ** 96) <= geometric_tail(q, n - 1)
    assert s_value(-2, q).width < Fraction(1, 2 ** 95)
