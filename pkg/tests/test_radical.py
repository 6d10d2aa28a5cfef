import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from shiftlab.radical import MonomialScalar, Radical, factor_rational, perfect_power_test, radical_sum

pos = st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=10 ** 6).filter(lambda x: x > 0)
small_exp = st.fractions(min_value=-3, max_value=3, max_denominator=6)


def test_canonical_form_identifies_equal_values():
    assert Radical.power_of(8, Fraction(1, 2)) == Radical(2) * Radical.power_of(2, Fraction(1, 2))
    assert Radical.power_of(864, Fraction(1, 2)) == Radical(12) * Radical.power_of(6, Fraction(1, 2))
    assert str(Radical.power_of(864, Fraction(1, 2))) == "12*2^(1/2)*3^(1/2)"
    assert Radical.power_of(Fraction(9, 4), Fraction(1, 2)) == Radical(Fraction(3, 2))


@given(pos, small_exp, small_exp)
def test_power_laws(x, a, b):
    r = Radical.of(x)
    assert (r ** a) * (r ** b) == r ** (a + b)
    if a != 0:
        assert ((r ** a) ** (1 / a)) == r


@given(pos, small_exp)
def test_enclosure_matches_float(x, e):
    enc = Radical.power_of(x, e).enclose(60)
    ref = float(x) ** float(e)
    assert enc.lo <= Fraction(ref) * (1 + Fraction(1, 10 ** 12))
    assert enc.hi >= Fraction(ref) * (1 - Fraction(1, 10 ** 12))
    assert enc.width <= Fraction(1, 2 ** 55) * max(1, enc.hi)


def test_sums_of_like_and_unlike_radicals():
    s2 = Radical.power_of(2, Fraction(1, 2))
    assert s2 + s2 == Radical(2) * s2
    assert radical_sum([s2, s2, s2]) == Radical(3) * s2
    with pytest.raises(ValueError):
        s2 + Radical(1)
    assert (s2 - s2).coeff == 0


def test_inverse_and_division():
    r = Radical(3) * Radical.power_of(5, Fraction(2, 3))
    assert r * r.inverse() == Radical(1)
    assert (r / r) == Radical(1)
    assert (1 / Radical(4)) == Radical(Fraction(1, 4))
    with pytest.raises(ZeroDivisionError):
        Radical(0).inverse()
    with pytest.raises(ValueError):
        Radical(3).as_fraction() and Radical.power_of(3, Fraction(1, 2)).as_fraction()


def test_factor_rational():
    assert factor_rational(Fraction(864)) == {2: 5, 3: 3}
    assert factor_rational(Fraction(3, 8)) == {2: -3, 3: 1}
    with pytest.raises(ValueError):
        factor_rational(Fraction(0))


def test_perfect_power_certificate():
    cert = perfect_power_test(Fraction(864), 1, 2)
    assert not cert.is_perfect and cert.witness_prime == 2
    assert perfect_power_test(Fraction(864), 2, 2).is_perfect
    assert perfect_power_test(Fraction(8, 27), 1, 3).is_perfect


@given(st.integers(min_value=1, max_value=10 ** 6), st.integers(min_value=1, max_value=5),
       st.integers(min_value=2, max_value=6))
def test_perfect_power_matches_integer_root(x, power, root):
    cert = perfect_power_test(Fraction(x), power, root)
    y = x ** power
    r = round(y ** (1 / root))
    is_root = any((r + d) ** root == y for d in (-1, 0, 1) if r + d >= 0)
    assert cert.is_perfect == is_root


def test_monomial_scalar_arithmetic():
    basis = (Fraction(8), Fraction(4))
    a = MonomialScalar(basis, (Fraction(1, 2), Fraction(1)))
    b = MonomialScalar.unit(basis, 1, Fraction(1, 2))
    assert (a * b).to_radical() == Radical(Fraction(8)) ** Fraction(1, 2) * Radical(8)
    assert (a / a).to_radical() == Radical(1)
    assert (a ** 2).to_radical() == Radical(128)
    # 8**(2/3) == 4: different exponent vectors, same value
    c = MonomialScalar(basis, (Fraction(2, 3), Fraction(0)))
    d = MonomialScalar(basis, (Fraction(0), Fraction(1)))
    assert c.same_value(d) and c != d
    assert math.isclose(float(a.enclose(50).mid), math.sqrt(8) * 4)
    with pytest.raises(ValueError):
        MonomialScalar(basis, (Fraction(1),))
