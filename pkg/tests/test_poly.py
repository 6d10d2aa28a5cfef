from fractions import Fraction

from hypothesis import given, strategies as st

from shiftlab.poly import PolyZ, poly_divmod, poly_gcd

coeffs = st.lists(st.integers(min_value=-20, max_value=20), min_size=1, max_size=7)


def test_basic_ops():
    x = PolyZ.x()
    p = (x - 1) * (x + 2)
    assert p == PolyZ((-2, 1, 1))
    assert p.degree == 2 and p.leading == 1
    assert p.derivative() == PolyZ((1, 2))
    assert p(Fraction(1)) == 0
    assert (x + 1) ** 3 == PolyZ((1, 3, 3, 1))
    assert str(PolyZ((-1, 1))) == "-1 + x"


@given(coeffs, coeffs, st.integers(min_value=-5, max_value=5))
def test_ring_ops_commute_with_evaluation(a, b, z):
    pa, pb = PolyZ(tuple(a)), PolyZ(tuple(b))
    assert (pa * pb)(z) == pa(z) * pb(z)
    assert (pa + pb)(z) == pa(z) + pb(z)
    assert (pa - pb)(z) == pa(z) - pb(z)


@given(coeffs, coeffs)
def test_divmod_reconstructs(a, b):
    pa, pb = PolyZ(tuple(a)), PolyZ(tuple(b))
    if pb.is_zero():
        return
    quo, rem = poly_divmod(pa, pb)

    def ev(cs, z):
        return sum(c * z ** i for i, c in enumerate(cs))

    # over Q: pa = quo*pb + rem with deg rem < deg pb
    for z in range(-3, 4):
        assert ev(quo, z) * pb(z) + ev(rem, z) == pa(z)
    assert len(rem) < len(pb.coeffs)


def test_gcd_of_products():
    x = PolyZ.x()
    f = (x - 1) ** 2 * (2 * x + 1)
    g = (x - 1) * (x + 3)
    assert poly_gcd(f, g) == x - 1
    assert poly_gcd(f, f.derivative()) == x - 1
