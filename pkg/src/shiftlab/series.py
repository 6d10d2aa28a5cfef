"""The power series ``S_k(x) = sum_{j>=0} (j+1)**k x**j`` on ``(0, 1)``.

For ``k >= 0`` the sum is the rational function ``m_k(x) / (1-x)**(k+1)``
where the integer polynomials ``m_k`` obey
``m_{k+1} = (x m_k' + m_k)(1 - x) + (k+1) x m_k``.
For negative ``k`` the value is transcendental in general and is returned as a
validated enclosure.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import ceil, log2

from .enclosure import DEFAULT_PRECISION, Enclosure, floor_log2, round_down, round_up
from .poly import PolyZ

_ONE_MINUS_X = PolyZ((1, -1))


@lru_cache(maxsize=None)
def m_poly(k: int) -> PolyZ:
    if k < 0:
        raise ValueError("m_poly needs k >= 0")
    if k == 0:
        return PolyZ((1,))
    prev = m_poly(k - 1)
    x = PolyZ.x()
    return (x * prev.derivative() + prev) * _ONE_MINUS_X + k * x * prev


def _check_q(q) -> Fraction:
    q = Fraction(q)
    if not 0 < q < 1:
        raise ValueError(f"argument q={q} must lie in (0, 1)")
    return q


def s_nonneg(k: int, q) -> Fraction:
    """Exact ``S_k(q)`` for ``k >= 0``."""
    if k < 0:
        raise ValueError("s_nonneg needs k >= 0")
    q = _check_q(q)
    return m_poly(k)(q) / (1 - q) ** (k + 1)


def partial_sum(k: int, q, terms: int) -> Fraction:
    """Exact ``sum_{j<terms} (j+1)**k q**j`` (any integer ``k``)."""
    q = Fraction(q)
    total = Fraction(0)
    qj = Fraction(1)
    for j in range(terms):
        total += Fraction(j + 1) ** k * qj
        qj *= q
    return total


def geometric_tail(q, terms: int) -> Fraction:
    """``q**terms / (1 - q)``, which bounds the tail of ``S_{-m}`` for every ``m >= 0``."""
    q = Fraction(q)
    return q ** terms / (1 - q)


def terms_for_tail(q, bits: int) -> int:
    """Smallest ``N`` with ``q**N / (1-q) < 2**-bits``."""
    q = _check_q(q)
    n = max(1, ceil((bits + log2(1 / (1 - q))) / log2(1 / q)))
    while geometric_tail(q, n) >= Fraction(1, 2 ** bits):
        n += 1
    while n > 1 and geometric_tail(q, n - 1) < Fraction(1, 2 ** bits):
        n -= 1
    return n


def s_neg(m: int, q, terms: int, prec: int = DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of ``S_{-m}(q)`` from ``terms`` summands plus the geometric tail."""
    if m < 1 or terms < 1:
        raise ValueError("s_neg needs m >= 1 and terms >= 1")
    q = _check_q(q)
    head = partial_sum(-m, q, terms)
    return Enclosure(round_down(head, prec), round_up(head + geometric_tail(q, terms), prec))


def s_value(k: int, q, terms: int | None = None, prec: int = DEFAULT_PRECISION):
    """``S_k(q)`` as an exact Fraction (``k >= 0``) or an Enclosure (``k < 0``)."""
    if k >= 0:
        return s_nonneg(k, q)
    if terms is None:
        terms = terms_for_tail(q, 3 * prec // 4)
    return s_neg(-k, q, terms, prec)


def s_minus1_closed(q, prec: int = DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of ``-ln(1-q)/q`` with absolute width at most ``2**(1-prec)``.

    Uses ``-ln(1-q) = 2 artanh(y)`` with ``y = q/(2-q)``, a series independent
    of the defining power series of ``S_{-1}``.
    """
    if prec < 16:
        raise ValueError("precision_bits must be at least 16")
    q = _check_q(q)
    y = q / (2 - q)
    y2 = y * y
    target = Fraction(1, 2 ** (prec + 3)) * q
    head = Fraction(0)
    power = y
    j = 0
    while True:
        head += power / (2 * j + 1)
        power *= y2
        j += 1
        # remaining terms are bounded by y**(2j+1) / ((2j+1)(1 - y**2))
        tail = 2 * power / ((2 * j + 1) * (1 - y2))
        if tail < target:
            break
    lo = 2 * head / q
    hi = lo + tail / q
    work = prec + 6 + max(0, floor_log2(hi))
    return Enclosure(round_down(lo, work), round_up(hi, work))
