"""Validated real intervals with exact rational endpoints.

Arithmetic on :class:`Enclosure` is exact; callers bound the size of the
endpoints with :meth:`Enclosure.rounded`, which rounds outward to a given
number of significant bits.  Rounding is monotone, so nested inputs give
nested outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy import integer_nthroot

Number = Union[int, Fraction]

DEFAULT_PRECISION = 128


def floor_log2(x: Fraction) -> int:
    """Exact ``floor(log2(|x|))`` for nonzero rational ``x``."""
    n, d = abs(x.numerator), x.denominator
    e = n.bit_length() - d.bit_length()
    # 2**e <= n/d  <=>  n <= d << e (e >= 0) ...
    if e >= 0:
        if n < (d << e):
            e -= 1
    elif (n << -e) < d:
        e -= 1
    return e


def _round(x: Fraction, prec: int, up: bool) -> Fraction:
    if x == 0:
        return Fraction(0)
    shift = prec - 1 - floor_log2(x)
    if shift >= 0:
        num, den = x.numerator << shift, x.denominator
    else:
        num, den = x.numerator, x.denominator << -shift
    m = -((-num) // den) if up else num // den
    if shift >= 0:
        return Fraction(m, 1 << shift)
    return Fraction(m << -shift)


def round_down(x: Number, prec: int) -> Fraction:
    return _round(Fraction(x), prec, up=False)


def round_up(x: Number, prec: int) -> Fraction:
    return _round(Fraction(x), prec, up=True)


def _root_floor(x: Fraction, b: int, prec: int) -> tuple[Fraction, bool]:
    """Lower bound for the positive real b-th root of x > 0, plus exactness."""
    n, d = x.numerator, x.denominator
    # x**(1/b) = (n * d**(b-1))**(1/b) / d
    radicand = n * d ** (b - 1)
    # choose a scale so the integer root carries ~prec+2 bits
    s = max(0, prec + 2 - radicand.bit_length() // b)
    r, exact = integer_nthroot(radicand << (b * s), b)
    return Fraction(r, d << s), exact


def nth_root(x: Number, b: int, prec: int = DEFAULT_PRECISION) -> "Enclosure":
    """Enclosure of ``x**(1/b)`` for rational ``x >= 0``."""
    x = Fraction(x)
    if x < 0 or b < 1:
        raise ValueError("nth_root needs x >= 0 and b >= 1")
    if x == 0 or b == 1:
        return Enclosure.point(x)
    lo, exact = _root_floor(x, b, prec)
    if exact:
        return Enclosure.point(lo)
    n, d = x.numerator, x.denominator
    radicand = n * d ** (b - 1)
    s = max(0, prec + 2 - radicand.bit_length() // b)
    hi = lo + Fraction(1, d << s)
    return Enclosure(round_down(lo, prec), round_up(hi, prec))


def rational_power(x: Number, num: int, den: int, prec: int = DEFAULT_PRECISION) -> "Enclosure":
    """Enclosure of ``x**(num/den)`` for rational ``x > 0``."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("rational_power needs x > 0")
    return nth_root(x ** num, den, prec)


@dataclass(frozen=True)
class Enclosure:
    """Closed interval ``[lo, hi]`` known to contain some real number."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: Number) -> "Enclosure":
        return cls(Fraction(x), Fraction(x))

    @classmethod
    def coerce(cls, x) -> "Enclosure":
        if isinstance(x, Enclosure):
            return x
        return cls.point(x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def mag(self) -> Fraction:
        """Largest absolute value in the interval."""
        return max(abs(self.lo), abs(self.hi))

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, Enclosure):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def disjoint(self, other) -> bool:
        other = Enclosure.coerce(other)
        return self.hi < other.lo or other.hi < self.lo

    def intersect(self, other) -> "Enclosure | None":
        other = Enclosure.coerce(other)
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Enclosure(lo, hi) if lo <= hi else None

    def hull(self, other) -> "Enclosure":
        other = Enclosure.coerce(other)
        return Enclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def rounded(self, prec: int = DEFAULT_PRECISION) -> "Enclosure":
        return Enclosure(round_down(self.lo, prec), round_up(self.hi, prec))

    def __neg__(self):
        return Enclosure(-self.hi, -self.lo)

    def __add__(self, other):
        if not isinstance(other, (Enclosure, int, Fraction)):
            return NotImplemented
        other = Enclosure.coerce(other)
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, (Enclosure, int, Fraction)):
            return NotImplemented
        other = Enclosure.coerce(other)
        return Enclosure(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return Enclosure.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (Enclosure, int, Fraction)):
            return NotImplemented
        other = Enclosure.coerce(other)
        ps = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Enclosure(min(ps), max(ps))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (Enclosure, int, Fraction)):
            return NotImplemented
        other = Enclosure.coerce(other)
        if other.contains_zero():
            raise ZeroDivisionError("divisor enclosure contains zero")
        return self * Enclosure(1 / other.hi, 1 / other.lo)

    def __rtruediv__(self, other):
        return Enclosure.coerce(other) / self

    def __pow__(self, m: int):
        if not isinstance(m, int) or m < 0:
            return NotImplemented
        if m == 0:
            return Enclosure.point(1)
        lo, hi = self.lo ** m, self.hi ** m
        if m % 2 == 0:
            if self.contains_zero():
                return Enclosure(0, max(lo, hi))
            return Enclosure(min(lo, hi), max(lo, hi))
        return Enclosure(lo, hi)

    def sqrt(self, prec: int = DEFAULT_PRECISION) -> "Enclosure":
        if self.lo < 0:
            raise ValueError("sqrt of an enclosure with negative part")
        return Enclosure(nth_root(self.lo, 2, prec).lo, nth_root(self.hi, 2, prec).hi)

    def __str__(self):
        return f"[{float(self.lo):.17g}, {float(self.hi):.17g}]"


@dataclass(frozen=True)
class ComplexBox:
    """Rectangular complex interval ``re + i*im``."""

    re: Enclosure
    im: Enclosure

    @classmethod
    def point(cls, re: Number, im: Number = 0) -> "ComplexBox":
        return cls(Enclosure.point(re), Enclosure.point(im))

    @classmethod
    def coerce(cls, z) -> "ComplexBox":
        if isinstance(z, ComplexBox):
            return z
        return cls.point(z)

    def rounded(self, prec: int = DEFAULT_PRECISION) -> "ComplexBox":
        return ComplexBox(self.re.rounded(prec), self.im.rounded(prec))

    def __add__(self, other):
        other = ComplexBox.coerce(other)
        return ComplexBox(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = ComplexBox.coerce(other)
        return ComplexBox(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return ComplexBox.coerce(other) - self

    def __neg__(self):
        return ComplexBox(-self.re, -self.im)

    def __mul__(self, other):
        other = ComplexBox.coerce(other)
        return ComplexBox(self.re * other.re - self.im * other.im,
                          self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def abs_sq(self) -> Enclosure:
        return self.re ** 2 + self.im ** 2

    def __truediv__(self, other):
        other = ComplexBox.coerce(other)
        den = other.abs_sq()
        num = self * ComplexBox(other.re, -other.im)
        return ComplexBox(num.re / den, num.im / den)

    def __pow__(self, m: int):
        out = ComplexBox.point(1)
        base = self
        while m:
            if m & 1:
                out = out * base
            base = base * base
            m >>= 1
        return out

    def contains(self, z) -> bool:
        z = ComplexBox.coerce(z)
        return self.re.contains(z.re) and self.im.contains(z.im)

    @property
    def width(self) -> Fraction:
        return max(self.re.width, self.im.width)
