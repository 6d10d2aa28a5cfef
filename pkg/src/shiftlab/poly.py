"""Dense univariate polynomials with integer coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence


def _strip(coeffs) -> tuple:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class PolyZ:
    """Integer polynomial, coefficients lowest degree first."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        c = _strip(self.coeffs)
        if any(not isinstance(a, int) for a in c):
            raise TypeError("PolyZ coefficients must be integers")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def x(cls) -> "PolyZ":
        return cls((0, 1))

    @classmethod
    def const(cls, a: int) -> "PolyZ":
        return cls((a,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return PolyZ(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return PolyZ(tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return PolyZ()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return PolyZ(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, m: int):
        out = PolyZ((1,))
        for _ in range(m):
            out = out * self
        return out

    def derivative(self) -> "PolyZ":
        return PolyZ(tuple(i * a for i, a in enumerate(self.coeffs))[1:])

    def __call__(self, x):
        acc = 0 * x
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def content(self) -> int:
        g = 0
        for a in self.coeffs:
            g = gcd(g, a)
        return g

    def primitive(self) -> "PolyZ":
        """Divide out the content and make the leading coefficient positive."""
        if self.is_zero():
            return self
        g = self.content()
        if self.leading < 0:
            g = -g
        return PolyZ(tuple(a // g for a in self.coeffs))

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            coef = str(a) if (i == 0 or abs(a) != 1) else ("-" if a < 0 else "")
            terms.append(f"{coef}{'*' if coef not in ('', '-') and mono else ''}{mono}")
        return " + ".join(terms).replace("+ -", "- ")


def _coerce(p) -> PolyZ:
    if isinstance(p, PolyZ):
        return p
    if isinstance(p, int):
        return PolyZ((p,))
    raise TypeError(f"cannot use {type(p).__name__} as PolyZ")


def _divmod_q(f: Sequence[Fraction], g: Sequence[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    f = list(f)
    q = [Fraction(0)] * max(1, len(f) - len(g) + 1)
    while len(f) >= len(g) and any(f):
        shift = len(f) - len(g)
        factor = f[-1] / g[-1]
        q[shift] = factor
        for i, b in enumerate(g):
            f[i + shift] -= factor * b
        f = list(_strip(f))
    return q, f


def poly_divmod(f: PolyZ, g: PolyZ) -> tuple[list[Fraction], list[Fraction]]:
    """Division over Q; returns rational quotient and remainder coefficients."""
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    return _divmod_q([Fraction(a) for a in f.coeffs], [Fraction(b) for b in g.coeffs])


def _to_primitive(coeffs: Sequence[Fraction]) -> PolyZ:
    if not coeffs:
        return PolyZ()
    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    return PolyZ(tuple(int(c * den) for c in coeffs)).primitive()


def poly_gcd(f: PolyZ, g: PolyZ) -> PolyZ:
    """Greatest common divisor over Q, returned as a primitive integer polynomial."""
    a = [Fraction(c) for c in f.coeffs]
    b = [Fraction(c) for c in g.coeffs]
    while b:
        _, r = _divmod_q(a, b)
        a, b = b, r
        # keep the coefficients small
        if b:
            b = [Fraction(c) for c in _to_primitive(b).coeffs]
    return _to_primitive(a)
