"""Exact positive reals of the form ``rational * prod(p**f_p)``.

Every quantity in the tree construction is a product of rational powers of
positive rationals.  Writing such a number as ``coeff * prod(p**f_p)`` over
primes ``p`` with ``0 < f_p < 1`` gives a canonical form: two radicals are
equal iff their coefficients and surd maps agree.  No multiplicative
independence of any chosen basis is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from sympy import factorint, isprime

from .enclosure import DEFAULT_PRECISION, Enclosure, nth_root


@lru_cache(maxsize=4096)
def _factor_int(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted((int(p), int(e)) for p, e in factorint(n).items()))


def factor_rational(x: Fraction) -> dict[int, int]:
    """Prime valuations of a positive rational (negative for the denominator)."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError(f"cannot factor nonpositive {x}")
    out: dict[int, int] = {}
    for p, e in _factor_int(x.numerator):
        out[p] = out.get(p, 0) + e
    for p, e in _factor_int(x.denominator):
        out[p] = out.get(p, 0) - e
    return out


def is_prime(p: int) -> bool:
    return isinstance(p, int) and p >= 2 and bool(isprime(p))


@dataclass(frozen=True)
class PerfectPowerCertificate:
    """Outcome of testing whether ``value**power`` is a ``root``-th power in Q."""

    value: Fraction
    power: int
    root: int
    valuations: tuple[tuple[int, int], ...]
    is_perfect: bool
    witness_prime: int | None  # a prime whose valuation is not divisible


def perfect_power_test(x: Fraction, power: int, root: int) -> PerfectPowerCertificate:
    """Decide exactly whether ``x**(power/root)`` is rational.

    ``x**(power/root)`` is rational iff ``root`` divides ``power * v_p(x)`` for
    every prime ``p``.
    """
    vals = factor_rational(Fraction(x))
    witness = None
    for p in sorted(vals):
        if (power * vals[p]) % root:
            witness = p
            break
    return PerfectPowerCertificate(
        value=Fraction(x), power=power, root=root,
        valuations=tuple(sorted(vals.items())),
        is_perfect=witness is None, witness_prime=witness,
    )


def _split(exps: dict[int, Fraction]) -> tuple[Fraction, tuple[tuple[int, Fraction], ...]]:
    coeff = Fraction(1)
    surd = []
    for p in sorted(exps):
        e = exps[p]
        whole = math.floor(e)
        frac = e - whole
        if whole:
            coeff *= Fraction(p) ** whole
        if frac:
            surd.append((p, frac))
    return coeff, tuple(surd)


@dataclass(frozen=True)
class Radical:
    """Exact real ``coeff * prod(p**f for p, f in surd)`` with ``0 < f < 1``."""

    coeff: Fraction
    surd: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if self.coeff == 0 and self.surd:
            object.__setattr__(self, "surd", ())

    @classmethod
    def of(cls, x) -> "Radical":
        if isinstance(x, Radical):
            return x
        return cls(Fraction(x))

    @classmethod
    def power_of(cls, x, exponent) -> "Radical":
        """``x**exponent`` for rational ``x > 0`` and rational exponent."""
        return cls.of(x) ** Fraction(exponent)

    @property
    def is_rational(self) -> bool:
        return not self.surd

    def like(self, other: "Radical") -> bool:
        return self.surd == other.surd or self.coeff == 0 or other.coeff == 0

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Radical(self.coeff * other, self.surd)
        if not isinstance(other, Radical):
            return NotImplemented
        exps: dict[int, Fraction] = dict(self.surd)
        for p, f in other.surd:
            exps[p] = exps.get(p, Fraction(0)) + f
        extra, surd = _split(exps)
        return Radical(self.coeff * other.coeff * extra, surd)

    __rmul__ = __mul__

    def inverse(self) -> "Radical":
        if self.coeff == 0:
            raise ZeroDivisionError("inverse of zero radical")
        exps = {p: -f for p, f in self.surd}
        extra, surd = _split(exps)
        return Radical(extra / self.coeff, surd)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Radical(self.coeff / other, self.surd)
        if not isinstance(other, Radical):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Radical.of(other) * self.inverse()

    def __pow__(self, exponent):
        e = Fraction(exponent)
        if e.denominator == 1:
            m = int(e)
            if m < 0:
                return self.inverse() ** (-m)
            exps = {p: f * m for p, f in self.surd}
            extra, surd = _split(exps)
            return Radical(self.coeff ** m * extra, surd)
        if self.coeff <= 0:
            raise ValueError("fractional power of a nonpositive radical")
        exps = {p: Fraction(v) * e for p, v in factor_rational(self.coeff).items()}
        for p, f in self.surd:
            exps[p] = exps.get(p, Fraction(0)) + f * e
        extra, surd = _split(exps)
        return Radical(extra, surd)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Radical(Fraction(other))
        if not isinstance(other, Radical):
            return NotImplemented
        if self.coeff == 0:
            return other
        if other.coeff == 0:
            return self
        if self.surd != other.surd:
            raise ValueError("sum of unlike radicals is not a radical")
        return Radical(self.coeff + other.coeff, self.surd)

    __radd__ = __add__

    def __neg__(self):
        return Radical(-self.coeff, self.surd)

    def __sub__(self, other):
        return self + (-Radical.of(other))

    def enclose(self, prec: int = DEFAULT_PRECISION) -> Enclosure:
        out = Enclosure.point(self.coeff)
        for p, f in self.surd:
            out = (out * nth_root(Fraction(p) ** f.numerator, f.denominator, prec + 8)).rounded(prec + 4)
        return out.rounded(prec)

    def as_fraction(self) -> Fraction:
        if self.surd:
            raise ValueError(f"{self} is irrational")
        return self.coeff

    def __str__(self):
        parts = [] if (self.coeff == 1 and self.surd) else [str(self.coeff)]
        parts += [f"{p}^({f})" for p, f in self.surd]
        return "*".join(parts)


def radical_sum(terms: Iterable[Radical]) -> Radical:
    """Exact sum of like radicals."""
    total = Radical(Fraction(0))
    for t in terms:
        total = total + t
    return total


@dataclass(frozen=True)
class MonomialScalar:
    """``coeff * prod(basis[i]**exponents[i])`` with rational exponents.

    Arithmetic works on exponent vectors over a shared basis; exact value
    comparison goes through :meth:`to_radical`.
    """

    basis: tuple[Fraction, ...]
    exponents: tuple[Fraction, ...]
    coeff: Fraction = field(default=Fraction(1))

    def __post_init__(self):
        if len(self.basis) != len(self.exponents):
            raise ValueError("basis and exponents differ in length")
        if any(b <= 0 for b in self.basis):
            raise ValueError("basis entries must be positive")

    @classmethod
    def unit(cls, basis: Sequence[Fraction], index: int, exponent=1) -> "MonomialScalar":
        exps = [Fraction(0)] * len(basis)
        exps[index] = Fraction(exponent)
        return cls(tuple(basis), tuple(exps))

    @classmethod
    def one(cls, basis: Sequence[Fraction]) -> "MonomialScalar":
        return cls(tuple(basis), tuple(Fraction(0) for _ in basis))

    def _check(self, other: "MonomialScalar"):
        if self.basis != other.basis:
            raise ValueError("monomials over different bases")

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MonomialScalar(self.basis, self.exponents, self.coeff * other)
        self._check(other)
        return MonomialScalar(self.basis,
                              tuple(a + b for a, b in zip(self.exponents, other.exponents)),
                              self.coeff * other.coeff)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return MonomialScalar(self.basis, self.exponents, self.coeff / other)
        self._check(other)
        return MonomialScalar(self.basis,
                              tuple(a - b for a, b in zip(self.exponents, other.exponents)),
                              self.coeff / other.coeff)

    def __pow__(self, e):
        e = Fraction(e)
        if e.denominator != 1 and self.coeff != 1:
            raise ValueError("fractional power needs unit coefficient")
        return MonomialScalar(self.basis, tuple(a * e for a in self.exponents),
                              self.coeff ** int(e) if e.denominator == 1 else Fraction(1))

    def to_radical(self) -> Radical:
        out = Radical(self.coeff)
        for b, e in zip(self.basis, self.exponents):
            if e:
                out = out * Radical.power_of(b, e)
        return out

    def enclose(self, prec: int = DEFAULT_PRECISION) -> Enclosure:
        return self.to_radical().enclose(prec)

    def same_value(self, other: "MonomialScalar") -> bool:
        return self.to_radical() == other.to_radical()
