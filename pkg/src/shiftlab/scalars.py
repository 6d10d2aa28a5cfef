"""Mixed exact/validated scalars and three-valued comparisons.

A *value* is either an exact :class:`Radical` or an :class:`Enclosure`.
Operations stay exact while they can and fall back to enclosures otherwise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .enclosure import DEFAULT_PRECISION, Enclosure
from .radical import Radical

Value = Union[Radical, Enclosure]


def as_value(x) -> Value:
    if isinstance(x, (Radical, Enclosure)):
        return x
    return Radical(Fraction(x))


def to_enclosure(x, prec: int = DEFAULT_PRECISION) -> Enclosure:
    x = as_value(x)
    if isinstance(x, Enclosure):
        return x
    return x.enclose(prec)


def is_exact(x) -> bool:
    return isinstance(as_value(x), Radical)


def add(a, b, prec: int = DEFAULT_PRECISION) -> Value:
    a, b = as_value(a), as_value(b)
    if isinstance(a, Radical) and isinstance(b, Radical) and a.like(b):
        return a + b
    return (to_enclosure(a, prec) + to_enclosure(b, prec)).rounded(prec)


def total(values: Iterable, prec: int = DEFAULT_PRECISION) -> Value:
    """Sum that groups like radicals exactly before any enclosure is formed."""
    groups: dict[tuple, Radical] = {}
    enc = None
    for v in values:
        v = as_value(v)
        if isinstance(v, Radical):
            if v.coeff == 0:
                continue
            groups[v.surd] = groups[v.surd] + v if v.surd in groups else v
        else:
            enc = v if enc is None else enc + v
    if enc is None and len(groups) <= 1:
        return next(iter(groups.values()), Radical(Fraction(0)))
    out = enc if enc is not None else Enclosure.point(0)
    for r in groups.values():
        out = out + r.enclose(prec + 8)
    return out.rounded(prec)


def mul(a, b, prec: int = DEFAULT_PRECISION) -> Value:
    a, b = as_value(a), as_value(b)
    if isinstance(a, Radical) and isinstance(b, Radical):
        return a * b
    return (to_enclosure(a, prec) * to_enclosure(b, prec)).rounded(prec)


def product(values: Iterable, prec: int = DEFAULT_PRECISION) -> Value:
    out: Value = Radical(Fraction(1))
    for v in values:
        out = mul(out, v, prec)
    return out


def power(a, m: int, prec: int = DEFAULT_PRECISION) -> Value:
    a = as_value(a)
    if isinstance(a, Radical):
        return a ** m
    return (a ** m).rounded(prec)


def to_json(x) -> str | list[str]:
    """Exact rational/radical string, or an ``[lo, hi]`` pair of rational strings."""
    x = as_value(x)
    if isinstance(x, Radical):
        return str(x)
    return [str(x.lo), str(x.hi)]


class Verdict(str, enum.Enum):
    EQUAL_EXACT = "EqualExact"
    EQUAL_WITHIN = "EqualWithin"
    SEPARATED_EXACT = "SeparatedExact"
    SEPARATED_BY = "SeparatedBy"
    INCONCLUSIVE = "Inconclusive"

    @property
    def equal(self) -> bool:
        return self in (Verdict.EQUAL_EXACT, Verdict.EQUAL_WITHIN)

    @property
    def separated(self) -> bool:
        return self in (Verdict.SEPARATED_EXACT, Verdict.SEPARATED_BY)


@dataclass(frozen=True)
class Comparison:
    """Outcome of comparing ``lhs`` against ``rhs``; ``gap`` encloses ``rhs - lhs``."""

    verdict: Verdict
    lhs: Value
    rhs: Value
    gap: Value
    width: Fraction

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "lhs": to_json(self.lhs),
            "rhs": to_json(self.rhs),
            "gap": to_json(self.gap),
            "width": str(self.width),
        }


def compare(lhs, rhs, prec: int = DEFAULT_PRECISION, tol: Fraction | None = None) -> Comparison:
    """Three-valued comparison.

    Exact operands give ``EqualExact``/``SeparatedExact``.  Otherwise the
    enclosure of ``rhs - lhs`` decides: disjoint from zero gives
    ``SeparatedBy``; inside ``[-tol, tol]`` gives ``EqualWithin``; anything
    else is ``Inconclusive`` and carries its width.
    """
    lhs, rhs = as_value(lhs), as_value(rhs)
    if isinstance(lhs, Radical) and isinstance(rhs, Radical):
        if lhs == rhs:
            return Comparison(Verdict.EQUAL_EXACT, lhs, rhs, Radical(Fraction(0)), Fraction(0))
        gap = rhs - lhs if lhs.like(rhs) else (rhs.enclose(prec + 8) - lhs.enclose(prec + 8)).rounded(prec)
        return Comparison(Verdict.SEPARATED_EXACT, lhs, rhs, gap, Fraction(0))
    gap = (to_enclosure(rhs, prec) - to_enclosure(lhs, prec)).rounded(prec)
    if not gap.contains_zero():
        verdict = Verdict.SEPARATED_BY
    elif tol is not None and -tol <= gap.lo and gap.hi <= tol:
        verdict = Verdict.EQUAL_WITHIN
    else:
        verdict = Verdict.INCONCLUSIVE
    return Comparison(verdict, lhs, rhs, gap, gap.width)
