"""Weighted shifts on truncations of the one-branching-vertex tree.

All norms are squared: ``local_square_sum(u)`` is ``||S e_u||**2`` and
``iterated_norm_sq(u, m)`` is ``||S**m e_u||**2``.  The identity
``(S*S)**m = S*^m S^m`` holds iff ``local_square_sum(u)**m ==
iterated_norm_sq(u, m)`` at every vertex.

The branching vertex ``0`` has infinitely many children, of which a
truncation keeps ``I``.  Sums over the missing ones are supplied by the
caller as *tails*: ``tails(j)`` is ``sum_{k>I} alpha_k**2 beta_k**(2j)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .enclosure import DEFAULT_PRECISION, Enclosure
from .radical import Radical
from .scalars import Comparison, Value, as_value, compare, mul, power, to_enclosure, total
from .tree import Branch, FiniteTree, Spine, Vertex, is_branching

BranchTails = Callable[[int], Value]


class MissingTailError(ValueError):
    """A sum over the children of the branching vertex needs a tail certificate."""


class TruncationError(ValueError):
    """A descending path leaves the truncation."""

    def __init__(self, vertex: Vertex):
        super().__init__(f"truncation too small: missing vertex {vertex.name}")
        self.vertex = vertex


@dataclass(frozen=True)
class TreeWeights:
    """Squared weights ``alpha_i**2``, ``beta_i**2``, ``gamma_i**2`` of the tree family.

    ``beta_sup_sq`` and ``gamma_sup_sq`` are certified suprema over the whole
    infinite tree, when known.
    """

    alpha_sq: Callable[[int], Value]
    beta_sq: Callable[[int], Value]
    gamma_sq: Callable[[int], Value]
    beta_sup_sq: Optional[Value] = None
    gamma_sup_sq: Optional[Value] = None

    def weight_sq(self, v: Vertex) -> Value:
        if isinstance(v, Spine):
            return self.gamma_sq(v.i)
        if v.j == 1:
            return self.alpha_sq(v.i)
        return self.beta_sq(v.i)

    @classmethod
    def constant(cls, r=1) -> "TreeWeights":
        r2 = Radical.of(r) ** 2
        return cls(lambda i: r2, lambda i: r2, lambda i: r2, r2, r2)


def _tail_at(tails: Union[BranchTails, Value, None], j: int) -> Value:
    if tails is None:
        raise MissingTailError("branching vertex reached without a tail certificate")
    if callable(tails):
        return tails(j)
    if j != 0:
        raise MissingTailError("a single tail value only covers one-step sums")
    return as_value(tails)


def local_square_sum(t: FiniteTree, w: TreeWeights, u: Vertex, tail=None,
                     prec: int = DEFAULT_PRECISION) -> Value:
    """``sum_{v in Chi(u)} lambda_v**2`` (plus the tail at the branching vertex)."""
    if u not in t:
        raise ValueError(f"{u.name} is not in the truncation")
    terms = [w.weight_sq(v) for v in t.children(u)]
    if is_branching(u):
        terms.append(_tail_at(tail, 0))
    elif not terms:
        raise TruncationError(_infinite_child(u))
    return total(terms, prec)


def _infinite_child(u: Vertex) -> Vertex:
    if isinstance(u, Spine):
        return Spine(u.i - 1)
    return Branch(u.i, u.j + 1)


def iterated_norm_sq(t: FiniteTree, w: TreeWeights, u: Vertex, m: int, tails=None,
                     prec: int = DEFAULT_PRECISION) -> Value:
    """``||S**m e_u||**2``: sum over descending paths of length ``m`` of squared weight products."""
    if m < 1:
        raise ValueError("m must be positive")
    if u not in t:
        raise ValueError(f"{u.name} is not in the truncation")
    terms: list[Value] = []

    def walk(v: Vertex, left: int, acc: Value):
        if left == 0:
            terms.append(acc)
            return
        kids = t.children(v)
        if is_branching(v):
            terms.append(mul(acc, _tail_at(tails, left - 1), prec))
        elif not kids:
            raise TruncationError(_infinite_child(v))
        for c in kids:
            walk(c, left - 1, mul(acc, w.weight_sq(c), prec))

    walk(u, m, Radical(Fraction(1)))
    return total(terms, prec)


def moment_identity_check(t: FiniteTree, w: TreeWeights, u: Vertex, m: int, tails=None,
                 prec: int = DEFAULT_PRECISION, tol: Fraction | None = None) -> Comparison:
    """Compare ``||S e_u||**(2m)`` with ``||S**m e_u||**2``."""
    lhs = power(local_square_sum(t, w, u, tails, prec), m, prec)
    rhs = iterated_norm_sq(t, w, u, m, tails, prec)
    return compare(lhs, rhs, prec, tol)


def value_max(values, prec: int = DEFAULT_PRECISION) -> Value:
    """Maximum of exact/validated values; an enclosure hull when undecidable."""
    best = None
    for v in values:
        v = as_value(v)
        if best is None:
            best = v
            continue
        cmp = compare(best, v, prec)
        if cmp.verdict.equal:
            continue
        gap = to_enclosure(cmp.gap, prec)
        if gap.lo > 0:
            best = v
        elif gap.hi < 0:
            pass
        else:
            a, b = to_enclosure(best, prec), to_enclosure(v, prec)
            best = Enclosure(max(a.lo, b.lo), max(a.hi, b.hi))
    return best


@dataclass(frozen=True)
class NormBound:
    norm_sq: Value
    norm: Enclosure
    candidates: dict
    certified: bool


def operator_norm_bound(t: FiniteTree, w: TreeWeights, tails=None,
                        prec: int = DEFAULT_PRECISION) -> NormBound:
    """``||S|| = sqrt(sup_u sum_{v in Chi(u)} lambda_v**2)`` over the infinite tree.

    The supremum is the largest of the branching-vertex sum, ``sup beta**2``
    (single-child branch vertices) and ``sup gamma**2`` (spine vertices).
    Without certified suprema the truncation maxima are used and the bound is
    marked uncertified.
    """
    certified = True
    beta = w.beta_sup_sq
    if beta is None:
        certified = False
        beta = value_max([w.beta_sq(i) for i in range(1, t.I + 1)], prec)
    gamma = w.gamma_sup_sq
    if gamma is None:
        certified = False
        gamma = value_max([w.gamma_sq(i) for i in range(t.M)], prec)
    cands = {
        "branching": local_square_sum(t, w, Spine(0), tails, prec),
        "beta_sup_sq": beta,
        "gamma_sup_sq": gamma,
    }
    best = value_max(cands.values(), prec)
    return NormBound(best, to_enclosure(best, prec + 8).sqrt(prec), cands, certified)
