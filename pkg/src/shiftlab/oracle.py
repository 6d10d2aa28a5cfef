"""Brute-force matrix oracle for the moment identity on a truncation.

The shift is written down as a sparse matrix ``M`` (column ``u`` holds
``lambda_v`` in row ``v`` for each child ``v``), and both products
``(M^T M)**m`` and ``(M^T)**m M**m`` are formed by explicit sparse matrix
multiplication in interval arithmetic.  Nothing here uses the path sums of
:mod:`shiftlab.shift`; those are only called afterwards as a cross-check.

Where a vertex's descendants reach the branching vertex within ``m`` steps
the truncated matrix misses the branches past ``I``; the caller supplies
upper bounds ``tail_bounds(j) >= sum_{k>I} alpha_k**2 beta_k**(2j)`` and the
diagonal is widened accordingly.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .enclosure import DEFAULT_PRECISION, Enclosure
from .scalars import Value, Verdict, as_value, power, to_enclosure, to_json
from .shift import TreeWeights, iterated_norm_sq, local_square_sum
from .tree import FiniteTree, Spine, Vertex, interior_vertices

TailBounds = Callable[[int], Fraction]


@dataclass(frozen=True)
class MatrixEntry:
    row: Vertex
    col: Vertex
    value_sq: Value


@dataclass(frozen=True)
class SparseMatrix:
    """Square matrix indexed by the vertices of a truncation; entries stored squared."""

    vertices: tuple[Vertex, ...]
    entries: tuple[MatrixEntry, ...]

    @property
    def dimension(self) -> int:
        return len(self.vertices)

    def as_dict(self) -> dict[tuple[Vertex, Vertex], Value]:
        return {(e.row, e.col): e.value_sq for e in self.entries}

    def column(self, col: Vertex) -> list[MatrixEntry]:
        return [e for e in self.entries if e.col == col]

    def enclosed(self, prec: int = DEFAULT_PRECISION) -> dict[Vertex, dict[Vertex, Enclosure]]:
        """Rows of the matrix with entries ``sqrt(value_sq)`` as enclosures."""
        rows: dict[Vertex, dict[Vertex, Enclosure]] = {}
        for e in self.entries:
            lam = to_enclosure(e.value_sq, prec + 16).sqrt(prec + 8)
            rows.setdefault(e.row, {})[e.col] = lam
        return rows

    def to_coo_csv(self) -> str:
        buf = io.StringIO()
        buf.write("row,col,value_sq\n")
        for e in self.entries:
            val = to_json(e.value_sq)
            if isinstance(val, list):
                val = f"[{val[0]};{val[1]}]"
            buf.write(f"{e.row.name},{e.col.name},{val}\n")
        return buf.getvalue()


def shift_matrix(t: FiniteTree, w: TreeWeights) -> SparseMatrix:
    """Matrix of the shift on ``t``: entry ``(v, u) = lambda_v`` for ``v`` a child of ``u``."""
    entries = []
    for u in t.vertices:
        for v in t.children(u):
            entries.append(MatrixEntry(v, u, as_value(w.weight_sq(v))))
    return SparseMatrix(t.vertices, tuple(entries))


# -- sparse interval products ---------------------------------------------------------

Rows = dict[Vertex, dict[Vertex, Enclosure]]


def _transpose(a: Rows) -> Rows:
    out: Rows = {}
    for r, row in a.items():
        for c, x in row.items():
            out.setdefault(c, {})[r] = x
    return out


def _matmul(a: Rows, b: Rows, prec: int) -> Rows:
    out: Rows = {}
    for r, row in a.items():
        acc: dict[Vertex, Enclosure] = {}
        for k, x in row.items():
            for c, y in b.get(k, {}).items():
                prod = x * y
                acc[c] = acc[c] + prod if c in acc else prod
        if acc:
            out[r] = {c: v.rounded(prec) for c, v in acc.items()}
    return out


def _matpow(a: Rows, m: int, prec: int) -> Rows:
    out = a
    for _ in range(m - 1):
        out = _matmul(out, a, prec)
    return out


def _off_diagonal(a: Rows, keep: set) -> list[tuple[Vertex, Vertex]]:
    bad = []
    for r, row in a.items():
        for c, x in row.items():
            if r != c and (r in keep or c in keep) and not (x.lo == 0 and x.hi == 0):
                bad.append((r, c))
    return bad


# -- report -----------------------------------------------------------------------------


@dataclass
class OracleRow:
    vertex: Vertex
    g: Enclosure
    h: Enclosure
    gap: Enclosure
    tail: Fraction
    verdict: Verdict
    closed_g: Optional[Value] = None
    closed_h: Optional[Value] = None
    agrees: Optional[bool] = None

    def to_dict(self) -> dict:
        d = {
            "vertex": self.vertex.name,
            "G": to_json(self.g),
            "H": to_json(self.h),
            "gap": to_json(self.gap),
            "tail_bound": str(self.tail),
            "verdict": self.verdict.value,
        }
        if self.agrees is not None:
            d["closed_form_G"] = to_json(self.closed_g)
            d["closed_form_H"] = to_json(self.closed_h)
            d["closed_form_agrees"] = self.agrees
        return d


class EmptyInteriorError(ValueError):
    pass


class OffDiagonalError(AssertionError):
    pass


@dataclass
class OracleReport:
    m: int
    dims: tuple[int, int, int]
    precision: int
    rows: list[OracleRow]
    tail_formula: Optional[str] = None
    nonzeros: dict = field(default_factory=dict)

    def row(self, v: Vertex) -> OracleRow:
        for r in self.rows:
            if r.vertex == v:
                return r
        raise KeyError(v.name)

    @property
    def separated(self) -> list[Vertex]:
        return [r.vertex for r in self.rows if r.verdict.separated]

    @property
    def inconclusive(self) -> list[Vertex]:
        return [r.vertex for r in self.rows if r.verdict is Verdict.INCONCLUSIVE]

    @property
    def verdict(self) -> Verdict:
        """Separated if any vertex is; equal when every vertex agrees within its tolerance."""
        if self.separated:
            return Verdict.SEPARATED_BY
        if self.inconclusive:
            return Verdict.INCONCLUSIVE
        return Verdict.EQUAL_WITHIN

    @property
    def disagreements(self) -> list[Vertex]:
        return [r.vertex for r in self.rows if r.agrees is False]

    @property
    def max_gap(self) -> Fraction:
        return max(r.gap.mag for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "dims": list(self.dims),
            "precision_bits": self.precision,
            "verdict": self.verdict.value,
            "separated": bool(self.separated),
            "separated_vertices": [v.name for v in self.separated],
            "tail_bound_formula": self.tail_formula,
            "nonzeros": self.nonzeros,
            "rows": [r.to_dict() for r in self.rows],
        }


def checked_vertices(t: FiniteTree, m: int, tails: bool) -> list[Vertex]:
    """Interior vertices for radius ``m`` plus, with tail bounds, ``Spine(i)`` for ``i < m``."""
    out = interior_vertices(t, m)
    if tails:
        extra = [Spine(i) for i in range(min(m, t.M + 1)) if i + m <= t.M and t.J >= m]
        out = extra + [v for v in out if v not in extra]
    return out


def product_compare(t: FiniteTree, w: TreeWeights, m: int,
                    tail_bounds: Optional[TailBounds] = None,
                    closed_tails=None, prec: int = DEFAULT_PRECISION,
                    tail_formula: Optional[str] = None) -> OracleReport:
    """Form ``G = (M^T M)**m`` and ``H = (M^T)**m M**m`` and compare their diagonals.

    ``closed_tails`` (exact tails for :mod:`shiftlab.shift`) switches on the
    closed-form cross-check; without tail bounds only interior vertices are
    examined.
    """
    if m < 1:
        raise ValueError("m must be positive")
    verts = checked_vertices(t, m, tail_bounds is not None)
    if not verts:
        raise EmptyInteriorError(f"no vertex of the truncation ({t.M},{t.I},{t.J}) is interior for m={m}")
    mat = shift_matrix(t, w)
    a = mat.enclosed(prec)
    at = _transpose(a)
    gram = _matmul(at, a, prec)
    g_mat = _matpow(gram, m, prec)
    h_mat = _matmul(_matpow(at, m, prec), _matpow(a, m, prec), prec)
    keep = set(verts)
    for name, prod in (("G", g_mat), ("H", h_mat)):
        bad = _off_diagonal(prod, keep)
        if bad:
            r, c = bad[0]
            raise OffDiagonalError(f"{name} has off-diagonal entry at ({r.name}, {c.name})")
    squares = mat.as_dict()
    zero = Enclosure.point(0)
    slack = Fraction(1, 2 ** (prec // 2))
    rows = []
    for u in verts:
        g = g_mat.get(u, {}).get(u, zero)
        h = h_mat.get(u, {}).get(u, zero)
        tail_total = Fraction(0)
        if isinstance(u, Spine) and u.i < m:
            # the truncation drops the paths through branches k > I
            if u.i == 0:
                s = gram.get(u, {}).get(u, zero)
                t0 = tail_bounds(0)
                g = Enclosure(g.lo, ((s + t0) ** m).rounded(prec).hi)
                tail_total += g.hi - g.lo
            prefix = Enclosure.point(1)
            for l in range(u.i):
                prefix = prefix * to_enclosure(squares[(Spine(l), Spine(l + 1))], prec + 8)
            extra = (prefix * tail_bounds(m - u.i - 1)).rounded(prec).hi
            h = Enclosure(h.lo, (h.hi + extra))
            tail_total += extra
        gap = (h - g).rounded(prec)
        if not gap.contains_zero():
            verdict = Verdict.SEPARATED_BY
        elif gap.width <= tail_total + slack:
            verdict = Verdict.EQUAL_WITHIN
        else:
            verdict = Verdict.INCONCLUSIVE
        row = OracleRow(u, g, h, gap, tail_total, verdict)
        if closed_tails is not None or not (isinstance(u, Spine) and u.i < m):
            cg = local_square_sum(t, w, u, closed_tails, prec)
            row.closed_g = power(cg, m, prec)
            row.closed_h = iterated_norm_sq(t, w, u, m, closed_tails, prec)
            row.agrees = (_meets(row.closed_g, g, prec) and _meets(row.closed_h, h, prec))
        rows.append(row)
    nnz = {"M": len(mat.entries), "G": sum(len(r) for r in g_mat.values()),
           "H": sum(len(r) for r in h_mat.values())}
    return OracleReport(m, (t.M, t.I, t.J), prec, rows, tail_formula, nnz)


def _meets(closed: Value, box: Enclosure, prec: int) -> bool:
    return not to_enclosure(closed, prec).disjoint(box)
