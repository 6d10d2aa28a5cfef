"""The tree shift as a composition operator on an atomic measure space.

Put a point mass ``mu({v})`` on every vertex with ``mu({v}) = lambda_v**2
mu({parent(v)})`` and let ``phi`` be the parent map.  Then ``C_phi chi_u =
sum_{v in Chi(u)} chi_v`` and in the orthonormal basis ``chi_v /
sqrt(mu({v}))`` the operator has entry ``sqrt(mu({v}) / mu({u}))`` at
``(v, u)``, which is ``lambda_v``.  Entries are kept squared, so the
comparison with the shift matrix is exact.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .oracle import MatrixEntry, SparseMatrix, shift_matrix
from .radical import Radical
from .shift import TreeWeights
from .tree import FiniteTree, Spine, Vertex, infinite_parent


@dataclass(frozen=True)
class MeasureSpace:
    atoms: dict[Vertex, Radical]
    anchor: Vertex

    def mass(self, v: Vertex) -> Radical:
        return self.atoms[v]

    @staticmethod
    def transform(v: Vertex) -> Vertex:
        return infinite_parent(v)


def _exact(x) -> Radical:
    if not isinstance(x, Radical):
        raise TypeError("the measure needs exact weights")
    if x.coeff <= 0:
        raise ValueError("weights must be positive")
    return x


def build_measure(t: FiniteTree, w: TreeWeights, anchor: Vertex = Spine(0)) -> MeasureSpace:
    """Masses with ``mu(anchor) = 1``, propagated along the edges of ``t``."""
    if anchor not in t:
        raise ValueError(f"anchor {anchor.name} is not in the truncation")
    atoms = {anchor: Radical(Fraction(1))}
    todo = deque([anchor])
    while todo:
        u = todo.popleft()
        for v in t.children(u):
            if v not in atoms:
                atoms[v] = _exact(w.weight_sq(v)) * atoms[u]
                todo.append(v)
        p = t.parent(u)
        if p is not None and p not in atoms:
            atoms[p] = atoms[u] / _exact(w.weight_sq(u))
            todo.append(p)
    return MeasureSpace({v: atoms[v] for v in t.vertices}, anchor)


def composition_matrix(ms: MeasureSpace, t: FiniteTree) -> SparseMatrix:
    """``C_phi`` in the normalized basis; entry ``(v, u)`` stored as ``mu({v}) / mu({u})``."""
    # C_phi chi_u = chi_{phi^{-1}(u)}, the indicator of the children of u
    cols: dict[Vertex, list[Vertex]] = {u: [] for u in t.vertices}
    for v in t.vertices:
        u = ms.transform(v)
        if u in cols:
            cols[u].append(v)
    entries = [MatrixEntry(v, u, ms.mass(v) / ms.mass(u)) for u in t.vertices for v in cols[u]]
    return SparseMatrix(t.vertices, tuple(entries))


@dataclass(frozen=True)
class Equivalence:
    equal: bool
    compared: int
    mismatch: Optional[tuple[str, str, str, str]] = None

    def to_dict(self) -> dict:
        d = {"equal": self.equal, "entries_compared": self.compared}
        if self.mismatch is not None:
            row, col, left, right = self.mismatch
            d["first_mismatch"] = {"row": row, "col": col, "composition": left, "shift": right}
        return d


def equivalence_check(t: FiniteTree, w: TreeWeights, ms: Optional[MeasureSpace] = None) -> Equivalence:
    """Exact entrywise comparison of the composition matrix with the shift matrix."""
    if ms is None:
        ms = build_measure(t, w)
    cmat = composition_matrix(ms, t)
    comp = cmat.as_dict()
    shift = shift_matrix(t, w).as_dict()
    keys = [(e.row, e.col) for e in cmat.entries]
    keys += [k for k in shift if k not in comp]
    zero = Radical(Fraction(0))
    for key in keys:
        a, b = comp.get(key, zero), shift.get(key, zero)
        if a != b:
            return Equivalence(False, len(keys), (key[0].name, key[1].name, str(a), str(b)))
    return Equivalence(True, len(keys))
