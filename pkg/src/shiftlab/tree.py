"""Finite truncations of the rootless directed tree with one branching vertex.

The infinite tree has a spine ``0, -1, -2, ...`` (edges ``-k -> -k+1``) and
countably many branches ``(i, 1) -> (i, 2) -> ...`` hanging off vertex ``0``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union


@dataclass(frozen=True, order=True)
class Spine:
    """Spine vertex ``-i``."""

    i: int

    def __post_init__(self):
        if self.i < 0:
            raise ValueError("spine index must be nonnegative")

    @property
    def name(self) -> str:
        return f"s{-self.i}" if self.i else "s0"


@dataclass(frozen=True, order=True)
class Branch:
    """Vertex ``(i, j)``: depth ``j`` on branch ``i``."""

    i: int
    j: int

    def __post_init__(self):
        if self.i < 1 or self.j < 1:
            raise ValueError("branch coordinates must be positive")

    @property
    def name(self) -> str:
        return f"b{self.i}.{self.j}"


Vertex = Union[Spine, Branch]

_NAME = re.compile(r"^(?:s(0|-\d+)|b(\d+)\.(\d+))$")


def parse_vertex(name: str) -> Vertex:
    m = _NAME.match(name)
    if not m:
        raise ValueError(f"bad vertex name {name!r}")
    if m.group(1) is not None:
        return Spine(-int(m.group(1)))
    return Branch(int(m.group(2)), int(m.group(3)))


def infinite_parent(v: Vertex) -> Vertex:
    """Parent in the infinite tree (every vertex has one)."""
    if isinstance(v, Spine):
        return Spine(v.i + 1)
    if v.j == 1:
        return Spine(0)
    return Branch(v.i, v.j - 1)


def is_branching(v: Vertex) -> bool:
    return v == Spine(0)


@dataclass(frozen=True)
class FiniteTree:
    """Truncation with spine ``0..-M``, branches ``1..I`` and depths ``1..J``."""

    M: int
    I: int
    J: int
    vertices: tuple[Vertex, ...] = field(repr=False)
    _parent: dict = field(repr=False, compare=False)
    _children: dict = field(repr=False, compare=False)
    _index: dict = field(repr=False, compare=False)

    def __contains__(self, v) -> bool:
        return v in self._index

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator[Vertex]:
        return iter(self.vertices)

    def index(self, v: Vertex) -> int:
        return self._index[v]

    def parent(self, v: Vertex) -> Vertex | None:
        return self._parent[v]

    def children(self, v: Vertex) -> tuple[Vertex, ...]:
        return self._children[v]

    def edges(self) -> list[tuple[Vertex, Vertex]]:
        return [(self._parent[v], v) for v in self.vertices if self._parent[v] is not None]


def make_truncation(M: int, I: int, J: int) -> FiniteTree:
    for label, val in (("M", M), ("I", I), ("J", J)):
        if not isinstance(val, int) or val < 1:
            raise ValueError(f"truncation dimension {label} must be a positive integer, got {val!r}")
    verts: list[Vertex] = [Spine(i) for i in range(M + 1)]
    verts += [Branch(i, j) for i in range(1, I + 1) for j in range(1, J + 1)]
    index = {v: k for k, v in enumerate(verts)}
    parent: dict = {}
    children: dict = {v: [] for v in verts}
    for v in verts:
        p = infinite_parent(v)
        parent[v] = p if p in index else None
        if parent[v] is not None:
            children[p].append(v)
    return FiniteTree(M, I, J, tuple(verts), parent,
                      {v: tuple(c) for v, c in children.items()}, index)


def interior_vertices(t: FiniteTree, radius: int) -> list[Vertex]:
    """Vertices whose whole radius-neighbourhood in the infinite tree lies in ``t``.

    The neighbourhood is every ancestor up to ``radius`` steps and every
    descendant down to depth ``radius``.  A neighbourhood that reaches the
    branching vertex before its last level needs infinitely many children, so
    such vertices are never interior.
    """
    if radius < 1:
        raise ValueError("radius must be positive")
    out = []
    for u in t.vertices:
        # ancestors
        a, ok = u, True
        for _ in range(radius):
            a = infinite_parent(a)
            if a not in t:
                ok = False
                break
        if not ok:
            continue
        # descendants
        if isinstance(u, Spine):
            if u.i < radius:
                continue  # reaches the branching vertex with levels to spare
            ok = Spine(u.i - radius) in t
        else:
            ok = u.j + radius <= t.J
        if ok:
            out.append(u)
    return out
