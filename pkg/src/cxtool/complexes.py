"""Generalized square complexes and semi-simplicial (Delta) complexes.

Cells are not required to be embedded: an edge may be a loop, a square may
use one edge several times, and a simplex may have repeated vertices.  Links
are therefore indexed by *occurrences* (cell, slot) rather than by vertex
sets, so that incidence multiplicities are kept exactly.

Conventions used throughout the package:

* A square is a cyclic word of four signed edges ``(edge, sign)``.  Sign +1
  means the boundary runs tail -> head.  Corner ``i`` sits at the initial
  vertex of side ``i``.
* A k-simplex carries ``k + 1`` facets; facet ``i`` is the face opposite
  vertex slot ``i``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import (
    CornerMismatch,
    DimensionGap,
    DuplicateIdentifier,
    IdentityViolation,
    InvalidSlot,
    MissingFacet,
    UnknownIdentifier,
)

TAIL = "tail"
HEAD = "head"

NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")


@dataclass(frozen=True)
class Edge:
    name: str
    tail: str
    head: str


@dataclass(frozen=True)
class Square:
    name: str
    sides: tuple  # four (edge name, +1 | -1) pairs


class SquareComplex:
    """A validated generalized square complex.

    Build instances with :func:`validate_square_complex`; the constructor
    does no checking.  Vertices, edges and squares are kept sorted by name.
    """

    __slots__ = ("vertices", "edges", "squares")

    def __init__(self, vertices, edges, squares):
        self.vertices: tuple = tuple(vertices)
        self.edges: dict = dict(edges)
        self.squares: dict = dict(squares)

    def __eq__(self, other):
        if not isinstance(other, SquareComplex):
            return NotImplemented
        return (self.vertices, list(self.edges.items()), list(self.squares.items())) == (
            other.vertices,
            list(other.edges.items()),
            list(other.squares.items()),
        )

    def __repr__(self):
        return f"<SquareComplex V={len(self.vertices)} E={len(self.edges)} S={len(self.squares)}>"

    def initial(self, side):
        e, sign = side
        edge = self.edges[e]
        return edge.tail if sign > 0 else edge.head

    def terminal(self, side):
        e, sign = side
        edge = self.edges[e]
        return edge.head if sign > 0 else edge.tail

    def corner(self, square, i):
        """Vertex at corner ``i`` of ``square``."""
        return self.initial(self.squares[square].sides[i % 4])

    def f_vector(self):
        return (len(self.vertices), len(self.edges), len(self.squares))


def _parse_side(side):
    if isinstance(side, str):
        if side.startswith("-"):
            return side[1:], -1
        return side.lstrip("+"), 1
    e, sign = side
    if sign in ("+", "-"):
        sign = 1 if sign == "+" else -1
    if sign not in (1, -1):
        raise ValueError(f"bad side sign {sign!r}")
    return e, int(sign)


def validate_square_complex(raw) -> SquareComplex:
    """Validate a raw description and return a :class:`SquareComplex`.

    ``raw`` is a mapping with keys ``vertices`` (names), ``edges``
    (``(name, tail, head)`` triples) and ``squares`` (``(name, sides)``
    pairs where each side is ``"a"``, ``"-a"`` or ``(name, sign)``).
    """
    vertices = list(raw.get("vertices", ()))
    seen = set()
    for v in vertices:
        if v in seen:
            raise DuplicateIdentifier(f"vertex {v!r} declared twice")
        seen.add(v)

    edges = {}
    for name, tail, head in raw.get("edges", ()):
        if name in edges:
            raise DuplicateIdentifier(f"edge {name!r} declared twice")
        for v in (tail, head):
            if v not in seen:
                raise UnknownIdentifier(f"edge {name!r} uses unknown vertex {v!r}")
        edges[name] = Edge(name, tail, head)

    squares = {}
    for name, sides in raw.get("squares", ()):
        if name in squares:
            raise DuplicateIdentifier(f"square {name!r} declared twice")
        sides = tuple(_parse_side(s) for s in sides)
        if len(sides) != 4:
            raise ValueError(f"square {name!r} must have exactly four sides")
        for e, _ in sides:
            if e not in edges:
                raise UnknownIdentifier(f"square {name!r} uses unknown edge {e!r}")
        squares[name] = Square(name, sides)

    X = SquareComplex(
        sorted(vertices),
        sorted(edges.items()),
        sorted(squares.items()),
    )
    for q, sq in X.squares.items():
        for i in range(4):
            if X.terminal(sq.sides[i]) != X.initial(sq.sides[(i + 1) % 4]):
                raise CornerMismatch(q, i)
    return X


class DeltaComplex:
    """A validated semi-simplicial complex.

    ``simplices[k]`` lists the k-simplex identifiers; ``facets[s]`` is the
    tuple of facet identifiers of a simplex of dimension >= 1.  Identifiers
    are any hashable values, unique across all dimensions.
    """

    def __init__(self, simplices: Sequence[Sequence[Hashable]], facets: Mapping, *, check: bool = True):
        while simplices and not simplices[-1]:
            simplices = simplices[:-1]
        self.simplices: tuple = tuple(tuple(level) for level in simplices)
        self.facets: dict = {}
        for level in self.simplices[1:]:
            for s in level:
                if s not in facets:
                    raise MissingFacet(f"simplex {s!r} has no facet list")
                self.facets[s] = tuple(facets[s])
        self.dim: dict = {}
        for k, level in enumerate(self.simplices):
            for s in level:
                if s in self.dim:
                    raise DuplicateIdentifier(f"simplex {s!r} declared twice")
                self.dim[s] = k
        if check:
            self._check()
        self._verts: dict = {}
        for level in self.simplices:
            for s in level:
                self._verts[s] = self._compute_vertices(s)
        self._occ = None

    def _check(self):
        for k, level in enumerate(self.simplices):
            if k and not self.simplices[k - 1]:
                raise DimensionGap(f"dimension {k} is populated but dimension {k - 1} is empty")
            if k == 0:
                continue
            for s in level:
                fs = self.facets[s]
                if len(fs) != k + 1:
                    raise MissingFacet(f"simplex {s!r} of dimension {k} has {len(fs)} facets")
                for f in fs:
                    if self.dim.get(f) != k - 1:
                        raise MissingFacet(f"simplex {s!r}: facet {f!r} is not a {k - 1}-simplex")
        for level in self.simplices[2:]:
            for s in level:
                fs = self.facets[s]
                for j in range(len(fs)):
                    fj = self.facets[fs[j]]
                    for i in range(j):
                        if fj[i] != self.facets[fs[i]][j - 1]:
                            raise IdentityViolation(s, i, j)

    def _compute_vertices(self, s):
        k = self.dim[s]
        if k == 0:
            return (s,)
        fs = self.facets[s]
        # Vertices 0..k-1 survive deletion of slot k; vertex k is the last one of facet 0.
        return self._verts[fs[k]] + (self._verts[fs[0]][-1],)

    # -- queries ---------------------------------------------------------
    @property
    def top_dimension(self) -> int:
        return len(self.simplices) - 1

    def f_vector(self) -> tuple:
        return tuple(len(level) for level in self.simplices)

    def vertices(self, s) -> tuple:
        """Vertex at every slot of ``s`` (may contain repeats)."""
        return self._verts[s]

    def vertex(self, s, i):
        if not 0 <= i <= self.dim[s]:
            raise InvalidSlot(f"slot {i} out of range for {s!r}")
        return self._verts[s][i]

    def occurrences(self, v) -> list:
        """All ``(simplex, slot)`` with ``vertex(simplex, slot) == v``, dimension >= 1."""
        if self._occ is None:
            occ = {u: [] for u in self.simplices[0]} if self.simplices else {}
            for level in self.simplices[1:]:
                for s in level:
                    for i, u in enumerate(self._verts[s]):
                        occ[u].append((s, i))
            self._occ = occ
        if v not in self._occ:
            raise UnknownIdentifier(f"unknown vertex {v!r}")
        return self._occ[v]

    def __contains__(self, s):
        return s in self.dim

    def __eq__(self, other):
        if not isinstance(other, DeltaComplex):
            return NotImplemented
        return (
            [set(level) for level in self.simplices] == [set(level) for level in other.simplices]
            and self.facets == other.facets
        )

    def __repr__(self):
        return f"<{type(self).__name__} f={self.f_vector()}>"


def validate_delta_complex(raw) -> DeltaComplex:
    """Build a :class:`DeltaComplex` from ``raw``.

    ``raw`` is either a mapping ``{k: {name: facets}}`` or a sequence of
    ``(k, name, facets)`` triples (``facets`` ignored for k = 0).
    """
    if isinstance(raw, Mapping):
        items = [(k, name, fs) for k, level in raw.items() for name, fs in dict(level).items()]
    else:
        items = list(raw)
    top = max((k for k, _, _ in items), default=-1)
    simplices = [[] for _ in range(top + 1)]
    facets = {}
    for k, name, fs in items:
        if k < 0:
            raise DimensionGap(f"negative dimension for {name!r}")
        simplices[k].append(name)
        if k:
            facets[name] = tuple(fs)
    return DeltaComplex(simplices, facets)


def iterated_face(X: DeltaComplex, s, keep: Iterable[int], order: str = "descending"):
    """Face of ``s`` spanned by the slots in ``keep``.

    Deletes the other slots one at a time.  ``order`` picks whether the
    deletions run from the highest slot down or from the lowest up; the
    simplicial identities make both agree.
    """
    k = X.dim[s]
    keep = set(keep)
    if not keep or any(not 0 <= i <= k for i in keep):
        raise InvalidSlot(f"bad slot set {sorted(keep)} for {k}-simplex {s!r}")
    drop = [i for i in range(k + 1) if i not in keep]
    if order == "descending":
        for i in reversed(drop):
            s = X.facets[s][i]
    elif order == "ascending":
        for removed, i in enumerate(drop):
            s = X.facets[s][i - removed]
    else:
        raise ValueError(f"unknown order {order!r}")
    return s


# -- links ------------------------------------------------------------------

@dataclass(frozen=True)
class LinkGraph:
    """Link of a vertex in a square complex, as an occurrence multigraph.

    ``vertices`` are edge ends ``(edge, "tail" | "head")`` at the base
    vertex; ``edges`` maps each corner ``(square, i)`` at the base vertex to
    the pair of edge ends it joins.
    """

    base: str
    vertices: tuple
    edges: dict

    def adjacency(self):
        adj = {u: set() for u in self.vertices}
        for a, b in self.edges.values():
            adj[a].add(b)
            adj[b].add(a)
        return adj


def _end(side, at_initial):
    e, sign = side
    if at_initial:
        return (e, TAIL if sign > 0 else HEAD)
    return (e, HEAD if sign > 0 else TAIL)


def square_vertex_link(X: SquareComplex, v) -> LinkGraph:
    if v not in X.vertices:
        raise UnknownIdentifier(f"unknown vertex {v!r}")
    verts = []
    for name, edge in X.edges.items():
        if edge.tail == v:
            verts.append((name, TAIL))
        if edge.head == v:
            verts.append((name, HEAD))
    edges = {}
    for q, sq in X.squares.items():
        for i in range(4):
            if X.initial(sq.sides[i]) == v:
                edges[(q, i)] = (_end(sq.sides[i - 1], False), _end(sq.sides[i], True))
    return LinkGraph(v, tuple(verts), edges)


class LinkComplex(DeltaComplex):
    """Link of a simplex of a DeltaComplex.

    Its simplices are occurrences ``(tau, S)``: ``tau`` is a simplex of the
    ambient complex and ``S`` the sorted slots of ``tau`` spanning the base
    simplex.  For a vertex link ``S`` is a 1-tuple.
    """

    def __init__(self, base, simplices, facets, *, check=True):
        super().__init__(simplices, facets, check=check)
        self.base = base


def simplex_link(X: DeltaComplex, sigma, *, check: bool = True) -> LinkComplex:
    if sigma not in X:
        raise UnknownIdentifier(f"unknown simplex {sigma!r}")
    d = X.dim[sigma]
    sv = X.vertices(sigma)
    levels = []
    if d == 0:
        for s, i in X.occurrences(sigma):
            k = X.dim[s]
            while len(levels) < k:
                levels.append([])
            levels[k - 1].append((s, (i,)))
    else:
        for k in range(d + 1, X.top_dimension + 1):
            level = []
            for tau in X.simplices[k]:
                tv = X.vertices(tau)
                for S in itertools.combinations(range(k + 1), d + 1):
                    if tuple(tv[i] for i in S) == sv and iterated_face(X, tau, S) == sigma:
                        level.append((tau, S))
            levels.append(level)
    facets = {}
    if d == 0:
        X_facets = X.facets
        for level in levels[1:]:
            for occ in level:
                tau, (i,) = occ
                fs = X_facets[tau]
                facets[occ] = tuple(
                    (fs[r], (i if i < r else i - 1,)) for r in range(len(fs)) if r != i
                )
        return LinkComplex(sigma, levels, facets, check=check)
    for level in levels[1:]:
        for tau, S in level:
            k = X.dim[tau]
            fs = []
            for r in range(k + 1):
                if r in S:
                    continue
                fs.append((X.facets[tau][r], tuple(s if s < r else s - 1 for s in S)))
            facets[(tau, S)] = tuple(fs)
    return LinkComplex(sigma, levels, facets, check=check)


def delta_vertex_link(X: DeltaComplex, v, *, check: bool = True) -> LinkComplex:
    if v not in X or X.dim[v] != 0:
        raise UnknownIdentifier(f"unknown vertex {v!r}")
    return simplex_link(X, v, check=check)


def euler_characteristic(X) -> int:
    if isinstance(X, SquareComplex):
        return len(X.vertices) - len(X.edges) + len(X.squares)
    if isinstance(X, LinkGraph):
        return len(X.vertices) - len(X.edges)
    return sum((-1) ** k * n for k, n in enumerate(X.f_vector()))


def components(X) -> list:
    """Connected components of the 1-skeleton, each a sorted vertex list."""
    if isinstance(X, SquareComplex):
        verts = list(X.vertices)
        pairs = [(e.tail, e.head) for e in X.edges.values()]
    else:
        verts = list(X.simplices[0]) if X.simplices else []
        pairs = [X.vertices(e) for e in X.simplices[1]] if X.top_dimension >= 1 else []
    parent = {v: v for v in verts}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups = {}
    for v in verts:
        groups.setdefault(find(v), []).append(v)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])
