"""Fundamental group presentations, abelianization and finite covers."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .complexes import SquareComplex, components, validate_square_complex
from .curvature import VHPartition, detect_vh
from .errors import EnumerationTooLarge, InvalidLabeling, NotConnected, UnknownIdentifier
from .homology import smith_normal_form
from .simplexify import CombinatorialMap

MAX_Z2_EDGES = 20


@dataclass
class Presentation:
    generators: tuple
    relators: tuple  # words: tuples of (generator, +1 | -1)
    tree: tuple = ()

    def to_text(self):
        def word(w):
            return " ".join(g if s > 0 else f"{g}^-1" for g, s in w) or "1"

        return " ".join(self.generators) + " | " + " ; ".join(word(w) for w in self.relators)

    def to_json(self):
        return {
            "generators": list(self.generators),
            "relators": [[[g, s] for g, s in w] for w in self.relators],
            "tree": list(self.tree),
        }


def free_reduce(word):
    out = []
    for g, s in word:
        if out and out[-1] == (g, -s):
            out.pop()
        else:
            out.append((g, s))
    return tuple(out)


def spanning_tree(X: SquareComplex, basepoint):
    """BFS tree from ``basepoint`` scanning edges in id order.

    Returns ``(tree_edges, path)``, where ``path[v]`` is the signed edge
    word from the basepoint to ``v`` inside the tree.
    """
    path = {basepoint: ()}
    tree = []
    queue = deque([basepoint])
    while queue:
        u = queue.popleft()
        for name, edge in X.edges.items():
            if edge.tail == u and edge.head not in path:
                w, step = edge.head, (name, 1)
            elif edge.head == u and edge.tail not in path:
                w, step = edge.tail, (name, -1)
            else:
                continue
            path[w] = path[u] + (step,)
            tree.append(name)
            queue.append(w)
    return tree, path


def pi1_presentation(X: SquareComplex, basepoint=None) -> Presentation:
    if basepoint is None:
        basepoint = X.vertices[0]
    if basepoint not in X.vertices:
        raise UnknownIdentifier(f"unknown basepoint {basepoint!r}")
    if len(components(X)) != 1:
        raise NotConnected("pi1 needs a connected complex")
    tree, path = spanning_tree(X, basepoint)
    in_tree = set(tree)
    gens = tuple(e for e in X.edges if e not in in_tree)
    rels = []
    for q, sq in X.squares.items():
        to_corner = path[X.corner(q, 0)]
        back = tuple((g, -s) for g, s in reversed(to_corner))
        word = to_corner + sq.sides + back
        rels.append(free_reduce(tuple((g, s) for g, s in word if g not in in_tree)))
    return Presentation(gens, tuple(rels), tuple(tree))


@dataclass
class Abelianization:
    free_rank: int
    torsion: tuple

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) or "0"


def abelianization(P: Presentation) -> Abelianization:
    col = {g: i for i, g in enumerate(P.generators)}
    matrix = []
    for w in P.relators:
        row = [0] * len(P.generators)
        for g, s in w:
            row[col[g]] += s
        matrix.append(row)
    snf = smith_normal_form(matrix) if matrix and P.generators else None
    rank = snf.rank if snf else 0
    torsion = tuple(d for d in snf.factors if d > 1) if snf else ()
    return Abelianization(len(P.generators) - rank, torsion)


# -- covers -----------------------------------------------------------------

@dataclass
class EdgeLabeling:
    degree: int
    perms: dict  # edge -> tuple image of range(degree)

    def perm(self, e):
        return self.perms.get(e) or tuple(range(self.degree))

    def to_lines(self):
        return [f"label {e} " + " ".join(map(str, p)) for e, p in sorted(self.perms.items())]


def _inverse(p):
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def boundary_permutation(X: SquareComplex, L: EdgeLabeling, q):
    """Fiber permutation obtained by running once around square ``q`` from corner 0."""
    out = []
    for i in range(L.degree):
        p = i
        for e, s in X.squares[q].sides:
            p = L.perm(e)[p] if s > 0 else _inverse(L.perm(e))[p]
        out.append(p)
    return tuple(out)


def check_labeling(X: SquareComplex, L: EdgeLabeling):
    for e, p in L.perms.items():
        if e not in X.edges:
            raise UnknownIdentifier(f"labeling names unknown edge {e!r}")
        if sorted(p) != list(range(L.degree)):
            raise InvalidLabeling(None, f"label of {e!r} is not a permutation of 0..{L.degree - 1}")
    ident = tuple(range(L.degree))
    for q in X.squares:
        if boundary_permutation(X, L, q) != ident:
            raise InvalidLabeling(q)


def finite_cover(X: SquareComplex, L: EdgeLabeling):
    """Degree-d cover of ``X`` and its covering map.

    Cell ``(c, i)`` is named ``c_i``; edge ``(e, i)`` runs from
    ``(tail, i)`` to ``(head, perm_e(i))``.
    """
    check_labeling(X, L)
    d = L.degree

    def name(c, i):
        return f"{c}_{i}"

    verts = [name(v, i) for v in X.vertices for i in range(d)]
    edges = [(name(e, i), name(edge.tail, i), name(edge.head, L.perm(e)[i])) for e, edge in X.edges.items() for i in range(d)]
    squares = []
    for q, sq in X.squares.items():
        for i in range(d):
            p, sides = i, []
            for e, s in sq.sides:
                if s > 0:
                    sides.append((name(e, p), 1))
                    p = L.perm(e)[p]
                else:
                    p = _inverse(L.perm(e))[p]
                    sides.append((name(e, p), -1))
            squares.append((name(q, i), sides))
    cover = validate_square_complex({"vertices": verts, "edges": edges, "squares": squares})
    f = CombinatorialMap(
        cover, X,
        {name(v, i): v for v in X.vertices for i in range(d)},
        {name(e, i): (e, 1) for e in X.edges for i in range(d)},
        {name(q, i): (q, 0, False) for q in X.squares for i in range(d)},
    )
    f.check()
    return cover, f


def pullback_partition(P: VHPartition, f: CombinatorialMap) -> VHPartition:
    return VHPartition({e: P.classes[e2] for e, (e2, _) in f.edges.items()}, 0)


@dataclass
class Z2Cover:
    labels: dict  # edge -> 0 | 1
    labeling: EdgeLabeling
    connected: bool
    vh: object  # VHPartition or the VhContradiction certificate

    @property
    def is_vh(self):
        return isinstance(self.vh, VHPartition)


def enumerate_z2_covers(X: SquareComplex):
    """Every valid Z/2 labeling of ``X`` with the cover's connectivity and VH verdict."""
    names = list(X.edges)
    if len(names) > MAX_Z2_EDGES:
        raise EnumerationTooLarge(f"{len(names)} edges; Z/2 enumeration is capped at {MAX_Z2_EDGES}")
    out = []
    for bits in itertools.product((0, 1), repeat=len(names)):
        L = EdgeLabeling(2, {e: (1, 0) if b else (0, 1) for e, b in zip(names, bits)})
        try:
            cover, _ = finite_cover(X, L)
        except InvalidLabeling:
            continue
        out.append(Z2Cover(dict(zip(names, bits)), L, len(components(cover)) == 1, detect_vh(cover)))
    return out
