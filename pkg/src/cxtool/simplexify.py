"""Triangulation and simplexification of VH square complexes.

Each vertical edge ``e`` is cut at a midpoint ``m:e`` and each square ``q``
gets a centre ``c:q``; a square is cut into two horizontal triangles (a
horizontal side coned to the centre) and four quarter triangles (a half of a
vertical side coned to the centre).  The simplexification then glues, for
each vertical edge ``e`` with side occurrences ``o_1..o_n``, the simplices

    sigma-(e) = (tail(e), m:e, c:o_1, ..., c:o_n)
    sigma+(e) = (m:e, head(e), c:o_1, ..., c:o_n)

identifying every face with at most one occurrence slot with the matching
cell of the triangulation.

Simplex identifiers are ``:``-separated strings (never valid SQC names, so
they cannot clash with input names); their meaning is recorded in the
provenance map.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .complexes import DeltaComplex, SquareComplex, simplex_link, delta_vertex_link
from .curvature import VHPartition, check_simple, check_vh_partition
from .errors import (
    NotLocallyInjective,
    NotSimplexified,
    NotVhPreserving,
    PartitionMismatch,
)


@dataclass(frozen=True, order=True)
class Occurrence:
    square: str
    side: int
    sign: int

    @property
    def tail_corner(self):
        return self.side if self.sign > 0 else (self.side + 1) % 4

    @property
    def head_corner(self):
        return (self.side + 1) % 4 if self.sign > 0 else self.side


def occurrence_lists(X: SquareComplex, P: VHPartition) -> dict:
    """Vertical edge -> its side occurrences, sorted by (square, side)."""
    A = {e: [] for e in X.edges if P.classes[e] == "V"}
    for q, sq in X.squares.items():
        for j, (e, sign) in enumerate(sq.sides):
            if P.classes[e] == "V":
                A[e].append(Occurrence(q, j, sign))
    return A


@dataclass
class Subdivision:
    """Output of :func:`triangulate_vh` and :func:`simplexify`."""

    complex: DeltaComplex
    provenance: dict  # simplex id -> tag tuple
    source: SquareComplex
    partition: VHPartition
    occurrences: dict
    simplexified: bool = False
    by_tag: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.by_tag = {tag: s for s, tag in self.provenance.items()}


# -- simplex names ----------------------------------------------------------

def _v(v):
    return f"v:{v}"


def _mid(e):
    return f"m:{e}"


def _ctr(q):
    return f"c:{q}"


def _half(e, eps):
    return f"h{eps}:{e}"


def _spoke(q, c):
    return f"k:{q}:{c}"


def _mspoke(q, j):
    return f"ms:{q}:{j}"


def triangulate_vh(X: SquareComplex, P: VHPartition) -> Subdivision:
    check_vh_partition(X, P)
    return _build(X, P, attach=False)


def simplexify(X: SquareComplex, P: VHPartition) -> Subdivision:
    check_vh_partition(X, P)
    return _build(X, P, attach=True)


def _build(X, P, attach):
    A = occurrence_lists(X, P)
    levels = [[], [], []]
    facets = {}
    prov = {}

    def add(k, name, fs, tag):
        while len(levels) <= k:
            levels.append([])
        levels[k].append(name)
        if k:
            facets[name] = tuple(fs)
        prov[name] = tag

    for v in X.vertices:
        add(0, _v(v), (), ("VertexStar", v))
    for e in A:
        add(0, _mid(e), (), ("Midpoint", e))
    for q in X.squares:
        add(0, _ctr(q), (), ("Center", q))

    for e, edge in X.edges.items():
        if P.classes[e] == "H":
            add(1, f"hz:{e}", (_v(edge.head), _v(edge.tail)), ("HorizontalEdge", e))
        else:
            add(1, _half(e, "-"), (_mid(e), _v(edge.tail)), ("HalfEdge", e, "-"))
            add(1, _half(e, "+"), (_v(edge.head), _mid(e)), ("HalfEdge", e, "+"))
    for q, sq in X.squares.items():
        for c in range(4):
            add(1, _spoke(q, c), (_ctr(q), _v(X.corner(q, c))), ("CornerSpoke", q, c))
        for j, (e, _) in enumerate(sq.sides):
            if P.classes[e] == "V":
                add(1, _mspoke(q, j), (_ctr(q), _mid(e)), ("MidpointSpoke", q, j))

    for q, sq in X.squares.items():
        for j, (e, sign) in enumerate(sq.sides):
            o = Occurrence(q, j, sign)
            tc, hc = _spoke(q, o.tail_corner), _spoke(q, o.head_corner)
            if P.classes[e] == "H":
                add(2, f"ht:{q}:{j}", (hc, tc, f"hz:{e}"), ("HorizontalTriangle", q, j))
            else:
                add(2, f"q-:{q}:{j}", (_mspoke(q, j), tc, _half(e, "-")), ("QuarterTriangle", q, j, "-"))
                add(2, f"q+:{q}:{j}", (hc, _mspoke(q, j), _half(e, "+")), ("QuarterTriangle", q, j, "+"))

    if attach:
        for e, occs in A.items():
            if len(occs) >= 2:
                _attach_sigmas(X, e, occs, add)

    return Subdivision(DeltaComplex(levels, facets), prov, X, P, A, simplexified=attach)


def sigma_labels(e, eps, occs):
    """Slot labels of sigma-(e) / sigma+(e): 'v', 'e', then occurrence indices."""
    head = ["v", "e"] if eps == "-" else ["e", "v"]
    return head + list(range(len(occs)))


def _face_key(e, eps, labels):
    has_v = "v" in labels
    idx = tuple(x for x in labels if isinstance(x, int))
    return ("SigmaFace", e, eps if has_v else "shared", "e" in labels, idx)


def _face_name(key):
    _, e, eps, has_e, idx = key
    return f"sg:{e}:{eps}{'e' if has_e else ''}:{'.'.join(map(str, idx))}"


def _existing_face(X, e, eps, occs, labels):
    """Triangulation cell for a face with at most one occurrence slot."""
    edge = X.edges[e]
    ov = [x for x in labels if isinstance(x, int)]
    o = occs[ov[0]] if ov else None
    kinds = frozenset(x if isinstance(x, str) else "o" for x in labels)
    if kinds == {"v"}:
        return _v(edge.tail if eps == "-" else edge.head)
    if kinds == {"e"}:
        return _mid(e)
    if kinds == {"o"}:
        return _ctr(o.square)
    if kinds == {"v", "e"}:
        return _half(e, eps)
    if kinds == {"v", "o"}:
        return _spoke(o.square, o.tail_corner if eps == "-" else o.head_corner)
    if kinds == {"e", "o"}:
        return _mspoke(o.square, o.side)
    return f"q{eps}:{o.square}:{o.side}"


def _attach_sigmas(X, e, occs, add):
    made = {}
    for eps in ("-", "+"):
        labels = sigma_labels(e, eps, occs)
        n = len(labels)
        names = {}
        for size in range(1, n + 1):
            for T in itertools.combinations(range(n), size):
                lab = [labels[t] for t in T]
                if sum(isinstance(x, int) for x in lab) <= 1:
                    names[T] = _existing_face(X, e, eps, occs, lab)
                    continue
                key = _face_key(e, eps, lab)
                name = _face_name(key)
                names[T] = name
                if key in made:
                    continue
                made[key] = name
                fs = [names[T[:i] + T[i + 1:]] for i in range(size)]
                add(size - 1, name, fs, key)


# -- combinatorial maps and functoriality -------------------------------------

@dataclass
class CombinatorialMap:
    """Cellular map of square complexes.

    ``edges[e] = (e', sign)``: sign -1 when orientation is reversed.
    ``squares[q] = (q', r, reflect)``: corner ``c`` of ``q`` goes to corner
    ``r + c`` (or ``r - c`` when ``reflect``) of ``q'``, modulo 4.
    """

    source: SquareComplex
    target: SquareComplex
    vertices: dict
    edges: dict
    squares: dict

    @classmethod
    def identity(cls, X):
        return cls(
            X, X,
            {v: v for v in X.vertices},
            {e: (e, 1) for e in X.edges},
            {q: (q, 0, False) for q in X.squares},
        )

    def corner(self, q, c):
        q2, r, refl = self.squares[q]
        return q2, (r - c if refl else r + c) % 4

    def side(self, q, j):
        """Image side index of side ``j`` of ``q`` and whether it is traversed backwards."""
        q2, r, refl = self.squares[q]
        if refl:
            return q2, (r - j - 1) % 4, True
        return q2, (r + j) % 4, False

    def compose(self, g: "CombinatorialMap") -> "CombinatorialMap":
        """``self o g`` (apply ``g`` first)."""
        verts = {v: self.vertices[w] for v, w in g.vertices.items()}
        edges = {}
        for e, (e1, s1) in g.edges.items():
            e2, s2 = self.edges[e1]
            edges[e] = (e2, s1 * s2)
        squares = {}
        for q, (q1, r1, f1) in g.squares.items():
            q2, r2, f2 = self.squares[q1]
            r = (r2 - r1 if f2 else r2 + r1) % 4
            squares[q] = (q2, r, f1 != f2)
        return CombinatorialMap(g.source, self.target, verts, edges, squares)

    def check(self):
        """Raise ValueError unless vertices, edges and square boundaries agree."""
        X, Y = self.source, self.target
        for e, edge in X.edges.items():
            e2, s = self.edges[e]
            t = Y.edges[e2]
            ends = (t.tail, t.head) if s > 0 else (t.head, t.tail)
            if (self.vertices[edge.tail], self.vertices[edge.head]) != ends:
                raise ValueError(f"edge {e!r} is not mapped compatibly with its endpoints")
        for q, sq in X.squares.items():
            for j, (e, sign) in enumerate(sq.sides):
                q2, k, backwards = self.side(q, j)
                e2, s = self.edges[e]
                te, ts = Y.squares[q2].sides[k]
                if te != e2 or ts != s * sign * (-1 if backwards else 1):
                    raise ValueError(f"square {q!r} side {j} does not match its image")

    def is_locally_injective(self):
        X = self.source
        for v in X.vertices:
            ends = set()
            for e, edge in X.edges.items():
                e2, s = self.edges[e]
                for end, at in (("tail", edge.tail), ("head", edge.head)):
                    if at != v:
                        continue
                    img = (e2, end if s > 0 else ("head" if end == "tail" else "tail"))
                    if img in ends:
                        return False
                    ends.add(img)
            corners = set()
            for q in X.squares:
                for c in range(4):
                    if X.corner(q, c) == v:
                        img = self.corner(q, c)
                        if img in corners:
                            return False
                        corners.add(img)
        return True


@dataclass
class SimplicialMap:
    """Simplex -> (image simplex, slot permutation) with ``perm[i]`` the image slot of slot ``i``."""

    source: DeltaComplex
    target: DeltaComplex
    images: dict

    def __call__(self, s):
        return self.images[s]

    def compose(self, g: "SimplicialMap") -> "SimplicialMap":
        out = {}
        for s, (t, p) in g.images.items():
            u, p2 = self.images[t]
            out[s] = (u, tuple(p2[i] for i in p))
        return SimplicialMap(g.source, self.target, out)

    def check(self):
        """Raise ValueError unless the map commutes with every facet map."""
        X, Y = self.source, self.target
        for s, (t, perm) in self.images.items():
            k = X.dim[s]
            if Y.dim[t] != k or sorted(perm) != list(range(k + 1)):
                raise ValueError(f"{s!r} is not mapped onto a simplex of its dimension")
            for i in range(k + 1 if k else 0):
                f_img, f_perm = self.images[X.facets[s][i]]
                want = Y.facets[t][perm[i]]
                pi = perm[i]
                want_perm = tuple(p if p < pi else p - 1 for a, p in enumerate(perm) if a != i)
                if f_img != want or f_perm != want_perm:
                    raise ValueError(f"map does not commute with facet {i} of {s!r}")

    def is_identity(self):
        return all(t == s and list(p) == sorted(p) for s, (t, p) in self.images.items())


def induced_map(f: CombinatorialMap, Xs: Subdivision, Ys: Subdivision) -> SimplicialMap:
    """Simplicial map of simplexifications induced by a VH-preserving map."""
    if Xs.source is not f.source and Xs.source != f.source:
        raise NotSimplexified("source subdivision does not belong to the map's source")
    if Ys.source is not f.target and Ys.source != f.target:
        raise NotSimplexified("target subdivision does not belong to the map's target")
    f.check()
    for e, (e2, _) in f.edges.items():
        if Xs.partition.classes[e] != Ys.partition.classes[e2]:
            raise NotVhPreserving(f"edge {e!r} changes class under the map")
    if not f.is_locally_injective():
        raise NotLocallyInjective("map identifies two edge ends or two corners at some vertex")

    Y = f.target
    occ_index = {e: {(o.square, o.side): i for i, o in enumerate(occs)} for e, occs in Ys.occurrences.items()}

    def image(tag):
        kind = tag[0]
        if kind == "VertexStar":
            return ("VertexStar", f.vertices[tag[1]]), (0,)
        if kind == "Midpoint":
            return ("Midpoint", f.edges[tag[1]][0]), (0,)
        if kind == "Center":
            return ("Center", f.squares[tag[1]][0]), (0,)
        if kind == "HorizontalEdge":
            e2, s = f.edges[tag[1]]
            return ("HorizontalEdge", e2), (0, 1) if s > 0 else (1, 0)
        if kind == "HalfEdge":
            e2, s = f.edges[tag[1]]
            eps = tag[2] if s > 0 else ("+" if tag[2] == "-" else "-")
            return ("HalfEdge", e2, eps), (0, 1) if s > 0 else (1, 0)
        if kind == "CornerSpoke":
            return ("CornerSpoke", *f.corner(tag[1], tag[2])), (0, 1)
        if kind == "MidpointSpoke":
            q2, k, _ = f.side(tag[1], tag[2])
            return ("MidpointSpoke", q2, k), (0, 1)
        if kind == "HorizontalTriangle":
            q, j = tag[1], tag[2]
            q2, k, _ = f.side(q, j)
            s = f.edges[f.source.squares[q].sides[j][0]][1]
            return ("HorizontalTriangle", q2, k), (0, 1, 2) if s > 0 else (1, 0, 2)
        if kind == "QuarterTriangle":
            q, j, eps = tag[1:]
            q2, k, _ = f.side(q, j)
            s = f.edges[f.source.squares[q].sides[j][0]][1]
            if s < 0:
                eps = "+" if eps == "-" else "-"
            return ("QuarterTriangle", q2, k, eps), (0, 1, 2) if s > 0 else (1, 0, 2)
        if kind == "SigmaFace":
            _, e, eps, has_e, idx = tag
            e2, s = f.edges[e]
            src_occs = Xs.occurrences[e]
            labels = []
            if eps != "shared":
                labels.append("v")
            if has_e:
                labels.append("e")
            if eps == "+":
                labels = labels[::-1]
            mapped = [occ_index[e2][f.side(src_occs[i].square, src_occs[i].side)[:2]] for i in idx]
            if len(set(mapped)) < len(mapped):
                raise NotLocallyInjective("occurrences collapse under the map")
            labels += mapped
            eps2 = eps if eps == "shared" or s > 0 else ("+" if eps == "-" else "-")
            head = [x for x in (("v", "e") if eps2 == "-" else ("e", "v")) if x in labels]
            target_labels = head + sorted(x for x in labels if isinstance(x, int))
            perm = tuple(target_labels.index(x) for x in labels)
            new_tag = ("SigmaFace", e2, eps2, has_e, tuple(x for x in target_labels if isinstance(x, int)))
            if len(new_tag[4]) <= 1:
                raise NotLocallyInjective("occurrences collapse under the map")
            return new_tag, perm
        raise NotSimplexified(f"unknown provenance tag {tag!r}")

    images = {}
    for s, tag in Xs.provenance.items():
        tag2, perm = image(tag)
        if tag2 not in Ys.by_tag:
            raise NotSimplexified(f"image {tag2!r} of {s!r} is missing from the target")
        images[s] = (Ys.by_tag[tag2], perm)
    F = SimplicialMap(Xs.complex, Ys.complex, images)
    F.check()
    return F


# -- structural checks on links ------------------------------------------------

@dataclass
class SuspensionCheck:
    passed: bool
    poles: tuple = ()
    equator: tuple = ()
    isomorphism: dict = field(default_factory=dict)
    reason: str = ""

    def __bool__(self):
        return self.passed


def _link_vertex(L, name):
    """Link vertex coming from the ambient edge ``name`` (first matching slot)."""
    for v in L.simplices[0]:
        if v[0] == name:
            return v
    return None


def _expected_suspension(L, poles, equator):
    """Match every link simplex to a (pole, equator subset) of the suspension."""
    roles = {v: ("N" if v == poles[0] else "S") for v in poles}
    roles.update({v: i for i, v in enumerate(equator)})
    if set(L.simplices[0]) != set(roles) or len(roles) != len(poles) + len(equator):
        return None
    iso = {}
    for level in L.simplices:
        for s in level:
            rs = [roles[v] for v in L.vertices(s)]
            pole = [r for r in rs if isinstance(r, str)]
            if len(pole) > 1 or len(set(rs)) != len(rs):
                return None
            key = (pole[0] if pole else None, frozenset(r for r in rs if isinstance(r, int)))
            if key in iso.values():
                return None
            iso[s] = key
    n = len(equator)
    want = 3 * (2**n - 1) + 2
    return iso if len(iso) == want else None


def verify_link_suspension(Xs: Subdivision, e) -> SuspensionCheck:
    """Check that the link at ``m:e`` is the suspension of an (n-1)-simplex."""
    if not Xs.provenance or e not in Xs.occurrences:
        raise NotSimplexified(f"no provenance for vertical edge {e!r}")
    occs = Xs.occurrences[e]
    X = Xs.complex
    L = delta_vertex_link(X, _mid(e))
    if not check_simple(L):
        return SuspensionCheck(False, reason="link is not simple")
    poles = (_link_vertex(L, _half(e, "-")), _link_vertex(L, _half(e, "+")))
    equator = tuple(_link_vertex(L, _mspoke(o.square, o.side)) for o in occs)
    if None in poles or None in equator:
        return SuspensionCheck(False, reason="missing pole or equator vertex")
    iso = _expected_suspension(L, poles, equator)
    if iso is None:
        return SuspensionCheck(False, poles, equator, reason="link is not the suspension of a simplex")
    return SuspensionCheck(True, poles, equator, iso)


@dataclass
class CenterLinkCheck:
    passed: bool
    piece_sizes: tuple = ()
    reason: str = ""

    def __bool__(self):
        return self.passed


def verify_center_link(Xs: Subdivision, q) -> CenterLinkCheck:
    """Link at ``c:q``: two suspensions of simplices plus two pole-to-pole edges.

    The suspension around a vertical side has the side's two corner spokes
    as poles and, as equator, its midpoint spoke together with the sigma
    edges pairing it with the other occurrences on the same edge.
    """
    X = Xs.complex
    P = Xs.partition
    sq = Xs.source.squares[q]
    L = delta_vertex_link(X, _ctr(q))
    if not check_simple(L):
        return CenterLinkCheck(False, reason="link is not simple")

    roles = {}
    pieces = []
    for j, (e, sign) in enumerate(sq.sides):
        if P.classes[e] != "V":
            continue
        occs = Xs.occurrences[e]
        me = next(i for i, o in enumerate(occs) if (o.square, o.side) == (q, j))
        o = occs[me]
        piece = len(pieces)
        roles[(_spoke(q, o.tail_corner), (1,))] = (piece, "N")
        roles[(_spoke(q, o.head_corner), (1,))] = (piece, "S")
        roles[(_mspoke(q, j), (1,))] = (piece, me)
        for other in range(len(occs)):
            if other == me:
                continue
            a, b = sorted((me, other))
            edge = _face_name(("SigmaFace", e, "shared", False, (a, b)))
            roles[(edge, (0 if me == a else 1,))] = (piece, other)
        pieces.append(len(occs))

    if len(pieces) != 2 or set(L.simplices[0]) != set(roles) or len(roles) != sum(pieces) + 4:
        return CenterLinkCheck(False, tuple(pieces), "vertex set does not split into two suspensions")
    bridges = []
    for c in range(4):
        side = sq.sides[c]
        if P.classes[side[0]] == "H":
            bridges.append(frozenset({(_spoke(q, c), (1,)), (_spoke(q, (c + 1) % 4), (1,))}))

    seen = set()
    for level in L.simplices:
        for s in level:
            vs = L.vertices(s)
            rs = [roles[v] for v in vs]
            if len({r[0] for r in rs}) > 1:
                if len(vs) != 2 or frozenset(vs) not in bridges:
                    return CenterLinkCheck(False, tuple(pieces), f"unexpected simplex {s!r} across pieces")
                key = ("bridge", frozenset(vs))
            else:
                poles = [r[1] for r in rs if isinstance(r[1], str)]
                if len(poles) > 1:
                    return CenterLinkCheck(False, tuple(pieces), f"simplex {s!r} joins two poles")
                key = (rs[0][0], poles[0] if poles else None, frozenset(r[1] for r in rs if not isinstance(r[1], str)))
            if key in seen:
                return CenterLinkCheck(False, tuple(pieces), f"simplex {s!r} is duplicated")
            seen.add(key)
    want = sum(3 * (2**n - 1) + 2 for n in pieces) + len(bridges)
    if len(seen) != want or len(bridges) != 2:
        return CenterLinkCheck(False, tuple(pieces), "link is missing simplices")
    return CenterLinkCheck(True, tuple(pieces))
