"""Text formats (SQC, DSC, labelings) and builders for the example complexes.

SQC lines::

    vertex <name>
    edge <name> <tail> <head>
    square <name> <s0> <s1> <s2> <s3>     # side: edge name, "-" prefix = reversed
    vclass <edge> ...                     # vertical edges (optional)

DSC lines::

    simplex 0 <name>
    simplex <k> <name> <f0> ... <fk>      # fi = facet opposite slot i

``#`` starts a comment in every format.
"""
from __future__ import annotations

import random
import re

from .complexes import NAME_RE, DeltaComplex, SquareComplex, validate_square_complex
from .curvature import VHPartition, detect_vh, partition_from_vclass
from .errors import FormatSyntaxError, UnknownName
from .fundamental import EdgeLabeling, finite_cover, pullback_partition


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _name(tok, lineno):
    if not NAME_RE.match(tok):
        raise FormatSyntaxError(lineno, f"bad name {tok!r}")
    return tok


def parse_sqc(text):
    """Parse an SQC document; returns ``(complex, partition or None)``."""
    verts, edges, squares = [], [], []
    vclass = None
    for lineno, tok in _lines(text):
        kw, args = tok[0], tok[1:]
        if kw == "vertex" and len(args) == 1:
            verts.append(_name(args[0], lineno))
        elif kw == "edge" and len(args) == 3:
            edges.append(tuple(_name(a, lineno) for a in args))
        elif kw == "square" and len(args) == 5:
            sides = []
            for s in args[1:]:
                sign = -1 if s.startswith("-") else 1
                sides.append((_name(s.lstrip("+-"), lineno), sign))
            squares.append((_name(args[0], lineno), sides))
        elif kw == "vclass":
            vclass = (vclass or []) + [_name(a, lineno) for a in args]
        else:
            raise FormatSyntaxError(lineno, f"cannot parse {' '.join(tok)!r}")
    X = validate_square_complex({"vertices": verts, "edges": edges, "squares": squares})
    P = partition_from_vclass(X, vclass) if vclass is not None else None
    return X, P


def serialize_sqc(X: SquareComplex, P: VHPartition = None) -> str:
    out = [f"vertex {v}" for v in sorted(X.vertices)]
    out += [f"edge {e.name} {e.tail} {e.head}" for _, e in sorted(X.edges.items())]
    for q, sq in sorted(X.squares.items()):
        sides = " ".join(e if s > 0 else f"-{e}" for e, s in sq.sides)
        out.append(f"square {q} {sides}")
    if P is not None:
        out.append(" ".join(["vclass"] + P.vertical))
    return "\n".join(out) + "\n"


def parse_dsc(text) -> DeltaComplex:
    items = []
    for lineno, tok in _lines(text):
        if tok[0] != "simplex" or len(tok) < 3:
            raise FormatSyntaxError(lineno, f"cannot parse {' '.join(tok)!r}")
        try:
            k = int(tok[1])
        except ValueError:
            raise FormatSyntaxError(lineno, f"bad dimension {tok[1]!r}") from None
        if k < 0:
            raise FormatSyntaxError(lineno, "negative dimension")
        fs = tok[3:]
        if len(fs) != (k + 1 if k else 0):
            raise FormatSyntaxError(lineno, f"{k}-simplex {tok[2]!r} needs {k + 1 if k else 0} facets, got {len(fs)}")
        items.append((k, tok[2], tuple(fs)))
    top = max((k for k, _, _ in items), default=-1)
    levels = [[] for _ in range(top + 1)]
    facets = {}
    for k, name, fs in items:
        levels[k].append(name)
        if k:
            facets[name] = fs
    return DeltaComplex(levels, facets)


def serialize_dsc(X: DeltaComplex) -> str:
    out = []
    for k, level in enumerate(X.simplices):
        for s in sorted(level, key=str):
            if k == 0:
                out.append(f"simplex 0 {s}")
            else:
                out.append(f"simplex {k} {s} " + " ".join(map(str, X.facets[s])))
    return "\n".join(out) + "\n"


def parse_labels(text, degree=None) -> EdgeLabeling:
    perms = {}
    for lineno, tok in _lines(text):
        if tok[0] != "label" or len(tok) < 3:
            raise FormatSyntaxError(lineno, f"cannot parse {' '.join(tok)!r}")
        try:
            img = tuple(int(x) for x in tok[2:])
        except ValueError:
            raise FormatSyntaxError(lineno, "images must be integers") from None
        if degree is None:
            degree = len(img)
        if len(img) != degree:
            raise FormatSyntaxError(lineno, f"expected {degree} images, got {len(img)}")
        perms[_name(tok[1], lineno)] = img
    return EdgeLabeling(degree or 1, perms)


# -- builders -----------------------------------------------------------------

def graph(vertices, edges) -> SquareComplex:
    """A graph as a square complex without squares; ``edges`` are (name, tail, head)."""
    return validate_square_complex({"vertices": vertices, "edges": edges, "squares": ()})


def rose(n, vertex="o", prefix="x") -> SquareComplex:
    return graph([vertex], [(f"{prefix}{i}", vertex, vertex) for i in range(1, n + 1)])


def path_graph(n, prefix="p") -> SquareComplex:
    """Path with ``n`` vertices."""
    vs = [f"{prefix}{i}" for i in range(n)]
    return graph(vs, [(f"{prefix}e{i}", vs[i], vs[i + 1]) for i in range(n - 1)])


def random_graph(rng: random.Random, max_vertices=5, max_edges=7, prefix="g") -> SquareComplex:
    """Connected random multigraph: a random spanning tree plus extra edges (loops allowed)."""
    n = rng.randint(1, max_vertices)
    m = rng.randint(max(n - 1, 1), max(max_edges, n - 1))
    vs = [f"{prefix}v{i}" for i in range(n)]
    edges = []
    for i in range(1, n):
        edges.append((vs[rng.randrange(i)], vs[i]))
    while len(edges) < m:
        edges.append((rng.choice(vs), rng.choice(vs)))
    return graph(vs, [(f"{prefix}e{k}", t, h) for k, (t, h) in enumerate(edges)])


def random_products(count, seed=0, max_vertices=5, max_edges=7):
    """``count`` seeded graph products ``(G1, G2, X, P)``."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        G1 = random_graph(rng, max_vertices, max_edges, "a")
        G2 = random_graph(rng, max_vertices, max_edges, "b")
        X, P = graph_product(G1, G2)
        out.append((G1, G2, X, P))
    return out


def graph_product(G1: SquareComplex, G2: SquareComplex):
    """Product square complex; first-factor edges are vertical."""
    verts = [f"{a}_{b}" for a in G1.vertices for b in G2.vertices]
    edges, classes = [], {}
    for e, ed in G1.edges.items():
        for b in G2.vertices:
            edges.append((f"{e}_{b}", f"{ed.tail}_{b}", f"{ed.head}_{b}"))
            classes[f"{e}_{b}"] = "V"
    for a in G1.vertices:
        for e, ed in G2.edges.items():
            edges.append((f"{a}_{e}", f"{a}_{ed.tail}", f"{a}_{ed.head}"))
            classes[f"{a}_{e}"] = "H"
    squares = []
    for e1, d1 in G1.edges.items():
        for e2, d2 in G2.edges.items():
            sides = [
                (f"{e1}_{d2.tail}", 1),
                (f"{d1.head}_{e2}", 1),
                (f"{e1}_{d2.head}", -1),
                (f"{d1.tail}_{e2}", -1),
            ]
            squares.append((f"{e1}_{e2}", sides))
    X = validate_square_complex({"vertices": verts, "edges": edges, "squares": squares})
    found = detect_vh(X)
    ncomp = found.free_components if isinstance(found, VHPartition) else 0
    return X, VHPartition(classes, ncomp)


_DOCS = {
    "K": """\
vertex v
edge a v v
edge b v v
edge c v v
square q1 b a b -a
square q2 a c -b -c
""",
    "torus": """\
vertex v
edge a v v
edge b v v
square q a b -a -b
""",
    "klein": """\
vertex v
edge a v v
edge b v v
square q b a b -a
vclass b
""",
    "disk": """\
vertex v0
vertex v1
vertex v2
vertex v3
edge a v0 v1
edge b v1 v2
edge c v2 v3
edge d v3 v0
square q a b c d
""",
}

_ROSE_RE = re.compile(r"rose_product[(:]\s*(\d+)\s*,\s*(\d+)\s*\)?\Z")

STANDARD_NAMES = ("K", "torus", "klein", "disk", "rose_product(m,n)", "T2", "Ktilde")


def standard_entry(name):
    """``(complex, partition or None)`` for a named example.

    VH examples without a ``vclass`` line get the detected partition; the
    partition is None exactly when the complex is not VH.
    """
    if name in _DOCS:
        X, P = parse_sqc(_DOCS[name])
        if P is None:
            found = detect_vh(X)
            P = found if isinstance(found, VHPartition) else None
        return X, P
    m = _ROSE_RE.match(name)
    if m:
        return graph_product(rose(int(m.group(1)), prefix="x"), rose(int(m.group(2)), prefix="y"))
    if name == "T2":
        # degree-2 cover of the torus unwrapping the vertical loop a
        T, P = standard_entry("torus")
        cover, f = finite_cover(T, EdgeLabeling(2, {"a": (1, 0)}))
        return cover, pullback_partition(P, f)
    if name == "Ktilde":
        K, _ = standard_entry("K")
        # the connected double cover of K that is VH: only c permutes the sheets
        cover, _ = finite_cover(K, EdgeLabeling(2, {"c": (1, 0)}))
        return cover, detect_vh(cover)
    raise UnknownName(f"unknown corpus complex {name!r}; known: {', '.join(STANDARD_NAMES)}")


def standard_complex(name) -> SquareComplex:
    return standard_entry(name)[0]


def corpus_document(name) -> str:
    X, P = standard_entry(name)
    return serialize_sqc(X, P)


def generic_triangulation(X: SquareComplex) -> DeltaComplex:
    """Cone each square from a centre: four triangles per square, one per side."""
    levels = [[], [], []]
    facets = {}
    levels[0] = [f"v:{v}" for v in X.vertices] + [f"c:{q}" for q in X.squares]
    for e, ed in X.edges.items():
        levels[1].append(f"e:{e}")
        facets[f"e:{e}"] = (f"v:{ed.head}", f"v:{ed.tail}")
    for q, sq in X.squares.items():
        for c in range(4):
            name = f"k:{q}:{c}"
            levels[1].append(name)
            facets[name] = (f"c:{q}", f"v:{X.corner(q, c)}")
        for i, (e, s) in enumerate(sq.sides):
            tail_c, head_c = (i, (i + 1) % 4) if s > 0 else ((i + 1) % 4, i)
            name = f"t:{q}:{i}"
            levels[2].append(name)
            facets[name] = (f"k:{q}:{head_c}", f"k:{q}:{tail_c}", f"e:{e}")
    return DeltaComplex(levels, facets)
