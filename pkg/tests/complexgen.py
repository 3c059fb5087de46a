"""Random and hand-built complexes shared by the test modules."""
import itertools
import random

from cxtool.complexes import DeltaComplex, validate_square_complex
from cxtool.corpus import generic_triangulation, random_products, standard_entry
from cxtool.curvature import VHPartition, detect_vh
from cxtool.simplexify import simplexify, triangulate_vh


def full_simplex_boundary(n):
    """Boundary of the n-simplex as an ordered simplicial complex (vertices 0..n)."""
    faces = [c for k in range(1, n + 1) for c in itertools.combinations(range(n + 1), k)]
    return ordered_simplicial(faces)


def ordered_simplicial(faces):
    """Delta complex of a simplicial complex; each face is a sorted vertex tuple."""
    closure = set()
    for f in faces:
        f = tuple(sorted(f))
        for k in range(1, len(f) + 1):
            closure.update(itertools.combinations(f, k))
    top = max(len(f) for f in closure) - 1
    levels = [[] for _ in range(top + 1)]
    facets = {}
    for f in sorted(closure):
        levels[len(f) - 1].append(f)
        if len(f) > 1:
            facets[f] = tuple(f[:i] + f[i + 1:] for i in range(len(f)))
    return DeltaComplex(levels, facets)


def random_simplicial(rng, n_vertices=6, n_faces=5, max_dim=3):
    faces = []
    for _ in range(n_faces):
        k = rng.randint(1, min(max_dim, n_vertices - 1) + 1)
        faces.append(tuple(sorted(rng.sample(range(n_vertices), k))))
    return ordered_simplicial(faces)


def random_rose_complex(rng, n_edges=3, n_squares=2):
    """One vertex, loop edges, squares with random signed boundary words."""
    edges = [(f"e{i}", "o", "o") for i in range(n_edges)]
    squares = []
    for j in range(n_squares):
        sides = [(f"e{rng.randrange(n_edges)}", rng.choice((1, -1))) for _ in range(4)]
        squares.append((f"s{j}", sides))
    return validate_square_complex({"vertices": ["o"], "edges": edges, "squares": squares})


def two_tori():
    doc = {
        "vertices": ["u", "w"],
        "edges": [("a", "u", "u"), ("b", "u", "u"), ("c", "w", "w"), ("d", "w", "w")],
        "squares": [("p", ["a", "b", "-a", "-b"]), ("q", ["c", "d", "-c", "-d"])],
    }
    return validate_square_complex(doc)


def corpus_vh():
    """Every VH complex of the named corpus with its partition."""
    out = {}
    for name in ("torus", "klein", "disk", "rose_product(2,2)", "rose_product(2,1)", "T2", "Ktilde"):
        X, P = standard_entry(name)
        if P is None:
            P = detect_vh(X)
        assert isinstance(P, VHPartition)
        out[name] = (X, P)
    return out


def generated_delta_complexes(seed=5):
    """A mixed bag of validated Delta complexes, including non-simplicial ones."""
    rng = random.Random(seed)
    out = [full_simplex_boundary(3), full_simplex_boundary(4)]
    out += [random_simplicial(rng) for _ in range(10)]
    for X, P in corpus_vh().values():
        out += [simplexify(X, P).complex, triangulate_vh(X, P).complex, generic_triangulation(X)]
    K, _ = standard_entry("K")
    out.append(generic_triangulation(K))
    for _, _, X, P in random_products(6, seed=seed, max_vertices=3, max_edges=4):
        out.append(simplexify(X, P).complex)
    for _ in range(5):
        out.append(generic_triangulation(random_rose_complex(rng)))
    return out
