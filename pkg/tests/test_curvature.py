import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complexgen import corpus_vh, full_simplex_boundary, ordered_simplicial, random_rose_complex
from cxtool.complexes import DeltaComplex, LinkGraph, delta_vertex_link, square_vertex_link, validate_square_complex
from cxtool.corpus import random_products, standard_entry
from cxtool.curvature import (
    CHORDLESS_CYCLE,
    MISSING_CLIQUE,
    NOT_SIMPLE,
    SHORT_LINK_CYCLE,
    VH_CONTRADICTION,
    Certificate,
    VHPartition,
    check_flag,
    check_locally_6_large,
    check_npc,
    check_simple,
    check_vh_partition,
    chordless_cycle_search,
    detect_vh,
    has_double_edges,
    link_girth,
    maximal_cliques,
    partition_from_vclass,
    short_cycle_search,
    skeleton,
    verify_certificate,
)
from cxtool.errors import CliqueBudgetExceeded, PartitionMismatch
from cxtool.simplexify import simplexify, triangulate_vh


def one_square(word):
    edges = sorted({s.lstrip("-") for s in word})
    return validate_square_complex({"vertices": ["v"], "edges": [(e, "v", "v") for e in edges], "squares": [("q", word)]})


def graph_complex(n, edges):
    """1-dimensional Delta complex with vertices 0..n-1."""
    return DeltaComplex([list(range(n)), [f"e{a}_{b}" for a, b in edges]], {f"e{a}_{b}": (b, a) for a, b in edges})


# -- short link cycles and NPC ------------------------------------------------

def brute_girth_le_3(L: LinkGraph):
    """Embedded cycles of length 1..3 by exhaustive search over vertex and edge choices."""
    between = {}
    for c, (a, b) in L.edges.items():
        between.setdefault((a, b), []).append(c)
        if a != b:
            between.setdefault((b, a), []).append(c)
    for n in (1, 2, 3):
        for vs in itertools.permutations(L.vertices, n):
            pairs = [(vs[i], vs[(i + 1) % n]) for i in range(n)]
            for cs in itertools.product(*(between.get(p, []) for p in pairs)):
                if len(set(cs)) == n:
                    return n
    return None


def test_torus_link_has_no_short_cycle():
    assert short_cycle_search(square_vertex_link(standard_entry("torus")[0], "v")) is None


def test_doubled_corner_gives_parallel_pair():
    X = one_square(["a", "b", "a", "b"])
    cyc = short_cycle_search(square_vertex_link(X, "v"))
    assert cyc["length"] == 2
    v = check_npc(X)
    assert not v and v.certificates[0].kind == SHORT_LINK_CYCLE and v.certificates[0].data["length"] == 2


def test_disk_corner_link_is_acyclic():
    X = standard_entry("disk")[0]
    assert short_cycle_search(square_vertex_link(X, "v0")) is None
    assert link_girth(square_vertex_link(X, "v0")) is None


def test_npc_examples():
    assert check_npc(standard_entry("K")[0])
    assert check_npc(standard_entry("torus")[0])


def test_K_link_girth_is_four():
    assert link_girth(square_vertex_link(standard_entry("K")[0], "v")) == 4


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 3))
def test_npc_matches_exhaustive_search(seed, n_edges, n_squares):
    X = random_rose_complex(random.Random(seed), n_edges, n_squares)
    L = square_vertex_link(X, "o")
    assert len(L.vertices) <= 12
    want = brute_girth_le_3(L)
    got = short_cycle_search(L)
    assert (got is None) == (want is None)
    if got is not None:
        assert got["length"] == want
        cert = Certificate(SHORT_LINK_CYCLE, "o", got)
        assert verify_certificate(cert, X)
    g = link_girth(L)
    assert (g is None or g >= 4) == (want is None)
    if want is not None:
        assert g == want


def test_npc_equivalent_to_no_double_edges_on_vh_corpus():
    for name, (X, P) in corpus_vh().items():
        npc = bool(check_npc(X))
        doubles = any(has_double_edges(square_vertex_link(X, v)) for v in X.vertices)
        assert npc == (not doubles), name
    X = one_square(["a", "b", "a", "b"])
    assert isinstance(detect_vh(X), VHPartition)
    assert not check_npc(X) and has_double_edges(square_vertex_link(X, "v"))


# -- VH detection ---------------------------------------------------------------

def test_torus_partition():
    P = detect_vh(standard_entry("torus")[0])
    assert P.classes == {"a": "V", "b": "H"}
    assert P.free_components == 1
    assert P.swapped().classes == {"a": "H", "b": "V"}


def test_K_is_not_vh():
    X = standard_entry("K")[0]
    cert = detect_vh(X)
    assert isinstance(cert, Certificate) and cert.kind == VH_CONTRADICTION
    steps = cert.data["steps"]
    assert len(steps) == 2
    assert {s["square"] for s in steps} == {"q1", "q2"}
    assert sorted(s["kind"] for s in steps) == ["differ", "equal"]
    assert verify_certificate(cert, X)


def test_rose_product_partition():
    X, P = standard_entry("rose_product(2,2)")
    assert P.vertical == ["x1_o", "x2_o"] and P.horizontal == ["o_y1", "o_y2"]
    # the canonical tie-break makes the least edge id vertical, here a second-factor edge
    found = detect_vh(X)
    assert found.classes == P.swapped().classes


def test_vclass_partition_checked():
    X = standard_entry("torus")[0]
    with pytest.raises(PartitionMismatch):
        partition_from_vclass(X, ["a", "b"])
    with pytest.raises(PartitionMismatch):
        partition_from_vclass(X, ["zz"])
    with pytest.raises(PartitionMismatch):
        check_vh_partition(X, VHPartition({"a": "V"}))


def vh_cases():
    cases = list(corpus_vh().values())
    cases += [(X, P) for _, _, X, P in random_products(10, seed=3)]
    return cases


def test_vh_links_are_bipartite_by_class():
    for X, _ in vh_cases():
        P = detect_vh(X)
        for v in X.vertices:
            L = square_vertex_link(X, v)
            for a, b in L.edges.values():
                assert P.classes[a[0]] != P.classes[b[0]]
        # opposite sides agree, adjacent sides differ
        for sq in X.squares.values():
            cls = [P.classes[e] for e, _ in sq.sides]
            assert cls[0] == cls[2] != cls[1] == cls[3]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_vh_failures_carry_odd_cycles(seed):
    X = random_rose_complex(random.Random(seed), 3, 3)
    found = detect_vh(X)
    if isinstance(found, VHPartition):
        check_vh_partition(X, found)
    else:
        steps = found.data["steps"]
        assert sum(s["kind"] == "differ" for s in steps) % 2 == 1
        assert verify_certificate(found, X)


# -- simplicity, flagness, chordless cycles --------------------------------------

def test_star_center_link_is_simple():
    X, P = standard_entry("torus")
    L = delta_vertex_link(simplexify(X, P).complex, "c:q")
    assert check_simple(L)
    assert len(L.simplices[0]) == 8 and len(L.simplices[1]) == 12


def test_loop_is_not_simple():
    L = DeltaComplex([["x"], ["e"]], {"e": ("x", "x")})
    v = check_simple(L)
    assert not v and v.certificates[0].kind == NOT_SIMPLE
    assert v.certificates[0].data["cells"] == ["e"]


def test_parallel_edges_are_not_simple():
    L = DeltaComplex([["x", "y"], ["e", "f"]], {"e": ("y", "x"), "f": ("x", "y")})
    v = check_simple(L)
    assert not v and v.certificates[0].data["cells"] == ["e", "f"]


def test_hollow_and_filled_triangle():
    hollow = ordered_simplicial([(0, 1), (1, 2), (0, 2)])
    v = check_flag(hollow)
    assert not v and v.certificates[0].kind == MISSING_CLIQUE
    assert sorted(v.certificates[0].data["clique"]) == [(0,), (1,), (2,)]
    assert check_flag(ordered_simplicial([(0, 1, 2)]))


def test_vertex_star_link_is_flag():
    X, P = standard_entry("torus")
    assert check_flag(delta_vertex_link(simplexify(X, P).complex, "v:v"))


def test_missing_clique_is_minimal():
    # the 4-clique on 0..3 with all triangles but one filled
    L = ordered_simplicial([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 3)])
    v = check_flag(L)
    assert not v
    assert sorted(v.certificates[0].data["clique"]) == [(1,), (2,), (3,)]


def test_clique_budget():
    L = full_simplex_boundary(4)
    with pytest.raises(CliqueBudgetExceeded):
        check_flag(L, clique_cap=0)
    with pytest.raises(CliqueBudgetExceeded):
        list(maximal_cliques(skeleton(L), budget=0))


def test_clique_budget_from_environment(monkeypatch):
    monkeypatch.setenv("CXTOOL_CLIQUE_CAP", "0")
    with pytest.raises(CliqueBudgetExceeded):
        check_flag(full_simplex_boundary(3))


def cycle_graph(n):
    return {i: {(i - 1) % n, (i + 1) % n} for i in range(n)}


def test_chordless_examples():
    assert chordless_cycle_search(cycle_graph(4)) == [[0, 1, 2, 3]]
    g = cycle_graph(4)
    g[0].add(2)
    g[2].add(0)
    assert chordless_cycle_search(g) == []
    wheel = cycle_graph(5)
    wheel["hub"] = set(range(5))
    for i in range(5):
        wheel[i].add("hub")
    wheel = {str(k): {str(x) for x in vs} for k, vs in wheel.items()}
    assert chordless_cycle_search(wheel) == [["0", "1", "2", "3", "4"]]


def brute_chordless(adj, lengths=(4, 5)):
    verts = sorted(adj)
    out = set()
    for n in lengths:
        for sub in itertools.combinations(verts, n):
            for perm in itertools.permutations(sub[1:]):
                cyc = (sub[0],) + perm
                if cyc[1] > cyc[-1]:
                    continue
                ok = True
                for i, j in itertools.combinations(range(n), 2):
                    consecutive = j == i + 1 or (i == 0 and j == n - 1)
                    if (cyc[j] in adj[cyc[i]]) != consecutive:
                        ok = False
                        break
                if ok:
                    out.add(cyc)
    return sorted(out)


def random_graph(rng, n, p):
    adj = {i: set() for i in range(n)}
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < p:
            adj[i].add(j)
            adj[j].add(i)
    return adj


def test_chordless_matches_brute_force():
    rng = random.Random(11)
    for _ in range(50):
        adj = random_graph(rng, rng.randint(3, 10), rng.choice((0.2, 0.35, 0.5)))
        got = chordless_cycle_search(adj)
        assert [tuple(c) for c in got] == brute_chordless(adj)


def test_chordless_on_delta_skeleton():
    L = graph_complex(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    assert chordless_cycle_search(L) == [[0, 1, 2, 3, 4]]
    assert chordless_cycle_search(L, lengths=(4,)) == []


# -- local 6-largeness ------------------------------------------------------------

def test_torus_star_is_6_large():
    X, P = standard_entry("torus")
    assert check_locally_6_large(simplexify(X, P).complex)
    assert check_locally_6_large(simplexify(X, P).complex, all_simplices=True)


def test_torus_hat_has_chordless_square_at_midpoint():
    X, P = standard_entry("torus")
    Xh = triangulate_vh(X, P).complex
    v = check_locally_6_large(Xh)
    assert not v
    kinds = {(c.kind, c.vertex) for c in v.certificates}
    assert (CHORDLESS_CYCLE, "m:a") in kinds
    for c in v.certificates:
        assert verify_certificate(c, Xh)


def test_boundary_tetrahedron_not_flag():
    X = full_simplex_boundary(3)
    v = check_locally_6_large(X)
    assert not v
    assert {c.kind for c in v.certificates} == {MISSING_CLIQUE}
    assert [c.vertex for c in v.certificates] == sorted(X.simplices[0])


def test_certificates_survive_json_round_trip():
    X, P = standard_entry("torus")
    Xh = triangulate_vh(X, P).complex
    for c in check_locally_6_large(Xh).certificates:
        back = Certificate.from_json(json.loads(json.dumps(c.to_json())))
        assert verify_certificate(back, Xh)
    K = standard_entry("K")[0]
    back = Certificate.from_json(json.loads(json.dumps(detect_vh(K).to_json())))
    assert verify_certificate(back, K)


def test_tampered_certificates_rejected():
    X, P = standard_entry("torus")
    Xh = triangulate_vh(X, P).complex
    Xs = simplexify(X, P).complex
    cert = [c for c in check_locally_6_large(Xh).certificates if c.kind == CHORDLESS_CYCLE][0]
    assert not verify_certificate(cert, Xs)  # the sigma edge is a chord in X*
    bad = Certificate(cert.kind, cert.vertex, {"cycle": cert.data["cycle"][:3]})
    assert not verify_certificate(bad, Xh)
    K = standard_entry("K")[0]
    vh = detect_vh(K)
    assert not verify_certificate(vh, X)
    assert not verify_certificate(Certificate(SHORT_LINK_CYCLE, "v", {"edges": [("q", 0)], "vertices": [("a", "tail")]}), X)
    assert not verify_certificate(Certificate(MISSING_CLIQUE, "v:v", {"clique": [("nope", (0,))]}), Xs)


def test_flag_monotone_under_filling_cliques():
    rng = random.Random(4)
    for _ in range(30):
        n = rng.randint(4, 7)
        faces = [tuple(sorted(rng.sample(range(n), rng.randint(2, 3)))) for _ in range(rng.randint(4, 9))]
        L = ordered_simplicial(faces)
        before = check_flag(L)
        adj = skeleton(L)
        for C in maximal_cliques(adj):
            L2 = ordered_simplicial(faces + [tuple(v[0] for v in C)])
            assert skeleton(L2) == {u: adj[u] for u in L2.simplices[0]}
            after = check_flag(L2)
            if before:
                assert after
            assert len(after.certificates) <= len(before.certificates)
