import json
import subprocess
import sys

import pytest

from cxtool.cli import export_dot, run_command
from cxtool.complexes import delta_vertex_link, square_vertex_link
from cxtool.corpus import corpus_document, graph, parse_sqc, standard_complex, standard_entry
from cxtool.simplexify import simplexify

ABAB = "vertex v\nedge a v v\nedge b v v\nsquare q a b a b\n"


def run(capsys, *argv):
    code = run_command(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_npc_on_K(capsys):
    code, out, _ = run(capsys, "npc", "--corpus", "K")
    assert code == 0
    assert out.startswith("npc: PASS")


def test_vh_on_K_fails_with_certificate(capsys):
    code, rep = report(capsys, "vh", "--corpus", "K")
    assert code == 1
    assert rep["schema"] == 1 and rep["check"] == "vh" and rep["verdict"] == "fail"
    assert rep["certificates"][0]["kind"] == "VhContradiction"
    assert set(rep) == {"schema", "check", "input_digest", "verdict", "certificates", "timing_ms", "version", "result"}
    assert rep["input_digest"].startswith("sha256:")


def test_vh_swap(capsys):
    _, rep = report(capsys, "vh", "--corpus", "torus")
    assert rep["result"]["vertical"] == ["a"]
    _, rep = report(capsys, "vh", "--corpus", "torus", "--vclass-swap")
    assert rep["result"]["vertical"] == ["b"]


def test_simplexify_then_sixlarge(tmp_path, capsys):
    out = tmp_path / "torus_star.dsc"
    code, _, _ = run(capsys, "simplexify", "--corpus", "torus", "--out", str(out))
    assert code == 0 and out.exists()
    side = json.loads((tmp_path / "torus_star.dsc.prov.json").read_text())
    assert side["simplexified"] and side["provenance"]["c:q"] == ["Center", "q"]
    code, rep = report(capsys, "sixlarge", "--input", str(out))
    assert code == 0 and rep["result"]["f_vector"] == [3, 10, 9, 2]


def test_fail_reports_reverify(tmp_path, capsys):
    hat = tmp_path / "hat.dsc"
    run(capsys, "simplexify", "--corpus", "torus", "--triangulate-only", "--out", str(hat))
    cases = [
        (["sixlarge", "--input", str(hat)], ["--input", str(hat)]),
        (["vh", "--corpus", "K"], ["--corpus", "K"]),
    ]
    sqc = tmp_path / "abab.sqc"
    sqc.write_text(ABAB)
    cases.append((["npc", "--input", str(sqc)], ["--input", str(sqc)]))
    for argv, source in cases:
        code, rep = report(capsys, *argv)
        assert code == 1 and rep["certificates"]
        path = tmp_path / "rep.json"
        path.write_text(json.dumps(rep))
        code, out, _ = run(capsys, "validate", *source, "--certificate", str(path))
        assert code == 0, out


def test_certificate_for_other_complex_rejected(tmp_path, capsys):
    hat = tmp_path / "hat.dsc"
    star = tmp_path / "star.dsc"
    run(capsys, "simplexify", "--corpus", "torus", "--triangulate-only", "--out", str(hat))
    run(capsys, "simplexify", "--corpus", "torus", "--out", str(star))
    _, rep = report(capsys, "sixlarge", "--input", str(hat))
    path = tmp_path / "rep.json"
    path.write_text(json.dumps(rep))
    code, _, _ = run(capsys, "validate", "--input", str(star), "--certificate", str(path))
    assert code == 1


def test_reports_are_reproducible(capsys):
    for argv in (["vh", "--corpus", "K"], ["sixlarge", "--corpus", "klein", "--via", "hat"], ["homology", "--corpus", "K"]):
        _, a = report(capsys, *argv)
        _, b = report(capsys, *argv)
        a.pop("timing_ms")
        b.pop("timing_ms")
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_group_and_homology_commands(capsys):
    code, out, _ = run(capsys, "pi1", "--corpus", "K")
    assert code == 0 and "a b c | b a b a^-1 ; a c b^-1 c^-1" in out
    _, rep = report(capsys, "abel", "--corpus", "K")
    assert rep["result"] == {"free_rank": 1, "torsion": [2]}
    _, rep = report(capsys, "homology", "--corpus", "klein", "--via", "star")
    assert rep["result"]["betti"][:3] == [1, 1, 0] and rep["result"]["torsion"][1] == [2]
    _, rep = report(capsys, "euler", "--corpus", "rose_product(2,2)")
    assert rep["result"]["euler"] == 1


def test_cover_commands(tmp_path, capsys):
    labels = tmp_path / "c.labels"
    labels.write_text("label c 1 0\n")
    out = tmp_path / "kt.sqc"
    code, rep = report(capsys, "cover", "--corpus", "K", "--labels", str(labels), "--fiber", "2", "--out", str(out))
    assert code == 0 and rep["result"]["vh"] and rep["result"]["components"] == 1
    assert out.read_text() == corpus_document("Ktilde")
    _, rep = report(capsys, "cover", "--corpus", "K")
    assert len(rep["result"]["labelings"]) == 4
    labels.write_text("label a 1 0\n")
    code, _, err = run(capsys, "cover", "--corpus", "K", "--labels", str(labels))
    assert code == 2 and "q2" in err


def test_product_and_corpus(tmp_path, capsys):
    g = tmp_path / "rose2.sqc"
    g.write_text("vertex o\nedge x o o\nedge y o o\n")
    out = tmp_path / "prod.sqc"
    code, _, _ = run(capsys, "product", "--input", str(g), "--input", str(g), "--out", str(out))
    assert code == 0 and out.read_text().count("square") == 4
    code, out_text, _ = run(capsys, "corpus", "K")
    assert code == 0 and out_text == corpus_document("K")
    code, _, _ = run(capsys, "product", "--input", str(g))
    assert code == 2


def test_usage_errors(tmp_path, capsys):
    assert run(capsys, "npc")[0] == 2
    assert run(capsys, "npc", "--corpus", "nowhere")[0] == 2
    assert run(capsys, "npc", "--corpus", "K", "--input", "x.sqc")[0] == 2
    assert run(capsys, "npc", "--input", str(tmp_path / "missing.sqc"))[0] == 2
    bad = tmp_path / "bad.sqc"
    bad.write_text("vertex v\nedge a v\n")
    code, _, err = run(capsys, "npc", "--input", str(bad))
    assert code == 2 and "line 2" in err
    dsc = tmp_path / "x.dsc"
    dsc.write_text("simplex 0 x\n")
    assert run(capsys, "npc", "--input", str(dsc))[0] == 2
    with pytest.raises(SystemExit) as info:
        run_command(["frobnicate"])
    assert info.value.code == 2


def test_clique_cap_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("CXTOOL_CLIQUE_CAP", "0")
    code, rep = report(capsys, "sixlarge", "--corpus", "torus")
    assert code == 2 and rep["verdict"] == "error"


def test_link_command(tmp_path, capsys):
    _, rep = report(capsys, "link", "--corpus", "K")
    assert (rep["result"]["vertices"], rep["result"]["edges"], rep["result"]["girth"]) == (6, 8, 4)
    star = tmp_path / "star.dsc"
    run(capsys, "simplexify", "--corpus", "torus", "--out", str(star))
    dot = tmp_path / "l.dot"
    code, _, _ = run(capsys, "link", "--input", str(star), "--vertex", "m:a", "--dot", "--out", str(dot))
    assert code == 0 and dot.read_text().count(" -- ") == 5


# -- DOT export ---------------------------------------------------------------

def nodes_and_edges(text):
    lines = [l.strip() for l in text.splitlines()[1:-1]]
    return [l for l in lines if " -- " not in l], [l for l in lines if " -- " in l]


def test_dot_of_K_link():
    text = export_dot(square_vertex_link(standard_complex("K"), "v"))
    nodes, edges = nodes_and_edges(text)
    assert len(nodes) == 6 and len(edges) == 8
    assert text == export_dot(square_vertex_link(standard_complex("K"), "v"))


def test_dot_of_torus_link_is_a_four_cycle():
    nodes, edges = nodes_and_edges(export_dot(square_vertex_link(standard_complex("torus"), "v")))
    assert len(nodes) == 4 and len(edges) == 4
    degree = {}
    for e in edges:
        a, b = e.split(" [")[0].split(" -- ")
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
    assert set(degree.values()) == {2}


def test_dot_keeps_parallel_edges():
    Y, _ = parse_sqc(ABAB)
    _, edges = nodes_and_edges(export_dot(square_vertex_link(Y, "v")))
    pairs = [e.split(" [")[0] for e in edges]
    assert len(pairs) == 4 and len(set(pairs)) < 4


def test_dot_of_isolated_vertex():
    G = graph(["u"], [])
    nodes, edges = nodes_and_edges(export_dot(square_vertex_link(G, "u")))
    assert nodes == [] and edges == []


def test_dot_of_delta_link():
    X, P = standard_entry("torus")
    L = delta_vertex_link(simplexify(X, P).complex, "c:q")
    nodes, edges = nodes_and_edges(export_dot(L))
    assert len(nodes) == 8 and len(edges) == 12


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cxtool", "npc", "--corpus", "K"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("npc: PASS")
