"""Command-line driver: ``cxtool <command> --input FILE | --corpus NAME``.

Exit status 0 means pass (or plain success), 1 a failed check with
certificates, 2 a usage or input error.  Reports are text by default and
JSON with ``--json``.  Commands that build something (``simplexify``,
``cover --labels``, ``product``, ``corpus``, ``link --dot``) write it to
``--out`` or, failing that, to standard output, with the report on
standard error; every other command writes its report to ``--out`` when
given.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .complexes import (
    LinkGraph,
    SquareComplex,
    components,
    delta_vertex_link,
    euler_characteristic,
    square_vertex_link,
)
from .corpus import (
    corpus_document,
    generic_triangulation,
    graph_product,
    parse_dsc,
    parse_labels,
    parse_sqc,
    serialize_dsc,
    serialize_sqc,
)
from .curvature import (
    Certificate,
    VHPartition,
    check_locally_6_large,
    check_npc,
    check_vh_partition,
    detect_vh,
    link_girth,
    verify_certificate,
)
from .errors import CliqueBudgetExceeded, ComplexError, EnumerationTooLarge
from .fundamental import abelianization, enumerate_z2_covers, finite_cover, pi1_presentation, pullback_partition
from .homology import homology_groups
from .simplexify import simplexify, triangulate_vh

SCHEMA = 1
COMMANDS = (
    "validate", "npc", "vh", "link", "simplexify", "sixlarge", "homology",
    "euler", "pi1", "abel", "cover", "product", "corpus",
)


class UsageError(Exception):
    pass


@dataclass
class Report:
    check: str
    input_digest: str
    verdict: str  # pass | fail | error
    certificates: list = field(default_factory=list)
    timing_ms: float = 0.0
    result: dict = field(default_factory=dict)
    lines: list = field(default_factory=list)  # human-readable body
    version: str = __version__

    def to_json(self):
        return {
            "schema": SCHEMA,
            "check": self.check,
            "input_digest": self.input_digest,
            "verdict": self.verdict,
            "certificates": [c.to_json() for c in self.certificates],
            "timing_ms": self.timing_ms,
            "version": self.version,
            "result": self.result,
        }

    def to_text(self):
        head = f"{self.check}: {self.verdict.upper()}"
        body = list(self.lines)
        for c in self.certificates:
            body.append("certificate " + json.dumps(c.to_json(), sort_keys=True))
        return "\n".join([head] + body) + "\n"


# -- input --------------------------------------------------------------------

@dataclass
class Input:
    text: str
    digest: str
    complex: object  # SquareComplex | DeltaComplex
    partition: VHPartition = None

    @property
    def is_square(self):
        return isinstance(self.complex, SquareComplex)


def _is_dsc(text):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].split()
        if line:
            return line[0] == "simplex"
    return False


def load_text(text) -> Input:
    digest = "sha256:" + hashlib.sha256(text.encode()).hexdigest()
    if _is_dsc(text):
        return Input(text, digest, parse_dsc(text))
    X, P = parse_sqc(text)
    return Input(text, digest, X, P)


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_input(args) -> Input:
    if args.corpus and args.input:
        raise UsageError("give either --input or --corpus, not both")
    if args.corpus:
        return load_text(corpus_document(args.corpus))
    if not args.input:
        raise UsageError("an input is required (--input FILE or --corpus NAME)")
    if len(args.input) > 1:
        raise UsageError(f"{args.command} takes a single --input")
    return load_text(_read(args.input[0]))


def need_square(inp: Input):
    if not inp.is_square:
        raise UsageError("this command needs a square complex (SQC) input")
    return inp.complex


def vh_partition(inp: Input, swap=False):
    """Partition from the document's vclass line, else detected; None plus certificate if not VH."""
    X = need_square(inp)
    if inp.partition is not None:
        P = inp.partition
    else:
        found = detect_vh(X)
        if not isinstance(found, VHPartition):
            return None, found
        P = found
    return (P.swapped() if swap else P), None


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# -- DOT ----------------------------------------------------------------------

def _label(x):
    if isinstance(x, tuple):
        if len(x) == 2 and isinstance(x[1], tuple):  # link occurrence (simplex, slots)
            return f"{x[0]}@{','.join(map(str, x[1]))}"
        return ":".join(map(str, x))
    return str(x)


def _quote(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(L, out=None) -> str:
    """DOT text for a link; parallel edges and loops are kept, order is stable."""
    if isinstance(L, LinkGraph):
        nodes = sorted(_label(v) for v in L.vertices)
        edges = sorted((_label(a), _label(b), _label(c)) for c, (a, b) in L.edges.items())
    else:
        nodes = sorted(_label(v) for v in L.simplices[0]) if L.simplices else []
        edges = []
        for e in L.simplices[1] if L.top_dimension >= 1 else ():
            a, b = L.vertices(e)
            edges.append((_label(a), _label(b), _label(e)))
        edges.sort()
    lines = [f"graph {_quote('link ' + str(L.base))} {{"]
    lines += [f"  {_quote(n)};" for n in nodes]
    lines += [f"  {_quote(a)} -- {_quote(b)} [label={_quote(c)}];" for a, b, c in edges]
    lines.append("}")
    text = "\n".join(lines) + "\n"
    if out is not None:
        _write(out, text)
    return text


# -- commands -----------------------------------------------------------------
# Each returns (verdict, certificates, result dict, text lines).

def _summary(X):
    return {
        "kind": "square" if isinstance(X, SquareComplex) else "delta",
        "f_vector": list(X.f_vector()),
        "euler": euler_characteristic(X),
        "components": len(components(X)),
    }


def _load_certificates(path):
    obj = json.loads(_read(path))
    if isinstance(obj, dict) and "certificates" in obj:
        obj = obj["certificates"]
    if isinstance(obj, dict):
        obj = [obj]
    return [Certificate.from_json(c) for c in obj]


def cmd_validate(args, inp):
    res = _summary(inp.complex)
    lines = [f"f-vector {tuple(res['f_vector'])}, euler {res['euler']}, components {res['components']}"]
    if not args.certificate:
        return "pass", [], res, lines
    certs = _load_certificates(args.certificate)
    if not certs:
        raise UsageError("certificate file holds no certificates")
    ok = []
    for c in certs:
        try:
            ok.append(bool(verify_certificate(c, inp.complex)))
        except (KeyError, TypeError, ValueError):  # malformed certificate data
            ok.append(False)
    res["certificates_verified"] = ok
    lines.append(f"{sum(ok)} of {len(ok)} certificates verified")
    return ("pass" if all(ok) else "fail"), [c for c, good in zip(certs, ok) if not good], res, lines


def cmd_npc(args, inp):
    X = need_square(inp)
    v = check_npc(X)
    girths = {u: link_girth(square_vertex_link(X, u)) for u in X.vertices}
    res = {"link_girth": girths}
    lines = [f"link girth at {u}: {g if g is not None else 'inf'}" for u, g in girths.items()]
    return ("pass" if v else "fail"), v.certificates, res, lines


def cmd_vh(args, inp):
    X = need_square(inp)
    if inp.partition is not None:
        check_vh_partition(X, inp.partition)
    P, cert = vh_partition(inp, args.vclass_swap)
    if cert is not None:
        return "fail", [cert], {}, ["not a VH complex"]
    res = {"vertical": P.vertical, "horizontal": P.horizontal, "free_components": P.free_components}
    lines = [f"vertical: {' '.join(P.vertical)}", f"horizontal: {' '.join(P.horizontal)}",
             f"free components: {P.free_components}"]
    return "pass", [], res, lines


def cmd_link(args, inp):
    X = inp.complex
    if inp.is_square:
        v = args.vertex or X.vertices[0]
        L = square_vertex_link(X, v)
        nv, ne = len(L.vertices), len(L.edges)
        res = {"vertex": v, "vertices": nv, "edges": ne, "girth": link_girth(L)}
    else:
        v = args.vertex or sorted(X.simplices[0])[0]
        L = delta_vertex_link(X, v)
        res = {"vertex": v, "f_vector": list(L.f_vector())}
        nv = len(L.simplices[0]) if L.simplices else 0
        ne = len(L.simplices[1]) if L.top_dimension >= 1 else 0
        res.update(vertices=nv, edges=ne)
    if args.dot:
        _write(args.out, export_dot(L))
    lines = [f"link of {v}: {nv} vertices, {ne} edges" + (f", girth {res['girth']}" if "girth" in res else "")]
    return "pass", [], res, lines


def cmd_simplexify(args, inp):
    P, cert = vh_partition(inp, args.vclass_swap)
    if cert is not None:
        return "fail", [cert], {}, ["not a VH complex; nothing to subdivide"]
    S = (triangulate_vh if args.triangulate_only else simplexify)(inp.complex, P)
    _write(args.out, serialize_dsc(S.complex))
    if args.out and args.out != "-":
        sidecar = {
            "schema": SCHEMA,
            "source_digest": inp.digest,
            "simplexified": S.simplexified,
            "vertical": P.vertical,
            "provenance": {str(s): list(tag) for s, tag in sorted(S.provenance.items(), key=lambda kv: str(kv[0]))},
        }
        _write(args.out + ".prov.json", json.dumps(sidecar, sort_keys=True, indent=1) + "\n")
    res = _summary(S.complex)
    return "pass", [], res, [f"f-vector {tuple(res['f_vector'])}, euler {res['euler']}"]


def _delta_of(args, inp):
    """DSC inputs as they are; square complexes through X* (VH) or the cone triangulation."""
    if not inp.is_square:
        return inp.complex
    via = getattr(args, "via", None) or "star"
    if via == "generic":
        return generic_triangulation(inp.complex)
    P, cert = vh_partition(inp, args.vclass_swap)
    if cert is not None:
        raise UsageError("square complex is not VH; use --via generic")
    return (simplexify if via == "star" else triangulate_vh)(inp.complex, P).complex


def cmd_sixlarge(args, inp):
    X = _delta_of(args, inp)
    v = check_locally_6_large(X, all_simplices=args.all_simplices)
    lines = [f"checked {len(X.simplices[0])} vertex links" + (" and all higher links" if args.all_simplices else "")]
    return ("pass" if v else "fail"), v.certificates, {"f_vector": list(X.f_vector())}, lines


def cmd_homology(args, inp):
    if inp.is_square and not args.via:
        args.via = "generic"
    X = _delta_of(args, inp)
    H = homology_groups(X)
    lines = []
    for k, b in enumerate(H.betti):
        tors = "".join(f" + Z/{d}" for d in H.torsion[k])
        lines.append(f"H_{k} = " + (" + ".join(["Z"] * b) or "0") + tors)
    return "pass", [], H.to_json(), lines


def cmd_euler(args, inp):
    chi = euler_characteristic(inp.complex)
    return "pass", [], {"euler": chi, "f_vector": list(inp.complex.f_vector())}, [f"euler characteristic {chi}"]


def cmd_pi1(args, inp):
    P = pi1_presentation(need_square(inp), args.basepoint)
    return "pass", [], P.to_json(), [P.to_text()]


def cmd_abel(args, inp):
    A = abelianization(pi1_presentation(need_square(inp), args.basepoint))
    return "pass", [], {"free_rank": A.free_rank, "torsion": list(A.torsion)}, [str(A)]


def cmd_cover(args, inp):
    X = need_square(inp)
    if not args.labels:
        if args.fiber not in (None, 2):
            raise UsageError("enumeration covers Z/2 labelings only; pass --labels for other fibers")
        covers = enumerate_z2_covers(X)
        res = {"labelings": [
            {"labels": c.labels, "connected": c.connected, "vh": c.is_vh} for c in covers
        ]}
        lines = [
            " ".join(f"{e}={b}" for e, b in c.labels.items())
            + f"  connected={'yes' if c.connected else 'no'} vh={'yes' if c.is_vh else 'no'}"
            for c in covers
        ]
        return "pass", [], res, lines
    L = parse_labels(_read(args.labels), args.fiber)
    cover, f = finite_cover(X, L)
    found = detect_vh(cover)
    P = None
    if inp.partition is not None:
        P = pullback_partition(inp.partition, f)
    elif isinstance(found, VHPartition):
        P = found
    _write(args.out, serialize_sqc(cover, P))
    res = _summary(cover)
    res["vh"] = isinstance(found, VHPartition)
    lines = [f"degree {L.degree} cover: f-vector {tuple(res['f_vector'])}, euler {res['euler']}, "
             f"components {res['components']}, vh {'yes' if res['vh'] else 'no'}"]
    return "pass", [], res, lines


def cmd_product(args, inp):
    if not args.input or len(args.input) != 2:
        raise UsageError("product needs exactly two --input graph files")
    G1, _ = parse_sqc(_read(args.input[0]))
    G2, _ = parse_sqc(_read(args.input[1]))
    X, P = graph_product(G1, G2)
    _write(args.out, serialize_sqc(X, P))
    res = _summary(X)
    return "pass", [], res, [f"f-vector {tuple(res['f_vector'])}, euler {res['euler']}"]


def cmd_corpus(args, inp):
    name = args.name or args.corpus
    if not name:
        raise UsageError("corpus needs a name")
    doc = corpus_document(name)
    _write(args.out, doc)
    return "pass", [], {"name": name}, []


HANDLERS = {
    "validate": cmd_validate, "npc": cmd_npc, "vh": cmd_vh, "link": cmd_link,
    "simplexify": cmd_simplexify, "sixlarge": cmd_sixlarge, "homology": cmd_homology,
    "euler": cmd_euler, "pi1": cmd_pi1, "abel": cmd_abel, "cover": cmd_cover,
    "product": cmd_product, "corpus": cmd_corpus,
}


def _produces(args):
    """True when --out receives a built object rather than the report."""
    if args.command == "link":
        return args.dot
    if args.command == "cover":
        return bool(args.labels)
    return args.command in ("simplexify", "product", "corpus")


SUMMARIES = {
    "validate": "validate a complex, or re-verify certificates",
    "npc": "link condition for square complexes",
    "vh": "find or check a vertical/horizontal partition",
    "link": "vertex link summary or DOT export",
    "simplexify": "build the simplexification or the VH triangulation",
    "sixlarge": "local 6-largeness of every vertex link",
    "homology": "integral homology",
    "euler": "Euler characteristic and f-vector",
    "pi1": "presentation of the fundamental group",
    "abel": "abelianization of the fundamental group",
    "cover": "build a finite cover, or enumerate Z/2 covers",
    "product": "product of two graphs",
    "corpus": "print a named example",
}


def build_parser():
    ap = argparse.ArgumentParser(prog="cxtool", description="Checks for square complexes and their simplexifications.")
    ap.add_argument("--version", action="version", version=f"cxtool {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        p = sub.add_parser(name, help=SUMMARIES[name])
        p.add_argument("--input", action="append", metavar="FILE", help="SQC or DSC file ('-' for stdin)")
        p.add_argument("--corpus", metavar="NAME", help="named example complex")
        p.add_argument("--json", action="store_true", help="JSON report")
        p.add_argument("--out", metavar="FILE")
        p.add_argument("--vclass-swap", action="store_true", help="exchange vertical and horizontal")
        p.add_argument("--fiber", type=int, metavar="D")
        p.add_argument("--labels", metavar="FILE")
        if name == "validate":
            p.add_argument("--certificate", metavar="FILE", help="re-verify certificates from a report")
        if name == "link":
            p.add_argument("--vertex")
            p.add_argument("--dot", action="store_true", help="write the link as DOT")
        if name == "simplexify":
            p.add_argument("--triangulate-only", action="store_true", help="stop at the VH triangulation")
        if name in ("sixlarge", "homology"):
            p.add_argument("--via", choices=("star", "hat", "generic"),
                           help="subdivision used for square inputs")
        if name == "sixlarge":
            p.add_argument("--all-simplices", action="store_true")
        if name in ("pi1", "abel"):
            p.add_argument("--basepoint")
        if name == "corpus":
            p.add_argument("name", nargs="?")
    return ap


def run_command(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    digest = ""
    try:
        inp = None
        if args.command not in ("product", "corpus"):
            inp = load_input(args)
            digest = inp.digest
        elif args.command == "product":
            digest = "sha256:" + hashlib.sha256(
                "\0".join(_read(p) for p in args.input or ()).encode()).hexdigest()
        verdict, certs, result, lines = HANDLERS[args.command](args, inp)
    except (ComplexError, UsageError, OSError, EnumerationTooLarge, json.JSONDecodeError) as exc:
        print(f"cxtool {args.command}: {exc}", file=sys.stderr)
        return 2
    except CliqueBudgetExceeded as exc:
        verdict, certs, result, lines = "error", [], {"error": str(exc)}, [str(exc)]
    report = Report(args.command, digest, verdict, certs, round((time.perf_counter() - t0) * 1000, 3), result, lines)
    text = json.dumps(report.to_json(), sort_keys=True) + "\n" if args.json else report.to_text()
    produces = _produces(args)
    if not produces:
        _write(args.out, text)
    elif args.out in (None, "-"):
        # the product already went to stdout; keep the report apart
        sys.stderr.write(text)
    else:
        sys.stdout.write(text)
    return {"pass": 0, "fail": 1}.get(verdict, 2)


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
