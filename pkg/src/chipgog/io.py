"""Line-oriented text formats for graphs, weights, morphisms and actions.

Graph files::

    V <vertex>
    H <half-edge> <root vertex>
    E <half-edge> <half-edge>
    L <half-edge>
    W <vertex> <order>          (optional, default 1)
    WH <half-edge> <order>      (optional, default 1)

Action files have one block per generator::

    GEN <name>
    PV (a b c)(d e)             vertex cycles
    PH (h1 h2)(h3 h4) | auto    half-edge cycles; omitted or ``auto`` derives them from PV
    PA <k> (0 1)                optional permutation of k auxiliary points

Morphism files hold ``MV <src> <dst>`` and ``MH <src> <dst>`` lines. Quotient
files are graph files with weights plus ``B <half-edge> <word>`` voltage lines.
Blank lines and lines starting with ``#`` are ignored everywhere.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

from .errors import InputError, InvalidGraph, NotAnAction, ParseError, UnknownVertex
from .gog import GraphOfGroups
from .graph import GraphMorphism, HalfEdgeGraph
from .group import Generator, GraphAction, QuotientData, format_cycles, induced_halfedge_perm, parse_cycles


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield no, line.split(None, 1)[0], line.split()[1:], line


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


class _Collector:
    def __init__(self, path):
        self.path = path

    def fail(self, message, line):
        raise ParseError(message, line=line, path=self.path)


def parse_graph(text: str, path=None, weights_text: str | None = None) -> GraphOfGroups:
    """Parse a graph file; returns a graph of groups (weights default to 1)."""
    c = _Collector(path)
    vertices: list[str] = []
    roots: list[tuple[str, str]] = []
    edges: list[tuple[str, str]] = []
    legs: list[str] = []
    claimed: dict[str, int] = {}
    weight_lines = []
    vset, hset = set(), set()
    for no, key, args, line in _lines(text):
        if key == "V":
            if len(args) != 1:
                c.fail("V takes one vertex label", no)
            if args[0] in vset:
                c.fail(f"duplicate vertex {args[0]!r}", no)
            vset.add(args[0])
            vertices.append(args[0])
        elif key == "H":
            if len(args) != 2:
                c.fail("H takes a half-edge label and a root vertex", no)
            if args[0] in hset:
                c.fail(f"duplicate half-edge {args[0]!r}", no)
            if args[1] not in vset:
                c.fail(f"unknown vertex {args[1]!r}", no)
            hset.add(args[0])
            roots.append((args[0], args[1]))
        elif key in ("E", "L"):
            want = 2 if key == "E" else 1
            if len(args) != want:
                c.fail(f"{key} takes {want} half-edge label(s)", no)
            if key == "E" and args[0] == args[1]:
                c.fail("an edge needs two distinct half-edges; use L for a leg", no)
            for h in args:
                if h not in hset:
                    c.fail(f"unknown half-edge {h!r}", no)
                if h in claimed:
                    c.fail(f"half-edge {h!r} already paired on line {claimed[h]}", no)
                claimed[h] = no
            if key == "E":
                edges.append((args[0], args[1]))
            else:
                legs.append(args[0])
        elif key in ("W", "WH"):
            weight_lines.append((no, key, args))
        elif key in ("MV", "MH", "GEN", "PV", "PH", "PA", "B"):
            if key == "B":
                continue
            c.fail(f"{key} lines do not belong in a graph file", no)
        else:
            c.fail(f"unknown line type {key!r}", no)
    unpaired = [h for h, _ in roots if h not in claimed]
    if unpaired:
        c.fail(f"half-edges not declared by any E or L line: {', '.join(unpaired)}", None)
    try:
        graph = HalfEdgeGraph.from_labels(vertices, roots, edges, legs)
    except InvalidGraph as exc:
        c.fail(str(exc), None)
    cv, ch = [1] * graph.n, [1] * len(graph.halfedges)
    _apply_weights(graph, weight_lines, cv, ch, c)
    if weights_text is not None:
        extra = []
        for no, key, args, _ in _lines(weights_text):
            if key not in ("W", "WH"):
                raise ParseError(f"weights file may only hold W and WH lines, got {key!r}", no)
            extra.append((no, key, args))
        _apply_weights(graph, extra, cv, ch, _Collector(None))
    return GraphOfGroups(graph, tuple(cv), tuple(ch))


def _apply_weights(graph, lines, cv, ch, c):
    for no, key, args in lines:
        if len(args) != 2:
            c.fail(f"{key} takes a label and a positive integer", no)
        try:
            w = int(args[1])
        except ValueError:
            c.fail(f"weight {args[1]!r} is not an integer", no)
        if w < 1:
            c.fail("weights must be positive", no)
        if key == "W":
            if args[0] not in graph.vertex_index:
                c.fail(f"unknown vertex {args[0]!r}", no)
            cv[graph.vertex_index[args[0]]] = w
        else:
            if args[0] not in graph.halfedge_index:
                c.fail(f"unknown half-edge {args[0]!r}", no)
            ch[graph.halfedge_index[args[0]]] = w


def read_graph(path, weights_path=None) -> GraphOfGroups:
    weights = _read(weights_path) if weights_path is not None else None
    return parse_graph(_read(path), path=str(path), weights_text=weights)


def write_graph(x, beta_words: Sequence[str] | None = None) -> str:
    """Serialize a graph (or graph of groups); weights equal to 1 are omitted."""
    gog = x if isinstance(x, GraphOfGroups) else GraphOfGroups.trivial(x)
    g = gog.graph
    out = [f"V {v}" for v in g.vertices]
    out += [f"H {h} {g.vertices[g.root[i]]}" for i, h in enumerate(g.halfedges)]
    out += [f"E {g.halfedges[h]} {g.halfedges[j]}" for h, j in g.edges]
    out += [f"L {g.halfedges[h]}" for h in g.legs]
    out += [f"W {v} {c}" for v, c in zip(g.vertices, gog.cv) if c != 1]
    out += [f"WH {h} {c}" for h, c in zip(g.halfedges, gog.ch) if c != 1]
    if beta_words is not None:
        out += [f"B {h} {w}" for h, w in zip(g.halfedges, beta_words)]
    return "\n".join(out) + "\n"


def write_quotient(q: QuotientData) -> str:
    return write_graph(q.gog, [q.beta_word(h) for h in range(len(q.graph.halfedges))])


def parse_action(text: str, graph: HalfEdgeGraph, path=None) -> GraphAction:
    c = _Collector(path)
    blocks: list[dict] = []
    for no, key, args, line in _lines(text):
        rest = line[len(key):].strip()
        if key == "GEN":
            if len(args) != 1:
                c.fail("GEN takes one generator name", no)
            if any(b["name"] == args[0] for b in blocks):
                c.fail(f"duplicate generator name {args[0]!r}", no)
            if args[0] == "1" or "*" in args[0]:
                c.fail("generator names may not be '1' or contain '*'", no)
            blocks.append({"name": args[0], "line": no})
            continue
        if key not in ("PV", "PH", "PA"):
            c.fail(f"unknown line type {key!r} in action file", no)
        if not blocks:
            c.fail(f"{key} before any GEN line", no)
        block = blocks[-1]
        if key in block:
            c.fail(f"second {key} line for generator {block['name']!r}", no)
        try:
            if key == "PV":
                block[key] = parse_cycles(rest, graph.vertices)
            elif key == "PH":
                block[key] = "auto" if rest == "auto" else parse_cycles(rest, graph.halfedges)
            else:
                degree, _, cycles = rest.partition(" ")
                k = int(degree)
                block[key] = parse_cycles(cycles, [str(i) for i in range(k)])
        except ValueError as exc:
            c.fail(str(exc), no)
        block[key + "_line"] = no
    gens = []
    for block in blocks:
        vp = block.get("PV", tuple(range(graph.n)))
        hp = block.get("PH", "auto")
        if hp == "auto":
            try:
                hp = induced_halfedge_perm(graph, vp)
            except NotAnAction as exc:
                c.fail(f"generator {block['name']!r}: {exc}", block.get("PH_line", block["line"]))
        gens.append(Generator(block["name"], vp, hp, block.get("PA", ())))
    return GraphAction(graph, gens)


def read_action(path, graph: HalfEdgeGraph) -> GraphAction:
    return parse_action(_read(path), graph, path=str(path))


def write_action(a: GraphAction) -> str:
    g = a.graph
    out = []
    for gen in a.generators:
        out.append(f"GEN {gen.name}")
        out.append(f"PV {format_cycles(gen.vertex_perm, g.vertices)}")
        out.append(f"PH {format_cycles(gen.halfedge_perm, g.halfedges)}")
        if gen.aux_perm:
            labels = [str(i) for i in range(len(gen.aux_perm))]
            out.append(f"PA {len(gen.aux_perm)} {format_cycles(gen.aux_perm, labels)}")
    return "\n".join(out) + "\n"


def parse_morphism(text: str, source: HalfEdgeGraph, target: HalfEdgeGraph, path=None) -> GraphMorphism:
    c = _Collector(path)
    vm, hm = {}, {}
    for no, key, args, _ in _lines(text):
        if key not in ("MV", "MH") or len(args) != 2:
            c.fail("expected 'MV <src> <dst>' or 'MH <src> <dst>'", no)
        table, src, dst = (vm, source.vertex_index, target.vertex_index) if key == "MV" else (
            hm, source.halfedge_index, target.halfedge_index)
        if args[0] not in src:
            c.fail(f"unknown source label {args[0]!r}", no)
        if args[1] not in dst:
            c.fail(f"unknown target label {args[1]!r}", no)
        if args[0] in table:
            c.fail(f"{args[0]!r} mapped twice", no)
        table[args[0]] = args[1]
    return GraphMorphism.from_labels(source, target, vm, hm)


def write_morphism(m: GraphMorphism) -> str:
    s, t = m.source, m.target
    out = [f"MV {s.vertices[i]} {t.vertices[j]}" for i, j in enumerate(m.vertex_map)]
    out += [f"MH {s.halfedges[i]} {t.halfedges[j]}" for i, j in enumerate(m.halfedge_map)]
    return "\n".join(out) + "\n"


def parse_divisor(text: str, graph: HalfEdgeGraph) -> tuple[int, ...]:
    """``a=2,b=-1`` or whitespace-separated ``label:coeff`` pairs."""
    out = [0] * graph.n
    for item in text.replace(",", " ").split():
        label, sep, coeff = item.replace(":", "=").rpartition("=")
        if not sep:
            raise InputError(f"divisor entry {item!r} is not label=coefficient")
        if label not in graph.vertex_index:
            raise UnknownVertex(f"unknown vertex {label!r}")
        out[graph.vertex_index[label]] += int(coeff)
    return tuple(out)


def format_divisor(graph: HalfEdgeGraph, D: Iterable[int]) -> str:
    terms = [f"{a}*{v}" for v, a in zip(graph.vertices, D) if a]
    return " + ".join(terms).replace("+ -", "- ") if terms else "0"
