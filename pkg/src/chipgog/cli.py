"""Command-line front end.

Every command builds a :class:`Report` and renders it as text or JSON. Exit
status is 0 when every check passes, 1 when some check fails and 2 on bad
input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from . import fixtures as fx
from .covers import Check, CoverContext, _jsonable, induced_jacobian_maps, pullback_divisor, verify_cover
from .double_cover import (
    analyze_double_cover,
    enumerate_ogods,
    format_item,
    kirchhoff_ogod_check,
    ogod_label,
    ogod_names,
    symmetry_classes,
)
from .errors import ConsistencyError, InputError
from .gog import (
    GraphOfGroups,
    adjugate_check,
    gog_laplacian,
    jacobian_order_matrixtree,
    jacobian_structure,
    weighted_tree_sum,
    zeta_expansion,
)
from .graph import count_spanning_trees, enumerate_spanning_trees, validate_graph
from .group import GraphAction, quotient_graph_of_groups, reconstruction_map
from .io import read_action, read_graph, write_quotient
from .lattice import FiniteAbelianGroup
from .version import __version__


@dataclass
class Report:
    command: str
    inputs: dict
    results: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    lines: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name, expected, actual, passed=None) -> Check:
        c = Check(name, expected, actual, expected == actual if passed is None else passed)
        self.checks.append(c)
        return c

    def guard(self, name: str, fn: Callable[[], object]):
        """Run a self-checking computation; a consistency error becomes a failed check."""
        try:
            out = fn()
        except ConsistencyError as exc:
            self.checks.append(Check(name, "consistent", str(exc), False))
            return None
        self.checks.append(Check(name, "consistent", "consistent", True))
        return out

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": _jsonable_deep(self.inputs),
            "results": _jsonable_deep(self.results),
            "checks": [c.as_dict() for c in self.checks],
        }

    def render_text(self) -> str:
        out = list(self.lines)
        if self.checks:
            if out:
                out.append("")
            for c in self.checks:
                out.append(f"{c.status}  {c.name}: expected {_fmt(c.expected)}, got {_fmt(c.actual)}")
        return "\n".join(out) + "\n" if out else ""


def _jsonable_deep(x):
    if isinstance(x, dict):
        return {str(k): _jsonable_deep(v) for k, v in x.items()}
    if isinstance(x, np.ndarray):
        return [[int(a) for a in row] for row in x.tolist()]
    x = _jsonable(x)
    if isinstance(x, list):
        return [_jsonable_deep(y) for y in x]
    return x


def _fmt(x) -> str:
    if isinstance(x, FiniteAbelianGroup):
        return factors(x) or "(trivial)"
    if isinstance(x, bool):
        return "yes" if x else "no"
    return str(x)


def factors(group: FiniteAbelianGroup) -> str:
    """Invariant factors separated by spaces; empty for the trivial group."""
    return " ".join(str(d) for d in group.invariant_factors)


def _matrix_text(M) -> list[str]:
    rows = [[str(int(a)) for a in row] for row in M.tolist()]
    width = max((len(a) for row in rows for a in row), default=1)
    return ["  " + " ".join(a.rjust(width) for a in row) for row in rows]


def data_path(name: str) -> Path:
    return Path(str(resources.files("chipgog") / "data" / name))


def _resolve(path: str) -> Path:
    """Use the path as given, falling back to a bundled data file of that name."""
    p = Path(path)
    if not p.exists() and data_path(p.name).exists():
        return data_path(p.name)
    return p


def _load(args) -> GraphOfGroups:
    weights = _resolve(args.weights) if getattr(args, "weights", None) else None
    return read_graph(_resolve(args.graph), weights)


def _load_action(args, x: GraphOfGroups, attr="action") -> GraphAction:
    if not x.is_trivial:
        raise InputError("actions are defined on plain graphs; drop the weights")
    return read_action(_resolve(getattr(args, attr)), x.graph)


def _inputs(args, *names) -> dict:
    return {n: getattr(args, n) for n in names if getattr(args, n, None) is not None}


# commands


def cmd_validate(args) -> Report:
    x = _load(args)
    g = x.graph
    rep = validate_graph(g)
    r = Report("validate", _inputs(args, "graph", "weights"))
    r.results = {
        "vertices": rep.n_vertices, "edges": rep.n_edges, "loops": rep.n_loops, "legs": rep.n_legs,
        "components": [list(c) for c in rep.components], "genus": g.genus if rep.connected else None,
        "vertex_weights": list(x.cv), "halfedge_weights": list(x.ch),
    }
    r.lines = [f"{g.summary()}", f"components: {len(rep.components)}"]
    if rep.connected:
        r.lines.append(f"genus: {g.genus}")
    if not x.is_trivial:
        r.lines.append("vertex weights: " + " ".join(f"{v}={c}" for v, c in zip(g.vertices, x.cv)))
    r.check("no structural defects", [], list(rep.defects))
    r.check("connected", True, rep.connected)
    return r


def cmd_jacobian(args) -> Report:
    x = _load(args)
    r = Report("jacobian", _inputs(args, "graph", "weights"))
    jac = jacobian_structure(x)
    order_mt = jacobian_order_matrixtree(x)
    r.results = {"invariant_factors": jac, "order": jac.order, "matrix_tree_order": order_mt}
    r.lines = [f"Jac = {factors(jac)}".rstrip(), f"order = {jac.order}"]
    r.check("SNF order = matrix-tree order", order_mt, jac.order)
    return r


def cmd_trees(args) -> Report:
    x = _load(args)
    g = x.graph
    r = Report("trees", _inputs(args, "graph", "weights"))
    trees = enumerate_spanning_trees(g)
    det_count = count_spanning_trees(g)
    r.results = {"count": len(trees), "determinant_count": det_count, "weighted_sum": str(weighted_tree_sum(x))}
    r.lines = [f"spanning trees = {len(trees)}"]
    if not x.is_trivial:
        r.lines.append(f"weighted sum = {weighted_tree_sum(x)}")
    if args.list:
        names = []
        for t in trees:
            labels = [f"{g.vertices[a]}-{g.vertices[b]}" for a, b in (g.endpoints(k) for k in sorted(t))]
            names.append(labels)
            r.lines.append("  " + (" ".join(labels) or "(empty)"))
        r.results["trees"] = names
    r.check("enumeration = determinant", det_count, len(trees))
    return r


def cmd_zeta(args) -> Report:
    x = _load(args)
    r = Report("zeta", _inputs(args, "graph", "weights"))
    try:
        z = zeta_expansion(x)
    except ConsistencyError as exc:
        r.checks.append(Check("leading coefficient", "consistent", str(exc), False))
        return r
    r.results = {
        "reciprocal_polynomial": list(z.reciprocal_poly), "expansion_at_1": list(z.shifted),
        "genus": z.genus, "vanishing_order": z.vanishing_order,
        "leading_coefficient": z.leading_coeff, "expected_leading_coefficient": z.expected_leading,
    }
    r.lines = [
        "1/zeta(u) coefficients: " + " ".join(map(str, z.reciprocal_poly)),
        "in powers of (u-1): " + " ".join(map(str, z.shifted)),
        f"genus = {z.genus}",
        f"vanishing order = {z.vanishing_order}",
        f"coefficient of (u-1)^{z.genus} = {z.leading_coeff}",
    ]
    if z.expected_leading is None:
        r.lines.append("tree: no leading-coefficient identity to check")
    else:
        r.check(f"coefficient of (u-1)^{z.genus}", z.expected_leading, z.leading_coeff)
    return r


def cmd_quotient(args) -> Report:
    x = _load(args)
    action = _load_action(args, x)
    q = quotient_graph_of_groups(action)
    text = write_quotient(q)
    r = Report("quotient", _inputs(args, "graph", "action", "output"))
    r.results = {"group_order": action.order, "vertex_weights": list(q.gog.cv), "file": text}
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        r.lines = [f"|G| = {action.order}", f"wrote {args.output}"]
    else:
        r.lines = text.rstrip("\n").split("\n")
    r.guard("cover rebuilt from quotient data", lambda: reconstruction_map(q))
    return r


def _cover_lines(rep) -> list[str]:
    return [
        f"|G| = {rep.group_order}",
        f"Jac(cover) = {factors(rep.source_jacobian)}",
        f"Jac(quotient) = {factors(rep.target_jacobian)}",
        f"Jac0 = {factors(rep.voltage_jacobian)}",
        f"ker p_* = {factors(rep.kernel)}",
    ]


def cmd_verify_cover(args) -> Report:
    x = _load(args)
    action = _load_action(args, x)
    rep = verify_cover(action)
    r = Report("verify-cover", _inputs(args, "graph", "action"))
    r.results = {
        "group_order": rep.group_order, "cover_jacobian": rep.source_jacobian,
        "quotient_jacobian": rep.target_jacobian, "voltage_jacobian": rep.voltage_jacobian,
        "pushforward_kernel": rep.kernel,
        "map_defects": {"injectivity": rep.defects.injectivity, "surjectivity": rep.defects.surjectivity},
    }
    r.lines = _cover_lines(rep)
    if not rep.defects.isomorphism:
        r.lines.append(
            f"Jac0 -> ker p_*: kernel of order {rep.defects.injectivity}, "
            f"image of index {rep.defects.surjectivity}"
        )
    r.checks = list(rep.checks)
    return r


def cmd_ogods(args) -> Report:
    x = _load(args)
    action = _load_action(args, x)
    d = analyze_double_cover(action)
    res = enumerate_ogods(d)
    r = Report("ogods", _inputs(args, "graph", "action", "symmetry"))
    X = d.X
    rows = []
    for o in res.ogods:
        names = [format_item(n) for n in ogod_names(d, o)]
        rows.append({"subset": names, "components": list(o.kinds), "weight": o.weight})
    r.results = {
        "undilated_vertices": [X.vertices[v] for v in d.undilated_vertices],
        "odd_legs": [X.vertices[X.root[h]] for h in d.odd_legs],
        "free": d.is_free, "ogods": rows, "count": res.count, "total_weight": res.total_weight,
    }
    r.lines = [f"undilated vertices: {' '.join(r.results['undilated_vertices']) or '-'}",
               f"odd legs at: {' '.join(r.results['odd_legs']) or '-'}", ""]
    if args.symmetry:
        sym = read_action(_resolve(args.symmetry), x.graph)
        classes = symmetry_classes(d, res, sym)
        table = []
        for c in classes:
            rep_names = [format_item(n) for n in ogod_names(d, c.representative)]
            table.append({"representative": rep_names, "size": c.size, "weight": c.weight})
        r.results["classes"] = table
        r.lines += _table(["representative", "ogods", "weight"],
                          [[" ".join(t["representative"]), str(t["size"]), str(t["weight"])] for t in table])
        r.lines.append(f"classes = {len(classes)}")
    else:
        r.lines += _table(["subset", "component types", "weight"],
                          [[" ".join(row["subset"]), ", ".join(row["components"]) or "-", str(row["weight"])]
                           for row in rows])
    r.lines.append(f"ogods = {res.count}")
    r.lines.append(f"total weight = {res.total_weight}")
    try:
        k = kirchhoff_ogod_check(d, res)
        a, b = k.ratio
        r.lines.append(f"det L0 = {k.det_L0}")
        r.lines.append(f"|Jac0| = {k.jac0_order}" + (" (half the total, free cover)" if d.is_free else ""))
        r.lines.append(f"|Jac(cover)| / |Jac(quotient)| = {a}/{b}")
        r.results.update(det_L0=k.det_L0, jac0_order=k.jac0_order, jacobian_ratio=[a, b])
        r.check("ogod weight = det L0", k.det_L0, k.total_weight)
        r.check("Cauchy-Binet sum = det L0", k.det_L0, k.cauchy_binet)
        expected = k.total_weight // 2 if d.is_free else k.total_weight
        r.check("|Jac0| from ogods", expected, k.jac0_order)
        r.check("|Jac0| = Jacobian ratio", k.jac0_order, k.ratio_value)
    except ConsistencyError as exc:
        r.checks.append(Check("ogod matrix-tree identity", "consistent", str(exc), False))
    return r


def _table(header, rows) -> list[str]:
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h) for i, h in enumerate(header)]
    fmt = lambda row: "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()
    return [fmt(header), fmt(["-" * w for w in widths])] + [fmt(row) for row in rows]


# fixtures


def _graph_checks(r: Report, name: str, x: GraphOfGroups, expected_jac=None, source=None):
    r.guard(f"{name}: Laplacian factorizations", lambda: gog_laplacian(x))
    r.guard(f"{name}: adjugate identity", lambda: adjugate_check(x))
    jac = r.guard(f"{name}: SNF and matrix-tree orders agree", lambda: jacobian_structure(x))
    if expected_jac is not None and jac is not None:
        r.check(f"{name}: Jacobian ({source})", FiniteAbelianGroup(expected_jac), jac)
    if x.graph.genus >= 1:
        r.guard(f"{name}: zeta leading coefficient", lambda: zeta_expansion(x))
    return jac


def _subgroup_rows(r: Report, graph_name: str, cases, make_action) -> list[list[str]]:
    rows = []
    for case in cases:
        action = make_action(case.generators)
        label = f"{graph_name}//{case.name}"
        q = quotient_graph_of_groups(action)
        x = q.gog
        jac = _graph_checks(r, label, x, case.jacobian, case.source)
        r.check(f"{label}: group order", case.order, action.order)
        if case.vertex_weights is not None:
            r.check(f"{label}: vertex weights", sorted(case.vertex_weights), sorted(x.cv))
        if case.matrices:
            b = gog_laplacian(x)
            for key, M in case.matrices.items():
                r.check(f"{label}: {key} matrix", M, [[int(a) for a in row] for row in getattr(b, key).tolist()])
        r.guard(f"{label}: cover rebuilt from quotient data", lambda: reconstruction_map(q))
        rep = verify_cover(action)
        for c in rep.checks:
            r.checks.append(Check(f"{label}: {c.name}", c.expected, c.actual, c.passed))
        if case.pullback:
            ctx = CoverContext(action, q)
            D = ctx.target.graph.divisor(case.pullback["D"])
            want = ctx.source.divisor(case.pullback["pullback"])
            r.check(f"{label}: pullback of {case.pullback['D']}", list(want), list(pullback_divisor(ctx, D)))
        got = factors(jac) if jac is not None else "?"
        rows.append([case.name, " ".join(case.generators), str(action.order), factors(FiniteAbelianGroup(case.jacobian)),
                     got, factors(rep.voltage_jacobian), case.source,
                     "PASS" if jac is not None and jac.invariant_factors == case.jacobian else "FAIL"])
    return rows


def _ogod_rows(r: Report) -> list[list[str]]:
    rows = []
    for case in fx.OGOD_CASES:
        action = fx.petersen_action(case.generators)
        label = f"petersen//<{','.join(case.generators)}> ogods"
        d = analyze_double_cover(action)
        X = d.X
        res = enumerate_ogods(d)
        weights: dict[int, int] = {}
        for o in res.ogods:
            weights[o.weight] = weights.get(o.weight, 0) + 1
        r.check(f"{label}: undilated vertices ({case.source})", sorted(case.undilated_vertices),
                sorted(X.vertices[v] for v in d.undilated_vertices))
        r.check(f"{label}: undilated edges ({case.source})", case.n_undilated_edges, len(d.undilated_edges))
        r.check(f"{label}: odd legs ({case.source})", sorted(case.odd_legs),
                sorted(X.vertices[X.root[h]] for h in d.odd_legs))
        r.check(f"{label}: count ({case.source})", case.count, res.count)
        r.check(f"{label}: weights ({case.source})", dict(sorted(case.weights.items())), dict(sorted(weights.items())))
        r.check(f"{label}: total weight ({case.source})", case.total, res.total_weight)
        k = r.guard(f"{label}: weight = det L0 = |Jac0| = Jacobian ratio", lambda: kirchhoff_ogod_check(d, res))
        n_classes = ""
        if case.symmetry:
            classes = symmetry_classes(d, res, fx.ogod_symmetry_action(case))
            n_classes = str(len(classes))
            r.check(f"{label}: classes ({case.source})", len(case.classes), len(classes))
            found = {frozenset(ogod_names(d, m)): c for c in classes for m in c.members}
            for i, (names, size, w) in enumerate(case.classes, 1):
                c = found.get(frozenset(names))
                r.check(f"{label}: class {i} size and weight ({case.source})", [size, w],
                        [c.size, c.weight] if c else None)
        rows.append([" ".join(case.generators), str(res.count), str(res.total_weight),
                     str(k.det_L0) if k else "?", n_classes])
    return rows


def cmd_verify_all(args) -> Report:
    name = "empty" if args.fixture == "empty-fixture" else args.fixture
    if name not in fx.FIXTURES:
        raise InputError(f"unknown fixture {args.fixture!r}; choose from {', '.join(fx.FIXTURES)}")
    r = Report("verify-all", {"fixture": name})
    header = ["subgroup", "generators", "|H|", "expected Jac", "Jac", "Jac0", "source", "status"]
    r.lines = [f"fixture {name}"]
    rows: list[list[str]] = []
    if name == "k4":
        x = GraphOfGroups.trivial(fx.k4_graph())
        jac = _graph_checks(r, "k4", x, fx.K4_JACOBIAN, "published")
        r.check("k4: spanning trees", 16, len(enumerate_spanning_trees(x.graph)))
        r.lines.append(f"Jac = {factors(jac) if jac else '?'}")
        rows = _subgroup_rows(r, "k4", fx.K4_CASES, fx.k4_action)
    elif name == "petersen":
        x = GraphOfGroups.trivial(fx.petersen_graph())
        jac = _graph_checks(r, "petersen", x, fx.PETERSEN_JACOBIAN, "published")
        r.lines.append(f"Jac = {factors(jac) if jac else '?'}")
        rows = _subgroup_rows(r, "petersen", fx.PETERSEN_CASES, fx.petersen_action)
    r.lines += _table(header, rows)
    if name == "petersen":
        r.lines.append("")
        r.lines += _table(["involution", "ogods", "weight", "det L0", "classes"], _ogod_rows(r))
    r.results = {"rows": [dict(zip(header, row)) for row in rows]}
    return r


COMMANDS = {
    "validate": cmd_validate,
    "jacobian": cmd_jacobian,
    "trees": cmd_trees,
    "zeta": cmd_zeta,
    "quotient": cmd_quotient,
    "verify-cover": cmd_verify_cover,
    "ogods": cmd_ogods,
    "verify-all": cmd_verify_all,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    graph = argparse.ArgumentParser(add_help=False)
    graph.add_argument("graph", help="graph file (bundled names such as k4.graph also work)")
    graph.add_argument("--weights", help="file of W/WH weight lines")

    p = argparse.ArgumentParser(prog="chipgog", description="Chip-firing on graphs of groups.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common, graph], help="check a graph file")
    sub.add_parser("jacobian", parents=[common, graph], help="invariant factors of the Jacobian")
    t = sub.add_parser("trees", parents=[common, graph], help="spanning trees")
    t.add_argument("--list", action="store_true", help="print every spanning tree")
    sub.add_parser("zeta", parents=[common, graph], help="zeta function expansion at u=1")
    q = sub.add_parser("quotient", parents=[common, graph], help="quotient graph of groups")
    q.add_argument("action")
    q.add_argument("-o", "--output", help="write the quotient file here")
    v = sub.add_parser("verify-cover", parents=[common, graph], help="pushforward/pullback identities")
    v.add_argument("action")
    o = sub.add_parser("ogods", parents=[common, graph], help="ogods of a double cover")
    o.add_argument("action")
    o.add_argument("--symmetry", help="action file of symmetries used to group ogods")
    a = sub.add_parser("verify-all", parents=[common], help="run every check on a bundled fixture")
    a.add_argument("fixture", help=f"one of {', '.join(fx.FIXTURES)}")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConsistencyError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 1
    if args.format == "json":
        sys.stdout.write(json.dumps(report.as_dict(), indent=2) + "\n")
    else:
        sys.stdout.write(report.render_text())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
