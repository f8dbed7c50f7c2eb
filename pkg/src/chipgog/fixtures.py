"""Built-in example graphs, subgroup actions and their known results.

The Petersen graph is generated, not transcribed: vertices are the 2-subsets
of ``abcde`` in lexicographic order, joined when disjoint, and permutations of
the letters act on it. K4 uses vertices ``abcd`` and letter permutations acting
directly.

Each expectation records where the value comes from in ``source``:
``"published"`` for values taken from the literature on these examples,
``"derived"`` for values computed here by an independent method and frozen.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .graph import HalfEdgeGraph
from .group import GraphAction, parse_cycles

LETTERS = "abcde"


def k4_graph() -> HalfEdgeGraph:
    return HalfEdgeGraph.from_edges("abcd", combinations("abcd", 2))


def petersen_graph() -> HalfEdgeGraph:
    vertices = ["".join(p) for p in combinations(LETTERS, 2)]
    edges = [(u, v) for u, v in combinations(vertices, 2) if not set(u) & set(v)]
    return HalfEdgeGraph.from_edges(vertices, edges)


def letter_perm(cycles: str, letters: str = LETTERS) -> dict[str, str]:
    """``"(ab)(cd)"`` style cycles of single letters, as a map on letters."""
    spaced = "".join(f" {ch} " if ch.isalpha() else ch for ch in cycles)
    perm = parse_cycles(spaced, list(letters))
    return {letters[i]: letters[j] for i, j in enumerate(perm)}


def _subset_perm(graph: HalfEdgeGraph, sigma: dict[str, str]) -> tuple[int, ...]:
    return tuple(graph.vertex("".join(sorted(sigma[ch] for ch in v))) for v in graph.vertices)


def letter_action(graph: HalfEdgeGraph, generators: Sequence[str], letters: str = LETTERS) -> GraphAction:
    """Action of letter permutations on a graph whose vertices are letter subsets."""
    perms = [(f"s{i + 1}", _subset_perm(graph, letter_perm(c, letters))) for i, c in enumerate(generators)]
    return GraphAction.from_vertex_perms(graph, perms)


def k4_action(generators: Sequence[str]) -> GraphAction:
    return letter_action(k4_graph(), generators, "abcd")


def petersen_action(generators: Sequence[str]) -> GraphAction:
    return letter_action(petersen_graph(), generators)


@dataclass(frozen=True)
class SubgroupCase:
    name: str
    generators: tuple[str, ...]
    order: int
    jacobian: tuple[int, ...]
    source: str = "published"
    matrices: dict = field(default_factory=dict)
    vertex_weights: tuple[int, ...] | None = None
    pullback: dict | None = None

    @property
    def jac_order(self) -> int:
        out = 1
        for d in self.jacobian:
            out *= d
        return out


K4_JACOBIAN = (4, 4)
PETERSEN_JACOBIAN = (2, 10, 10, 10)

# Vertex order of each quotient is the order of least orbit members.
K4_CASES = (
    SubgroupCase(
        "C2", ("(ab)",), 2, (4,),
        matrices={
            "Q": [[3, 0, 0], [0, 3, 0], [0, 0, 3]],
            "A": [[1, 2, 2], [1, 0, 1], [1, 1, 0]],
            "L": [[2, -2, -2], [-1, 3, -1], [-1, -1, 3]],
        },
        vertex_weights=(1, 2, 2),
        pullback={"D": {"a": 1, "d": -1}, "pullback": {"a": 1, "b": 1, "d": -2}},
    ),
    SubgroupCase(
        "C2,2", ("(ab)(cd)",), 2, (2,),
        matrices={"Q": [[3, 0], [0, 3]], "A": [[1, 2], [2, 1]], "L": [[2, -2], [-2, 2]]},
        vertex_weights=(1, 1),
        pullback={"D": {"a": 1, "c": -1}, "pullback": {"a": 1, "b": 1, "c": -1, "d": -1}},
    ),
    SubgroupCase(
        "V4", ("(ab)", "(cd)"), 4, (2,),
        matrices={"Q": [[3, 0], [0, 3]], "A": [[1, 2], [2, 1]], "L": [[2, -2], [-2, 2]]},
        vertex_weights=(2, 2),
    ),
    SubgroupCase(
        "C3", ("(abc)",), 3, (),
        matrices={"Q": [[3, 0], [0, 3]], "A": [[2, 3], [1, 0]], "L": [[1, -3], [-1, 3]]},
        vertex_weights=(1, 3),
    ),
)

PETERSEN_CASES = (
    SubgroupCase("Z/2", ("(ab)",), 2, (10, 10)),
    SubgroupCase("Z/3", ("(abc)",), 3, (5,)),
    SubgroupCase("Z/2 (double transposition)", ("(ab)(cd)",), 2, (2, 10)),
    SubgroupCase("(Z/2)^2 (normal)", ("(ab)(cd)", "(ac)(bd)"), 4, (2, 2)),
    SubgroupCase("Z/4", ("(abcd)",), 4, (2,)),
    SubgroupCase("(Z/2)^2", ("(ab)", "(cd)"), 4, (10,)),
    SubgroupCase("S3", ("(ab)", "(abc)"), 6, (5,), vertex_weights=(2, 2, 2, 6)),
    SubgroupCase("D4", ("(abcd)", "(ac)"), 8, (2,)),
)


@dataclass(frozen=True)
class OgodCase:
    generators: tuple[str, ...]
    count: int
    weights: dict[int, int]
    total: int
    undilated_vertices: tuple[str, ...] = ()
    n_undilated_edges: int = 0
    odd_legs: tuple[str, ...] = ()
    symmetry: tuple[str, ...] = ()
    classes: tuple[tuple[tuple[str, ...], int, int], ...] = ()
    source: str = "published"


def _e(u, v):
    return ("e", *sorted((u, v)))


def _l(u):
    return ("l", u)


# Rows: (ogod up to symmetry, number of ogods in the class, weight). Edges are
# named by their endpoint pair in the quotient (there are no parallel edges
# among undilated edges here), odd legs by their root.
_OGOD_CLASSES = (
    ((_e("ac", "ae"), _e("ac", "ce"), _e("ad", "ae"), _e("ad", "ce")), 1, 4),
    ((_e("ab", "ce"), _e("ac", "ae"), _e("ac", "ce"), _e("ad", "ae")), 4, 1),
    ((_e("ab", "ce"), _e("ac", "ae"), _e("ac", "ce"), _e("ad", "ce")), 4, 1),
    ((_e("ab", "ce"), _e("ac", "ae"), _e("ad", "ae"), _e("ae", "cd")), 2, 1),
    ((_e("ab", "ce"), _e("ac", "ae"), _e("ad", "ce"), _e("ae", "cd")), 2, 1),
    ((_l("ac"), _e("ac", "ae"), _e("ad", "ae"), _e("ad", "ce")), 4, 2),
    ((_l("ac"), _e("ac", "ae"), _e("ac", "ce"), _e("ad", "ae")), 4, 2),
    ((_l("ac"), _e("ab", "ce"), _e("ac", "ae"), _e("ad", "ce")), 4, 2),
    ((_l("ac"), _e("ab", "ce"), _e("ad", "ae"), _e("ad", "ce")), 4, 2),
    ((_l("ac"), _e("ab", "ce"), _e("ac", "ae"), _e("ad", "ae")), 4, 2),
    ((_l("ac"), _e("ab", "ce"), _e("ad", "ae"), _e("ae", "cd")), 4, 2),
    ((_l("ac"), _l("ad"), _e("ac", "ae"), _e("ac", "ce")), 2, 4),
    # Printed with the dilated edge ab-cd, which cannot occur; ab-ce fits the class size.
    ((_l("ac"), _l("ad"), _e("ab", "ce"), _e("ac", "ae")), 4, 4),
    ((_l("ac"), _l("ad"), _e("ac", "ae"), _e("ad", "ce")), 2, 4),
    ((_l("ac"), _l("ad"), _e("ab", "ce"), _e("ae", "cd")), 1, 4),
)

OGOD_CASES = (
    OgodCase(("(ab)",), 17, {1: 16, 4: 1}, 20, undilated_vertices=("ac", "ad", "ae"), n_undilated_edges=6),
    OgodCase(
        ("(ab)(cd)",), 46, {1: 12, 2: 24, 4: 10}, 100,
        undilated_vertices=("ac", "ad", "ae", "ce"), n_undilated_edges=6, odd_legs=("ac", "ad"),
        symmetry=("(ab)", "(cd)", "(ac)(bd)"), classes=_OGOD_CLASSES,
    ),
)


def ogod_symmetry_action(case: OgodCase) -> GraphAction:
    return petersen_action(case.symmetry)


FIXTURES = ("k4", "petersen", "empty")


def action_slug(generators: Sequence[str]) -> str:
    """``("(ab)(cd)", "(ac)")`` -> ``"ab-cd_ac"``."""
    return "_".join(g.strip("()").replace(")(", "-") for g in generators)


def path3_graph() -> HalfEdgeGraph:
    return HalfEdgeGraph.from_edges("abc", [("a", "b"), ("b", "c")])


def bundled_files() -> dict[str, str]:
    """Contents of every file under ``data/``, generated from the definitions above."""
    from .io import write_action, write_graph

    out = {
        "k4.graph": write_graph(k4_graph()),
        "petersen.graph": write_graph(petersen_graph()),
        "path3.graph": write_graph(path3_graph()),
    }
    for case in K4_CASES:
        out[f"k4_{action_slug(case.generators)}.action"] = write_action(k4_action(case.generators))
    for case in PETERSEN_CASES:
        out[f"petersen_{action_slug(case.generators)}.action"] = write_action(petersen_action(case.generators))
    for case in OGOD_CASES:
        if case.symmetry:
            out[f"petersen_{action_slug(case.generators)}.symmetry"] = write_action(ogod_symmetry_action(case))
    return out
