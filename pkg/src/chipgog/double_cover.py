"""Double covers: the free graph, parity, the voltage Laplacian and ogods.

For an action of a group of order two, a quotient vertex or half-edge is
undilated when it has two preimages and dilated when it has one. The free
graph keeps the undilated vertices; its half-edges are the undilated
half-edges rooted there, where a half-edge whose partner sits at a dilated
vertex becomes a null leg. Parity records whether the cover glues the two
sheets straight (+1) or crosswise (-1) along each edge and leg, and is 0 on
null legs.

An ogod is a set of undilated edges and odd legs, as many as there are
undilated vertices, such that every component of the spanned subgraph (all
vertices kept) is a tree with one dilated vertex (weight 1), a tree with one
odd leg and no dilated vertex (weight 2), or a legless unicyclic graph with
connected preimage (weight 4). For a dilated cover the weights add up to the
determinant of the voltage Laplacian.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from . import lattice
from .covers import CoverContext, voltage_kernel_data
from .errors import InternalMismatch, MismatchReport, NotOrderTwo
from .graph import HalfEdgeGraph, _UnionFind
from .group import GraphAction, QuotientData, descend_action, quotient_graph_of_groups
from .lattice import FiniteAbelianGroup

EDGE, LEG, NULL = "edge", "leg", "null"


@dataclass(frozen=True)
class FreeHalfEdge:
    quotient_halfedge: int
    kind: str
    parity: int


class DoubleCoverAnalysis:
    """Classification and sheet labels for a double cover.

    ``plus[v]``/``minus[v]`` are the two source vertices over an undilated
    quotient vertex ``v``; by default ``plus`` is the lesser one. ``flip``
    names undilated quotient vertices whose labels are swapped, which changes
    parity on edges but nothing gauge invariant.
    """

    def __init__(self, action: GraphAction, flip: Iterable = (), quotient: QuotientData | None = None):
        if action.order != 2:
            raise NotOrderTwo(f"group has order {action.order}, expected 2")
        self.action = action
        self.quotient = quotient if quotient is not None else quotient_graph_of_groups(action)
        q = self.quotient
        X, src = q.graph, action.graph
        self.X, self.source = X, src
        sigma = 1
        flip = {X.vertex(v) for v in flip}
        cv, ch = q.gog.cv, q.gog.ch
        self.undilated_vertices = tuple(v for v in range(X.n) if cv[v] == 1)
        self.dilated_vertices = tuple(v for v in range(X.n) if cv[v] != 1)
        for v in flip:
            if cv[v] != 1:
                raise ValueError(f"cannot relabel the dilated vertex {X.vertices[v]}")
        self.is_free = not self.dilated_vertices
        plus, minus = {}, {}
        for v in self.undilated_vertices:
            a = q.vertex_section[v]
            b = action.act_vertex(a, sigma)
            plus[v], minus[v] = (b, a) if v in flip else (a, b)
        hplus, hminus = {}, {}
        for h in range(len(X.halfedges)):
            if ch[h] != 1:
                continue
            a = q.halfedge_section[h]
            b = action.act_halfedge(a, sigma)
            v = X.root[h]
            if cv[v] == 1 and src.root[a] != plus[v]:
                a, b = b, a
            hplus[h], hminus[h] = a, b
        self.plus, self.minus = plus, minus
        self.hplus, self.hminus = hplus, hminus
        self.undilated_halfedges = tuple(sorted(hplus))

        # free graph
        fr_vertices = self.undilated_vertices
        vpos = {v: i for i, v in enumerate(fr_vertices)}
        halves: list[FreeHalfEdge] = []
        for h in self.undilated_halfedges:
            if cv[X.root[h]] != 1:
                continue
            j = X.inv[h]
            if j == h:
                kind = LEG
                parity = 1 if src.inv[hplus[h]] == hplus[h] else -1
            elif cv[X.root[j]] != 1:
                kind, parity = NULL, 0
            else:
                kind = EDGE
                parity = 1 if src.inv[hplus[h]] == hplus[j] else -1
            halves.append(FreeHalfEdge(h, kind, parity))
        self.free_halfedges = tuple(halves)
        hpos = {fh.quotient_halfedge: i for i, fh in enumerate(halves)}
        inv = tuple(hpos[X.inv[fh.quotient_halfedge]] if fh.kind == EDGE else i for i, fh in enumerate(halves))
        self.free_graph = HalfEdgeGraph(
            tuple(X.vertices[v] for v in fr_vertices),
            tuple(X.halfedges[fh.quotient_halfedge] for fh in halves),
            tuple(vpos[X.root[fh.quotient_halfedge]] for fh in halves),
            inv,
        )
        self.parity = tuple(fh.parity for fh in halves)

    @property
    def n(self) -> int:
        return len(self.undilated_vertices)

    def quotient_edge_parity(self, k: int) -> int | None:
        """Parity of a quotient edge with both ends undilated, else ``None``."""
        h, j = self.X.edges[k]
        for i, fh in enumerate(self.free_halfedges):
            if fh.quotient_halfedge == h and fh.kind == EDGE:
                return fh.parity
        return None

    @cached_property
    def undilated_edges(self) -> tuple[int, ...]:
        """Quotient edges (indices into ``X.edges``) with two preimages."""
        ch = self.quotient.gog.ch
        return tuple(k for k, (h, _) in enumerate(self.X.edges) if ch[h] == 1)

    @cached_property
    def odd_legs(self) -> tuple[int, ...]:
        """Undilated quotient legs whose preimage is a single edge."""
        src = self.source
        return tuple(h for h in self.X.legs if h in self.hplus and src.inv[self.hplus[h]] == self.hminus[h])

    @cached_property
    def even_legs(self) -> tuple[int, ...]:
        return tuple(h for h in self.X.legs if h in self.hplus and h not in self.odd_legs)

    @cached_property
    def null_legs(self) -> tuple[int, ...]:
        return tuple(fh.quotient_halfedge for fh in self.free_halfedges if fh.kind == NULL)

    def boundary_matrix(self) -> np.ndarray:
        """``r_fr (Id - iota_fr)`` with the parity-twisted involution."""
        g = self.free_graph
        D = lattice.zeros(g.n, len(g.halfedges))
        for i, eps in enumerate(self.parity):
            D[g.root[i], i] += 1
            D[g.root[g.inv[i]], i] -= eps
        return D

    def tau_matrix(self) -> np.ndarray:
        g = self.free_graph
        T = lattice.zeros(len(g.halfedges), g.n)
        for i, v in enumerate(g.root):
            T[i, v] = 1
        return T


def analyze_double_cover(action: GraphAction, flip: Iterable = ()) -> DoubleCoverAnalysis:
    return DoubleCoverAnalysis(action, flip)


def voltage_laplacian_composed(d: DoubleCoverAnalysis) -> np.ndarray:
    return d.boundary_matrix() @ d.tau_matrix()


def voltage_laplacian_formula(d: DoubleCoverAnalysis) -> np.ndarray:
    """Entry-by-entry count of edges, odd loops, odd legs and null legs."""
    g = d.free_graph
    L = lattice.zeros(g.n, g.n)
    for i, fh in enumerate(d.free_halfedges):
        u = g.root[i]
        if fh.kind == NULL:
            L[u, u] += 1
        elif fh.kind == LEG:
            if fh.parity == -1:
                L[u, u] += 2
        elif i < g.inv[i]:
            w = g.root[g.inv[i]]
            if u == w:
                if fh.parity == -1:
                    L[u, u] += 4
            else:
                L[u, u] += 1
                L[w, w] += 1
                L[u, w] -= fh.parity
                L[w, u] -= fh.parity
    return L


def voltage_laplacian_explicit(d: DoubleCoverAnalysis, check: bool = True) -> np.ndarray:
    """The explicit matrix, optionally checked against the composed map and the cover-level ``L0``."""
    L = voltage_laplacian_formula(d)
    if check:
        if not (L == voltage_laplacian_composed(d)).all():
            raise InternalMismatch("explicit voltage Laplacian differs from r (Id - iota) tau")
        if not (L == cover_voltage_laplacian(d)).all():
            raise InternalMismatch("explicit voltage Laplacian differs from the restricted cover Laplacian")
    return L


def cover_voltage_laplacian(d: DoubleCoverAnalysis) -> np.ndarray:
    """The restricted cover Laplacian, rewritten in the basis ``v+ - v-``."""
    ctx = CoverContext(d.action, d.quotient)
    L0 = voltage_kernel_data(ctx).L0
    # the cover basis vector of v is (other fiber member) - section
    signs = []
    for v in d.undilated_vertices:
        fib = ctx.vertex_fibers[v]
        signs.append(1 if (fib[1], fib[0]) == (d.plus[v], d.minus[v]) else -1)
    S = lattice.diagonal(signs)
    return S @ L0 @ S


def free_voltage_jacobian(d: DoubleCoverAnalysis) -> FiniteAbelianGroup:
    L0 = voltage_laplacian_formula(d)
    return lattice.lattice_quotient(d.boundary_matrix(), L0)


def cauchy_binet_sum(d: DoubleCoverAnalysis) -> int:
    """``sum over n-subsets B of half-edges of det D|_B det T|_B``.

    Only subsets meeting every vertex exactly once have ``det T|_B != 0``, so
    those are generated directly, one half-edge per vertex.
    """
    g = d.free_graph
    if g.n == 0:
        return 1
    D = d.boundary_matrix()
    T = d.tau_matrix()
    total = 0
    for choice in product(*g.tangent):
        B = sorted(choice)
        total += lattice.det(D[:, B]) * lattice.det(T[B, :])
    return total


def cauchy_binet_sum_bruteforce(d: DoubleCoverAnalysis) -> int:
    """Same sum over literally every n-subset; for small free graphs."""
    g = d.free_graph
    D, T = d.boundary_matrix(), d.tau_matrix()
    total = 0
    for B in combinations(range(len(g.halfedges)), g.n):
        B = list(B)
        total += lattice.det(D[:, B]) * lattice.det(T[B, :])
    return total


# ogods

CYCLE, LEG_TREE, DILATED_TREE = "odd-cycle", "odd-leg-tree", "dilated-tree"
WEIGHTS = {DILATED_TREE: 1, LEG_TREE: 2, CYCLE: 4}


@dataclass(frozen=True)
class OgodComponent:
    vertices: tuple[int, ...]
    kind: str
    weight: int


@dataclass(frozen=True)
class OgodCertificate:
    """``edges`` index ``X.edges``; ``legs`` are quotient half-edge indices."""

    edges: tuple[int, ...]
    legs: tuple[int, ...]
    components: tuple[OgodComponent, ...]

    @property
    def weight(self) -> int:
        out = 1
        for c in self.components:
            out *= c.weight
        return out

    @property
    def kinds(self) -> tuple[str, ...]:
        return tuple(c.kind for c in self.components if c.kind != DILATED_TREE or len(c.vertices) > 1)

    def key(self) -> frozenset:
        return frozenset([("e", k) for k in self.edges] + [("l", h) for h in self.legs])


def _cycle_edges(vertices, edges, endpoints) -> list[int]:
    """Edges on the unique cycle of a connected unicyclic graph (leaf pruning)."""
    deg = {v: 0 for v in vertices}
    inc = {v: [] for v in vertices}
    for k in edges:
        a, b = endpoints[k]
        deg[a] += 1
        deg[b] += 1
        inc[a].append(k)
        inc[b].append(k)
    alive = set(edges)
    leaves = [v for v in vertices if deg[v] == 1]
    while leaves:
        v = leaves.pop()
        for k in inc[v]:
            if k in alive:
                alive.discard(k)
                a, b = endpoints[k]
                w = b if a == v else a
                deg[v] -= 1
                deg[w] -= 1
                if deg[w] == 1:
                    leaves.append(w)
    return sorted(alive)


class OgodEnumerator:
    def __init__(self, d: DoubleCoverAnalysis):
        self.d = d
        X = d.X
        self.X = X
        self.endpoints = {k: X.endpoints(k) for k in range(len(X.edges))}
        self.dilated = set(d.dilated_vertices)
        self.items = [("e", k) for k in d.undilated_edges] + [("l", h) for h in d.odd_legs]
        self.parity_by_edge = {}
        for fh in d.free_halfedges:
            if fh.kind == EDGE:
                self.parity_by_edge[X.edge_of[fh.quotient_halfedge]] = fh.parity

    def preimage_connected(self, vertices, edges, legs) -> bool:
        d, src, X = self.d, self.d.source, self.X
        pv = d.quotient.projection.vertex_map
        ph = d.quotient.projection.halfedge_map
        vs = set(vertices)
        want_e = {X.edges[k][0] for k in edges} | {X.edges[k][1] for k in edges} | set(legs)
        cover_vertices = [x for x in range(src.n) if pv[x] in vs]
        pos = {x: i for i, x in enumerate(cover_vertices)}
        uf = _UnionFind(len(cover_vertices))
        for h in range(len(src.halfedges)):
            if ph[h] in want_e:
                uf.union(pos[src.root[h]], pos[src.root[src.inv[h]]])
        return uf.count == 1

    def classify(self, edges: Sequence[int], legs: Sequence[int]) -> tuple[OgodComponent, ...] | None:
        """Components of the spanned subgraph, or ``None`` if some component is not an ogod component."""
        X = self.X
        uf = _UnionFind(X.n)
        for k in edges:
            uf.union(*self.endpoints[k])
        groups: dict[int, list[int]] = {}
        for v in range(X.n):
            groups.setdefault(uf.find(v), []).append(v)
        by_root_e: dict[int, list[int]] = {r: [] for r in groups}
        by_root_l: dict[int, list[int]] = {r: [] for r in groups}
        for k in edges:
            by_root_e[uf.find(self.endpoints[k][0])].append(k)
        for h in legs:
            by_root_l[uf.find(X.root[h])].append(h)
        out = []
        for r, vs in groups.items():
            es, ls = by_root_e[r], by_root_l[r]
            n_dil = sum(1 for v in vs if v in self.dilated)
            if len(es) == len(vs) - 1:
                if n_dil == 1 and not ls:
                    out.append(OgodComponent(tuple(vs), DILATED_TREE, 1))
                elif n_dil == 0 and len(ls) == 1:
                    out.append(OgodComponent(tuple(vs), LEG_TREE, 2))
                else:
                    return None
            elif len(es) == len(vs) and not ls:
                connected = self.preimage_connected(vs, es, ls)
                if n_dil == 0:
                    cyc = _cycle_edges(vs, es, self.endpoints)
                    odd = sum(1 for k in cyc if self.parity_by_edge[k] == -1)
                    if (odd % 2 == 1) != connected:
                        raise InternalMismatch("cycle parity and preimage connectivity disagree")
                if not connected:
                    return None
                out.append(OgodComponent(tuple(vs), CYCLE, 4))
            else:
                return None
        return tuple(out)

    def enumerate(self) -> list[OgodCertificate]:
        out = []
        n = self.d.n
        for B in combinations(self.items, n):
            edges = tuple(k for t, k in B if t == "e")
            legs = tuple(h for t, h in B if t == "l")
            comps = self.classify(edges, legs)
            if comps is not None:
                out.append(OgodCertificate(edges, legs, comps))
        return out


def cycle_criteria(d: DoubleCoverAnalysis, edges: Sequence[int]) -> tuple[bool, bool]:
    """For a connected legless unicyclic edge set on undilated vertices:
    (odd number of odd edges on the cycle, preimage connected)."""
    en = OgodEnumerator(d)
    vs = sorted({v for k in edges for v in en.endpoints[k]})
    cyc = _cycle_edges(vs, list(edges), en.endpoints)
    odd = sum(1 for k in cyc if en.parity_by_edge[k] == -1)
    return odd % 2 == 1, en.preimage_connected(vs, list(edges), [])


@dataclass(frozen=True)
class OgodResult:
    ogods: tuple[OgodCertificate, ...]
    total_weight: int
    free: bool

    @property
    def count(self) -> int:
        return len(self.ogods)

    @property
    def jacobian_order(self) -> int:
        """``|Jac0|`` predicted from the weights (halved for free covers)."""
        return self.total_weight // 2 if self.free else self.total_weight


def enumerate_ogods(d: DoubleCoverAnalysis) -> OgodResult:
    ogods = tuple(OgodEnumerator(d).enumerate())
    return OgodResult(ogods, sum(o.weight for o in ogods), d.is_free)


def ogod_label(d: DoubleCoverAnalysis, item) -> tuple:
    """Readable name: ``("e", u, v)`` by sorted endpoint labels, or ``("l", root)``."""
    X = d.X
    kind, k = item
    if kind == "e":
        a, b = X.endpoints(k)
        return ("e", *sorted((X.vertices[a], X.vertices[b])))
    return ("l", X.vertices[X.root[k]])


def format_item(label: tuple) -> str:
    return f"e_{{{label[1]},{label[2]}}}" if label[0] == "e" else f"l_{label[1]}"


def ogod_names(d: DoubleCoverAnalysis, ogod: OgodCertificate) -> tuple[tuple, ...]:
    return tuple(sorted(ogod_label(d, item) for item in ogod.key()))


@dataclass(frozen=True)
class OgodClass:
    representative: OgodCertificate
    members: tuple[OgodCertificate, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def weight(self) -> int:
        return self.representative.weight


def symmetry_classes(d: DoubleCoverAnalysis, result: OgodResult, symmetry: GraphAction) -> list[OgodClass]:
    """Orbits of ogods under automorphisms of the cover that normalize the involution."""
    down = descend_action(symmetry, d.quotient)
    X = d.X
    perms = []
    for a in range(down.order):
        hp = down.halfedge_perm(a)
        perms.append(hp)
    by_key = {o.key(): o for o in result.ogods}
    seen = set()
    classes = []
    for o in result.ogods:
        if o.key() in seen:
            continue
        orbit = []
        for hp in perms:
            image = frozenset(
                ("e", X.edge_of[hp[X.edges[k][0]]]) if t == "e" else ("l", hp[k]) for t, k in o.key()
            )
            if image not in by_key:
                raise InternalMismatch("symmetry maps an ogod to a non-ogod")
            if image not in seen:
                seen.add(image)
                orbit.append(by_key[image])
        classes.append(OgodClass(o, tuple(orbit)))
    return classes


@dataclass
class KirchhoffReport:
    total_weight: int
    det_L0: int
    jac0_order: int
    ratio: tuple[int, int]
    free: bool
    cauchy_binet: int

    @property
    def ratio_value(self) -> int | None:
        a, b = self.ratio
        return a // b if b and a % b == 0 else None

    @property
    def consistent(self) -> bool:
        expected = self.total_weight // 2 if self.free else self.total_weight
        return (self.det_L0 == self.total_weight == self.cauchy_binet and self.jac0_order == expected
                and self.ratio_value == self.jac0_order)


def kirchhoff_ogod_check(d: DoubleCoverAnalysis, result: OgodResult | None = None) -> KirchhoffReport:
    """Compare ogod weights, ``det L0``, ``|Jac0|`` and the Jacobian ratio.

    Raises :class:`MismatchReport` if the ogod sum, the Cauchy-Binet sum and
    the determinant disagree, or if ``|Jac0|`` is not the weight sum (half of
    it for a free cover) or not the ratio of the two Jacobian orders.
    """
    if result is None:
        result = enumerate_ogods(d)
    L0 = voltage_laplacian_explicit(d)
    det_L0 = lattice.det(L0)
    jac0 = free_voltage_jacobian(d) if d.n else FiniteAbelianGroup()
    cb = cauchy_binet_sum(d)
    ctx = CoverContext(d.action, d.quotient)
    ratio = (ctx.source_jacobian.order, ctx.target_jacobian.order)
    report = KirchhoffReport(result.total_weight, det_L0, jac0.order, ratio, d.is_free, cb)
    if not report.consistent:
        raise MismatchReport(
            f"ogod weight {result.total_weight}, Cauchy-Binet {cb}, det L0 {det_L0}, |Jac0| {jac0.order}, "
            f"Jacobian ratio {ratio[0]}/{ratio[1]}"
        )
    return report
