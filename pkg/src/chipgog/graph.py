"""Half-edge graphs with legs, their Laplacians, spanning trees and morphisms.

A graph is a set of vertices, a set of half-edges, a root map sending each
half-edge to a vertex and an involution on half-edges. Two-element orbits of
the involution are edges, fixed points are legs. Labels are kept for I/O;
everything internal works with dense indices in input order.

Divisors are tuples of Python ints aligned with ``graph.vertices``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import lattice
from .errors import DisconnectedGraph, InvalidGraph, NotAMorphism, NotHarmonic, UnknownVertex


@dataclass(frozen=True, eq=False)
class HalfEdgeGraph:
    vertices: tuple[str, ...]
    halfedges: tuple[str, ...]
    root: tuple[int, ...]
    inv: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "halfedges", tuple(self.halfedges))
        object.__setattr__(self, "root", tuple(int(x) for x in self.root))
        object.__setattr__(self, "inv", tuple(int(x) for x in self.inv))
        report = validate_graph(self)
        if not report.valid:
            raise InvalidGraph("; ".join(report.defects))

    # construction

    @classmethod
    def from_labels(
        cls,
        vertices: Sequence[str],
        roots: Mapping[str, str] | Sequence[tuple[str, str]],
        edges: Iterable[tuple[str, str]] = (),
        legs: Iterable[str] = (),
    ) -> HalfEdgeGraph:
        """Build from labelled half-edges ``(label, root)``, edge pairs and legs.

        Every half-edge must occur in exactly one edge pair or leg.
        """
        vertices = tuple(vertices)
        vidx = _index(vertices, "vertex")
        pairs = list(roots.items()) if isinstance(roots, Mapping) else list(roots)
        halfedges = tuple(h for h, _ in pairs)
        hidx = _index(halfedges, "half-edge")
        root = []
        for h, v in pairs:
            if v not in vidx:
                raise UnknownVertex(f"half-edge {h!r} rooted at unknown vertex {v!r}")
            root.append(vidx[v])
        inv: list[int | None] = [None] * len(halfedges)

        def claim(h):
            if h not in hidx:
                raise InvalidGraph(f"unknown half-edge {h!r}")
            i = hidx[h]
            if inv[i] is not None:
                raise InvalidGraph(f"half-edge {h!r} paired more than once")
            return i

        for h1, h2 in edges:
            if h1 == h2:
                raise InvalidGraph(f"edge pairs half-edge {h1!r} with itself; declare it as a leg")
            i, j = claim(h1), claim(h2)
            inv[i], inv[j] = j, i
        for h in legs:
            i = claim(h)
            inv[i] = i
        missing = [halfedges[i] for i, x in enumerate(inv) if x is None]
        if missing:
            raise InvalidGraph(f"half-edges without involution partner: {', '.join(missing)}")
        return cls(vertices, halfedges, tuple(root), tuple(inv))

    @classmethod
    def from_edges(
        cls,
        vertices: Sequence[str],
        edges: Iterable[tuple[str, str]],
        legs: Iterable[str] = (),
    ) -> HalfEdgeGraph:
        """Build from vertex pairs.

        Edge ``(u, v)`` gets half-edges ``u:v`` and ``v:u`` (a ``/k`` suffix
        disambiguates repeats); each entry of ``legs`` is a vertex carrying one
        leg named ``v:``.
        """
        edges = list(edges)
        legs = list(legs)
        names: Counter = Counter()
        roots, pairs, leg_labels = [], [], []

        def fresh(base):
            names[base] += 1
            return base if names[base] == 1 else f"{base}/{names[base]}"

        for u, v in edges:
            h1, h2 = fresh(f"{u}:{v}"), fresh(f"{v}:{u}")
            roots += [(h1, u), (h2, v)]
            pairs.append((h1, h2))
        for v in legs:
            h = fresh(f"{v}:")
            roots.append((h, v))
            leg_labels.append(h)
        return cls.from_labels(vertices, roots, pairs, leg_labels)

    # derived structure

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def halfedge_index(self) -> dict[str, int]:
        return {h: i for i, h in enumerate(self.halfedges)}

    def vertex(self, label) -> int:
        if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
            if 0 <= label < self.n:
                return int(label)
        elif label in self.vertex_index:
            return self.vertex_index[label]
        raise UnknownVertex(f"unknown vertex {label!r}")

    def halfedge(self, label) -> int:
        try:
            return self.halfedge_index[label]
        except KeyError:
            raise InvalidGraph(f"unknown half-edge {label!r}") from None

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges as ``(h, h')`` with ``h < h'``, in order of ``h``."""
        return tuple((h, j) for h, j in enumerate(self.inv) if h < j)

    @cached_property
    def legs(self) -> tuple[int, ...]:
        return tuple(h for h, j in enumerate(self.inv) if h == j)

    @cached_property
    def loops(self) -> tuple[int, ...]:
        """Indices into ``edges`` of edges whose ends share a root."""
        return tuple(k for k, (h, j) in enumerate(self.edges) if self.root[h] == self.root[j])

    @cached_property
    def edge_of(self) -> dict[int, int]:
        """Half-edge index to edge index, for half-edges that lie on edges."""
        out = {}
        for k, (h, j) in enumerate(self.edges):
            out[h] = out[j] = k
        return out

    @cached_property
    def tangent(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.vertices]
        for h, v in enumerate(self.root):
            out[v].append(h)
        return tuple(tuple(t) for t in out)

    @cached_property
    def valency(self) -> tuple[int, ...]:
        """Number of half-edges rooted at each vertex (legs count once, loops twice)."""
        return tuple(len(t) for t in self.tangent)

    def endpoints(self, k: int) -> tuple[int, int]:
        h, j = self.edges[k]
        return self.root[h], self.root[j]

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        uf = _UnionFind(self.n)
        for h, j in self.edges:
            uf.union(self.root[h], self.root[j])
        groups: dict[int, list[int]] = {}
        for v in range(self.n):
            groups.setdefault(uf.find(v), []).append(v)
        return tuple(tuple(g) for g in groups.values())

    @property
    def is_connected(self) -> bool:
        return len(self.components) <= 1

    @property
    def genus(self) -> int:
        """First Betti number ``m - n + #components``."""
        return len(self.edges) - self.n + len(self.components)

    def without_legs(self) -> HalfEdgeGraph:
        keep = [h for h in range(len(self.halfedges)) if self.inv[h] != h]
        return self.restrict_halfedges(keep)

    def without_legs_and_loops(self) -> HalfEdgeGraph:
        loop_halves = {h for k in self.loops for h in self.edges[k]}
        keep = [h for h in range(len(self.halfedges)) if self.inv[h] != h and h not in loop_halves]
        return self.restrict_halfedges(keep)

    def restrict_halfedges(self, keep: Iterable[int]) -> HalfEdgeGraph:
        """Subgraph on all vertices and the given involution-closed half-edge set."""
        keep = sorted(set(keep))
        pos = {h: i for i, h in enumerate(keep)}
        if any(self.inv[h] not in pos for h in keep):
            raise InvalidGraph("half-edge subset is not closed under the involution")
        return HalfEdgeGraph(
            self.vertices,
            tuple(self.halfedges[h] for h in keep),
            tuple(self.root[h] for h in keep),
            tuple(pos[self.inv[h]] for h in keep),
        )

    def divisor(self, coefficients: Mapping | Sequence[int] | None = None) -> tuple[int, ...]:
        """Normalize ``{label: coeff}`` or a coefficient sequence to a divisor tuple."""
        if coefficients is None:
            return (0,) * self.n
        if isinstance(coefficients, Mapping):
            out = [0] * self.n
            for v, a in coefficients.items():
                out[self.vertex(v)] += int(a)
            return tuple(out)
        coefficients = tuple(int(a) for a in coefficients)
        if len(coefficients) != self.n:
            raise ValueError(f"divisor has {len(coefficients)} entries for {self.n} vertices")
        return coefficients

    def unit_divisor(self, v) -> tuple[int, ...]:
        out = [0] * self.n
        out[self.vertex(v)] = 1
        return tuple(out)

    def summary(self) -> str:
        return (
            f"{self.n} vertices, {len(self.edges)} edges ({len(self.loops)} loops), "
            f"{len(self.legs)} legs"
        )

    def __eq__(self, other):
        if not isinstance(other, HalfEdgeGraph):
            return NotImplemented
        return (self.vertices, self.halfedges, self.root, self.inv) == (
            other.vertices, other.halfedges, other.root, other.inv)

    def __hash__(self):
        return hash((self.vertices, self.halfedges, self.root, self.inv))

    def __repr__(self):
        return f"HalfEdgeGraph({self.summary()})"


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    defects: tuple[str, ...] = ()
    n_vertices: int = 0
    n_edges: int = 0
    n_legs: int = 0
    n_loops: int = 0
    components: tuple[tuple[str, ...], ...] = ()

    @property
    def connected(self) -> bool:
        return len(self.components) <= 1


def validate_graph(g) -> ValidationReport:
    """Check root and involution data; classify half-edges.

    Accepts any object with ``vertices``, ``halfedges``, ``root`` and ``inv``
    and never raises; defects are listed in the report.
    """
    defects = []
    nv, nh = len(g.vertices), len(g.halfedges)
    if len(set(g.vertices)) != nv:
        defects.append("duplicate vertex labels")
    if len(set(g.halfedges)) != nh:
        defects.append("duplicate half-edge labels")
    if len(g.root) != nh:
        defects.append(f"root map has {len(g.root)} entries for {nh} half-edges")
    if len(g.inv) != nh:
        defects.append(f"involution has {len(g.inv)} entries for {nh} half-edges")
    for h, v in enumerate(g.root):
        if not 0 <= v < nv:
            defects.append(f"half-edge {h} has no valid root")
    for h, j in enumerate(g.inv):
        if not 0 <= j < nh:
            defects.append(f"half-edge {h} maps outside the half-edge set")
        elif g.inv[j] != h:
            defects.append(f"involution fails at half-edge {g.halfedges[h] if h < nh else h}")
    if defects:
        return ValidationReport(False, tuple(defects), nv)
    uf = _UnionFind(nv)
    n_edges = n_legs = n_loops = 0
    for h, j in enumerate(g.inv):
        if h == j:
            n_legs += 1
        elif h < j:
            n_edges += 1
            n_loops += g.root[h] == g.root[j]
            uf.union(g.root[h], g.root[j])
    comps: dict[int, list[str]] = {}
    for v in range(nv):
        comps.setdefault(uf.find(v), []).append(g.vertices[v])
    return ValidationReport(
        True, (), nv, n_edges, n_legs, n_loops, tuple(tuple(c) for c in comps.values())
    )


def graph_laplacian(g: HalfEdgeGraph) -> np.ndarray:
    """Column ``v`` is ``sum over h at v of (v - r(i(h)))``."""
    L = lattice.zeros(g.n, g.n)
    for h, v in enumerate(g.root):
        u = g.root[g.inv[h]]
        L[v, v] += 1
        L[u, v] -= 1
    return L


def valency_adjacency(g: HalfEdgeGraph) -> tuple[np.ndarray, np.ndarray]:
    """``Q`` and ``A`` with ``L = Q - A``; legs count on the diagonal of both."""
    Q, A = lattice.zeros(g.n, g.n), lattice.zeros(g.n, g.n)
    for h, v in enumerate(g.root):
        Q[v, v] += 1
        A[g.root[g.inv[h]], v] += 1
    return Q, A


def root_matrices(g: HalfEdgeGraph) -> tuple[np.ndarray, np.ndarray]:
    """``S`` and ``T`` (vertices by edges) for the orientation ``h -> inv(h)`` with ``h < inv(h)``."""
    m = len(g.edges)
    S, T = lattice.zeros(g.n, m), lattice.zeros(g.n, m)
    for k, (h, j) in enumerate(g.edges):
        S[g.root[h], k] += 1
        T[g.root[j], k] += 1
    return S, T


def degree(D: Sequence[int]) -> int:
    return sum(D)


def enumerate_spanning_trees(g: HalfEdgeGraph) -> list[frozenset[int]]:
    """All spanning trees as frozensets of edge indices.

    Branches on each edge in order (contract it or delete it), skipping loops
    and pruning any deletion that disconnects the remaining graph.
    """
    if g.n == 0:
        return [frozenset()]
    if not g.is_connected:
        raise DisconnectedGraph(f"graph has {len(g.components)} components")
    loops = set(g.loops)
    edges = [(k, *g.endpoints(k)) for k in range(len(g.edges)) if k not in loops]
    out: list[frozenset[int]] = []

    def connected_with(chosen: list[int], start: int) -> bool:
        uf = _UnionFind(g.n)
        for k in chosen:
            _, a, b = edges_by_id[k]
            uf.union(a, b)
        for k, a, b in edges[start:]:
            uf.union(a, b)
        return uf.count == 1

    edges_by_id = {k: (k, a, b) for k, a, b in edges}

    def rec(i: int, chosen: list[int], uf: _UnionFind):
        if uf.count == 1:
            out.append(frozenset(chosen))
            return
        if i == len(edges):
            return
        k, a, b = edges[i]
        if uf.find(a) != uf.find(b):
            uf2 = uf.copy()
            uf2.union(a, b)
            chosen.append(k)
            rec(i + 1, chosen, uf2)
            chosen.pop()
        if connected_with(chosen, i + 1):
            rec(i + 1, chosen, uf)

    rec(0, [], _UnionFind(g.n))
    return out


def count_spanning_trees(g: HalfEdgeGraph) -> int:
    """Kirchhoff count: determinant of the reduced Laplacian."""
    if g.n <= 1:
        return 1
    if not g.is_connected:
        return 0
    L = graph_laplacian(g)
    return lattice.det(L[:-1, :-1])


# morphisms


@dataclass(frozen=True, eq=False)
class GraphMorphism:
    """A finite morphism: vertices to vertices, half-edges to half-edges."""

    source: HalfEdgeGraph
    target: HalfEdgeGraph
    vertex_map: tuple[int, ...]
    halfedge_map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertex_map", tuple(int(x) for x in self.vertex_map))
        object.__setattr__(self, "halfedge_map", tuple(int(x) for x in self.halfedge_map))
        s, t = self.source, self.target
        if len(self.vertex_map) != s.n or len(self.halfedge_map) != len(s.halfedges):
            raise NotAMorphism("map sizes do not match the source graph")
        if any(not 0 <= x < t.n for x in self.vertex_map):
            raise NotAMorphism("vertex map leaves the target")
        if any(not 0 <= x < len(t.halfedges) for x in self.halfedge_map):
            raise NotAMorphism("half-edge map leaves the target")
        for h in range(len(s.halfedges)):
            fh = self.halfedge_map[h]
            if t.root[fh] != self.vertex_map[s.root[h]]:
                raise NotAMorphism(f"root map does not commute at half-edge {s.halfedges[h]!r}")
            if t.inv[fh] != self.halfedge_map[s.inv[h]]:
                raise NotAMorphism(f"involution does not commute at half-edge {s.halfedges[h]!r}")

    @classmethod
    def from_labels(cls, source, target, vertex_map: Mapping, halfedge_map: Mapping) -> GraphMorphism:
        try:
            vm = [target.vertex(vertex_map[v]) for v in source.vertices]
        except KeyError as exc:
            raise NotAMorphism(f"vertex {exc.args[0]!r} is not mapped") from None
        try:
            hm = [target.halfedge(halfedge_map[h]) for h in source.halfedges]
        except KeyError as exc:
            raise NotAMorphism(f"half-edge {exc.args[0]!r} is not mapped") from None
        return cls(source, target, tuple(vm), tuple(hm))

    @classmethod
    def identity(cls, g: HalfEdgeGraph) -> GraphMorphism:
        return cls(g, g, tuple(range(g.n)), tuple(range(len(g.halfedges))))

    def vertex_fiber(self, v: int) -> tuple[int, ...]:
        return tuple(i for i, x in enumerate(self.vertex_map) if x == v)


@dataclass(frozen=True)
class HarmonicReport:
    local_degrees: tuple[int, ...]
    global_degree: int | None


def check_harmonic(m: GraphMorphism) -> HarmonicReport:
    """Local degree at each source vertex, and the global degree.

    A source vertex whose image has an empty tangent space gets local degree 1.
    The global degree is ``None`` when the fiber sums differ, which can only
    happen over a disconnected target.
    """
    s, t = m.source, m.target
    local = []
    for sv in range(s.n):
        counts = Counter(m.halfedge_map[h] for h in s.tangent[sv])
        targets = t.tangent[m.vertex_map[sv]]
        if not targets:
            local.append(1)
            continue
        first = counts.get(targets[0], 0)
        for h in targets[1:]:
            if counts.get(h, 0) != first:
                raise NotHarmonic(
                    f"at {s.vertices[sv]!r}: {first} preimages over {t.halfedges[targets[0]]!r} "
                    f"but {counts.get(h, 0)} over {t.halfedges[h]!r}",
                    witness=(s.vertices[sv], t.halfedges[targets[0]], t.halfedges[h]),
                )
        if first == 0:
            raise NotHarmonic(
                f"local degree 0 at {s.vertices[sv]!r}",
                witness=(s.vertices[sv], t.halfedges[targets[0]], t.halfedges[targets[0]]),
            )
        local.append(first)
    sums = [0] * t.n
    for sv, d in enumerate(local):
        sums[m.vertex_map[sv]] += d
    global_degree = sums[0] if t.n and len(set(sums)) == 1 else None
    return HarmonicReport(tuple(local), global_degree)


def harmonic_pushforward(m: GraphMorphism, D: Sequence[int]) -> tuple[int, ...]:
    check_harmonic(m)
    out = [0] * m.target.n
    for sv, a in enumerate(m.source.divisor(D)):
        out[m.vertex_map[sv]] += a
    return tuple(out)


def harmonic_pullback(m: GraphMorphism, D: Sequence[int]) -> tuple[int, ...]:
    report = check_harmonic(m)
    D = m.target.divisor(D)
    return tuple(report.local_degrees[sv] * D[m.vertex_map[sv]] for sv in range(m.source.n))


# helpers


class _UnionFind:
    __slots__ = ("parent", "count")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.count = n

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        self.count -= 1
        return True

    def copy(self) -> _UnionFind:
        out = _UnionFind.__new__(_UnionFind)
        out.parent = list(self.parent)
        out.count = self.count
        return out


def _index(labels: Sequence[str], kind: str) -> dict[str, int]:
    out = {}
    for i, x in enumerate(labels):
        if x in out:
            raise InvalidGraph(f"duplicate {kind} label {x!r}")
        out[x] = i
    return out
