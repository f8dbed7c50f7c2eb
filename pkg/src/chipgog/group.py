"""Finite groups acting on half-edge graphs, quotients and cover reconstruction.

Groups act on the right, ``x(gs) = (xg)s``. A group element is a permutation
tuple ``p`` with ``x -> p[x]``, so the product ``g*s`` is ``s[g[x]]``.
Elements are indexed in breadth-first closure order from the identity, with
generators tried in the order given; every element remembers the shortest
word that reached it first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .errors import ClosureCapExceeded, IncompatibleSubgroups, InvalidVoltage, NotAnAction
from .gog import GraphOfGroups
from .graph import GraphMorphism, HalfEdgeGraph

DEFAULT_CAP = 10000

Perm = tuple[int, ...]


class PermGroup:
    """Closure of a list of named permutations of ``range(degree)``."""

    def __init__(self, generators: Sequence[Perm], names: Sequence[str] | None = None, degree: int | None = None,
                 cap: int = DEFAULT_CAP):
        gens = [tuple(int(x) for x in p) for p in generators]
        if degree is None:
            degree = len(gens[0]) if gens else 0
        for p in gens:
            if len(p) != degree or sorted(p) != list(range(degree)):
                raise NotAnAction(f"generator is not a permutation of {degree} points")
        self.degree = degree
        self.generators = tuple(gens)
        self.names = tuple(names) if names is not None else tuple(f"g{i + 1}" for i in range(len(gens)))
        if len(self.names) != len(gens):
            raise ValueError("one name per generator")
        identity = tuple(range(degree))
        self.elements: list[Perm] = [identity]
        self.words: list[tuple[int, ...]] = [()]
        self._index = {identity: 0}
        head = 0
        while head < len(self.elements):
            g = self.elements[head]
            for k, s in enumerate(gens):
                gs = tuple(s[x] for x in g)
                if gs not in self._index:
                    if len(self.elements) >= cap:
                        raise ClosureCapExceeded(f"group closure exceeds {cap} elements")
                    self._index[gs] = len(self.elements)
                    self.elements.append(gs)
                    self.words.append(self.words[head] + (k,))
            head += 1
        self._mul: dict[tuple[int, int], int] = {}

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def index(self, p: Perm) -> int:
        return self._index[tuple(p)]

    def mul(self, a: int, b: int) -> int:
        """Index of ``a*b`` (``a`` first, then ``b``)."""
        key = (a, b)
        out = self._mul.get(key)
        if out is None:
            pa, pb = self.elements[a], self.elements[b]
            out = self._index[tuple(pb[x] for x in pa)]
            self._mul[key] = out
        return out

    def inv(self, a: int) -> int:
        p = self.elements[a]
        q = [0] * self.degree
        for x, y in enumerate(p):
            q[y] = x
        return self._index[tuple(q)]

    def act(self, x: int, a: int) -> int:
        return self.elements[a][x]

    def generator_indices(self) -> tuple[int, ...]:
        return tuple(self.index(p) for p in self.generators)

    def word(self, a: int) -> str:
        w = self.words[a]
        return "*".join(self.names[k] for k in w) if w else "1"

    def parse_word(self, text: str) -> int:
        text = text.strip()
        out = 0
        if text == "1":
            return out
        lookup = {name: i for i, name in zip(self.generator_indices(), self.names)}
        for part in text.split("*"):
            if part not in lookup:
                raise ValueError(f"unknown generator {part!r} in word {text!r}")
            out = self.mul(out, lookup[part])
        return out

    def subgroup(self, generators: Sequence[int]) -> frozenset[int]:
        out = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for s in generators:
                    b = self.mul(a, s)
                    if b not in out:
                        out.add(b)
                        nxt.append(b)
            frontier = nxt
        return frozenset(out)

    def is_subgroup(self, elements) -> bool:
        s = set(elements)
        return 0 in s and all(self.mul(a, b) in s for a in s for b in s)

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mul(x, a)
            k += 1
        return k

    def right_coset(self, subgroup, g: int) -> frozenset[int]:
        return frozenset(self.mul(s, g) for s in subgroup)

    def conjugate(self, subgroup, g: int) -> frozenset[int]:
        """``g^-1 H g``."""
        gi = self.inv(g)
        return frozenset(self.mul(self.mul(gi, s), g) for s in subgroup)

    def all_subgroups(self) -> list[frozenset[int]]:
        """Every subgroup, by brute force over generating pairs (small groups only)."""
        seen: dict[frozenset[int], None] = {}
        cyclic = [self.subgroup([a]) for a in range(self.order)]
        for c in cyclic:
            seen.setdefault(c)
        changed = True
        while changed:
            changed = False
            current = list(seen)
            for h in current:
                for c in cyclic:
                    if c <= h:
                        continue
                    joined = self.subgroup(sorted(h | c))
                    if joined not in seen:
                        seen[joined] = None
                        changed = True
        return sorted(seen, key=lambda s: (len(s), sorted(s)))


def parse_cycles(text: str, labels: Sequence[str]) -> Perm:
    """Cycle notation such as ``(a b c)(d e)`` over ``labels``; unlisted labels are fixed."""
    index = {x: i for i, x in enumerate(labels)}
    perm = list(range(len(labels)))
    seen = set()
    text = text.strip()
    if text in ("", "()", "1"):
        return tuple(perm)
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        if text[pos] != "(":
            raise ValueError(f"expected '(' at position {pos} in {text!r}")
        end = text.find(")", pos)
        if end < 0:
            raise ValueError(f"unclosed cycle in {text!r}")
        body = text[pos + 1:end].replace(",", " ").split()
        pos = end + 1
        for x in body:
            if x not in index:
                raise ValueError(f"unknown label {x!r} in cycle notation")
            if x in seen:
                raise ValueError(f"label {x!r} appears twice in cycle notation")
            seen.add(x)
        for a, b in zip(body, body[1:] + body[:1]):
            perm[index[a]] = index[b]
    return tuple(perm)


def format_cycles(perm: Perm, labels: Sequence[str]) -> str:
    seen = set()
    parts = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc = []
        x = start
        while x not in seen:
            seen.add(x)
            cyc.append(labels[x])
            x = perm[x]
        parts.append("(" + " ".join(cyc) + ")")
    return "".join(parts) or "()"


@dataclass(frozen=True)
class Generator:
    name: str
    vertex_perm: Perm
    halfedge_perm: Perm
    aux_perm: Perm = ()


class GraphAction:
    """A group generated by graph automorphisms, acting on the right.

    Each generator permutes vertices and half-edges. An optional auxiliary
    permutation on extra points lets a non-faithful action carry its group:
    the group is the closure of the combined permutations on vertices,
    half-edges and auxiliary points.
    """

    def __init__(self, graph: HalfEdgeGraph, generators: Sequence[Generator], cap: int = DEFAULT_CAP):
        self.graph = graph
        self.generators = tuple(generators)
        self.cap = cap
        aux = {len(gen.aux_perm) for gen in self.generators}
        if len(aux) > 1:
            raise NotAnAction("auxiliary permutations have different degrees")
        self.aux_degree = aux.pop() if aux else 0
        self._check_generators()
        nv, nh = graph.n, len(graph.halfedges)
        combined = [
            tuple(gen.vertex_perm) + tuple(nv + x for x in gen.halfedge_perm)
            + tuple(nv + nh + x for x in gen.aux_perm)
            for gen in self.generators
        ]
        self.group = PermGroup(combined, [gen.name for gen in self.generators], nv + nh + self.aux_degree, cap)

    @classmethod
    def from_vertex_perms(cls, graph: HalfEdgeGraph, perms: Sequence[tuple[str, Perm]], cap: int = DEFAULT_CAP) -> GraphAction:
        """Lift vertex permutations to half-edges when each half-edge is determined by its endpoints.

        Works for graphs without parallel edges, loops or repeated legs.
        """
        return cls(graph, [Generator(name, tuple(p), induced_halfedge_perm(graph, p)) for name, p in perms], cap)

    def _check_generators(self):
        g = self.graph
        nv, nh = g.n, len(g.halfedges)
        for gen in self.generators:
            if len(gen.vertex_perm) != nv or sorted(gen.vertex_perm) != list(range(nv)):
                raise NotAnAction(f"generator {gen.name}: vertex part is not a permutation")
            if len(gen.halfedge_perm) != nh or sorted(gen.halfedge_perm) != list(range(nh)):
                raise NotAnAction(f"generator {gen.name}: half-edge part is not a permutation")
            if sorted(gen.aux_perm) != list(range(len(gen.aux_perm))):
                raise NotAnAction(f"generator {gen.name}: auxiliary part is not a permutation")
            for h in range(nh):
                hg = gen.halfedge_perm[h]
                if g.root[hg] != gen.vertex_perm[g.root[h]]:
                    raise NotAnAction(
                        f"generator {gen.name} does not commute with the root map at {g.halfedges[h]}",
                        witness=g.halfedges[h],
                    )
                if g.inv[hg] != gen.halfedge_perm[g.inv[h]]:
                    raise NotAnAction(
                        f"generator {gen.name} does not commute with the involution at {g.halfedges[h]}",
                        witness=g.halfedges[h],
                    )

    @property
    def order(self) -> int:
        return self.group.order

    def act_vertex(self, v: int, a: int) -> int:
        return self.group.elements[a][v]

    def act_halfedge(self, h: int, a: int) -> int:
        return self.group.elements[a][self.graph.n + h] - self.graph.n

    def vertex_perm(self, a: int) -> Perm:
        return self.group.elements[a][: self.graph.n]

    def halfedge_perm(self, a: int) -> Perm:
        nv, nh = self.graph.n, len(self.graph.halfedges)
        return tuple(x - nv for x in self.group.elements[a][nv:nv + nh])

    def vertex_stabilizer(self, v: int) -> frozenset[int]:
        return frozenset(a for a in range(self.order) if self.act_vertex(v, a) == v)

    def halfedge_stabilizer(self, h: int) -> frozenset[int]:
        return frozenset(a for a in range(self.order) if self.act_halfedge(h, a) == h)

    @cached_property
    def vertex_orbits(self) -> tuple[tuple[int, ...], ...]:
        return _orbits(self.graph.n, [gen.vertex_perm for gen in self.generators])

    @cached_property
    def halfedge_orbits(self) -> tuple[tuple[int, ...], ...]:
        return _orbits(len(self.graph.halfedges), [gen.halfedge_perm for gen in self.generators])

    @property
    def is_faithful(self) -> bool:
        return len({self.group.elements[a][: self.graph.n + len(self.graph.halfedges)]
                    for a in range(self.order)}) == self.order


def induced_halfedge_perm(graph: HalfEdgeGraph, vperm: Perm) -> Perm:
    """Half-edge permutation forced by a vertex permutation on a simple graph with legs."""
    key = {}
    for h in range(len(graph.halfedges)):
        j = graph.inv[h]
        k = (graph.root[h], graph.root[j], h == j)
        if k in key or (h != j and graph.root[h] == graph.root[j]):
            raise NotAnAction("half-edges are not determined by their endpoints; give PH explicitly")
        key[k] = h
    out = []
    for h in range(len(graph.halfedges)):
        j = graph.inv[h]
        k = (vperm[graph.root[h]], vperm[graph.root[j]], h == j)
        if k not in key:
            raise NotAnAction(f"vertex permutation does not map half-edge {graph.halfedges[h]} to a half-edge")
        out.append(key[k])
    return tuple(out)


@dataclass(frozen=True)
class ActionReport:
    order: int
    n_generators: int
    faithful: bool
    vertex_orbits: int
    halfedge_orbits: int


def validate_action(a: GraphAction) -> ActionReport:
    """Generators were checked at construction; summarize the group."""
    return ActionReport(a.order, len(a.generators), a.is_faithful, len(a.vertex_orbits), len(a.halfedge_orbits))


# quotients


@dataclass(frozen=True, eq=False)
class QuotientData:
    """A quotient graph of groups with explicit subgroups of a common group.

    ``vertex_groups[v]`` and ``halfedge_groups[h]`` are sets of element indices
    of ``group``; ``beta[h]`` is an element index. When the data comes from an
    action, ``vertex_section``/``halfedge_section`` give the chosen preimages
    and ``projection`` the quotient morphism.
    """

    group: PermGroup
    graph: HalfEdgeGraph
    vertex_groups: tuple[frozenset[int], ...]
    halfedge_groups: tuple[frozenset[int], ...]
    beta: tuple[int, ...]
    vertex_section: tuple[int, ...] | None = None
    halfedge_section: tuple[int, ...] | None = None
    projection: GraphMorphism | None = None
    action: GraphAction | None = field(default=None, repr=False)

    @cached_property
    def gog(self) -> GraphOfGroups:
        return GraphOfGroups(self.graph, tuple(len(s) for s in self.vertex_groups),
                             tuple(len(s) for s in self.halfedge_groups))

    def beta_word(self, h: int) -> str:
        return self.group.word(self.beta[h])


def _orbits(n: int, perms: Sequence[Perm]) -> tuple[tuple[int, ...], ...]:
    seen = [False] * n
    out = []
    for x in range(n):
        if seen[x]:
            continue
        orbit = [x]
        seen[x] = True
        i = 0
        while i < len(orbit):
            y = orbit[i]
            for p in perms:
                z = p[y]
                if not seen[z]:
                    seen[z] = True
                    orbit.append(z)
            i += 1
        out.append(tuple(sorted(orbit)))
    return tuple(out)


def quotient_graph(a: GraphAction) -> tuple[HalfEdgeGraph, GraphMorphism]:
    q = quotient_graph_of_groups(a)
    return q.graph, q.projection


def quotient_graph_of_groups(a: GraphAction) -> QuotientData:
    """Quotient with canonical sections and voltages.

    The section of a vertex orbit is its least member. The section of a
    half-edge orbit is its least member rooted at the section of the root
    orbit. Quotient vertices and half-edges carry their sections' labels and
    come in order of their sections. ``beta(h)`` is the first element in
    enumeration order with ``iota(section h) = section(iota h) * beta(h)``,
    and ``beta(iota h) = beta(h)^-1`` on edges.
    """
    g, G = a.graph, a.group
    vorbits = a.vertex_orbits
    vsec = tuple(orb[0] for orb in vorbits)
    vq = {x: i for i, orb in enumerate(vorbits) for x in orb}
    hsec_list = []
    for orb in a.halfedge_orbits:
        target = vsec[vq[g.root[orb[0]]]]
        hsec_list.append(min(h for h in orb if g.root[h] == target))
    order = sorted(range(len(hsec_list)), key=lambda i: hsec_list[i])
    horbits = [a.halfedge_orbits[i] for i in order]
    hsec = tuple(hsec_list[i] for i in order)
    hq = {x: i for i, orb in enumerate(horbits) for x in orb}

    root = tuple(vq[g.root[h]] for h in hsec)
    inv = tuple(hq[g.inv[h]] for h in hsec)
    graph = HalfEdgeGraph(
        tuple(g.vertices[v] for v in vsec), tuple(g.halfedges[h] for h in hsec), root, inv
    )
    vertex_groups = tuple(a.vertex_stabilizer(v) for v in vsec)
    halfedge_groups = tuple(a.halfedge_stabilizer(h) for h in hsec)

    beta: list[int | None] = [None] * len(hsec)
    for h in range(len(hsec)):
        if beta[h] is not None:
            continue
        j = inv[h]
        want = g.inv[hsec[h]]
        b = next(x for x in range(G.order) if a.act_halfedge(hsec[j], x) == want)
        beta[h] = b
        if j != h:
            beta[j] = G.inv(b)
    projection = GraphMorphism(
        g, graph, tuple(vq[v] for v in range(g.n)), tuple(hq[h] for h in range(len(g.halfedges)))
    )
    return QuotientData(G, graph, vertex_groups, halfedge_groups, tuple(beta), vsec, hsec, projection, a)


def check_voltage(q: QuotientData) -> None:
    """Conditions under which the cover reconstruction is well defined."""
    G, g = q.group, q.graph
    for s in q.vertex_groups + q.halfedge_groups:
        if not G.is_subgroup(s):
            raise IncompatibleSubgroups("a vertex or half-edge group is not a subgroup")
    for h in range(len(g.halfedges)):
        if not q.halfedge_groups[h] <= q.vertex_groups[g.root[h]]:
            raise IncompatibleSubgroups(
                f"group of half-edge {g.halfedges[h]} is not contained in the group of its root"
            )
        j, b = g.inv[h], q.beta[h]
        if j == h:
            if G.mul(b, b) not in q.halfedge_groups[h]:
                raise InvalidVoltage(f"leg {g.halfedges[h]}: beta squared is outside the leg group")
            if G.conjugate(q.halfedge_groups[h], b) != q.halfedge_groups[h]:
                raise InvalidVoltage(f"leg {g.halfedges[h]}: beta does not normalize the leg group")
        else:
            if G.conjugate(q.halfedge_groups[j], b) != q.halfedge_groups[h]:
                raise IncompatibleSubgroups(
                    f"edge {g.halfedges[h]}: beta does not conjugate the two half-edge groups"
                )
            if G.mul(q.beta[j], b) not in q.halfedge_groups[h]:
                raise InvalidVoltage(f"edge {g.halfedges[h]}: beta values of the two halves are not inverse")


def _cosets(G: PermGroup, subgroup) -> tuple[list[int], dict[int, int]]:
    """Right cosets ``H g`` in first-appearance order: representatives and element -> coset."""
    reps: list[int] = []
    which: dict[int, int] = {}
    for g in range(G.order):
        if g in which:
            continue
        k = len(reps)
        reps.append(g)
        for s in subgroup:
            which[G.mul(s, g)] = k
    return reps, which


def assemble_cover(q: QuotientData) -> tuple[HalfEdgeGraph, GraphAction]:
    """Rebuild the cover and its action from subgroups and voltages.

    Vertices over ``v`` are the cosets ``X_v g`` and half-edges over ``h`` the
    cosets ``X_h g``; roots are induced by inclusion and the involution sends
    ``X_h g`` to ``X_{iota h} beta(h) g``. The group acts on cosets by right
    multiplication; the right-regular representation rides along as the
    auxiliary part so that the rebuilt action has exactly the group of ``q``.
    """
    check_voltage(q)
    G, g = q.group, q.graph
    vcos = [_cosets(G, s) for s in q.vertex_groups]
    hcos = [_cosets(G, s) for s in q.halfedge_groups]
    voff, hoff = [], []
    total = 0
    for reps, _ in vcos:
        voff.append(total)
        total += len(reps)
    nv = total
    total = 0
    for reps, _ in hcos:
        hoff.append(total)
        total += len(reps)
    nh = total

    def vid(v, x):
        return voff[v] + vcos[v][1][x]

    def hid(h, x):
        return hoff[h] + hcos[h][1][x]

    vlabels = [f"{g.vertices[v]}[{G.word(r)}]" for v, (reps, _) in enumerate(vcos) for r in reps]
    hlabels = [f"{g.halfedges[h]}[{G.word(r)}]" for h, (reps, _) in enumerate(hcos) for r in reps]
    root, inv = [0] * nh, [0] * nh
    for h, (reps, _) in enumerate(hcos):
        for k, r in enumerate(reps):
            root[hoff[h] + k] = vid(g.root[h], r)
            inv[hoff[h] + k] = hid(g.inv[h], G.mul(q.beta[h], r))
    cover = HalfEdgeGraph(tuple(vlabels), tuple(hlabels), tuple(root), tuple(inv))
    gens = []
    for name, s in zip(G.names, G.generator_indices()):
        vp = [0] * nv
        for v, (reps, _) in enumerate(vcos):
            for k, r in enumerate(reps):
                vp[voff[v] + k] = vid(v, G.mul(r, s))
        hp = [0] * nh
        for h, (reps, _) in enumerate(hcos):
            for k, r in enumerate(reps):
                hp[hoff[h] + k] = hid(h, G.mul(r, s))
        aux = tuple(G.mul(x, s) for x in range(G.order))
        gens.append(Generator(name, tuple(vp), tuple(hp), aux))
    action = GraphAction(cover, gens, cap=max(G.order, DEFAULT_CAP))
    if action.order != G.order:
        raise IncompatibleSubgroups("rebuilt action does not reproduce the group")
    return cover, action


def reconstruction_map(q: QuotientData) -> GraphMorphism:
    """Equivariant isomorphism from the source of ``q`` onto ``assemble_cover(q)``.

    Source vertex ``section(v) * g`` goes to the coset ``X_v g``. Raises
    :class:`NotAnAction` if the map fails to be a bijective, equivariant
    morphism.
    """
    if q.action is None or q.vertex_section is None:
        raise ValueError("quotient data does not remember its source action")
    a = q.action
    cover, cover_action = assemble_cover(q)
    G = q.group
    src = a.graph
    vcos = [_cosets(G, s)[1] for s in q.vertex_groups]
    hcos = [_cosets(G, s)[1] for s in q.halfedge_groups]
    voff = [0]
    for s in q.vertex_groups:
        voff.append(voff[-1] + G.order // len(s))
    hoff = [0]
    for s in q.halfedge_groups:
        hoff.append(hoff[-1] + G.order // len(s))
    vmap, hmap = [None] * src.n, [None] * len(src.halfedges)
    for v, sec in enumerate(q.vertex_section):
        for x in range(G.order):
            vmap[a.act_vertex(sec, x)] = voff[v] + vcos[v][x]
    for h, sec in enumerate(q.halfedge_section):
        for x in range(G.order):
            hmap[a.act_halfedge(sec, x)] = hoff[h] + hcos[h][x]
    if sorted(vmap) != list(range(cover.n)) or sorted(hmap) != list(range(len(cover.halfedges))):
        raise NotAnAction("reconstruction is not a bijection")
    try:
        morphism = GraphMorphism(src, cover, tuple(vmap), tuple(hmap))
    except Exception as exc:
        raise NotAnAction(f"reconstruction is not a morphism: {exc}") from None
    for x in range(G.order):
        for v in range(src.n):
            if vmap[a.act_vertex(v, x)] != cover_action.act_vertex(vmap[v], x):
                raise NotAnAction("reconstruction is not equivariant on vertices")
        for h in range(len(src.halfedges)):
            if hmap[a.act_halfedge(h, x)] != cover_action.act_halfedge(hmap[h], x):
                raise NotAnAction("reconstruction is not equivariant on half-edges")
    return morphism


def quotient_equivalent(q1: QuotientData, q2: QuotientData) -> bool:
    """Same graph up to labels, same subgroups, voltages equal up to left multiplication by the target group."""
    g1, g2 = q1.graph, q2.graph
    if (g1.n, g1.root, g1.inv) != (g2.n, g2.root, g2.inv) or q1.vertex_groups != q2.vertex_groups:
        return False
    if q1.halfedge_groups != q2.halfedge_groups or q1.group.order != q2.group.order:
        return False
    G = q1.group
    for h in range(len(q1.graph.halfedges)):
        target = q1.halfedge_groups[q1.graph.inv[h]]
        if G.right_coset(target, q1.beta[h]) != G.right_coset(target, q2.beta[h]):
            return False
    return True


def descend_action(sym: GraphAction, q: QuotientData) -> GraphAction:
    """Action induced on the quotient graph by automorphisms that normalize the group.

    Each generator of ``sym`` must map orbits to orbits; the induced
    permutations of quotient vertices and half-edges are returned as an
    action on ``q.graph``.
    """
    if q.projection is None:
        raise ValueError("quotient data has no projection")
    pv, ph = q.projection.vertex_map, q.projection.halfedge_map
    src = q.projection.source
    if sym.graph != src:
        raise NotAnAction("symmetry acts on a different graph")
    gens = []
    for gen in sym.generators:
        vp: dict[int, int] = {}
        hp: dict[int, int] = {}
        for v in range(src.n):
            if vp.setdefault(pv[v], pv[gen.vertex_perm[v]]) != pv[gen.vertex_perm[v]]:
                raise NotAnAction(f"symmetry {gen.name} does not normalize the group")
        for h in range(len(src.halfedges)):
            if hp.setdefault(ph[h], ph[gen.halfedge_perm[h]]) != ph[gen.halfedge_perm[h]]:
                raise NotAnAction(f"symmetry {gen.name} does not normalize the group")
        gens.append(Generator(gen.name, tuple(vp[i] for i in range(q.graph.n)),
                              tuple(hp[i] for i in range(len(q.graph.halfedges)))))
    return GraphAction(q.graph, gens, sym.cap)
