import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chipgog import lattice
from chipgog.errors import DisconnectedGraph, InvalidGraph, NotAMorphism, NotHarmonic, UnknownVertex
from chipgog.fixtures import k4_graph, path3_graph, petersen_graph
from chipgog.graph import (
    GraphMorphism,
    HalfEdgeGraph,
    check_harmonic,
    count_spanning_trees,
    enumerate_spanning_trees,
    graph_laplacian,
    harmonic_pullback,
    harmonic_pushforward,
    root_matrices,
    valency_adjacency,
    validate_graph,
)

from oracles import brute_force_trees, laplacian_by_summation
from randomgen import random_graph

seeds = st.integers(0, 10**6)


def cycle(n, prefix="v"):
    names = [f"{prefix}{i}" for i in range(n)]
    return HalfEdgeGraph.from_edges(names, [(names[i], names[(i + 1) % n]) for i in range(n)])


def test_validate_small_cases():
    r = validate_graph(HalfEdgeGraph.from_edges("ab", [("a", "b")]))
    assert r.valid and (r.n_edges, r.n_legs) == (1, 0)
    r = validate_graph(HalfEdgeGraph.from_edges("a", [], legs=["a"]))
    assert r.valid and r.n_legs == 1 and r.n_edges == 0
    r = validate_graph(k4_graph())
    assert r.valid and (r.n_vertices, r.n_edges) == (4, 6) and r.connected


def test_validate_reports_defects_without_raising():
    class Raw:
        vertices = ("a", "b")
        halfedges = ("x", "y", "z")
        root = (0, 1, 5)
        inv = (1, 2, 0)

    r = validate_graph(Raw())
    assert not r.valid and r.defects


def test_invalid_construction():
    with pytest.raises(InvalidGraph):
        HalfEdgeGraph(("a",), ("x", "y"), (0, 0), (1, 1))
    with pytest.raises(UnknownVertex):
        k4_graph().vertex("z")


def test_disconnected_components():
    g = HalfEdgeGraph.from_edges("abcd", [("a", "b"), ("c", "d")])
    r = validate_graph(g)
    assert not r.connected and r.components == (("a", "b"), ("c", "d"))
    with pytest.raises(DisconnectedGraph):
        enumerate_spanning_trees(g)


def test_laplacian_examples():
    L = graph_laplacian(k4_graph())
    assert (L == 4 * lattice.identity(4) - np.ones((4, 4), dtype=object)).all()
    loop = HalfEdgeGraph.from_edges("a", [("a", "a")])
    assert lattice.to_lists(graph_laplacian(loop)) == [[0]]
    assert lattice.to_lists(graph_laplacian(path3_graph())) == [[1, -1, 0], [-1, 2, -1], [0, -1, 1]]


@given(seeds)
def test_laplacian_identities(seed):
    g = random_graph(random.Random(seed))
    L = graph_laplacian(g)
    assert lattice.to_lists(L) == laplacian_by_summation(g)
    Q, A = valency_adjacency(g)
    S, T = root_matrices(g)
    assert (L == Q - A).all()
    assert (L == (S - T) @ (S - T).T).all()
    # legs enter Q and A equally, but have no column in S and T
    Q0, A0 = valency_adjacency(g.without_legs())
    assert (Q0 == S @ S.T + T @ T.T).all()
    assert (A0 == S @ T.T + T @ S.T).all()
    assert (sum(L[i, :] for i in range(g.n)) == 0).all()
    assert (graph_laplacian(g.without_legs_and_loops()) == L).all()


@given(seeds)
def test_laplacian_any_orientation(seed):
    rng = random.Random(seed)
    g = random_graph(rng)
    S, T = root_matrices(g)
    flip = [rng.random() < 0.5 for _ in g.edges]
    S2 = np.array([[T[v, k] if flip[k] else S[v, k] for k in range(len(g.edges))] for v in range(g.n)], dtype=object)
    T2 = np.array([[S[v, k] if flip[k] else T[v, k] for k in range(len(g.edges))] for v in range(g.n)], dtype=object)
    if g.edges:
        assert ((S2 - T2) @ (S2 - T2).T == graph_laplacian(g)).all()


def test_spanning_tree_counts():
    assert len(enumerate_spanning_trees(k4_graph())) == 16
    assert len(enumerate_spanning_trees(petersen_graph())) == 2000
    assert enumerate_spanning_trees(path3_graph()) == [frozenset({0, 1})]


@given(seeds)
def test_spanning_trees_match_brute_force(seed):
    g = random_graph(random.Random(seed), max_vertices=6, max_edges=9)
    trees = enumerate_spanning_trees(g)
    assert len(set(trees)) == len(trees)
    assert set(trees) == brute_force_trees(g)
    assert len(trees) == count_spanning_trees(g)
    L = graph_laplacian(g)
    group, free = lattice.cokernel(L[: g.n - 1, : g.n - 1] if g.n > 1 else lattice.zeros(0, 0), g.n - 1)
    assert group.order == len(trees) and free == 0


def _double_cover_of_two_cycle():
    big = cycle(4, "x")
    small = HalfEdgeGraph.from_edges("ab", [("a", "b"), ("a", "b")])
    vm = {"x0": "a", "x1": "b", "x2": "a", "x3": "b"}
    hm = {}
    for h, label in enumerate(big.halfedges):
        u, v = label.split(":")
        i, j = int(u[1]), int(v[1])
        edge = 0 if {i, j} in ({0, 1}, {2, 3}) else 1
        hm[label] = [s for s in small.halfedges if s.startswith(f"{vm[u]}:{vm[v]}")][edge]
    return GraphMorphism.from_labels(big, small, vm, hm)


def test_harmonic_identity():
    m = GraphMorphism.identity(k4_graph())
    rep = check_harmonic(m)
    assert set(rep.local_degrees) == {1} and rep.global_degree == 1
    D = k4_graph().unit_divisor("a")
    assert harmonic_pullback(m, D) == D


def test_harmonic_double_cover():
    m = _double_cover_of_two_cycle()
    rep = check_harmonic(m)
    assert set(rep.local_degrees) == {1} and rep.global_degree == 2
    a = m.target.unit_divisor("a")
    assert harmonic_pushforward(m, harmonic_pullback(m, a)) == tuple(2 * x for x in a)
    D = m.source.divisor({"x0": 1, "x2": -1})
    assert harmonic_pushforward(m, D) == (0, 0)


def test_fold_onto_leg():
    src = HalfEdgeGraph.from_edges("ab", [("a", "b")])
    tgt = HalfEdgeGraph.from_edges("v", [], legs=["v"])
    m = GraphMorphism.from_labels(src, tgt, {"a": "v", "b": "v"}, {"a:b": "v:", "b:a": "v:"})
    rep = check_harmonic(m)
    assert rep.local_degrees == (1, 1) and rep.global_degree == 2


def test_not_harmonic_witness():
    src = HalfEdgeGraph.from_edges("abc", [("a", "b"), ("a", "c")])
    tgt = HalfEdgeGraph.from_edges("uv", [("u", "v"), ("u", "v")])
    m = GraphMorphism.from_labels(
        src, tgt, {"a": "u", "b": "v", "c": "v"},
        {"a:b": "u:v", "b:a": "v:u", "a:c": "u:v", "c:a": "v:u"})
    with pytest.raises(NotHarmonic) as exc:
        check_harmonic(m)
    assert exc.value.witness is not None


def test_not_a_morphism():
    src = HalfEdgeGraph.from_edges("ab", [("a", "b")])
    with pytest.raises(NotAMorphism):
        GraphMorphism.from_labels(src, src, {"a": "a", "b": "b"}, {"a:b": "b:a", "b:a": "a:b"})
