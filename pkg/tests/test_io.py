import random
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from chipgog.errors import InputError, NotAnAction, ParseError, UnknownVertex
from chipgog.fixtures import bundled_files, k4_action, k4_graph, petersen_action, petersen_graph
from chipgog.gog import GraphOfGroups
from chipgog.graph import GraphMorphism
from chipgog.group import quotient_graph_of_groups
from chipgog.io import (
    format_divisor,
    parse_action,
    parse_divisor,
    parse_graph,
    parse_morphism,
    read_graph,
    write_action,
    write_graph,
    write_morphism,
    write_quotient,
)

from randomgen import random_cover, random_weighted_graph

DATA = Path(__file__).parent.parent / "src" / "chipgog" / "data"


def test_bundled_files_are_current():
    files = bundled_files()
    assert sorted(p.name for p in DATA.iterdir()) == sorted(files)
    for name, text in files.items():
        assert (DATA / name).read_text() == text, name


def test_parse_minimal():
    x = parse_graph("# a leg\nV a\nH h a\nL h\n")
    assert x.graph.n == 1 and x.graph.legs == (0,)
    x = parse_graph("V a\nV b\nH p a\nH q b\nE p q\nW a 2\nW b 4\nWH p 2\nWH q 2\n")
    assert x.cv == (2, 4) and x.ch == (2, 2)
    with pytest.raises(InputError):
        parse_graph("V a\nV b\nH p a\nH q b\nE p q\nWH p 2\nWH q 2\n")


@pytest.mark.parametrize("text, line", [
    ("V a\nV a\n", 2),
    ("V a\nH h b\n", 2),
    ("V a\nH h a\nE h h\n", 3),
    ("V a\nH h a\nL h\nL h\n", 4),
    ("V a\nX foo\n", 2),
    ("V a\nH h a\nL h\nW a zero\n", 4),
    ("V a\nH h a\nL h\nW a 0\n", 4),
    ("V a\nH h a\nL h\nW b 2\n", 4),
    ("V a\nGEN s\n", 2),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_graph(text, path="g.graph")
    assert exc.value.line == line
    assert f"g.graph:{line}:" in str(exc.value)


def test_unpaired_halfedge():
    with pytest.raises(ParseError, match="not declared"):
        parse_graph("V a\nH h a\n")


def test_weights_file():
    x = parse_graph(write_graph(k4_graph()), weights_text="W a 2\n")
    assert x.cv == (2, 1, 1, 1)
    with pytest.raises(ParseError):
        parse_graph(write_graph(k4_graph()), weights_text="V z\n")


@given(st.integers(0, 10**6))
def test_graph_round_trip(seed):
    x = random_weighted_graph(random.Random(seed))
    text = write_graph(x)
    y = parse_graph(text)
    assert y == x
    assert write_graph(y) == text


def test_read_missing_file(tmp_path):
    with pytest.raises(InputError):
        read_graph(tmp_path / "missing.graph")


def test_action_round_trip():
    a = petersen_action(["(ab)", "(abc)"])
    text = write_action(a)
    b = parse_action(text, a.graph)
    assert b.order == 6
    assert [g.halfedge_perm for g in b.generators] == [g.halfedge_perm for g in a.generators]


def test_action_auto_halfedges():
    g = k4_graph()
    a = parse_action("GEN s\nPV (a b)\n", g)
    b = parse_action("GEN s\nPV (a b)\nPH auto\n", g)
    assert a.generators[0].halfedge_perm == b.generators[0].halfedge_perm == k4_action(["(ab)"]).generators[0].halfedge_perm


@given(st.integers(0, 10**6))
def test_action_round_trip_with_aux(seed):
    a = random_cover(random.Random(seed))
    b = parse_action(write_action(a), a.graph)
    assert b.order == a.order
    assert [g.aux_perm for g in b.generators] == [g.aux_perm for g in a.generators]


def test_action_errors():
    g = k4_graph()
    with pytest.raises(ParseError):
        parse_action("PV (a b)\n", g)
    with pytest.raises(ParseError):
        parse_action("GEN s\nPV (a z)\n", g)
    with pytest.raises(ParseError):
        parse_action("GEN s\nGEN s\n", g)
    with pytest.raises(NotAnAction):
        parse_action("GEN s\nPV (a b)\nPH (a:b b:a)\n", g)


def test_morphism_round_trip():
    a = k4_action(["(ab)"])
    q = quotient_graph_of_groups(a)
    m = q.projection
    text = write_morphism(m)
    m2 = parse_morphism(text, m.source, m.target)
    assert m2.vertex_map == m.vertex_map and m2.halfedge_map == m.halfedge_map
    with pytest.raises(ParseError):
        parse_morphism("MV a zz\n", m.source, m.target)


def test_quotient_output_deterministic():
    texts = {write_quotient(quotient_graph_of_groups(petersen_action(["(ab)", "(abc)"]))) for _ in range(3)}
    assert len(texts) == 1
    text = texts.pop()
    assert "B " in text
    x = parse_graph(text)
    assert sorted(x.cv) == [2, 2, 2, 6]


def test_trivial_quotient_reproduces_graph():
    from chipgog.group import GraphAction

    q = quotient_graph_of_groups(GraphAction(k4_graph(), []))
    x = parse_graph(write_quotient(q))
    assert x == GraphOfGroups.trivial(k4_graph())


def test_divisors():
    g = k4_graph()
    assert parse_divisor("a=1, d=-1", g) == (1, 0, 0, -1)
    assert parse_divisor("a:2 a:1", g) == (3, 0, 0, 0)
    assert format_divisor(g, (1, 0, 0, -1)) == "1*a - 1*d"
    assert format_divisor(g, (0, 0, 0, 0)) == "0"
    with pytest.raises(UnknownVertex):
        parse_divisor("z=1", g)
    with pytest.raises(InputError):
        parse_divisor("a", g)
