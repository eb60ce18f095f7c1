from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import load
from kgraph.core import (
    Ambiguous,
    Edge,
    FormatError,
    Skeleton,
    Square,
    ValidationError,
    export_dot,
    infer_squares,
    matmul,
    parse_skeleton,
    serialize_skeleton,
    validate,
)
from kgraph.construct import cycle_graph, flower, product, pullback, MonoidMorphism

FIXTURE_NAMES = ["pic2", "pic15_left", "pic15_right", "noncof", "special_left",
                 "table1", "table2", "table3", "table4", "table5", "table6"]


def _doc(k, vertices, edges, squares=()):
    return json.dumps({
        "k": k,
        "vertices": vertices,
        "edges": [dict(id=i, color=c, range=r, source=s) for i, c, r, s in edges],
        "squares": [dict(first=list(a), second=list(b)) for a, b in squares],
    })


def test_parse_cycle_graph_document():
    doc = _doc(1, [f"v{i}" for i in range(6)], [(f"f{i}", 1, f"v{i}", f"v{(i + 1) % 6}") for i in range(6)])
    s = parse_skeleton(doc)
    assert (s.k, len(s.vertices), len(s.edges)) == (1, 6, 6)


def test_isolated_vertex_with_two_colours():
    g = validate(parse_skeleton(_doc(2, ["v"], [])))
    assert g.adjacency(1) == [[0]]
    assert g.adjacency(2) == [[0]]


def test_dangling_edge_reference():
    doc = _doc(2, ["v"], [("a", 1, "v", "v"), ("e", 2, "v", "v")], [(("a", "e"), ("e", "x"))])
    with pytest.raises(ValidationError) as err:
        parse_skeleton(doc)
    assert err.value.kind == "DanglingReference"


def test_dangling_vertex_reference():
    with pytest.raises(ValidationError) as err:
        parse_skeleton(_doc(1, ["v"], [("a", 1, "v", "w")]))
    assert err.value.kind == "DanglingReference"


def test_bad_colour():
    with pytest.raises(ValidationError) as err:
        parse_skeleton(_doc(1, ["v"], [("a", 2, "v", "v")]))
    assert err.value.kind == "BadColor"


def test_syntax_error_has_position():
    with pytest.raises(FormatError) as err:
        parse_skeleton('{"k": 1,\n  "vertices": [}')
    assert err.value.line == 2


@pytest.mark.parametrize("doc", [
    '[]',
    '{"k": 0, "vertices": ["v"], "edges": []}',
    '{"k": 1, "vertices": [], "edges": []}',
    '{"k": 1, "vertices": ["v", "v"], "edges": []}',
    '{"k": 1, "vertices": ["v"]}',
])
def test_schema_errors(doc):
    with pytest.raises(FormatError):
        parse_skeleton(doc)


def test_missing_completion_is_non_bijective():
    # blue a and red e both run from w to v; the blue loop at w gives a (1,2) corner a.? with no partner
    s = Skeleton(2, ("v", "w"), (Edge("a", 1, "v", "w"), Edge("e", 2, "v", "w"), Edge("b", 1, "w", "w")), ())
    with pytest.raises(ValidationError) as err:
        validate(s)
    assert err.value.kind == "NonBijectiveSwap"


def test_missing_square():
    s = Skeleton(2, ("v",), (Edge("a", 1, "v", "v"), Edge("e", 2, "v", "v")), ())
    with pytest.raises(ValidationError) as err:
        validate(s)
    assert err.value.kind == "MissingSquare"


def test_duplicate_square():
    q = Square(("a", "e"), ("e", "a"))
    s = Skeleton(2, ("v",), (Edge("a", 1, "v", "v"), Edge("e", 2, "v", "v")), (q, q))
    with pytest.raises(ValidationError) as err:
        validate(s)
    assert err.value.kind == "DuplicateSquare"


def test_square_with_wrong_colours():
    s = Skeleton(2, ("v",), (Edge("a", 1, "v", "v"), Edge("e", 2, "v", "v")), (Square(("e", "a"), ("a", "e")),))
    with pytest.raises(ValidationError) as err:
        validate(s)
    assert err.value.kind == "BadColor"


def test_not_locally_convex():
    # blue and red edges share the range v but the blue source w has no red edge
    s = Skeleton(2, ("v", "w", "u"), (Edge("a", 1, "v", "w"), Edge("e", 2, "v", "u")), ())
    with pytest.raises(ValidationError) as err:
        validate(s)
    assert err.value.kind == "NotLocallyConvex"


def test_hexagon_holds_on_commuting_flower():
    g = flower([1, 1, 1])
    assert len(g.skeleton.squares) == 3


def test_hexagon_failure():
    edges = (Edge("a0", 1, "v", "v"), Edge("a1", 1, "v", "v"), Edge("b0", 2, "v", "v"),
             Edge("b1", 2, "v", "v"), Edge("c", 3, "v", "v"))
    squares = (
        Square(("a0", "b0"), ("b0", "a0")), Square(("a0", "b1"), ("b0", "a1")),
        Square(("a1", "b0"), ("b1", "a0")), Square(("a1", "b1"), ("b1", "a1")),
        Square(("a0", "c"), ("c", "a0")), Square(("a1", "c"), ("c", "a1")),
        Square(("b0", "c"), ("c", "b1")), Square(("b1", "c"), ("c", "b0")),
    )
    with pytest.raises(ValidationError) as err:
        validate(Skeleton(3, ("v",), edges, squares))
    assert err.value.kind == "HexagonFailure"
    # with the colour-2/3 swap untwisted the two routes agree
    fixed = squares[:6] + (Square(("b0", "c"), ("c", "b0")), Square(("b1", "c"), ("c", "b1")))
    validate(Skeleton(3, ("v",), edges, fixed))


def test_infer_squares_ambiguous_on_two_blue_one_red():
    s = Skeleton(2, ("v",), (Edge("a", 1, "v", "v"), Edge("b", 1, "v", "v"), Edge("e", 2, "v", "v")), ())
    with pytest.raises(Ambiguous) as err:
        infer_squares(s)
    assert len(err.value.candidates) == 2


def test_infer_squares_without_corners_is_identity():
    s = cycle_graph(3).skeleton
    assert infer_squares(s) == s


def test_infer_squares_completes_pullback_shape():
    g = pullback(MonoidMorphism(((1, 1),)), cycle_graph(6))
    bare = Skeleton(g.k, g.skeleton.vertices, g.skeleton.edges, ())
    again = validate(infer_squares(bare))
    assert set(again.skeleton.squares) == set(g.skeleton.squares)


def test_cycle_graph_adjacency_is_cyclic_permutation():
    a = cycle_graph(6).adjacency(1)
    assert a == [[int(j == (i + 1) % 6) for j in range(6)] for i in range(6)]


def test_adjacency_bad_colour():
    with pytest.raises(ValidationError):
        cycle_graph(2).adjacency(2)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_matrices_commute(name):
    g = load(name)
    for i in range(1, g.k + 1):
        for j in range(i + 1, g.k + 1):
            assert matmul(g.adjacency(i), g.adjacency(j)) == matmul(g.adjacency(j), g.adjacency(i))


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_every_bicoloured_path_in_exactly_one_square(name):
    g = load(name)
    s = g.skeleton
    seen = {}
    for q in s.squares:
        for p in (q.first, q.second):
            seen[p] = seen.get(p, 0) + 1
    edges = s.edge_map()
    for x in s.edges:
        for y in s.edges:
            if x.source == y.range and x.color != y.color:
                assert seen.get((x.id, y.id)) == 1
    assert all(edges[a].source == edges[b].range for a, b in seen)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_round_trip(name):
    g = load(name)
    text = serialize_skeleton(g.skeleton)
    assert parse_skeleton(text) == g.skeleton
    assert serialize_skeleton(parse_skeleton(text)) == text


def test_serializer_layout():
    text = serialize_skeleton(cycle_graph(1).skeleton)
    assert text.endswith("}\n")
    assert list(json.loads(text)) == ["k", "vertices", "edges", "squares"]
    assert '\n  "k": 1' in text


ids = st.text(alphabet="abcxyz019_", min_size=1, max_size=4)


@st.composite
def one_graph_skeletons(draw):
    verts = draw(st.lists(ids, min_size=1, max_size=5, unique=True))
    n_edges = draw(st.integers(0, 6))
    eids = draw(st.lists(ids, min_size=n_edges, max_size=n_edges, unique=True))
    edges = tuple(Edge("e" + e, 1, draw(st.sampled_from(verts)), draw(st.sampled_from(verts))) for e in eids)
    return Skeleton(1, tuple(verts), edges, ())


@settings(max_examples=60, deadline=None)
@given(one_graph_skeletons(), one_graph_skeletons())
def test_round_trip_property(s1, s2):
    for s in (s1, validate(s1).skeleton, product(validate(s1), validate(s2)).skeleton):
        assert parse_skeleton(serialize_skeleton(s)) == s


def test_dot_export():
    dot = export_dot(load("pic2").skeleton)
    assert dot.startswith("digraph")
    assert '"v0" -> "v" [label="g0", color="/set19/1"];' in dot
    assert "//" in dot
