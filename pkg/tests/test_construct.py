from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from conftest import load
from kgraph.classify import Exact, Infinite, stable_rank
from kgraph.core import Ambiguous, ValidationError, validate
from kgraph.construct import (
    IncompatibleDimensions,
    MonoidMorphism,
    TooLarge,
    coordinate_graph,
    cycle_graph,
    flower,
    product,
    pullback,
)
from kgraph.cycles import initial_cycle_classes

NONCOF_SQUARES = [(("c1_1", "c2_1"), ("c2_1", "c1_1")), (("c1_2", "c2_1"), ("c2_1", "c1_2"))]


def _shape(rep):
    return str(rep.structure), rep.stable_rank


@pytest.mark.parametrize("n", [1, 2, 3, 6, 11])
def test_cycle_graph_has_one_class_of_full_size(n):
    g = cycle_graph(n)
    assert len(g.vertices) == len(g.edges) == n
    (cls,) = initial_cycle_classes(g)
    assert len(cls.vertices) == n and cls.rank == 1


def test_cycle_graph_reports():
    assert _shape(stable_rank(cycle_graph(1))) == ("C(T)", Exact(1))
    assert _shape(stable_rank(cycle_graph(6))) == ("M_6(C(T))", Exact(1))
    with pytest.raises(ValueError):
        cycle_graph(0)


def test_product_of_cycle_graphs():
    g = product(cycle_graph(6), cycle_graph(1))
    assert g.k == 2 and len(g.vertices) == 6 and len(g.edges) == 12
    assert "(v0,v0)" in g.vertices and "(f0,v0)" in g.edges
    assert _shape(stable_rank(g)) == ("M_6(C(T^2))", Exact(2))


def test_product_of_single_loops():
    g = product(flower([1]), flower([1]))
    assert len(g.vertices) == 1
    assert _shape(stable_rank(g)) == ("C(T^2)", Exact(2))


@pytest.mark.parametrize("matrix", [((1, 1),), ((1, 5),), ((1, 2),)])
def test_pullbacks_of_cycle_graph(matrix):
    g = pullback(MonoidMorphism(matrix), cycle_graph(6))
    assert g.k == 2 and len(g.vertices) == 6
    assert _shape(stable_rank(g)) == ("M_6(C(T^2))", Exact(2))


def test_pullback_edge_ids():
    g = pullback(MonoidMorphism(((1, 2),)), cycle_graph(6))
    assert "f0@1" in g.edges and "f0.f1@2" in g.edges


@pytest.mark.parametrize("build", [lambda: cycle_graph(6), lambda: load("pic2"), lambda: load("pic15_left")])
def test_identity_pullback_keeps_report(build):
    g = build()
    ident = MonoidMorphism(tuple(tuple(int(i == j) for j in range(g.k)) for i in range(g.k)))
    h = pullback(ident, g)
    assert len(h.vertices) == len(g.vertices) and len(h.edges) == len(g.edges)
    assert stable_rank(h) == stable_rank(g)


def test_pullback_errors():
    with pytest.raises(IncompatibleDimensions):
        pullback(MonoidMorphism(((1, 0), (0, 1))), cycle_graph(6))
    with pytest.raises(IncompatibleDimensions):
        MonoidMorphism(((1, -1),))
    with pytest.raises(IncompatibleDimensions):
        MonoidMorphism(((1,), (1, 2)))
    with pytest.raises(TooLarge):
        pullback(MonoidMorphism(((10,),)), flower([3]), size_cap=1000)


def test_monoid_morphism_surjectivity():
    assert MonoidMorphism(((1, 1),)).surjective
    assert not MonoidMorphism(((2, 3),)).surjective
    assert MonoidMorphism(((1, 0, 1), (0, 1, 1))).surjective
    assert not MonoidMorphism(((1, 1), (0, 1))).surjective


def test_coordinate_graphs():
    g = coordinate_graph(product(cycle_graph(6), cycle_graph(1)), 1)
    assert g.k == 1 and len(g.vertices) == 6 and len(g.edges) == 6
    assert _shape(stable_rank(g)) == ("M_6(C(T))", Exact(1))
    l6 = cycle_graph(6)
    assert coordinate_graph(l6, 1).skeleton == l6.skeleton
    red = coordinate_graph(load("pic2"), 2)
    pic2 = load("pic2")
    assert len(red.vertices) == 3
    assert set(red.edges) == {e for e, x in pic2.edges.items() if x.color == 2}


def test_coordinate_graph_rejects_bad_colour():
    with pytest.raises(ValidationError) as err:
        coordinate_graph(load("pic2"), 3)
    assert err.value.kind == "BadColor"


def test_flowers():
    assert _shape(stable_rank(flower([1, 1, 1, 1]))) == ("C(T^4)", Exact(3))
    assert _shape(stable_rank(flower([1]))) == ("C(T)", Exact(1))
    noncof = flower([2, 1], squares=NONCOF_SQUARES)
    rep = stable_rank(noncof)
    assert rep.stable_rank == Infinite() and rep.properly_infinite
    with pytest.raises(Ambiguous):
        flower([2, 1])


def test_flower_matches_noncof_fixture():
    g = flower([2, 1], squares=NONCOF_SQUARES)
    fixture = load("noncof")
    assert len(g.edges) == len(fixture.edges)
    assert stable_rank(g).stable_rank == stable_rank(fixture).stable_rank


small_graphs = st.sampled_from([1, 2, 3, 4]).map(cycle_graph) | st.sampled_from(
    [[1], [2], [1, 1], [1, 1, 1], [0, 1]]).map(flower)


@settings(max_examples=60, deadline=None)
@given(small_graphs, small_graphs, st.lists(st.integers(0, 2), min_size=2, max_size=2))
def test_constructors_produce_valid_graphs(g1, g2, row):
    p = product(g1, g2)
    assert validate(p.skeleton).skeleton == p.skeleton
    for i in range(1, p.k + 1):
        c = coordinate_graph(p, i)
        assert validate(c.skeleton).k == 1
    if g1.k == 1 and any(row):
        q = pullback(MonoidMorphism((tuple(row),)), g1)
        assert validate(q.skeleton).k == 2


def test_product_is_associative_on_reports():
    a, b, c = cycle_graph(2), flower([1]), cycle_graph(3)
    left = stable_rank(product(product(a, b), c))
    right = stable_rank(product(a, product(b, c)))
    assert _shape(left) == _shape(right) == ("M_6(C(T^3))", Exact(2))
