import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvn_rigidity.freegroup import Word, cyclic_reduce
from cvn_rigidity.graph import (
    Graph,
    GraphError,
    GraphMap,
    collapse_word,
    diameter,
    extend_to_cross,
    is_connected,
    primitive_loop_crossing,
    spanning_tree,
    tree_geodesic,
    validate,
)


def test_edge_involution(barbell_graph):
    g = barbell_graph
    for e in range(g.n_edges):
        assert g.inv(g.inv(e)) == e
        assert g.o(g.inv(e)) == g.t(e)
    assert g.rank() == 2


def test_path_parsing_roundtrip(barbell_graph):
    g = barbell_graph
    p = g.parse_path("e y e-")
    assert p == (4, 2, 5)
    assert g.format_path(p) == "e y e-"
    with pytest.raises(ValueError):
        g.parse_path("q")


def test_chain_check(barbell_graph):
    g = barbell_graph
    with pytest.raises(GraphError):
        g.check_chain(g.parse_path("x y"))


def test_cyclic_reduction_of_conjugated_loop(barbell_graph):
    g = barbell_graph
    assert g.cyclic_reduce(g.parse_path("e y e-")).edges == g.parse_path("y")
    loop = g.cyclic_reduce(g.parse_path("e y e- x"))
    assert len(loop) == 4


def test_validate_reports_isolated_vertex():
    g = Graph.from_edges(3, [(0, 0), (1, 1), (0, 1)], ["x", "y", "e"])
    rep = validate(g)
    assert not rep.ok
    assert rep.valences == (3, 3, 0)


def test_spanning_tree_and_geodesic(barbell_graph):
    g = barbell_graph
    T = spanning_tree(g)
    assert T.edges == frozenset({4})
    assert tree_geodesic(T, 0, 1).edges == (4,)
    assert diameter(g) == 1
    assert is_connected(g)


def test_collapse_word_generators_are_non_tree_edges(barbell_graph):
    g = barbell_graph
    T = spanning_tree(g)
    assert collapse_word(T, g.parse_path("x")) == Word.parse("a")
    assert collapse_word(T, g.parse_path("e y e-")) == Word.parse("b")


def test_graph_map_identity_and_reduction(barbell_graph):
    g = barbell_graph
    ident = GraphMap(g, g, [(0,), (2,), (4,)])
    assert ident.apply_reduced(g.parse_path("e y e-")) == (4, 2, 5)
    fold = GraphMap(g, g, [(0,), (2,), (4, 2, 5, 4)])
    assert fold.apply_reduced(g.parse_path("e e-")) == ()


def test_graph_map_rejects_broken_image(barbell_graph):
    g = barbell_graph
    with pytest.raises(GraphError):
        GraphMap(g, g, [(2,), (2,), (4,)], [0, 1])


# -- constructions ------------------------------------------------------------

def test_primitive_loop_nonseparating_case():
    r = Graph.rose(2, ["x", "y"])
    L = primitive_loop_crossing(r, {0}, 0, 3)
    assert L.case == "non-separating"
    assert r.crossings(L.loop.edges)[0] == 3
    assert r.format_path(L.loop.edges) == "x x x y"
    # a generator crossed once makes the word a transvection image of a basis letter
    assert L.basis is not None and L.basis.is_certified()
    assert Word.parse("a a a b") in L.basis.images


def test_primitive_loop_two_rank_one_sides(barbell_graph):
    g = barbell_graph
    L = primitive_loop_crossing(g, {4}, 4, 2)
    assert L.case == "separating, two rank-1 sides"
    assert g.crossings(L.loop.edges)[2] >= 2
    assert L.nielsen is not None and L.nielsen.is_certified()
    # the loop spells a Nielsen image of a basis letter, so it is primitive
    w = cyclic_reduce(collapse_word(L.tree, L.loop.edges))
    assert w == cyclic_reduce(L.nielsen_word)
    assert L.nielsen_word in L.nielsen.images


def test_primitive_loop_large_side():
    # rank-2 rose at v0 joined by e to a loop z at v1
    g = Graph.from_edges(2, [(0, 0), (0, 0), (1, 1), (0, 1)], ["x", "y", "z", "e"])
    L = primitive_loop_crossing(g, {6}, 6, 4)
    assert L.case.startswith("separating, rank>=2 side")
    assert g.crossings(L.loop.edges)[3] >= 4


@given(st.integers(1, 8))
def test_primitive_loop_crossing_count_meets_request(M):
    r = Graph.rose(3, ["x", "y", "z"])
    L = primitive_loop_crossing(r, {2}, 2, M)
    assert r.crossings(L.loop.edges)[1] >= M
    assert L.crossings == r.crossings(L.loop.edges)[1]


def test_primitive_loop_rejects_edge_outside_h(barbell_graph):
    with pytest.raises(GraphError):
        primitive_loop_crossing(barbell_graph, {4}, 0, 2)


def test_extend_to_cross_barbell(barbell_graph):
    g = barbell_graph
    X = extend_to_cross(g, {4, 2}, g.parse_path("x"))
    assert g.format_path(X.eta) == "e y e-"
    assert g.format_path(X.reduced.edges) in {"x e y e-", "e y e- x"}
    assert X.all_h_survive
    assert X.h_in_eta == 3
    assert X.within_bound


def test_extend_to_cross_requires_loop_off_h(barbell_graph):
    g = barbell_graph
    with pytest.raises(GraphError):
        extend_to_cross(g, {4}, g.parse_path("e y e-"))
