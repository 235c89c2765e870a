import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perco_iso.errors import BudgetExceeded, OracleError, PaddingError, ParseError
from perco_iso.families import make_family
from perco_iso.graph import (GraphOracle, Window, ball, diameter, edge, enumerate_connected_sets,
                             is_connected, parse_window, path_distance, resolve_vertex)

from oracles import naive_connected_sets

Z2 = make_family("zd:2")


def test_edge_is_normalised():
    assert edge((1, 0), (0, 0)) == ((0, 0), (1, 0))
    with pytest.raises(ValueError):
        edge((0, 0), (0, 0))


def test_ball_radius_zero():
    w = ball(Z2, (0, 0), 0)
    assert len(w.vertices) == 1 and not w.edges and w.rim == {(0, 0)}


def test_ball_radius_one_star():
    w = ball(Z2, (0, 0), 1)
    assert (len(w.vertices), len(w.edges)) == (5, 4)


def test_tree_ball_radius_two():
    w = ball(make_family("tree:3"), (), 2)
    assert (len(w.vertices), len(w.edges)) == (10, 9)


@pytest.mark.parametrize("r", range(0, 5))
def test_ball_monotone_and_rim_on_sphere(r):
    inner, outer = ball(Z2, (0, 0), r), ball(Z2, (0, 0), r + 1)
    assert inner.vertex_set <= outer.vertex_set
    assert all(abs(a) + abs(b) == r for a, b in inner.rim)


def test_window_edges_are_all_induced_edges():
    w = ball(Z2, (0, 0), 3)
    expected = {edge(v, u) for v in w.vertices for u in Z2.neighbors(v) if u in w}
    assert set(w.edges) == expected


def test_disconnected_window_rejected():
    with pytest.raises(ValueError):
        Window(Z2, [(0, 0), (2, 0)])


def test_path_distance_examples():
    assert path_distance(Z2, (0, 0), (3, 4), cap=10) == 7
    assert path_distance(Z2, (0, 0), (0, 0), cap=0) == 0
    assert path_distance(Z2, (0, 0), (3, 4), cap=6) is None
    assert path_distance(make_family("wedge:ln"), (0, 0), (5, 1), cap=10) == 6


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6))
@settings(max_examples=40, deadline=None)
def test_path_distance_is_l1_on_z2(a, b, c, d):
    assert path_distance(Z2, (a, b), (c, d), cap=30) == abs(a - c) + abs(b - d)


def test_enumeration_small_counts():
    w = ball(Z2, (0, 0), 5)
    assert sum(1 for _ in enumerate_connected_sets(w, (0, 0), 1)) == 1
    assert sum(1 for _ in enumerate_connected_sets(w, (0, 0), 2)) == 5
    sizes = [len(W) for W in enumerate_connected_sets(w, (0, 0), 3)]
    assert sizes.count(3) == 18


@pytest.mark.parametrize("family,radius", [("zd:2", 2), ("tree:3", 2), ("wedge:ln", 4), ("line", 6)])
def test_enumeration_matches_powerset(family, radius):
    o = make_family(family)
    w = ball(o, o.root, radius)
    assert len(w.vertices) <= 16
    got = list(enumerate_connected_sets(w, o.root, len(w.vertices)))
    assert len(got) == len(set(got))
    assert set(got) == naive_connected_sets(w, o.root)


def test_unanchored_enumeration_matches_powerset():
    w = ball(make_family("wedge:ln"), (0, 0), 4)
    got = list(enumerate_connected_sets(w, None, 5))
    assert len(got) == len(set(got))
    assert set(got) == naive_connected_sets(w, None, 5)


def test_enumeration_budget_reports_partial_count():
    w = ball(Z2, (0, 0), 6)
    with pytest.raises(BudgetExceeded) as info:
        for _ in enumerate_connected_sets(w, (0, 0), 8, budget=100):
            pass
    assert info.value.partial_count == 100


def test_connectivity_and_diameter():
    w = ball(Z2, (0, 0), 6)
    assert is_connected(w, {(0, 0)}) and diameter(w, {(0, 0)}) == 0
    assert not is_connected(w, {(0, 0), (1, 1)})
    assert diameter(w, {(0, 0), (1, 1)}) == 2
    sq = {(0, 0), (1, 0), (0, 1), (1, 1)}
    assert is_connected(w, sq) and diameter(w, sq) == 2


def test_diameter_padding_error():
    # a U-shaped window: the true geodesic (0,0)-(0,1)-(0,2) leaves it
    w = Window(make_family("zd:2"), [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2)])
    with pytest.raises(PaddingError):
        diameter(w, {(0, 0), (0, 2)})


def test_oracle_faults_are_wrapped():
    def bad(v):
        raise RuntimeError("boom")

    o = GraphOracle("bad", 2, 0, bad, None, None, False, int, str)
    with pytest.raises(OracleError):
        o.neighbors(0)
    o = GraphOracle("fat", 1, 0, lambda v: (v - 1, v + 1), None, None, False, int, str)
    with pytest.raises(OracleError):
        o.neighbors(0)


@pytest.mark.parametrize("family", ["zd:2", "zd:3", "line", "tree:3", "tree:4", "wedge:ln", "strip:3", "dl:2,2"])
def test_neighbour_symmetry_and_degree(family):
    o = make_family(family)
    w = ball(o, o.root, 3)
    for v in w.vertices:
        nb = o.neighbors(v)
        assert len(nb) <= o.max_degree and len(set(nb)) == len(nb)
        for u in nb:
            assert v in o.neighbors(u)


def test_window_descriptors():
    line = make_family("line")
    w = parse_window(line, "path:4")
    assert w.vertices == ((0,), (1,), (2,), (3,)) and w.rim == {(0,), (3,)}
    assert resolve_vertex(line, "v2", w) == (2,)
    assert len(parse_window(Z2, "box:-1..2,-2..1").edges) == 24
    assert parse_window(Z2, "ball:1@3,3").vertex_set == ball(Z2, (3, 3), 1).vertex_set
    wedge = parse_window(make_family("wedge:ln"), "cols:0..2")
    assert wedge.vertex_set == {(0, 0), (1, 0), (2, 0), (2, 1)}
    for bad in ("ball", "ball:x", "box:1..0,0..1", "nope:1", "path:4x"):
        with pytest.raises(ParseError):
            parse_window(line if bad.startswith("path") else Z2, bad)
