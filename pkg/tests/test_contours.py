import pytest

from perco_iso.contours import (NotAContour, contour_distance, contour_distance_info,
                                contour_from_interior, count_contours, enumerate_contours,
                                first_hit_edges, is_minimal, plan_enumeration, separates, surrounds)
from perco_iso.errors import PaddingError
from perco_iso.families import interior_cap, make_family, wedge_height
from perco_iso.graph import ball, edge, parse_window

from oracles import naive_boundary, naive_contours

Z2 = make_family("zd:2")
DOMINO = {(0, 0), (1, 0)}


def test_single_vertex_and_domino():
    w = ball(Z2, (0, 0), 4)
    assert contour_from_interior(w, {(0, 0)}).size == 4
    assert contour_from_interior(w, DOMINO).size == 6


def test_ring_is_not_a_contour():
    w = ball(Z2, (0, 0), 5)
    ring = {(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)} - {(0, 0)}
    res = contour_from_interior(w, ring)
    assert isinstance(res, NotAContour) and not res and res.hole == {(0, 0)}


def test_rim_contact_rejected():
    with pytest.raises(PaddingError):
        contour_from_interior(ball(Z2, (0, 0), 1), {(1, 0)})


def test_surround_and_separate():
    c = contour_from_interior(ball(Z2, (0, 0), 4), DOMINO)
    assert surrounds(c, {(0, 0)}) and not separates(c, {(0, 0)})
    assert separates(c, {(0, 0), (5, 5)}) and not surrounds(c, {(0, 0), (5, 5)})
    with pytest.raises(ValueError):
        surrounds(c, set())
    with pytest.raises(ValueError):
        separates(c, set())


def test_certified_counts_z2():
    w = ball(Z2, (0, 0), 6)
    counts, certified = count_contours(w, {(0, 0)}, 10)
    assert certified
    assert (counts[4], counts[6], counts[8], counts[10]) == (1, 4, 22, 124)
    assert all(counts[n] == 0 for n in (1, 2, 3, 5, 7, 9))


def test_counts_match_powerset_oracle():
    w = ball(Z2, (0, 0), 4)
    naive = naive_contours(w, {(0, 0)}, interior_cap(Z2, 8))
    by_size = {}
    for gamma in naive:
        by_size[len(gamma)] = by_size.get(len(gamma), 0) + 1
    counts, certified = count_contours(w, {(0, 0)}, 8)
    assert certified
    assert {n: c for n, c in counts.items() if c} == {n: c for n, c in by_size.items() if n <= 8}


def test_enumerated_contours_are_valid():
    w = ball(Z2, (0, 0), 6)
    seen = set()
    for c in enumerate_contours(w, {(0, 0)}, 10):
        assert c.gamma not in seen
        seen.add(c.gamma)
        assert set(map(frozenset, c.gamma)) == naive_boundary(Z2, c.interior)
        assert is_minimal(w, c)


def test_uncertified_without_cap():
    w = ball(make_family("wedge:ln"), (0, 0), 8)
    plan = plan_enumeration(w, {(0, 0)}, 4)
    assert not plan.certified
    _, certified = count_contours(w, {(0, 0)}, 3)
    assert not certified


def test_small_window_is_not_certified():
    plan = plan_enumeration(ball(Z2, (0, 0), 3), {(0, 0)}, 12)
    assert not plan.certified


def test_contour_distances():
    w = ball(Z2, (0, 0), 6)
    assert contour_distance(Z2, (0, 0), (1, 0), w) == 6
    assert contour_distance(Z2, (1, 0), (0, 0), w) == 6
    tree = make_family("tree:3")
    assert contour_distance(tree, (), (0,), ball(tree, (), 5)) == 4
    with pytest.raises(ValueError):
        contour_distance(Z2, (0, 0), (0, 0), w)


@pytest.mark.parametrize("pair", [((0, 0), (2, 0)), ((0, 0), (1, 1)), ((0, 0), (2, 1)), ((-1, 0), (1, 0))])
def test_contour_distance_symmetry_and_floor(pair):
    w = ball(Z2, (0, 0), 7)
    x, y = pair
    a = contour_distance_info(Z2, x, y, w, 12)
    b = contour_distance_info(Z2, y, x, w, 12)
    assert a.value == b.value and a.certified and a.value >= 4
    naive = naive_contours(ball(Z2, (0, 0), 4), {x, y}, 6)
    assert a.value == min(len(g) for g in naive)


@pytest.mark.parametrize("n", range(1, 8))
def test_wedge_contour_distance_offset(n):
    # measured: one more than floor(ln(1 + n)); the cut right of column n has that many edges
    o = make_family("wedge:ln")
    info = contour_distance_info(o, (0, 0), (n, 0), parse_window(o, f"cols:0..{n + 3}"), 16)
    assert info.value == wedge_height(n) + 1
    assert not info.certified


def test_first_hit_edges():
    w = ball(Z2, (0, 0), 6)
    ray = lambda k: (k, 0)  # noqa: E731
    hits, cert = first_hit_edges(Z2, (0, 0), ray, 4, w)
    assert cert and hits == {edge((0, 0), (1, 0))}
    hits, _ = first_hit_edges(Z2, (0, 0), ray, 6, w)
    assert hits <= {edge((0, 0), (1, 0)), edge((1, 0), (2, 0))} and len(hits) == 2
    hits, _ = first_hit_edges(Z2, (0, 0), ray, 3, w)
    assert hits == frozenset()
    with pytest.raises(ValueError):
        first_hit_edges(Z2, (0, 0), lambda k: (k, k % 2), 6, w)
