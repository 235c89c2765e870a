import math
from decimal import Decimal, getcontext

import pytest

from perco_iso.errors import ParseError, UnsupportedError
from perco_iso.families import (diestel_leader, in_wedge, interior_cap, make_family,
                                verify_bigeodesic_prefix, wedge_height)
from perco_iso.graph import ball, enumerate_connected_sets
from perco_iso.isoperimetry import edge_boundary

from oracles import naive_boundary


@pytest.mark.parametrize("spec,degree", [("zd:1", 2), ("zd:2", 4), ("zd:3", 6), ("tree:3", 3),
                                         ("tree:5", 5), ("wedge:ln", 4), ("line", 2),
                                         ("strip:2", 3), ("dl:2,2", 4), ("dl:2,3", 5)])
def test_max_degree(spec, degree):
    assert make_family(spec).max_degree == degree


@pytest.mark.parametrize("spec,pos", [("zd", 2), ("zd:x", 3), ("tree:1", 5), ("wedge:sqrt", 6),
                                      ("moebius:3", 0), ("dl:2", 3), ("line:3", 5), ("", 0)])
def test_malformed_specs(spec, pos):
    with pytest.raises(ParseError) as info:
        make_family(spec)
    assert info.value.position == pos


def test_wedge_root_neighbours():
    assert make_family("wedge:ln").neighbors((0, 0)) == ((1, 0),)


def _first_column_of_height(k):
    getcontext().prec = 60
    return int((Decimal(k).exp() - 1).to_integral_value(rounding="ROUND_CEILING"))


@pytest.mark.parametrize("k", range(1, 14))
def test_wedge_height_thresholds(k):
    # columns a with ln(1 + a) >= k start at ceil(e^k - 1), far beyond 10^6 at k = 13
    a = _first_column_of_height(k)
    assert wedge_height(a) == k
    assert wedge_height(a - 1) == k - 1


def test_wedge_height_scan():
    for a in range(0, 10 ** 6, 997):
        assert wedge_height(a) == math.floor(math.log1p(a)) or abs(math.log1p(a) - round(math.log1p(a))) < 1e-9


def test_wedge_membership():
    assert in_wedge((0, 0)) and not in_wedge((0, 1)) and not in_wedge((1, 1))
    assert in_wedge((2, 1)) and not in_wedge((-1, 0)) and not in_wedge((6, 2)) and in_wedge((7, 2))


def test_bigeodesics():
    assert verify_bigeodesic_prefix(make_family("zd:2"), 5)
    assert verify_bigeodesic_prefix(make_family("tree:3"), 5)
    assert verify_bigeodesic_prefix(make_family("dl:2,2"), 4)
    assert verify_bigeodesic_prefix(make_family("strip:2"), 5)
    wedge = make_family("wedge:ln")
    with pytest.raises(UnsupportedError):
        verify_bigeodesic_prefix(wedge, 3)
    # both rays must leave (0,0) through (1,0), so they are never geodesically opposite
    rays = (lambda k: (k, 0), lambda k: (k, 0))
    assert not verify_bigeodesic_prefix(wedge, 3, rays)


def test_dl_degree_and_heights():
    o = diestel_leader(2, 2)
    w = ball(o, o.root, 3)
    for v in w.vertices:
        assert len(o.neighbors(v)) == 4
        for u in o.neighbors(v):
            assert abs(u[0] - v[0]) == 1


def test_dl_tokens_roundtrip():
    o = make_family("dl:2,2")
    for v in ball(o, o.root, 2).vertices:
        assert o.parse_vertex(o.format_vertex(v)) == v


def test_interior_caps():
    z2 = make_family("zd:2")
    assert interior_cap(z2, 8) == 4
    assert interior_cap(make_family("tree:3"), 7) == 5
    assert interior_cap(make_family("line"), 2) is None
    assert interior_cap(make_family("wedge:ln"), 4) is None
    with pytest.raises(ValueError):
        interior_cap(z2, 0)


def test_zd2_cap_against_polyominoes():
    z2 = make_family("zd:2")
    w = ball(z2, (0, 0), 8)
    biggest = {}
    for W in enumerate_connected_sets(w, (0, 0), 7):
        b = len(naive_boundary(z2, W))
        biggest[b] = max(biggest.get(b, 0), len(W))
    for b, size in biggest.items():
        assert size <= interior_cap(z2, b)
    assert biggest[8] == 4


@pytest.mark.parametrize("k", [3, 4])
def test_tree_boundary_identity(k):
    o = make_family(f"tree:{k}")
    w = ball(o, (), 5)
    for W in enumerate_connected_sets(w, (), 4):
        assert len(edge_boundary(o, W)) == (k - 2) * len(W) + 2
