"""Edge/vertex boundaries, tree distance and windowed isoperimetric constants.

For a finite connected set W the tree distance of its edge boundary is
``|dW| + ell`` where ``ell`` is the size of a minimum Steiner tree inside
G[W] spanning the internal vertex boundary.  The three constants estimated
here are minima over enumerated sets of

* ``R``: |dW| / d^t(dW)      (contour constant)
* ``P``: |dW| / ln diam(W)   (wedge constant, only sets with diam >= 2)
* ``C``: |dW| / |W|          (Cheeger constant)

Values are exact fractions for R and C.  Every estimate is an upper bound
on the infimum restricted to sets of at most ``max_size`` vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .errors import BudgetExceeded, PaddingError
from .graph import GraphOracle, Window, ball, diameter, enumerate_connected_sets, edge
from .steiner import MAX_DP_TERMINALS, MAX_EXHAUSTIVE_EDGES, steiner_dp, steiner_exhaustive


def edge_boundary(oracle: GraphOracle, W) -> list:
    W = set(W)
    out = []
    for v in W:
        for u in oracle.neighbors(v):
            if u not in W:
                out.append(edge(v, u))
    return sorted(out)


def induced_edges(oracle: GraphOracle, W) -> list:
    W = set(W)
    return sorted({edge(v, u) for v in W for u in oracle.neighbors(v) if u in W})


def _edges_connected(edges) -> bool:
    if not edges:
        return True
    adj: dict = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    start = edges[0][0]
    seen = {start}
    stack = [start]
    while stack:
        a = stack.pop()
        for b in adj[a]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return len(seen) == len(adj)


def _induced_connected(adj: dict) -> bool:
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        for u in adj[stack.pop()]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(adj)


@dataclass(frozen=True)
class BoundaryReport:
    W: frozenset
    boundary: tuple
    internal_boundary: frozenset
    external_boundary: frozenset
    closure: frozenset
    ell: int
    tree_distance: int
    diam: Optional[int]
    boundary_connected: bool
    induced_is_tree: bool
    n_induced_edges: int

    @property
    def size(self) -> int:
        return len(self.W)

    @property
    def boundary_size(self) -> int:
        return len(self.boundary)


def boundary_report(window: Window, W: Iterable, *, with_diameter: bool = True) -> BoundaryReport:
    """All boundary quantities of a connected set W away from the window rim."""
    W = frozenset(W)
    if not W:
        raise ValueError("W must be nonempty")
    if W & window.rim or not W <= window.vertex_set:
        raise PaddingError("W must lie inside the window and avoid its rim")
    oracle = window.oracle
    adj = {v: [u for u in oracle.neighbors(v) if u in W] for v in W}
    n_inner = sum(len(a) for a in adj.values()) // 2
    if not _induced_connected(adj):
        raise ValueError("W must induce a connected subgraph")
    boundary = edge_boundary(oracle, W)
    internal = frozenset(v for v in W if len(adj[v]) < oracle.degree(v))
    external = frozenset(u for a, b in boundary for u in (a, b) if u not in W)

    if len(internal) <= MAX_DP_TERMINALS:
        ell = steiner_dp(adj, sorted(internal))
    elif n_inner <= MAX_EXHAUSTIVE_EDGES:
        ell = steiner_exhaustive(adj, sorted(internal))
    else:
        raise BudgetExceeded(
            f"{len(internal)} terminals and {n_inner} edges exceed the exact Steiner budget")

    return BoundaryReport(
        W=W,
        boundary=tuple(boundary),
        internal_boundary=internal,
        external_boundary=external,
        closure=W | external,
        ell=ell,
        tree_distance=ell + len(boundary),
        diam=diameter(window, W) if with_diameter else None,
        boundary_connected=_edges_connected(boundary),
        induced_is_tree=(n_inner == len(W) - 1),
        n_induced_edges=n_inner,
    )


@dataclass(frozen=True)
class ConstantEstimate:
    name: str
    value: object  # Fraction for R and C, float for P
    minimizer: frozenset
    max_size: int
    window: str
    n_sets: int = 0
    ratio: tuple = field(default=())  # (numerator, denominator) as computed

    def as_record(self, fmt=str) -> dict:
        val = self.value
        return {
            "constant": self.name,
            "value": float(val),
            "exact": str(val) if isinstance(val, Fraction) else None,
            "minimizing_set": [fmt(v) for v in sorted(self.minimizer)],
            "max_size": self.max_size,
            "window": self.window,
            "sets_examined": self.n_sets,
            "bound": "upper bound on the infimum over sets of at most max_size vertices",
        }


def _default_window(oracle: GraphOracle, max_size: int, need_diam: bool) -> Window:
    # anchored sets stay within distance max_size - 1 of the root
    radius = 2 * max_size if need_diam else max_size + 1
    return ball(oracle, oracle.root, radius)


def candidate_sets(oracle: GraphOracle, max_size: int, window: Window):
    """Connected sets in the window interior, anchored at the root on transitive families."""
    if oracle.transitive:
        if oracle.root in window.rim or oracle.root not in window:
            raise PaddingError("root must be an interior window vertex")
        return enumerate_connected_sets(window, oracle.root, max_size, allowed=window.interior)
    return enumerate_connected_sets(window, None, max_size, allowed=window.interior)


def _boundary_count(oracle, W, degree_cache) -> int:
    total = 0
    for v in W:
        d = degree_cache.get(v)
        if d is None:
            d = degree_cache[v] = oracle.degree(v)
        total += d
        for u in oracle.neighbors(v):
            if u in W:
                total -= 1
    return total


def estimate_R(oracle: GraphOracle, max_size: int, window: Optional[Window] = None) -> ConstantEstimate:
    window = window or _default_window(oracle, max_size, need_diam=False)
    best, best_W, best_ratio, n = None, None, (), 0
    for W in candidate_sets(oracle, max_size, window):
        rep = boundary_report(window, W, with_diameter=False)
        n += 1
        val = Fraction(rep.boundary_size, rep.tree_distance)
        if best is None or val < best:
            best, best_W, best_ratio = val, W, (rep.boundary_size, rep.tree_distance)
    return ConstantEstimate("R", best, best_W, max_size, window.descriptor, n, best_ratio)


def estimate_C(oracle: GraphOracle, max_size: int, window: Optional[Window] = None) -> ConstantEstimate:
    window = window or _default_window(oracle, max_size, need_diam=False)
    best, best_W, best_ratio, n = None, None, (), 0
    degrees: dict = {}
    for W in candidate_sets(oracle, max_size, window):
        n += 1
        b = _boundary_count(oracle, W, degrees)
        val = Fraction(b, len(W))
        if best is None or val < best:
            best, best_W, best_ratio = val, W, (b, len(W))
    return ConstantEstimate("C", best, best_W, max_size, window.descriptor, n, best_ratio)


def estimate_P(oracle: GraphOracle, max_size: int, window: Optional[Window] = None) -> ConstantEstimate:
    """Minimum of |dW| / ln diam(W) over candidates with diam(W) >= 2 (natural log)."""
    window = window or _default_window(oracle, max_size, need_diam=True)
    best, best_W, best_ratio, n = None, None, (), 0
    degrees: dict = {}
    for W in candidate_sets(oracle, max_size, window):
        if len(W) < 3:
            continue  # two vertices are at distance <= 1 when connected
        d = diameter(window, W)
        if d < 2:
            continue
        n += 1
        b = _boundary_count(oracle, W, degrees)
        val = b / math.log(d)
        if best is None or val < best:
            best, best_W, best_ratio = val, W, (b, d)
    return ConstantEstimate("P", best, best_W, max_size, window.descriptor, n, best_ratio)


def check_constant_inequalities(reports, t: Optional[int] = None) -> list:
    """Return a list of violated per-set inequalities (empty when all hold).

    Checked for every report: |dW| <= d^t <= |dW| + |W| - 1 and
    |dW|/d^t >= c/(c+1) with c = |dW|/|W|.  When a Babson-Benjamini
    parameter ``t`` is supplied, d^t <= (1 + t)|dW| is checked as well.
    """
    violations = []
    for rep in reports:
        b, dt, size = rep.boundary_size, rep.tree_distance, rep.size
        if not b <= dt:
            violations.append({"W": rep.W, "check": "lower tree-distance bound", "detail": f"{b} > {dt}"})
        if not dt <= b + size - 1:
            violations.append({"W": rep.W, "check": "upper tree-distance bound",
                               "detail": f"{dt} > {b + size - 1}"})
        if dt > 0:
            c = Fraction(b, size)
            if Fraction(b, dt) < c / (c + 1):
                violations.append({"W": rep.W, "check": "R >= C/(C+1) per set",
                                   "detail": f"{Fraction(b, dt)} < {c / (c + 1)}"})
        else:
            violations.append({"W": rep.W, "check": "positive tree distance", "detail": "d^t = 0"})
        if t is not None and dt > (1 + t) * b:
            violations.append({"W": rep.W, "check": "d^t <= (1+t)|dW|", "detail": f"{dt} > {(1 + t) * b}"})
    return violations
