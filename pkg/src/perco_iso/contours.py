"""Contours (minimal cut sets with exactly one finite side) and their counts.

Contours are handled through their interiors: a finite connected vertex set
W whose complement has no finite component.  Inside a window, W is required
to avoid the rim, and a complement component counts as infinite exactly when
it reaches the rim.  Completeness of an enumeration is certified only when
the family supplies a finite interior-size cap and the window holds every
candidate interior; otherwise counts are lower bounds.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional

from .errors import BudgetExceeded, PaddingError
from .families import interior_cap
from .graph import GraphOracle, Window, edge, enumerate_connected_sets, is_connected, path_distance


@dataclass(frozen=True)
class Contour:
    gamma: frozenset
    interior: frozenset
    edge_interior: frozenset

    @property
    def size(self) -> int:
        return len(self.gamma)

    @property
    def closure_vertices(self) -> frozenset:
        return self.interior | frozenset(u for e in self.gamma for u in e)

    @property
    def closure_edges(self) -> frozenset:
        return self.edge_interior | self.gamma


@dataclass(frozen=True)
class NotAContour:
    W: frozenset
    hole: frozenset

    def __bool__(self):
        return False


def _boundary_and_inner(oracle, W):
    gamma, inner = set(), set()
    for v in W:
        for u in oracle.neighbors(v):
            (inner if u in W else gamma).add(edge(v, u))
    return frozenset(gamma), frozenset(inner)


def _holes(window: Window, W: frozenset) -> list:
    """Components of window - W that never reach the rim."""
    reached = set()
    queue = deque(r for r in window.rim if r not in W)
    reached.update(queue)
    while queue:
        v = queue.popleft()
        for u in window.neighbors(v):
            if u not in W and u not in reached:
                reached.add(u)
                queue.append(u)
    rest = window.vertex_set - W - reached
    holes = []
    while rest:
        start = min(rest)
        comp = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in window.neighbors(v):
                if u in rest and u not in comp:
                    comp.add(u)
                    queue.append(u)
        rest -= comp
        holes.append(frozenset(comp))
    return holes


def _has_hole_near(window: Window, W: frozenset, external: Iterable) -> bool:
    """Fast test: does some external-boundary vertex fail to reach the rim?"""
    external = [u for u in external if u not in W]
    if not external:
        return False
    reached = set()
    queue = deque(r for r in window.rim if r not in W)
    reached.update(queue)
    targets = set(external)
    targets -= reached
    while queue and targets:
        v = queue.popleft()
        for u in window.adj_index[window.index[v]]:
            w = window.vertices[u]
            if w not in W and w not in reached:
                reached.add(w)
                targets.discard(w)
                queue.append(w)
    return bool(targets)


def contour_from_interior(window: Window, W: Iterable):
    """Contour with interior W, or a falsy :class:`NotAContour` naming a hole."""
    W = frozenset(W)
    if not W:
        raise ValueError("W must be nonempty")
    if not W <= window.vertex_set or W & window.rim:
        raise PaddingError("W must lie strictly inside the window (away from the rim)")
    if not is_connected(window, W):
        raise ValueError("W must induce a connected subgraph")
    holes = _holes(window, W)
    if holes:
        return NotAContour(W, holes[0])
    gamma, inner = _boundary_and_inner(window.oracle, W)
    return Contour(gamma, W, inner)


def is_minimal(window: Window, contour: Contour) -> bool:
    """Check that restoring any single edge of gamma leaves no finite component.

    Recomputed from scratch: components of the window graph with the edges of
    gamma minus one removed; every component must reach the rim.
    """
    gamma = set(contour.gamma)
    for e in contour.gamma:
        removed = gamma - {e}
        seen = set()
        for s in window.vertices:
            if s in seen:
                continue
            comp = {s}
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for u in window.neighbors(v):
                    if u not in comp and edge(u, v) not in removed:
                        comp.add(u)
                        queue.append(u)
            seen |= comp
            if not comp & window.rim:
                return False
    return True


def surrounds(c: Contour, X: Iterable) -> bool:
    X = frozenset(X)
    if not X:
        raise ValueError("X must be nonempty")
    return X <= c.interior


def separates(c: Contour, X: Iterable) -> bool:
    X = frozenset(X)
    if not X:
        raise ValueError("X must be nonempty")
    k = len(X & c.interior)
    return 0 < k < len(X)


@dataclass(frozen=True)
class EnumerationPlan:
    anchor: object
    size_limit: int
    certified: bool
    reason: str


def plan_enumeration(window: Window, must_surround: Iterable, max_boundary: int) -> EnumerationPlan:
    """Decide the interior-size limit and whether the enumeration is complete."""
    X = frozenset(must_surround)
    if not X:
        raise ValueError("must_surround must be nonempty")
    if X & window.rim or not X <= window.vertex_set:
        raise PaddingError("surrounded vertices must be interior window vertices")
    oracle = window.oracle
    anchor = min(X)
    region = len(window.interior)
    caps = [interior_cap(oracle, n) for n in range(1, max_boundary + 1)]
    if any(c is None for c in caps):
        return EnumerationPlan(anchor, region, False, f"{oracle.name} has no interior-size certificate")
    limit = max(caps)
    if limit < len(X):
        return EnumerationPlan(anchor, max(limit, 1), True, "no interior is large enough")
    # every candidate interior lies within distance limit - 1 of the anchor;
    # those vertices must be interior window vertices
    dist = {anchor: 0}
    queue = deque([anchor])
    while queue:
        v = queue.popleft()
        if v not in window.vertex_set or v in window.rim:
            return EnumerationPlan(anchor, limit, False,
                                   f"window too small for interiors of {limit} vertices")
        if dist[v] == limit - 1:
            continue
        for u in oracle.neighbors(v):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return EnumerationPlan(anchor, limit, True, f"interiors capped at {limit} vertices")


def enumerate_contours(window: Window, must_surround: Iterable, max_boundary: int, *,
                       plan: Optional[EnumerationPlan] = None,
                       budget: int = 10_000_000) -> Iterator[Contour]:
    """Yield every window contour surrounding ``must_surround`` with |gamma| <= max_boundary.

    See :func:`plan_enumeration` for the completeness flag.
    """
    X = frozenset(must_surround)
    plan = plan or plan_enumeration(window, X, max_boundary)
    oracle = window.oracle
    for W in enumerate_connected_sets(window, plan.anchor, plan.size_limit,
                                      allowed=window.interior, budget=budget):
        if not X <= W:
            continue
        gamma, inner = _boundary_and_inner(oracle, W)
        if len(gamma) > max_boundary:
            continue
        external = {u for e in gamma for u in e}
        if _has_hole_near(window, W, external):
            continue
        yield Contour(gamma, W, inner)


def count_contours(window: Window, must_surround: Iterable, max_boundary: int) -> tuple[dict, bool]:
    """Counts |F^n(X)| for n <= max_boundary and the completeness flag."""
    plan = plan_enumeration(window, must_surround, max_boundary)
    counts = {n: 0 for n in range(1, max_boundary + 1)}
    for c in enumerate_contours(window, must_surround, max_boundary, plan=plan):
        counts[c.size] += 1
    return counts, plan.certified


@dataclass(frozen=True)
class ContourDistance:
    value: Optional[int]
    certified: bool
    witness: Optional[Contour]


def contour_distance_info(oracle: GraphOracle, x, y, window: Window,
                          max_boundary: int = 64) -> ContourDistance:
    """Smallest contour surrounding {x, y}, searched by increasing boundary size."""
    if x == y:
        raise ValueError("x and y must differ")
    X = frozenset((x, y))
    for n in range(1, max_boundary + 1):
        sub = plan_enumeration(window, X, n)
        if not sub.certified:
            break
        best = _smallest(window, X, n, sub)
        if best is not None:
            return ContourDistance(best.size, True, best)
    else:
        return ContourDistance(None, True, None)
    # no certificate at this scale: search every interior the window allows
    plan = plan_enumeration(window, X, max_boundary)
    plan = EnumerationPlan(plan.anchor, len(window.interior), False, plan.reason)
    best = _smallest(window, X, max_boundary, plan)
    return ContourDistance(best.size if best else None, False, best)


def _smallest(window, X, n, plan) -> Optional[Contour]:
    best = None
    for c in enumerate_contours(window, X, n, plan=plan):
        if best is None or c.size < best.size:
            best = c
    return best


def contour_distance(oracle: GraphOracle, x, y, window: Window, max_boundary: int = 64) -> int:
    info = contour_distance_info(oracle, x, y, window, max_boundary)
    if info.value is None:
        raise BudgetExceeded(f"no contour of size <= {max_boundary} surrounds both vertices")
    return info.value


def checked_ray(oracle: GraphOracle, ray: Callable[[int], object]) -> Callable[[int], object]:
    """Wrap a ray so every requested vertex is certified to sit at distance k."""
    cache = {}

    def at(k: int):
        if k not in cache:
            v = ray(k)
            if path_distance(oracle, ray(0), v, cap=k) != k:
                raise ValueError(f"ray is not geodesic at step {k}")
            cache[k] = v
        return cache[k]

    return at


def first_hit_edges(oracle: GraphOracle, x, ray: Callable[[int], object], n: int,
                    window: Window) -> tuple[frozenset, bool]:
    """The set of first ray edges hit by contours of size exactly n around x.

    Returns the edge set and the completeness flag of the underlying
    enumeration.  Its size is the quantity bounded by n / R in the counting
    argument.
    """
    ray = checked_ray(oracle, ray)
    if ray(0) != x:
        raise ValueError("ray must start at x")
    plan = plan_enumeration(window, {x}, n)
    hits = set()
    for c in enumerate_contours(window, {x}, n, plan=plan):
        if c.size != n:
            continue
        k = 0
        while True:
            e = edge(ray(k), ray(k + 1))
            if e in c.gamma:
                hits.add(e)
                break
            k += 1
    return frozenset(hits), plan.certified
