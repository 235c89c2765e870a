"""Lazy graph oracles, finite windows and connected-set enumeration.

An infinite bounded-degree graph is represented by a pure neighbour
function.  All finite computations take an explicit :class:`Window`, the
subgraph induced on a finite connected vertex set, together with its rim
(window vertices that have at least one neighbour outside the window).
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Optional, Sequence

from .errors import BudgetExceeded, OracleError, PaddingError, ParseError

Vertex = Hashable
Edge = tuple  # (u, v) with u < v
Ray = Callable[[int], Vertex]


def edge(u, v) -> Edge:
    """Normalized undirected edge, smaller endpoint first."""
    if u == v:
        raise ValueError(f"self-loop at {u!r}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class GraphOracle:
    name: str
    max_degree: int
    root: Vertex
    neighbor_fn: Callable[[Vertex], Sequence[Vertex]] = field(repr=False)
    rays: Optional[tuple[Ray, Ray]] = field(default=None, repr=False)
    interior_cap_fn: Optional[Callable[[int], Optional[int]]] = field(default=None, repr=False)
    transitive: bool = False
    parse_vertex: Callable[[str], Vertex] = field(default=None, repr=False)
    format_vertex: Callable[[Vertex], str] = field(default=str, repr=False)
    params: tuple = ()

    @property
    def has_bigeodesic(self) -> bool:
        return self.rays is not None

    def neighbors(self, v) -> tuple:
        try:
            nbrs = tuple(self.neighbor_fn(v))
        except Exception as exc:  # noqa: BLE001 - any fault in user oracle code
            raise OracleError(f"{self.name}: neighbour query failed for {v!r}: {exc}") from exc
        if len(nbrs) > self.max_degree:
            raise OracleError(f"{self.name}: vertex {v!r} has degree {len(nbrs)} > {self.max_degree}")
        return nbrs

    def degree(self, v) -> int:
        return len(self.neighbors(v))


class Window:
    """Finite induced subgraph G[V_N] of an oracle graph.

    Vertices are kept in sorted order; ``index[v]`` is the position of ``v``
    and ``edges`` / ``adj`` are expressed both as vertex pairs and in index
    space (``edge_index``, ``adj_index``) for the numeric kernels.
    """

    def __init__(self, oracle: GraphOracle, vertices: Iterable, descriptor: str = ""):
        verts = sorted(set(vertices))
        if not verts:
            raise ValueError("empty window")
        self.oracle = oracle
        self.vertices = tuple(verts)
        self.vertex_set = frozenset(verts)
        self.index = {v: i for i, v in enumerate(verts)}
        self.descriptor = descriptor or f"set:{len(verts)}"

        edges = set()
        rim = set()
        adj: list[list[int]] = [[] for _ in verts]
        for i, v in enumerate(verts):
            for u in oracle.neighbors(v):
                j = self.index.get(u)
                if j is None:
                    rim.add(v)
                    continue
                adj[i].append(j)
                if i < j:
                    edges.add((v, u) if v < u else (u, v))
        self.edges = tuple(sorted(edges))
        self.edge_index = tuple((self.index[a], self.index[b]) for a, b in self.edges)
        self.edge_position = {e: k for k, e in enumerate(self.edges)}
        self.adj_index = tuple(tuple(sorted(a)) for a in adj)
        self.rim = frozenset(rim)
        self.rim_index = frozenset(self.index[v] for v in rim)
        if not _connected_indices(self.adj_index, range(len(verts))):
            raise ValueError("window vertex set is not connected")

    def __repr__(self):
        return (f"Window({self.oracle.name}, {self.descriptor}, |V|={len(self.vertices)}, "
                f"|E|={len(self.edges)}, |rim|={len(self.rim)})")

    def __contains__(self, v):
        return v in self.vertex_set

    @property
    def interior(self) -> frozenset:
        return self.vertex_set - self.rim

    def neighbors(self, v) -> list:
        return [self.vertices[j] for j in self.adj_index[self.index[v]]]

    def describe(self) -> dict:
        return {
            "family": self.oracle.name,
            "window": self.descriptor,
            "n_vertices": len(self.vertices),
            "n_edges": len(self.edges),
            "n_rim": len(self.rim),
        }


def _connected_indices(adj, members) -> bool:
    members = set(members)
    if not members:
        return False
    start = next(iter(members))
    seen = {start}
    stack = [start]
    while stack:
        i = stack.pop()
        for j in adj[i]:
            if j in members and j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(members)


def ball(oracle: GraphOracle, center, radius: int) -> Window:
    """Window induced on all vertices within path distance ``radius`` of ``center``."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    dist = {center: 0}
    queue = deque([center])
    while queue:
        v = queue.popleft()
        if dist[v] == radius:
            continue
        for u in oracle.neighbors(v):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return Window(oracle, dist, descriptor=f"ball:{radius}@{oracle.format_vertex(center)}")


def _is_vertex(oracle: GraphOracle, v) -> bool:
    try:
        oracle.neighbors(v)
    except OracleError:
        return False
    return True


def _span(text: str, whole: str, pos: int) -> range:
    m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", text)
    if not m:
        raise ParseError("expected a range 'a..b'", whole, pos)
    lo, hi = int(m.group(1)), int(m.group(2))
    if hi < lo:
        raise ParseError("empty range", whole, pos)
    return range(lo, hi + 1)


def parse_window(oracle: GraphOracle, text: str) -> Window:
    """Build a window from a descriptor.

    ``ball:<r>`` or ``ball:<r>@<vertex>``
        ball around the family root or the given vertex
    ``path:<k>``
        vertices 0 .. k-1 of a one-dimensional family
    ``box:<a>..<b>,<c>..<d>,...``
        integer coordinate box, one range per coordinate (non-vertices dropped)
    ``cols:<a>..<b>``
        every vertex whose first coordinate lies in [a, b] (wedge, strip)
    """
    kind, sep, arg = text.partition(":")
    if not sep:
        raise ParseError("window descriptor must look like 'kind:args'", text, 0)
    pos = len(kind) + 1
    if kind == "ball":
        r, at, centre = arg.partition("@")
        if not r.isdigit():
            raise ParseError("ball radius must be a non-negative integer", text, pos)
        c = oracle.parse_vertex(centre) if at else oracle.root
        if not _is_vertex(oracle, c):
            raise ParseError(f"{centre!r} is not a vertex of {oracle.name}", text, pos + len(r) + 1)
        return ball(oracle, c, int(r))
    if kind == "path":
        if not arg.isdigit() or int(arg) < 1:
            raise ParseError("path length must be a positive integer", text, pos)
        if len(oracle.root) != 1:
            raise ParseError(f"path windows need a one-dimensional family, not {oracle.name}", text, 0)
        return Window(oracle, [(i,) for i in range(int(arg))], descriptor=text)
    if kind == "box":
        spans, offset = [], pos
        for part in arg.split(","):
            spans.append(_span(part, text, offset))
            offset += len(part) + 1
        if not isinstance(oracle.root, tuple) or len(spans) != len(oracle.root) \
                or not all(isinstance(c, int) for c in oracle.root):
            raise ParseError(f"box needs one range per coordinate of {oracle.name}", text, pos)
        verts = [v for v in itertools.product(*spans) if _is_vertex(oracle, v)]
        if not verts:
            raise ParseError("box contains no vertex", text, pos)
        return Window(oracle, verts, descriptor=text)
    if kind == "cols":
        cols = _span(arg, text, pos)
        start = (cols.start,) + tuple(oracle.root[1:])
        if not _is_vertex(oracle, start):
            raise ParseError(f"no vertex at column {cols.start}", text, pos)
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in oracle.neighbors(v):
                if u[0] in cols and u not in seen:
                    seen.add(u)
                    queue.append(u)
        return Window(oracle, seen, descriptor=text)
    raise ParseError(f"unknown window kind {kind!r}", text, 0)


def resolve_vertex(oracle: GraphOracle, token: str, window: Optional[Window] = None):
    """Parse a vertex token; ``v<i>`` names the i-th vertex of ``window`` in sorted order."""
    m = re.fullmatch(r"v(\d+)", token)
    if m and window is not None:
        i = int(m.group(1))
        if i >= len(window.vertices):
            raise ParseError(f"window has only {len(window.vertices)} vertices", token, 1)
        return window.vertices[i]
    v = oracle.parse_vertex(token)
    if not _is_vertex(oracle, v):
        raise ParseError(f"{token!r} is not a vertex of {oracle.name}", token, 0)
    return v


def path_distance(oracle: GraphOracle, x, y, cap: int) -> Optional[int]:
    """BFS distance d_G(x, y), or ``None`` if it exceeds ``cap``."""
    if cap < 0:
        raise ValueError("cap must be non-negative")
    if x == y:
        return 0
    # bidirectional BFS, expanding the smaller frontier
    dist_a, dist_b = {x: 0}, {y: 0}
    front_a, front_b = [x], [y]
    da = db = 0
    while front_a and front_b and da + db < cap:
        if len(front_a) <= len(front_b):
            da += 1
            nxt = []
            for v in front_a:
                for u in oracle.neighbors(v):
                    if u in dist_b:
                        return da + dist_b[u]
                    if u not in dist_a:
                        dist_a[u] = da
                        nxt.append(u)
            front_a = nxt
        else:
            db += 1
            nxt = []
            for v in front_b:
                for u in oracle.neighbors(v):
                    if u in dist_a:
                        return db + dist_a[u]
                    if u not in dist_b:
                        dist_b[u] = db
                        nxt.append(u)
            front_b = nxt
    return None


def enumerate_connected_sets(window: Window, anchor=None, max_size: int = 1, *,
                             allowed: Optional[Iterable] = None,
                             budget: int = 10_000_000) -> Iterator[frozenset]:
    """Yield every connected vertex set of size <= ``max_size`` exactly once.

    With ``anchor`` given, only sets containing it are produced.  Without an
    anchor each set is grown from its smallest vertex, with all smaller
    vertices forbidden, so every connected set appears once.  ``allowed``
    restricts the sets to a sub-region (for instance the window interior).
    Raises :class:`BudgetExceeded` after ``budget`` sets.
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    adj = window.adj_index
    n = len(window.vertices)
    if allowed is None:
        ok = [True] * n
    else:
        ok = [False] * n
        for v in allowed:
            ok[window.index[v]] = True

    if anchor is not None:
        if anchor not in window.index:
            raise ValueError(f"anchor {anchor!r} not in window")
        roots = [window.index[anchor]]
    else:
        roots = list(range(n))

    verts = window.vertices
    produced = 0
    for r in roots:
        if not ok[r]:
            continue
        # vertices below the root are forbidden only in the unanchored mode
        seen = bytearray(n)
        if anchor is None:
            for i in range(r):
                seen[i] = 1
        for i in range(n):
            if not ok[i]:
                seen[i] = 1
        seen[r] = 1
        current: list[int] = []
        stack = [([r], 0)]
        # explicit-stack Redelmeier growth; each frame owns an untried list
        added_at: list[list[int]] = []
        while stack:
            untried, _ = stack[-1]
            if not untried:
                stack.pop()
                if current:
                    v = current.pop()
                    for u in added_at.pop():
                        seen[u] = 0
                continue
            v = untried.pop()
            current.append(v)
            produced += 1
            if produced > budget:
                raise BudgetExceeded(f"more than {budget} connected sets", partial_count=produced - 1)
            yield frozenset(verts[i] for i in current)
            if len(current) >= max_size:
                current.pop()
                continue
            new = []
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = 1
                    new.append(u)
            added_at.append(new)
            stack.append((untried + new, 0))


def is_connected(window: Window, W: Iterable) -> bool:
    idx = [window.index[v] for v in W]
    if not idx:
        raise ValueError("W must be nonempty")
    return _connected_indices(window.adj_index, idx)


def window_distances(window: Window, source) -> dict:
    """BFS distances inside the window from ``source`` (vertex -> int)."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u in window.neighbors(v):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def diameter(window: Window, W: Iterable) -> int:
    """Exact diam(W) in the metric of the full oracle graph.

    Window distances only overestimate oracle distances when a shorter path
    leaves the window.  Such a path passes through the rim twice and spends
    at least two steps outside, so the window distance is certified exact
    whenever d(x, rim) + 2 + d(rim, y) >= d_window(x, y).  Pairs failing that
    test are checked with a capped oracle BFS; a strictly shorter oracle path
    means a geodesic exits the window and raises :class:`PaddingError`.
    """
    members = list(W)
    if not members:
        raise ValueError("W must be nonempty")
    rim_dist = {}
    tables = {}
    for x in members:
        dist = window_distances(window, x)
        tables[x] = dist
        rim_dist[x] = min((dist[r] for r in window.rim), default=float("inf"))
    best = 0
    for i, x in enumerate(members):
        for y in members[i + 1:]:
            d = tables[x].get(y)
            if d is None:
                raise PaddingError(f"{x!r} and {y!r} are disconnected inside the window")
            if rim_dist[x] + 2 + rim_dist[y] < d:
                if path_distance(window.oracle, x, y, cap=d - 1) is not None:
                    raise PaddingError(f"a geodesic between {x!r} and {y!r} leaves the window")
            best = max(best, d)
    return best
