"""Exact minimum Steiner trees in small unit-weight graphs."""

from __future__ import annotations

from collections import deque
from itertools import combinations

import numpy as np

from .errors import BudgetExceeded

MAX_DP_TERMINALS = 12
MAX_EXHAUSTIVE_EDGES = 20


def _all_pairs(nodes, adj) -> np.ndarray:
    pos = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    dist = np.full((n, n), np.inf)
    for s in nodes:
        i = pos[s]
        dist[i, i] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            dv = dist[i, pos[v]]
            for u in adj[v]:
                j = pos[u]
                if dist[i, j] == np.inf:
                    dist[i, j] = dv + 1
                    queue.append(u)
    return dist


def steiner_dp(adj: dict, terminals) -> int:
    """Dreyfus-Wagner dynamic programme over terminal subsets.

    ``adj`` maps each vertex of a connected graph to its neighbours.  Returns
    the number of edges of a minimum tree spanning ``terminals``.
    """
    terms = list(dict.fromkeys(terminals))
    if len(terms) <= 1:
        return 0
    nodes = list(adj)
    pos = {v: i for i, v in enumerate(nodes)}
    dist = _all_pairs(nodes, adj)
    k = len(terms) - 1
    root = pos[terms[-1]]
    full = (1 << k) - 1
    dp = [None] * (1 << k)
    for i in range(k):
        dp[1 << i] = dist[pos[terms[i]]].copy()
    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue
        best = np.full(len(nodes), np.inf)
        low = mask & -mask
        # split with the lowest terminal on the left to halve the work
        sub = (mask - 1) & mask
        while sub:
            if sub & low:
                np.minimum(best, dp[sub] + dp[mask ^ sub], out=best)
            sub = (sub - 1) & mask
        dp[mask] = (best[:, None] + dist).min(axis=0)
    return int(dp[full][root])


def steiner_exhaustive(adj: dict, terminals, max_edges: int = MAX_EXHAUSTIVE_EDGES) -> int:
    """Smallest edge subset connecting ``terminals``, by increasing-size search."""
    terms = list(dict.fromkeys(terminals))
    if len(terms) <= 1:
        return 0
    edges = sorted({(u, v) if u < v else (v, u) for u in adj for v in adj[u]})
    if len(edges) > max_edges:
        raise BudgetExceeded(f"{len(edges)} edges exceed the exhaustive budget of {max_edges}")
    for size in range(len(terms) - 1, len(edges) + 1):
        for subset in combinations(edges, size):
            if _connects(subset, terms):
                return size
    raise ValueError("terminals are not connected in the graph")


def _connects(edges, terms) -> bool:
    parent = {}

    def find(a):
        parent.setdefault(a, a)
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    root = find(terms[0])
    return all(find(t) == root for t in terms[1:])


def steiner_tree_size(adj: dict, terminals) -> int:
    """Exact Steiner tree size: DP up to 12 terminals, else exhaustive on <= 20 edges."""
    terms = list(dict.fromkeys(terminals))
    if len(terms) <= MAX_DP_TERMINALS:
        return steiner_dp(adj, terms)
    return steiner_exhaustive(adj, terms)
