"""Numba kernels for cluster labelling and exhaustive configuration sums."""

import numba
import numpy as np


@numba.njit(cache=True, inline="always")
def _find(parent, a):
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


@numba.njit(cache=True)
def label_block(uniforms, p, eu, ev, n_vertices):
    """Union-find root of every vertex for each sampled configuration.

    Edge k is open in sample s when uniforms[s, k] < p.
    """
    n_samples = uniforms.shape[0]
    n_edges = eu.shape[0]
    roots = np.empty((n_samples, n_vertices), dtype=np.int32)
    parent = np.empty(n_vertices, dtype=np.int32)
    for s in range(n_samples):
        for i in range(n_vertices):
            parent[i] = i
        for k in range(n_edges):
            if uniforms[s, k] < p:
                a = _find(parent, eu[k])
                b = _find(parent, ev[k])
                if a != b:
                    if a < b:
                        parent[b] = a
                    else:
                        parent[a] = b
        for i in range(n_vertices):
            roots[s, i] = _find(parent, i)
    return roots


@numba.njit(cache=True)
def pair_events(roots, rim_mask, xs, ys, mode):
    """Per-sample indicator for each (x, y) pair.

    mode 0: x and y share a cluster that contains no rim vertex
    mode 1: x and y share a cluster (free boundary reading)
    mode 2: the cluster of x contains a rim vertex (y ignored)
    """
    n_samples, n_vertices = roots.shape
    n_pairs = xs.shape[0]
    out = np.zeros((n_samples, n_pairs), dtype=np.bool_)
    touch = np.zeros(n_vertices, dtype=np.bool_)
    for s in range(n_samples):
        for i in range(n_vertices):
            touch[i] = False
        for i in range(n_vertices):
            if rim_mask[i]:
                touch[roots[s, i]] = True
        for j in range(n_pairs):
            rx = roots[s, xs[j]]
            if mode == 2:
                out[s, j] = touch[rx]
            elif mode == 1:
                out[s, j] = rx == roots[s, ys[j]]
            else:
                out[s, j] = rx == roots[s, ys[j]] and not touch[rx]
    return out


@numba.njit(cache=True)
def _popcount(v):
    c = 0
    while v:
        v &= v - 1
        c += 1
    return c


@numba.njit(cache=True)
def exhaustive_cluster_histogram(eu, ev, n_vertices, rim_mask, x, y, mode, lo, hi):
    """Histogram over closed-edge counts of configurations in [lo, hi) with the event.

    Bit k of a configuration index set means edge k is open.  Modes are as in
    :func:`pair_events`.  Returns (event histogram, all-configuration histogram).
    """
    n_edges = eu.shape[0]
    hist = np.zeros(n_edges + 1, dtype=np.int64)
    total = np.zeros(n_edges + 1, dtype=np.int64)
    parent = np.empty(n_vertices, dtype=np.int32)
    for cfg in range(lo, hi):
        for i in range(n_vertices):
            parent[i] = i
        n_open = 0
        for k in range(n_edges):
            if (cfg >> k) & 1:
                n_open += 1
                a = _find(parent, eu[k])
                b = _find(parent, ev[k])
                if a != b:
                    parent[b] = a
        n_closed = n_edges - n_open
        total[n_closed] += 1
        rx = _find(parent, x)
        hit = False
        if mode == 2:
            for i in range(n_vertices):
                if rim_mask[i] and _find(parent, i) == rx:
                    hit = True
                    break
        else:
            if rx == _find(parent, y):
                hit = True
                if mode == 0:
                    for i in range(n_vertices):
                        if rim_mask[i] and _find(parent, i) == rx:
                            hit = False
                            break
        if hit:
            hist[n_closed] += 1
    return hist, total


@numba.njit(cache=True)
def exhaustive_contour_histogram(n_edges, surround_masks, separate_masks, lo, hi):
    """Histogram over |C| of closed sets C holding a surrounding contour and no separating one.

    Bit k of a closed-set index means edge k is closed.
    """
    hist = np.zeros(n_edges + 1, dtype=np.int64)
    for c in range(lo, hi):
        ok = False
        for m in surround_masks:
            if c & m == m:
                ok = True
                break
        if not ok:
            continue
        for m in separate_masks:
            if c & m == m:
                ok = False
                break
        if ok:
            hist[_popcount(c)] += 1
    return hist


@numba.njit(cache=True)
def exhaustive_rimfree_histogram(eu, ev, n_vertices, rim_degree, x, y, lo, hi):
    """Rim-free two-point event summed over inner-edge configurations in [lo, hi).

    Only edges between non-rim vertices are enumerated.  When x and y share
    a cluster, the configuration contributes at (closed inner edges, number
    of rim edges leaving the cluster), since those rim edges must all be
    closed.  Returns (2D event histogram, 1D all-configuration histogram).
    """
    n_edges = eu.shape[0]
    max_b = 0
    for i in range(n_vertices):
        max_b += rim_degree[i]
    hist = np.zeros((n_edges + 1, max_b + 1), dtype=np.int64)
    total = np.zeros(n_edges + 1, dtype=np.int64)
    parent = np.empty(n_vertices, dtype=np.int32)
    for cfg in range(lo, hi):
        for i in range(n_vertices):
            parent[i] = i
        n_open = 0
        for k in range(n_edges):
            if (cfg >> k) & 1:
                n_open += 1
                a = _find(parent, eu[k])
                b = _find(parent, ev[k])
                if a != b:
                    parent[b] = a
        n_closed = n_edges - n_open
        total[n_closed] += 1
        rx = _find(parent, x)
        if rx != _find(parent, y):
            continue
        b = 0
        for i in range(n_vertices):
            if rim_degree[i] and _find(parent, i) == rx:
                b += rim_degree[i]
        hist[n_closed, b] += 1
    return hist, total
