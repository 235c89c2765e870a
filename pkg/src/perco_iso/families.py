"""Concrete graph families with certified metadata.

Family spec strings and vertex token formats:

==============  ===========================================  ==================
spec            graph                                        vertex token
==============  ===========================================  ==================
``zd:<d>``      hypercubic lattice Z^d                       ``"0,0"``
``line``        Z (same graph as ``zd:1``)                   ``"3"``
``tree:<k>``    k-regular tree                               ``"r"``, ``"r.0.1"``
``wedge:ln``    {(a, b) : a >= 0, 0 <= b <= ln(1 + a)}       ``"5,1"``
``strip:<h>``   Z x {0, ..., h-1}                            ``"4,1"``
``dl:<q>,<r>``  Diestel-Leader graph DL(q, r)                ``"h|d1|d2"``
==============  ===========================================  ==================

Tree vertices are digit tuples: the root is ``()``, its ``k`` children are
``(0,)`` .. ``(k-1,)``, and a non-root vertex ``v`` has children
``v + (i,)`` for ``i < k - 1``.

DL(q, r) vertices are pairs of vertices of the horocyclic trees T_{q+1} and
T_{r+1} whose Busemann heights sum to zero.  A horocyclic tree vertex at
height ``h`` is stored as ``(h, digits)``: follow the distinguished base
line ``b_h`` (each ``b_h`` has parent ``b_{h+1}``) up to the first base
vertex above it and read the branching digits downward; the first digit is
never 0, because digit 0 continues along the base line.  A DL vertex is the
triple ``(h, digits_1, digits_2)`` with the second tree at height ``-h``.
"""

from __future__ import annotations

import math
import re
from functools import lru_cache
from typing import Optional

import mpmath

from .errors import ParseError, UnsupportedError
from .graph import GraphOracle, path_distance


# --- log-wedge column heights -------------------------------------------------

@lru_cache(maxsize=None)
def wedge_height(a: int) -> int:
    """floor(ln(1 + a)) computed exactly.

    A float estimate is corrected against 50-digit ``exp`` so rounding in
    ``log1p`` can never move a vertex in or out of the wedge.
    """
    if a < 0:
        raise ValueError("column index must be non-negative")
    k = int(math.log1p(a))
    with mpmath.workdps(50):
        target = mpmath.mpf(a + 1)
        while mpmath.exp(k + 1) <= target:
            k += 1
        while k > 0 and mpmath.exp(k) > target:
            k -= 1
    return k


def in_wedge(v) -> bool:
    a, b = v
    return a >= 0 and 0 <= b <= wedge_height(a)


# --- vertex tokens --------------------------------------------------------------

def _parse_ints(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        bad = next(i for i, t in enumerate(text.split(",")) if not re.fullmatch(r"\s*-?\d+\s*", t))
        raise ParseError("expected comma-separated integers", text, bad) from None


def _format_ints(v) -> str:
    return ",".join(str(c) for c in v)


def _parse_tree(text: str) -> tuple:
    if text in ("r", "()"):
        return ()
    parts = text.split(".")
    if parts[0] != "r":
        raise ParseError("tree vertex must start with 'r'", text, 0)
    try:
        return tuple(int(p) for p in parts[1:])
    except ValueError:
        raise ParseError("tree digits must be integers", text, 2) from None


def _format_tree(v) -> str:
    return ".".join(["r", *map(str, v)])


def _parse_dl(text: str):
    parts = text.split("|")
    if len(parts) != 3:
        raise ParseError("DL vertex must look like 'h|d1|d2'", text, 0)
    try:
        h = int(parts[0])
        d1 = tuple(int(c) for c in parts[1].split(".") if c)
        d2 = tuple(int(c) for c in parts[2].split(".") if c)
    except ValueError:
        raise ParseError("DL vertex fields must be integers", text, 0) from None
    return (h, d1, d2)


def _format_dl(v) -> str:
    h, d1, d2 = v
    return f"{h}|{'.'.join(map(str, d1))}|{'.'.join(map(str, d2))}"


# --- family constructors ----------------------------------------------------

def zd(d: int) -> GraphOracle:
    if d < 1:
        raise ValueError("dimension must be >= 1")

    @lru_cache(maxsize=1 << 16)
    def nbrs(v):
        out = []
        for i in range(d):
            for s in (-1, 1):
                w = list(v)
                w[i] += s
                out.append(tuple(w))
        return tuple(out)

    def cap(n: int) -> Optional[int]:
        if d == 1:
            return None
        # |dW| >= 2d |W|^{(d-1)/d}  (d = 2: perimeter >= 4 sqrt(area))
        bound = (n / (2 * d)) ** (d / (d - 1))
        return int(math.floor(bound + 1e-9))

    origin = (0,) * d
    e1 = lambda k: (k,) + (0,) * (d - 1)  # noqa: E731
    e1m = lambda k: (-k,) + (0,) * (d - 1)  # noqa: E731
    return GraphOracle(
        name=f"zd:{d}", max_degree=2 * d, root=origin, neighbor_fn=nbrs,
        rays=(e1, e1m), interior_cap_fn=cap, transitive=True,
        parse_vertex=_parse_ints, format_vertex=_format_ints, params=(d,),
    )


def line() -> GraphOracle:
    base = zd(1)
    return GraphOracle(
        name="line", max_degree=2, root=(0,), neighbor_fn=base.neighbor_fn,
        rays=base.rays, interior_cap_fn=lambda n: None, transitive=True,
        parse_vertex=_parse_ints, format_vertex=_format_ints,
    )


def tree(k: int) -> GraphOracle:
    if k < 2:
        raise ValueError("tree degree must be >= 2")

    @lru_cache(maxsize=1 << 16)
    def nbrs(v):
        if not v:
            return tuple((i,) for i in range(k))
        return (v[:-1],) + tuple(v + (i,) for i in range(k - 1))

    def cap(n: int) -> Optional[int]:
        # every finite connected W has |dW| = (k - 2)|W| + 2
        if k == 2:
            return None
        return max((n - 2) // (k - 2), 0)

    return GraphOracle(
        name=f"tree:{k}", max_degree=k, root=(), neighbor_fn=nbrs,
        rays=(lambda n: (0,) * n if n else (), lambda n: (1,) + (0,) * (n - 1) if n else ()),
        interior_cap_fn=cap, transitive=True,
        parse_vertex=_parse_tree, format_vertex=_format_tree, params=(k,),
    )


def wedge() -> GraphOracle:
    @lru_cache(maxsize=1 << 16)
    def nbrs(v):
        if not in_wedge(v):
            raise ValueError(f"{v!r} is not a wedge vertex")
        a, b = v
        cand = ((a - 1, b), (a + 1, b), (a, b - 1), (a, b + 1))
        return tuple(w for w in cand if in_wedge(w))

    return GraphOracle(
        name="wedge:ln", max_degree=4, root=(0, 0), neighbor_fn=nbrs,
        rays=None, interior_cap_fn=lambda n: None, transitive=False,
        parse_vertex=_parse_ints, format_vertex=_format_ints,
    )


def strip(h: int) -> GraphOracle:
    if h < 1:
        raise ValueError("strip height must be >= 1")

    @lru_cache(maxsize=1 << 16)
    def nbrs(v):
        a, b = v
        if not 0 <= b < h:
            raise ValueError(f"{v!r} is not a strip vertex")
        cand = ((a - 1, b), (a + 1, b), (a, b - 1), (a, b + 1))
        return tuple(w for w in cand if 0 <= w[1] < h)

    return GraphOracle(
        name=f"strip:{h}", max_degree=4 if h > 2 else (3 if h == 2 else 2),
        root=(0, 0), neighbor_fn=nbrs,
        rays=(lambda k: (k, 0), lambda k: (-k, 0)),
        interior_cap_fn=lambda n: None, transitive=False,
        parse_vertex=_parse_ints, format_vertex=_format_ints, params=(h,),
    )


def _horo_parent(x):
    h, d = x
    return (h + 1, d[:-1])


def _horo_children(x, q):
    h, d = x
    if not d:
        return ((h - 1, ()),) + tuple((h - 1, (i,)) for i in range(1, q))
    return tuple((h - 1, d + (i,)) for i in range(q))


def diestel_leader(q: int, r: int) -> GraphOracle:
    if q < 2 or r < 2:
        raise ValueError("DL(q, r) needs q, r >= 2")

    @lru_cache(maxsize=1 << 18)
    def nbrs(v):
        h, d1, d2 = v
        x, y = (h, d1), (-h, d2)
        out = []
        xp = _horo_parent(x)
        for yc in _horo_children(y, r):
            out.append((xp[0], xp[1], yc[1]))
        yp = _horo_parent(y)
        for xc in _horo_children(x, q):
            out.append((xc[0], xc[1], yp[1]))
        return tuple(out)

    # height changes by exactly one per step, so the two base-line rays
    # climbing in opposite tree directions form a bi-infinite geodesic
    return GraphOracle(
        name=f"dl:{q},{r}", max_degree=q + r, root=(0, (), ()), neighbor_fn=nbrs,
        rays=(lambda k: (k, (), ()), lambda k: (-k, (), ())),
        interior_cap_fn=lambda n: None, transitive=True,
        parse_vertex=_parse_dl, format_vertex=_format_dl, params=(q, r),
    )


_SPEC_RE = re.compile(r"^(?P<kind>[a-z]+)(?::(?P<args>.*))?$")


def make_family(spec: str) -> GraphOracle:
    """Build an oracle from a family spec string such as ``"zd:2"``."""
    m = _SPEC_RE.match(spec.strip())
    if not m:
        raise ParseError("malformed family spec", spec, 0)
    kind, args = m.group("kind"), m.group("args")
    arg_pos = len(kind) + 1

    def ints(expected: int) -> tuple:
        if args is None:
            raise ParseError(f"'{kind}' needs {expected} integer argument(s)", spec, len(kind))
        parts = args.split(",")
        if len(parts) != expected:
            raise ParseError(f"'{kind}' needs {expected} integer argument(s)", spec, arg_pos)
        out = []
        pos = arg_pos
        for part in parts:
            if not re.fullmatch(r"\d+", part):
                raise ParseError("expected a positive integer", spec, pos)
            out.append(int(part))
            pos += len(part) + 1
        return tuple(out)

    if kind == "zd":
        (d,) = ints(1)
        if d < 1:
            raise ParseError("dimension must be >= 1", spec, arg_pos)
        return zd(d)
    if kind == "line":
        if args is not None:
            raise ParseError("'line' takes no arguments", spec, arg_pos)
        return line()
    if kind == "tree":
        (k,) = ints(1)
        if k < 2:
            raise ParseError("tree degree must be >= 2", spec, arg_pos)
        return tree(k)
    if kind == "wedge":
        if args != "ln":
            raise ParseError("only 'wedge:ln' is supported", spec, arg_pos)
        return wedge()
    if kind == "strip":
        (h,) = ints(1)
        if h < 1:
            raise ParseError("strip height must be >= 1", spec, arg_pos)
        return strip(h)
    if kind == "dl":
        q, r = ints(2)
        if q < 2 or r < 2:
            raise ParseError("DL parameters must be >= 2", spec, arg_pos)
        return diestel_leader(q, r)
    raise ParseError(f"unknown family '{kind}'", spec, 0)


FAMILY_SPECS = ("zd:<d>", "line", "tree:<k>", "wedge:ln", "strip:<h>", "dl:<q>,<r>")


def verify_bigeodesic_prefix(oracle: GraphOracle, depth: int, rays=None) -> bool:
    """Check d(x_n, y_m) == n + m for 1 <= n, m <= depth along the ray pair.

    ``rays`` overrides the family's declared pair (useful for families that
    declare none, such as the wedge).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    rays = rays if rays is not None else oracle.rays
    if rays is None:
        raise UnsupportedError(f"{oracle.name} declares no bi-infinite geodesic")
    rho, rho2 = rays
    if rho(0) != rho2(0):
        return False
    for n in range(1, depth + 1):
        for m in range(1, depth + 1):
            d = path_distance(oracle, rho(n), rho2(m), cap=n + m)
            if d != n + m:
                return False
    return True


def interior_cap(oracle: GraphOracle, boundary_size: int) -> Optional[int]:
    """Certified max |W| over connected W with |dW| == boundary_size, or None."""
    if boundary_size < 1:
        raise ValueError("boundary_size must be >= 1")
    if oracle.interior_cap_fn is None:
        return None
    return oracle.interior_cap_fn(boundary_size)
