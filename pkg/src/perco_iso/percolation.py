"""Bernoulli bond percolation on finite windows.

Monte Carlo estimators for the rim-connection proxy of theta_p and for the
finite-volume two-point finite connectivity, plus an exhaustive oracle for
windows with at most 24 edges.  The exhaustive oracle computes the
connectivity twice: once from cluster labelling of every configuration
(open-edge form) and once from closed-edge sets, by matching them against
the window's contours (closed-set form).  Both return integer histograms
over the number of closed edges, so probabilities are exact rationals.

Finite-volume convention: a cluster counts as finite when it contains no rim
vertex.  A rim vertex has an edge leaving the window, whose state is not part
of the configuration, so clusters touching the rim cannot have their whole
edge boundary inside the window.  ``reading="free"`` instead treats the
window as a stand-alone finite graph.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, Iterable, Optional, Sequence

import mpmath
import numpy as np

from . import _kernels
from .contours import EnumerationPlan, enumerate_contours
from .errors import BudgetExceeded, PaddingError
from .graph import GraphOracle, Window, ball, path_distance
from .rng import block_ranges, block_uniforms

MAX_EXACT_EDGES = 24
READINGS = {"rim-free": 0, "free": 1}


def as_fraction(p) -> Fraction:
    """Exact rational for p; floats are read through their shortest repr."""
    if isinstance(p, Fraction):
        return p
    if isinstance(p, float):
        return Fraction(repr(p))
    return Fraction(p)


# --- configurations -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EdgeConfiguration:
    window: Window
    open: np.ndarray  # bool per window edge

    def __post_init__(self):
        if self.open.shape != (len(self.window.edges),):
            raise ValueError("one state per window edge is required")

    @property
    def open_edges(self) -> frozenset:
        return frozenset(e for e, s in zip(self.window.edges, self.open) if s)

    @property
    def closed_edges(self) -> frozenset:
        return frozenset(e for e, s in zip(self.window.edges, self.open) if not s)

    def weight(self, p) -> Fraction:
        p = as_fraction(p)
        n_open = int(self.open.sum())
        return p ** n_open * (1 - p) ** (len(self.open) - n_open)


def sample_configuration(window: Window, p: float, rng: np.random.Generator) -> EdgeConfiguration:
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    return EdgeConfiguration(window, rng.random(len(window.edges)) < p)


def open_cluster_of(config: EdgeConfiguration, x) -> tuple[frozenset, bool]:
    w = config.window
    if x not in w.index:
        raise ValueError(f"{x!r} is not in the window")
    adj: dict = {}
    for (a, b), s in zip(w.edge_index, config.open):
        if s:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
    start = w.index[x]
    seen = {start}
    stack = [start]
    while stack:
        for j in adj.get(stack.pop(), ()):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    cluster = frozenset(w.vertices[i] for i in seen)
    return cluster, bool(seen & w.rim_index)


# --- Monte Carlo ----------------------------------------------------------------

@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples: int
    successes: int
    seed: int
    window: str
    event: str
    p: float = float("nan")

    @classmethod
    def from_counts(cls, successes: int, samples: int, **meta) -> "Estimate":
        v = successes / samples
        return cls(value=v, stderr=math.sqrt(v * (1 - v) / samples), samples=samples,
                   successes=successes, **meta)

    def merge(self, other: "Estimate") -> "Estimate":
        if (self.window, self.event, self.p) != (other.window, other.event, other.p):
            raise ValueError("can only merge estimates of the same event")
        return Estimate.from_counts(self.successes + other.successes, self.samples + other.samples,
                                    seed=self.seed, window=self.window, event=self.event, p=self.p)


def _window_arrays(window: Window):
    eu = np.array([a for a, _ in window.edge_index], dtype=np.int32)
    ev = np.array([b for _, b in window.edge_index], dtype=np.int32)
    rim = np.zeros(len(window.vertices), dtype=np.bool_)
    for i in window.rim_index:
        rim[i] = True
    return eu, ev, rim


def _count_block(block, n, *, seed, eu, ev, n_vertices, rim, xs, ys, mode, ps):
    u = block_uniforms(seed, block, n, len(eu))
    out = np.zeros((len(ps), len(xs)), dtype=np.int64)
    for i, p in enumerate(ps):
        roots = _kernels.label_block(u, p, eu, ev, n_vertices)
        out[i] = _kernels.pair_events(roots, rim, xs, ys, mode).sum(axis=0)
    return out


def count_events(window: Window, pairs: Sequence[tuple], ps: Sequence[float], samples: int,
                 seed: int, mode: int, workers: int = 1) -> np.ndarray:
    """Success counts of shape (len(ps), len(pairs)); draws are shared across p.

    Work is split into fixed blocks so the counts do not depend on ``workers``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    eu, ev, rim = _window_arrays(window)
    xs = np.array([window.index[x] for x, _ in pairs], dtype=np.int32)
    ys = np.array([window.index[y] for _, y in pairs], dtype=np.int32)
    task = partial(_count_block, seed=seed, eu=eu, ev=ev, n_vertices=len(window.vertices),
                   rim=rim, xs=xs, ys=ys, mode=mode, ps=tuple(float(p) for p in ps))
    blocks = block_ranges(samples)
    if workers <= 1 or len(blocks) == 1:
        parts = [task(b, n) for b, n in blocks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(task, *zip(*blocks)))
    return np.sum(parts, axis=0)


def theta_events(window: Window, x, ps: Sequence[float], uniforms: np.ndarray) -> np.ndarray:
    """Per-sample rim-connection indicators, shape (len(ps), n_samples), for given draws."""
    eu, ev, rim = _window_arrays(window)
    xs = np.array([window.index[x]], dtype=np.int32)
    out = np.empty((len(ps), uniforms.shape[0]), dtype=np.bool_)
    for i, p in enumerate(ps):
        roots = _kernels.label_block(uniforms, float(p), eu, ev, len(window.vertices))
        out[i] = _kernels.pair_events(roots, rim, xs, xs, 2)[:, 0]
    return out


def estimate_theta(oracle: GraphOracle, x, p: float, radii: Iterable[int], samples: int,
                   seed: int, workers: int = 1) -> list[Estimate]:
    """P(cluster of x reaches the rim of ball(x, radius)) for each radius.

    The proxy decreases with the radius and bounds theta_p(x) from above.
    """
    out = []
    for radius in radii:
        w = ball(oracle, x, radius)
        counts = count_events(w, [(x, x)], [p], samples, seed, mode=2, workers=workers)
        out.append(Estimate.from_counts(int(counts[0, 0]), samples, seed=seed, window=w.descriptor,
                                        event=f"cluster of {oracle.format_vertex(x)} reaches rim",
                                        p=float(p)))
    return out


def _check_reading(window: Window, xs, reading: str) -> int:
    if reading not in READINGS:
        raise ValueError(f"unknown reading {reading!r}; use one of {sorted(READINGS)}")
    for v in xs:
        if v not in window.index:
            raise ValueError(f"{v!r} is not in the window")
        if reading == "rim-free" and v in window.rim:
            raise PaddingError(f"{v!r} lies on the window rim")
    return READINGS[reading]


def estimate_phi_pairs(window: Window, pairs: Sequence[tuple], ps: Sequence[float], samples: int,
                       seed: int, reading: str = "rim-free", workers: int = 1) -> dict:
    """Estimates keyed by (p, pair) sharing one set of draws."""
    mode = _check_reading(window, [v for pr in pairs for v in pr], reading)
    counts = count_events(window, pairs, ps, samples, seed, mode, workers)
    fmt = window.oracle.format_vertex
    out = {}
    for i, p in enumerate(ps):
        for j, (x, y) in enumerate(pairs):
            out[(p, (x, y))] = Estimate.from_counts(
                int(counts[i, j]), samples, seed=seed, window=window.descriptor,
                event=f"phi_f[{reading}]({fmt(x)};{fmt(y)})", p=float(p))
    return out


def estimate_phi_f(oracle: GraphOracle, x, y, p: float, window: Window, samples: int, seed: int,
                   reading: str = "rim-free", workers: int = 1) -> Estimate:
    if window.oracle is not oracle and window.oracle.name != oracle.name:
        raise ValueError("window belongs to a different graph")
    return estimate_phi_pairs(window, [(x, y)], [p], samples, seed, reading, workers)[(p, (x, y))]


# --- exhaustive oracle --------------------------------------------------------

def _ranges(total: int, chunk: int = 1 << 20):
    return [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]


def _polynomial(hist, p: Fraction) -> Fraction:
    E = len(hist) - 1
    q = 1 - p
    return sum((int(c) * p ** (E - k) * q ** k for k, c in enumerate(hist) if c), Fraction(0))


def _lambda_form(hist, p: Fraction) -> Fraction:
    """sum_C lambda^|C| / Z_N with Z_N = p^(-|E_N|)."""
    if p == 0:
        raise ValueError("the closed-set form needs p > 0")
    E = len(hist) - 1
    lam = (1 - p) / p
    return sum((int(c) * lam ** k for k, c in enumerate(hist) if c), Fraction(0)) * p ** E


@dataclass
class ExactConnectivity:
    """Exhaustive two-point finite connectivity on a window with <= 24 edges."""

    window: Window
    x: object
    y: object
    reading: str = "rim-free"
    workers: int = 1
    _event_hist: Optional[np.ndarray] = field(default=None, repr=False)
    _total_hist: Optional[np.ndarray] = field(default=None, repr=False)
    _contour_hist: Optional[np.ndarray] = field(default=None, repr=False)
    surrounding: list = field(default_factory=list, repr=False)
    separating: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.mode = _check_reading(self.window, (self.x, self.y), self.reading)
        w = self.window
        if self.reading == "rim-free":
            # edges touching the rim enter only through "all closed", so only
            # edges between non-rim vertices are enumerated
            self._inner = [k for k, (a, b) in enumerate(w.edge_index)
                           if a not in w.rim_index and b not in w.rim_index]
        else:
            self._inner = list(range(len(w.edges)))
        if len(self._inner) > MAX_EXACT_EDGES:
            raise BudgetExceeded(f"{len(self._inner)} enumerated edges exceed the exhaustive "
                                 f"budget of {MAX_EXACT_EDGES}")

    @property
    def n_edges(self) -> int:
        return len(self.window.edges)

    @property
    def n_enumerated(self) -> int:
        return len(self._inner)

    def event_histogram(self) -> np.ndarray:
        """Configurations with the event, by number of closed window edges."""
        if self._event_hist is None:
            if self.reading == "rim-free":
                self._event_hist, self._total_hist = self._rimfree_histogram()
            else:
                self._event_hist, self._total_hist = self._full_histogram(self.mode)
        return self._event_hist

    def _full_histogram(self, mode):
        eu, ev, rim = _window_arrays(self.window)
        w = self.window
        hist = np.zeros(self.n_edges + 1, dtype=np.int64)
        total = np.zeros(self.n_edges + 1, dtype=np.int64)
        task = partial(_kernels.exhaustive_cluster_histogram, eu, ev, len(w.vertices), rim,
                       w.index[self.x], w.index[self.y], mode)
        for h, t in _map(task, _ranges(1 << self.n_edges), self.workers):
            hist += h
            total += t
        return hist, total

    def full_enumeration_histogram(self) -> np.ndarray:
        """Event histogram from all 2^|E| configurations, without the rim reduction."""
        if self.n_edges > MAX_EXACT_EDGES:
            raise BudgetExceeded(f"{self.n_edges} edges exceed the exhaustive budget")
        return self._full_histogram(self.mode)[0]

    def _rimfree_histogram(self):
        w = self.window
        eu_all, ev_all, _ = _window_arrays(w)
        eu, ev = eu_all[self._inner], ev_all[self._inner]
        rim_degree = np.zeros(len(w.vertices), dtype=np.int64)
        for a, b in w.edge_index:
            if (a in w.rim_index) != (b in w.rim_index):
                rim_degree[b if a in w.rim_index else a] += 1
        Ei = len(self._inner)
        hist2 = None
        total = np.zeros(Ei + 1, dtype=np.int64)
        task = partial(_kernels.exhaustive_rimfree_histogram, eu, ev, len(w.vertices), rim_degree,
                       w.index[self.x], w.index[self.y])
        for h, t in _map(task, _ranges(1 << Ei), self.workers):
            hist2 = h if hist2 is None else hist2 + h
            total += t
        # spread over the free outer edges: b forced closed, the rest either way
        outer = self.n_edges - Ei
        hist = [0] * (self.n_edges + 1)
        full_total = [0] * (self.n_edges + 1)
        for c in range(Ei + 1):
            for j in range(outer + 1):
                full_total[c + j] += int(total[c]) * math.comb(outer, j)
            for b in range(hist2.shape[1]):
                n = int(hist2[c, b])
                if n:
                    for j in range(outer - b + 1):
                        hist[c + b + j] += n * math.comb(outer - b, j)
        return np.array(hist, dtype=object), np.array(full_total, dtype=object)

    def total_histogram(self) -> np.ndarray:
        self.event_histogram()
        return self._total_hist

    def window_contours(self):
        """Window contours surrounding both points and those separating them."""
        if not self.surrounding and not self.separating:
            w = self.window
            X = frozenset((self.x, self.y))
            seen = set()
            for anchor in sorted(X):
                plan = EnumerationPlan(anchor, len(w.interior), False, "all window interiors")
                for c in enumerate_contours(w, {anchor}, self.n_edges, plan=plan):
                    if c.gamma in seen:
                        continue
                    seen.add(c.gamma)
                    if X <= c.interior:
                        self.surrounding.append(c)
                    else:
                        self.separating.append(c)
        return self.surrounding, self.separating

    def contour_histogram(self) -> np.ndarray:
        """Closed sets containing a surrounding contour and no separating one."""
        if self.reading != "rim-free":
            raise ValueError("the closed-set form is defined for the rim-free reading only")
        if self.n_edges > MAX_EXACT_EDGES:
            raise BudgetExceeded(f"{self.n_edges} edges exceed the closed-set enumeration budget "
                                 f"of {MAX_EXACT_EDGES}")
        if self._contour_hist is None:
            surround, separate = self.window_contours()
            pos = self.window.edge_position

            def mask(c):
                m = 0
                for e in c.gamma:
                    m |= 1 << pos[e]
                return m

            sm = np.array([mask(c) for c in surround], dtype=np.int64)
            tm = np.array([mask(c) for c in separate], dtype=np.int64)
            hist = np.zeros(self.n_edges + 1, dtype=np.int64)
            task = partial(_kernels.exhaustive_contour_histogram, self.n_edges, sm, tm)
            for h in _map(task, _ranges(1 << self.n_edges), self.workers):
                hist += h
            self._contour_hist = hist
        return self._contour_hist

    def phi(self, p) -> Fraction:
        """Open-edge form: sum of p^|O| (1-p)^|C| over configurations with the event."""
        return _polynomial(self.event_histogram(), as_fraction(p))

    def phi_lambda_form(self, p) -> Fraction:
        return _lambda_form(self.contour_histogram(), as_fraction(p))

    def normalization(self, p) -> float:
        """Float sum of all configuration weights (should be 1 to round-off)."""
        p = float(p)
        E = self.n_edges
        total = self.total_histogram()
        return math.fsum(int(c) * p ** (E - k) * (1 - p) ** k for k, c in enumerate(total))

    def contour_sum(self, p) -> Fraction:
        """sum over window contours surrounding both points of lambda^|gamma|."""
        p = as_fraction(p)
        if p == 0:
            raise ValueError("lambda is infinite at p = 0")
        lam = (1 - p) / p
        surround, _ = self.window_contours()
        return sum((lam ** c.size for c in surround), Fraction(0))


def _map(fn, ranges, workers):
    if workers <= 1 or len(ranges) == 1:
        return [fn(lo, hi) for lo, hi in ranges]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*ranges)))


def exact_phi_f(window: Window, x, y, p, reading: str = "rim-free") -> Fraction:
    return ExactConnectivity(window, x, y, reading).phi(p)


def exact_event(window: Window, predicate: Callable[[EdgeConfiguration], bool], p,
                max_edges: int = 20) -> Fraction:
    """Exact probability of an arbitrary event by summing over all configurations.

    ``predicate`` is called once per configuration, so this is meant for
    windows of up to about 20 edges.
    """
    E = len(window.edges)
    if E > max_edges:
        raise BudgetExceeded(f"{E} edges exceed the budget of {max_edges} for Python predicates")
    p = as_fraction(p)
    bits = np.arange(E)
    hist = [0] * (E + 1)
    for cfg in range(1 << E):
        state = ((cfg >> bits) & 1).astype(bool)
        if predicate(EdgeConfiguration(window, state)):
            hist[E - int(state.sum())] += 1
    return _polynomial(hist, p)


# --- bracket checks -----------------------------------------------------------

def _mp(v) -> mpmath.mpf:
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def check_supercritical_brackets(window: Window, x, y, p, bundle, f_xy: int,
                                 exact: Optional[ExactConnectivity] = None) -> dict:
    """Evaluate exact phi and the contour-sum and closed-form bounds around it.

    Slack is (upper - phi) for upper bounds and (phi - lower) for lower
    bounds; an inequality holds when its slack is >= 0.
    """
    exact = exact or ExactConnectivity(window, x, y)
    pf = as_fraction(p)
    phi = exact.phi(pf)
    checks = []
    with mpmath.workdps(60):
        phi_mp = _mp(phi)
        if pf > 0:
            csum = exact.contour_sum(pf)
            checks.append({"bound": "contour sum", "kind": "upper", "value": float(csum),
                           "slack": float(_mp(csum - phi)), "holds": csum >= phi})
        lam = _mp((1 - pf) / pf) if pf > 0 else mpmath.inf
        pm = _mp(pf)
        R = mpmath.mpf(bundle.R)
        if bundle.in_wedge_range(float(pf)) or pf == 1:
            lower = mpmath.mpf(1) / 3 * (lam * pm ** (1 + 1 / R)) ** f_xy
            upper = mpmath.mpf(4) / 3 * (mpmath.mpf(bundle.r_bar or 0) * lam) ** f_xy
            checks.append({"bound": "contour-distance lower", "kind": "lower", "value": float(lower),
                           "slack": float(phi_mp - lower), "holds": bool(phi_mp >= lower)})
            if bundle.r_bar is not None:
                checks.append({"bound": "contour-distance upper", "kind": "upper",
                               "value": float(upper), "slack": float(upper - phi_mp),
                               "holds": bool(upper >= phi_mp)})
        if window.oracle.has_bigeodesic and bundle.in_geodesic_range(float(pf)):
            d = path_distance(window.oracle, x, y, cap=len(window.vertices))
            if d is not None:
                upper = mpmath.mpf(4) / 3 * (mpmath.mpf(bundle.r) * lam) ** (R * d)
                checks.append({"bound": "geodesic upper", "kind": "upper", "value": float(upper),
                               "slack": float(upper - phi_mp), "holds": bool(upper >= phi_mp)})
    return {
        "p": str(pf),
        "phi_exact": str(phi),
        "phi": float(phi),
        "f_xy": f_xy,
        "in_wedge_range": bundle.in_wedge_range(float(pf)),
        "in_geodesic_range": bundle.in_geodesic_range(float(pf)),
        "checks": checks,
        "all_hold": all(c["holds"] for c in checks),
    }
