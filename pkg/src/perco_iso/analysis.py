"""Fitting and classifying connectivity decay curves.

Two models are fitted by weighted least squares on ln(phi): exponential
decay in the distance d and power-law decay in 1 + d.  Points with phi = 0
carry no information on a log scale and are dropped (their number is kept in
the fit metadata).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, InsufficientData

DEFAULT_RATIO = 0.8
MIN_POINTS = 4


@dataclass(frozen=True)
class DecayCurve:
    distances: tuple
    values: tuple
    stderrs: tuple
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        d, v, s = self.distances, self.values, self.stderrs
        if not len(d) == len(v) == len(s):
            raise ValueError("distances, values and stderrs must have equal length")
        if any(b <= a for a, b in zip(d, d[1:])):
            raise ValueError("distances must be strictly increasing")
        if any(not 0 <= x <= 1 for x in v):
            raise ValueError("values must lie in [0, 1]")

    @classmethod
    def from_points(cls, points, **meta) -> "DecayCurve":
        """Build from (d, value[, stderr]) triples."""
        pts = [tuple(p) + (0.0,) * (3 - len(p)) for p in points]
        return cls(tuple(p[0] for p in pts), tuple(float(p[1]) for p in pts),
                   tuple(float(p[2]) for p in pts), dict(meta))

    def __len__(self):
        return len(self.distances)


@dataclass(frozen=True)
class Fit:
    model: str
    slope: float        # rate (exponential) or exponent (polynomial), both positive for decay
    intercept: float
    residual: float     # weighted RMS of ln(phi)
    n_points: int
    n_dropped: int

    def predict(self, d) -> float:
        x = d if self.model == "exponential" else math.log1p(d)
        return math.exp(self.intercept - self.slope * x)


def _usable(curve: DecayCurve):
    d = np.asarray(curve.distances, dtype=float)
    v = np.asarray(curve.values, dtype=float)
    s = np.asarray(curve.stderrs, dtype=float)
    keep = v > 0
    if keep.sum() < MIN_POINTS:
        raise InsufficientData(f"need at least {MIN_POINTS} points with phi > 0, "
                               f"got {int(keep.sum())}")
    return d[keep], v[keep], s[keep], int((~keep).sum())


def _weights(v, s):
    # delta method: sd(ln phi) ~ s / phi; exact points get equal weight
    if np.all(s == 0):
        return np.ones_like(v)
    rel = s / v
    floor = rel[rel > 0].min() if np.any(rel > 0) else 1.0
    rel = np.where(rel > 0, rel, floor)
    return 1.0 / rel ** 2


def _fit(x, y, w, model, n_dropped) -> Fit:
    sw = np.sqrt(w)
    A = np.column_stack([np.ones_like(x), -x]) * sw[:, None]
    coef, *_ = np.linalg.lstsq(A, y * sw, rcond=None)
    a, b = coef
    resid = y - (a - b * x)
    rms = math.sqrt(float(np.sum(w * resid ** 2) / np.sum(w)))
    return Fit(model, float(b), float(a), rms, len(x), n_dropped)


def fit_exponential(curve: DecayCurve) -> Fit:
    """ln phi = a - rate * d."""
    d, v, s, dropped = _usable(curve)
    return _fit(d, np.log(v), _weights(v, s), "exponential", dropped)


def fit_polynomial(curve: DecayCurve) -> Fit:
    """ln phi = a - exponent * ln(1 + d)."""
    d, v, s, dropped = _usable(curve)
    return _fit(np.log1p(d), np.log(v), _weights(v, s), "polynomial", dropped)


@dataclass(frozen=True)
class Classification:
    label: str
    exponential: Fit
    polynomial: Fit
    ratio: float


def classify_decay(curve: DecayCurve, threshold: float = DEFAULT_RATIO,
                   flat_tol: float = 1e-9) -> Classification:
    """Pick the model whose residual is below ``threshold`` times the other's.

    A curve with no decay at all (both slopes ~ 0) is inconclusive.
    """
    e, p = fit_exponential(curve), fit_polynomial(curve)
    if abs(e.slope) < flat_tol and abs(p.slope) < flat_tol:
        return Classification("inconclusive", e, p, 1.0)
    lo, hi = sorted((e.residual, p.residual))
    ratio = lo / hi if hi > 0 else 1.0
    if ratio < threshold:
        label = "exponential" if e.residual < p.residual else "polynomial"
    else:
        label = "inconclusive"
    return Classification(label, e, p, ratio)


def bracket_compare(curve: DecayCurve, bundle, f_values: Sequence[int], p: Optional[float] = None,
                    n_se: float = 3.0) -> list[dict]:
    """Compare each point against the contour-distance bracket.

    The lower and upper bounds are (1/3)(lambda p^(1+1/R))^f and
    (4/3)(r_bar lambda)^f.  A point passes when it lies within the bracket
    widened by ``n_se`` standard errors.
    """
    if not f_values:
        raise InsufficientData("no contour distances given")
    if len(f_values) != len(curve):
        raise ValueError("f_values must align with the curve points")
    p = curve.meta.get("p") if p is None else p
    if p is None:
        raise ValueError("p is needed (argument or curve metadata)")
    p = float(p)
    if not bundle.in_wedge_range(p):
        raise DomainError(
            f"p = {p} is outside the validity range: need (1-p)/p <= 1/(4 r_bar), "
            f"i.e. p >= {bundle.p_min_wedge}")
    lam = (1 - p) / p
    base_lo = lam * p ** (1 + 1 / bundle.R)
    base_hi = bundle.r_bar * lam
    out = []
    for d, v, s, f in zip(curve.distances, curve.values, curve.stderrs, f_values):
        lower = base_lo ** f / 3
        upper = 4 * base_hi ** f / 3
        ok = lower - n_se * s <= v <= upper + n_se * s
        out.append({"d": d, "f": f, "phi": v, "stderr": s, "lower": lower, "upper": upper,
                    "lower_slack": v - lower, "upper_slack": upper - v, "pass": ok})
    return out
