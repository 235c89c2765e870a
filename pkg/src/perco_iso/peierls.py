"""Closed-form Peierls constants and threshold bounds.

Given the maximum degree, an estimate of the contour constant (and
optionally of the wedge constant) this module evaluates the contour growth
rates, the resulting upper bounds on p_c, the high-density validity ranges
of the two-point bounds and the decay exponents used on the log-wedge.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Mapping, Optional

from .errors import DomainError


def peierls_bound(r: float) -> float:
    """p_c <= 1 - 1/(2r) when contour counts grow at most like r^n."""
    if not r >= 1:
        raise DomainError(f"growth rate must be >= 1, got {r}")
    return 1.0 - 1.0 / (2.0 * r)


def growth_rate(max_degree: int, R: float) -> float:
    """(2 e D^2)^(1/R)."""
    return (2.0 * math.e * max_degree ** 2) ** (1.0 / R)


def wedge_growth_rate(max_degree: int, R: float, P: float) -> float:
    """e^(1/P) (2 D^2)^(1/R)."""
    return math.exp(1.0 / P) * (2.0 * max_degree ** 2) ** (1.0 / R)


def lam(p: float) -> float:
    return (1.0 - p) / p


@dataclass(frozen=True)
class PeierlsBundle:
    max_degree: int
    R: float
    P: Optional[float]
    r: float
    r_bar: Optional[float]
    pc_bound: float                   # from r (bi-infinite geodesic case)
    pc_bound_wedge: Optional[float]   # from r_bar (wedge-constant case)
    p_min_geodesic: float             # p >= 4r/(4r+1)
    p_min_wedge: Optional[float]      # p >= 4 r_bar/(1 + 4 r_bar), i.e. lambda <= 1/(4 r_bar)
    p_min_wedge_as_printed: Optional[float]  # 4 r_bar/(1 + r_bar), exceeds 1 for r_bar > 1/3
    scale: str = ""

    def alpha1(self, p: float) -> float:
        """|ln((1-p) p^(1/R))|, the lower-bound decay exponent."""
        return abs(math.log((1.0 - p) * p ** (1.0 / self.R)))

    def alpha2(self, p: float) -> float:
        """|ln(r_bar (1-p)/p)|, the upper-bound decay exponent."""
        if self.r_bar is None:
            raise DomainError("alpha2 needs a wedge constant")
        return abs(math.log(self.r_bar * lam(p)))

    def in_geodesic_range(self, p: float) -> bool:
        return p >= self.p_min_geodesic

    def in_wedge_range(self, p: float) -> bool:
        if self.r_bar is None:
            return False
        return p > 0 and lam(p) <= 1.0 / (4.0 * self.r_bar)

    def as_record(self) -> dict:
        rec = asdict(self)
        rec["notes"] = [
            "R and P are windowed estimates (upper bounds on the true infima); "
            "bounds derived from them are indicative, not certified.",
            "p_min_wedge uses lambda <= 1/(4 r_bar); p_min_wedge_as_printed is the "
            "literal 4 r_bar/(1 + r_bar) threshold, shown for comparison.",
        ]
        return rec


def bundle(max_degree: int, R: float, P: Optional[float] = None, scale: str = "") -> PeierlsBundle:
    if max_degree < 1:
        raise DomainError("maximum degree must be a positive integer")
    if not 0 < R <= 1:
        raise DomainError(f"contour constant estimate must lie in (0, 1], got {R}")
    if P is not None and not P > 0:
        raise DomainError(f"wedge constant estimate must be positive, got {P}")
    R = float(R)
    r = growth_rate(max_degree, R)
    r_bar = wedge_growth_rate(max_degree, R, float(P)) if P is not None else None
    return PeierlsBundle(
        max_degree=max_degree,
        R=R,
        P=float(P) if P is not None else None,
        r=r,
        r_bar=r_bar,
        pc_bound=peierls_bound(r),
        pc_bound_wedge=peierls_bound(r_bar) if r_bar is not None else None,
        p_min_geodesic=4 * r / (4 * r + 1),
        p_min_wedge=4 * r_bar / (1 + 4 * r_bar) if r_bar is not None else None,
        p_min_wedge_as_printed=4 * r_bar / (1 + r_bar) if r_bar is not None else None,
        scale=scale,
    )


@dataclass(frozen=True)
class GrowthCheck:
    status: str  # "pass", "fail", "inconclusive"
    first_violation: Optional[int] = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def growth_check(counts: Mapping[int, int], r: float, certified: bool = True) -> GrowthCheck:
    """Check |F^n(x)| <= r^n for every supplied n (in log space)."""
    if not certified:
        return GrowthCheck("inconclusive", note="counts are lower bounds, not certified")
    if not counts:
        return GrowthCheck("pass", note="no data")
    log_r = math.log(r)
    for n in sorted(counts):
        c = counts[n]
        if c > 0 and math.log(c) > n * log_r:
            return GrowthCheck("fail", first_violation=n, note=f"{c} > r^{n}")
    return GrowthCheck("pass")
