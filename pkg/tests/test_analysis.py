import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perco_iso.analysis import DecayCurve, bracket_compare, classify_decay, fit_exponential, fit_polynomial
from perco_iso.errors import DomainError, InsufficientData
from perco_iso.peierls import bundle


def curve(fn, ds=range(1, 11), **meta):
    return DecayCurve.from_points([(d, fn(d)) for d in ds], **meta)


def test_exact_exponential_recovery():
    f = fit_exponential(curve(lambda d: 0.5 * math.exp(-0.7 * d)))
    assert f.slope == pytest.approx(0.7, abs=1e-6)
    assert f.intercept == pytest.approx(math.log(0.5), abs=1e-6)
    assert f.residual < 1e-9


def test_exact_power_law_recovery():
    f = fit_polynomial(curve(lambda n: (1 + n) ** -2.0))
    assert f.slope == pytest.approx(2.0, abs=1e-6) and f.residual < 1e-9


def test_classification():
    assert classify_decay(curve(lambda d: 0.5 * math.exp(-0.7 * d))).label == "exponential"
    assert classify_decay(curve(lambda n: (1 + n) ** -2.0)).label == "polynomial"
    assert classify_decay(curve(lambda d: 0.3)).label == "inconclusive"


def test_insufficient_and_zero_points():
    with pytest.raises(InsufficientData):
        fit_exponential(curve(lambda d: 0.1, ds=range(1, 4)))
    c = DecayCurve.from_points([(1, 0.5), (2, 0.25), (3, 0.0), (4, 0.125), (5, 0.0625)])
    assert fit_exponential(c).n_dropped == 1
    c = DecayCurve.from_points([(1, 0.5), (2, 0.0), (3, 0.0), (4, 0.1), (5, 0.05)])
    with pytest.raises(InsufficientData):
        fit_polynomial(c)


def test_curve_invariants():
    with pytest.raises(ValueError):
        DecayCurve.from_points([(2, 0.1), (1, 0.2)])
    with pytest.raises(ValueError):
        DecayCurve.from_points([(1, 1.5)])


@given(st.floats(0.01, 3.0), st.floats(-5, 0), st.floats(0.01, 50.0))
@settings(max_examples=60, deadline=None)
def test_fit_recovery_and_scale_equivariance(rate, a, c):
    base = curve(lambda d: min(1.0, math.exp(a - rate * d)), ds=range(1, 9))
    fe = fit_exponential(base)
    if all(v < 1 for v in base.values):
        assert fe.slope == pytest.approx(rate, rel=1e-6)
    scaled_vals = [v * c for v in base.values]
    if max(scaled_vals) <= 1:
        scaled = DecayCurve.from_points(list(zip(base.distances, scaled_vals)))
        for fit in (fit_exponential, fit_polynomial):
            f0, f1 = fit(base), fit(scaled)
            assert f1.slope == pytest.approx(f0.slope, abs=1e-9)
            assert f1.intercept == pytest.approx(f0.intercept + math.log(c), abs=1e-9)


def test_noisy_weighting_uses_stderr():
    pts = [(d, 0.5 * math.exp(-0.3 * d), 0.001 * math.exp(-0.3 * d)) for d in range(1, 9)]
    pts[-1] = (8, pts[-1][1] * 1.5, 10.0)  # a very uncertain outlier barely moves the fit
    f = fit_exponential(DecayCurve.from_points(pts))
    assert f.slope == pytest.approx(0.3, abs=1e-3)


def test_bracket_compare():
    b = bundle(4, 0.5, 1.0)
    p = 0.99999
    lam = (1 - p) / p
    fs = [1, 2, 2, 3]
    vals = [lam ** f for f in fs]
    c = DecayCurve.from_points([(d, v) for d, v in zip(range(1, 5), vals)], p=p)
    rep = bracket_compare(c, b, fs)
    assert all(r["pass"] for r in rep)
    bad = DecayCurve.from_points([(1, 0.5), (2, 0.4)], p=p)
    rep = bracket_compare(bad, b, [3, 3])
    assert not any(r["pass"] for r in rep)
    with pytest.raises(InsufficientData):
        bracket_compare(c, b, [])
    with pytest.raises(DomainError):
        bracket_compare(DecayCurve.from_points([(1, 0.1)], p=0.9), b, [1])
