import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from multihom.asymptotics import (
    ScaledPoint,
    bsc_rate_function,
    gaussian_width,
    jstar,
    rate_derivative1,
    rate_derivative2,
    rate_function,
    turning_points,
    wkb_envelope,
    wkb_region,
    xbar_minimizer,
)
from multihom.channels import ExperimentConfig, bsc_oid, channel_oid_column, channel_table
from multihom.combinatorics import binary_relative_entropy

etas = st.floats(0.01, 0.99)


@st.composite
def interior_points(draw):
    eta = draw(etas)
    mbar = draw(st.floats(-0.45, 0.45))
    jbar = draw(st.floats(abs(mbar) + 1e-3, 0.5 - 1e-3))
    assume(jbar > abs(mbar) + 1e-3)
    return ScaledPoint(jbar, mbar, eta)


# --- minimizer ---------------------------------------------------------------

def test_xbar_limits():
    assert xbar_minimizer(ScaledPoint(0.3, 0.1, 0.0)) == 0.0
    with pytest.raises(ValueError):
        xbar_minimizer(ScaledPoint(0.3, 0.1, 1.0))
    with pytest.raises(ValueError):
        xbar_minimizer(ScaledPoint(0.05, 0.1, 0.5))
    assert xbar_minimizer(ScaledPoint(0.3, 0.1, 1e-9)) < 1e-8


@settings(max_examples=100)
@given(interior_points())
def test_xbar_stationarity(p):
    x = xbar_minimizer(p)
    j, m, eta = p.jbar, p.mbar, p.eta
    assert 0.0 <= x <= j - abs(m)
    resid = math.log(x**2 / ((j - m - x) * (j + m - x) * eta**2))
    assert abs(resid) < 1e-10


def test_xbar_vs_golden_section():
    p = ScaledPoint(0.3, 0.1, 0.5)
    q = p.eta / (1 + p.eta)
    a, b = p.jbar + p.mbar, p.jbar - p.mbar

    def bracket(x):
        return a * binary_relative_entropy(x / a, q) + b * binary_relative_entropy(x / b, q)

    res = minimize_scalar(bracket, bracket=(0.01, 0.1, 0.19), method="golden", tol=1e-12)
    assert xbar_minimizer(p) == pytest.approx(res.x, abs=1e-7)


# --- rate function -----------------------------------------------------------

@pytest.mark.parametrize("mbar", [0.0, 0.1, -0.3, 0.45])
@pytest.mark.parametrize("eta", [0.1, 0.4, 0.8])
def test_rate_zero_at_jstar(mbar, eta):
    js = jstar(mbar, eta)
    assert rate_function(ScaledPoint(js, mbar, eta)) == pytest.approx(0.0, abs=1e-12)
    assert rate_derivative1(ScaledPoint(js, mbar, eta)) == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=100)
@given(interior_points())
def test_rate_nonnegative(p):
    assert rate_function(p) >= -1e-15


@pytest.mark.parametrize("eta,mbar", [(0.4, 0.0), (0.7, 0.2), (0.2, -0.1)])
def test_rate_convex_grid(eta, mbar):
    js = np.linspace(abs(mbar), 0.5, 201)
    r = np.array([rate_function(ScaledPoint(j, mbar, eta)) for j in js])
    assert np.all(r[1:-1] <= 0.5 * (r[:-2] + r[2:]) + 1e-14)


def test_rate_boundaries():
    # j = |m| and j = 1/2 use 0 ln 0 = 0
    assert math.isfinite(rate_function(ScaledPoint(0.2, 0.2, 0.5)))
    assert math.isfinite(rate_function(ScaledPoint(0.5, 0.0, 0.5)))
    with pytest.raises(ValueError):
        rate_function(ScaledPoint(0.3, 0.0, 1.0))
    with pytest.raises(ValueError):
        rate_derivative1(ScaledPoint(0.2, 0.2, 0.5))
    with pytest.raises(ValueError):
        rate_derivative2(ScaledPoint(0.5, 0.0, 0.5))


@st.composite
def fd_points(draw, margin=0.01):
    eta = draw(etas)
    mbar = draw(st.floats(-0.45, 0.45))
    assume(abs(mbar) + margin < 0.5 - margin)
    jbar = draw(st.floats(abs(mbar) + margin, 0.5 - margin))
    return ScaledPoint(jbar, mbar, eta)


def _r(p):
    return lambda j: rate_function(ScaledPoint(j, p.mbar, p.eta))


@settings(max_examples=60)
@given(fd_points())
def test_derivatives_finite_difference(p):
    # centered differences, away from the singular edges where h^2 r''' dominates
    r, h = _r(p), 1e-5
    fd1 = (r(p.jbar + h) - r(p.jbar - h)) / (2 * h)
    assert rate_derivative1(p) == pytest.approx(fd1, abs=1e-5)
    h2 = 1e-4
    fd2 = (r(p.jbar + h2) - 2 * r(p.jbar) + r(p.jbar - h2)) / h2**2
    assert rate_derivative2(p) == pytest.approx(fd2, rel=1e-4, abs=1e-4)
    assert rate_derivative2(p) > 0


@settings(max_examples=30)
@given(fd_points(margin=1e-3))
def test_first_derivative_richardson(p):
    r = _r(p)
    h = 0.05 * min(p.jbar - abs(p.mbar), 0.5 - p.jbar)

    def d(step):
        return (r(p.jbar + step) - r(p.jbar - step)) / (2 * step)

    extrap = (4 * d(h / 2) - d(h)) / 3
    assert rate_derivative1(p) == pytest.approx(extrap, rel=1e-5, abs=1e-5)


@pytest.mark.parametrize("eta,mbar", [(0.4, 0.0), (0.6, 0.2), (0.3, -0.25)])
def test_curvature_at_jstar(eta, mbar):
    js = jstar(mbar, eta)
    expect = 16 * js**2 / (eta**2 * (1 - eta**2) * (1 - 4 * mbar**2))
    assert rate_derivative2(ScaledPoint(js, mbar, eta)) == pytest.approx(expect, rel=1e-12)


# --- j*, width ---------------------------------------------------------------

def test_jstar_values():
    assert jstar(0.2, 1.0) == 0.5
    assert jstar(-0.3, 0.0) == 0.3
    assert 240 * jstar(0.0, 0.4) == pytest.approx(48.0, rel=1e-15)
    with pytest.raises(ValueError):
        jstar(0.6, 0.5)


@pytest.mark.parametrize("eta,mbar", [(0.4, 0.0), (0.7, 0.15), (0.25, -0.3)])
def test_jstar_is_argmin(eta, mbar):
    grid = np.linspace(abs(mbar), 0.5, 20001)
    r = [rate_function(ScaledPoint(j, mbar, eta)) for j in grid]
    assert grid[int(np.argmin(r))] == pytest.approx(jstar(mbar, eta), abs=1e-4)


def test_gaussian_width_cases():
    assert gaussian_width(0.5, 0.4, 100) == 0.0
    assert gaussian_width(0.0, 0.0, 100) == 0.0
    assert gaussian_width(0.0, 1.0, 100) == 0.0
    assert gaussian_width(0.1, 0.4, 240) / gaussian_width(0.1, 0.4, 960) == pytest.approx(2.0, rel=1e-14)


def test_channel_mean_near_jstar():
    t = channel_table(ExperimentConfig.build(240, 0, 0.4, 1.0))
    mean_j = np.sum(t.spins / 2 * t.probs)
    assert abs(mean_j - 48) <= 240 * gaussian_width(0.0, 0.4, 240)


# --- WKB ---------------------------------------------------------------------

@settings(max_examples=100)
@given(st.integers(0, 200), st.data(), st.floats(0.01, math.pi - 0.01))
def test_wkb_region_and_turning_points(j2, data, theta):
    m2 = data.draw(st.sampled_from(range(-j2, j2 + 1, 2)))
    lo, hi = turning_points(j2, m2, theta)
    assert lo <= hi
    for tp in (lo, hi):
        assert abs(wkb_region(j2, m2, 2 * tp, theta)) < 1e-12 * (j2 + 1) ** 2
    center = m2 / 2 * math.cos(theta)
    big_j = (j2 + 1) / 2
    assert wkb_region(j2, m2, 2 * center, theta) == pytest.approx(
        (big_j**2 - (m2 / 2) ** 2) * math.sin(theta) ** 2, rel=1e-12, abs=1e-12)
    # sign change across the turning points
    eps = 1e-6 * (j2 + 1)
    assert wkb_region(j2, m2, 2 * (hi + eps), theta) < 0 < wkb_region(j2, m2, 2 * (hi - eps), theta)


def test_wkb_specializations():
    assert turning_points(120, 0, math.pi / 3) == pytest.approx((-60.5 * math.sin(math.pi / 3),
                                                                  60.5 * math.sin(math.pi / 3)))
    assert turning_points(10, 4, 0.0) == (2.0, 2.0)
    assert wkb_region(8, 0, 2, 0.7) == pytest.approx(4.5**2 * math.sin(0.7) ** 2 - 1, rel=1e-14)
    with pytest.raises(ValueError):
        turning_points(0, 4, 1.0)


def test_wkb_envelope_shape():
    j2, m2, theta = 120, 20, 1.0
    lo, hi = turning_points(j2, m2, theta)
    center = 10 * math.cos(theta)
    env_c = wkb_envelope(j2, m2, 2 * center, theta)
    for x in np.linspace(lo + 0.5, hi - 0.5, 31):
        assert wkb_envelope(j2, m2, 2 * x, theta) >= env_c - 1e-15
    assert wkb_envelope(j2, m2, 2 * (hi - 1e-6), theta) > 100 * env_c
    assert wkb_envelope(j2, m2, 2 * (hi + 1), theta) == 0.0


def test_channel_oid_peaks_at_turning_points():
    cfg = ExperimentConfig.build(120, 0, 1.0, math.pi / 3)
    p = channel_oid_column(120, cfg)
    mp = cfg.imbalances() / 2
    width = 5
    edges = np.arange(-60, 61 + width, width)
    mass, _ = np.histogram(mp, bins=edges, weights=p)
    centers = 0.5 * (edges[:-1] + edges[1:])
    top2 = sorted(centers[np.argsort(mass)[-2:]])
    lo, hi = turning_points(120, 0, math.pi / 3)
    assert abs(top2[0] - lo) <= 2 * width and abs(top2[1] - hi) <= 2 * width


# --- BSC rate ----------------------------------------------------------------

@pytest.mark.parametrize("mbar,f", [(0.0, 0.25), (0.2, 0.1), (-0.4, 0.6), (0.5, 0.3)])
def test_bsc_rate_zero_at_mean(mbar, f):
    assert bsc_rate_function(mbar * (1 - 2 * f), mbar, f) == pytest.approx(0.0, abs=1e-10)
    assert bsc_rate_function(mbar * (1 - 2 * f) + 0.05 * np.sign(0.5 - mbar * (1 - 2 * f) - 0.05 + 1e-9),
                             mbar, f) > 0


@settings(max_examples=50)
@given(st.floats(0.0, 0.5), st.floats(0.01, 0.99))
def test_bsc_rate_symmetric(x, f):
    assert bsc_rate_function(x, 0.0, f) == pytest.approx(bsc_rate_function(-x, 0.0, f), abs=1e-10)


def test_bsc_rate_degenerate():
    assert bsc_rate_function(0.2, 0.2, 0.0) == 0.0
    assert bsc_rate_function(0.1, 0.2, 0.0) == math.inf
    assert bsc_rate_function(-0.2, 0.2, 1.0) == 0.0
    assert bsc_rate_function(0.2, 0.2, 1.0) == math.inf
    with pytest.raises(ValueError):
        bsc_rate_function(0.7, 0.0, 0.5)


@pytest.mark.parametrize("mpbar", [0.15, -0.3])
def test_bsc_rate_convergence(mpbar):
    mbar, theta = 0.1, 1.0
    f = math.sin(theta / 2) ** 2
    rate = bsc_rate_function(mpbar, mbar, f)
    errs = []
    for n in (100, 400, 1600):
        d = bsc_oid(ExperimentConfig.build(n, int(round(2 * mbar * n)), 0.0, theta))
        p = d[int(round(2 * mpbar * n))]
        errs.append(abs(-math.log(p) / n - rate))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.01
