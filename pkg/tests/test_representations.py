import itertools
import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multihom.combinatorics import multiplicity
from multihom.representations import (
    GramMatrix,
    OccupationMatrix,
    Rotation,
    gl2_diag_element,
    gl2_element,
    louck_coefficient,
    rotation_matrix,
    terminating_2f1,
    wigner_d_column,
    wigner_small_d,
)

SQ2 = math.sqrt(2)


def mp_wigner_d(j2, mp2, m2, theta, dps=60):
    """Wigner's closed-form sum in high precision (independent of the package)."""
    with mpmath.workdps(dps):
        th = mpmath.mpf(theta)
        c, s = mpmath.cos(th / 2), mpmath.sin(th / 2)
        jpm, jmm = (j2 + m2) // 2, (j2 - m2) // 2
        jpmp, jmmp = (j2 + mp2) // 2, (j2 - mp2) // 2
        dm = (mp2 - m2) // 2
        f = mpmath.factorial
        total = mpmath.mpf(0)
        for k in range(0, j2 + 1):
            a, b, d = jpm - k, jmmp - k, k + dm
            if min(a, b, d) < 0:
                continue
            total += ((-1) ** (k + dm) * c ** (j2 - 2 * k - dm) * s ** (2 * k + dm)
                      / (f(a) * f(k) * f(b) * f(d)))
        return float(mpmath.sqrt(f(jpm) * f(jmm) * f(jpmp) * f(jmmp)) * total)


def spins(max_j2):
    return st.integers(0, max_j2).flatmap(
        lambda j2: st.tuples(st.just(j2), st.sampled_from(range(-j2, j2 + 1, 2)),
                             st.sampled_from(range(-j2, j2 + 1, 2))))


angles = st.floats(0.0, math.pi, allow_nan=False)


# --- Wigner small-d ----------------------------------------------------------

@pytest.mark.parametrize("theta", [0.0, 0.3, 1.0, math.pi / 2, 2.5, math.pi])
def test_small_d_low_order(theta):
    c, s = math.cos(theta), math.sin(theta)
    assert wigner_small_d(2, 0, 0, theta) == pytest.approx(c, abs=1e-15)
    assert wigner_small_d(2, 2, 0, theta) == pytest.approx(-s / SQ2, abs=1e-15)
    assert wigner_small_d(2, -2, 0, theta) == pytest.approx(s / SQ2, abs=1e-15)
    assert wigner_small_d(1, 1, 1, theta) == pytest.approx(math.cos(theta / 2), abs=1e-15)
    np.testing.assert_allclose(
        [[wigner_small_d(1, a, b, theta) for b in (1, -1)] for a in (1, -1)],
        rotation_matrix(theta), atol=1e-15)


@given(spins(40))
def test_small_d_identity(idx):
    j2, mp2, m2 = idx
    assert wigner_small_d(j2, mp2, m2, 0.0) == (1.0 if mp2 == m2 else 0.0)


def test_small_d_out_of_range_is_zero():
    assert wigner_small_d(2, 4, 0, 0.7) == 0.0
    assert wigner_small_d(2, 0, -4, 0.7, method="sum") == 0.0
    with pytest.raises(ValueError):
        wigner_small_d(2, 1, 0, 0.7)
    with pytest.raises(ValueError):
        wigner_small_d(2, 0, 0, 0.7, method="bogus")


@settings(max_examples=60, deadline=None)
@given(spins(60), angles)
def test_small_d_vs_mpmath(idx, theta):
    j2, mp2, m2 = idx
    ref = mp_wigner_d(j2, mp2, m2, theta)
    for method in ("recurrence", "sum"):
        assert wigner_small_d(j2, mp2, m2, theta, method=method) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("j2,theta", [(200, 1.0471975511965976), (240, 0.4), (300, 2.9), (121, 1.3)])
def test_small_d_large_j_vs_mpmath(j2, theta):
    rng = random.Random(j2)
    for _ in range(6):
        mp2 = rng.randrange(-j2, j2 + 1, 2)
        m2 = rng.randrange(-j2, j2 + 1, 2)
        ref = mp_wigner_d(j2, mp2, m2, theta, dps=400)
        got = wigner_small_d(j2, mp2, m2, theta)
        assert got == pytest.approx(ref, rel=1e-9, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 300), angles, st.data())
def test_unitarity_columns(j2, theta, data):
    m2 = data.draw(st.sampled_from(range(-j2, j2 + 1, 2)))
    col = wigner_d_column(j2, m2, theta)
    assert math.fsum(col * col) == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 40), angles)
def test_orthogonality_full_matrix(j2, theta):
    d = np.array([wigner_d_column(j2, m2, theta) for m2 in range(-j2, j2 + 1, 2)]).T
    np.testing.assert_allclose(d.T @ d, np.eye(j2 + 1), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(spins(80), angles)
def test_transpose_symmetry(idx, theta):
    j2, mp2, m2 = idx
    sign = (-1) ** ((mp2 - m2) // 2)
    a = wigner_small_d(j2, mp2, m2, theta)
    b = wigner_small_d(j2, m2, mp2, theta)
    assert a == pytest.approx(sign * b, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(spins(30), angles, angles)
def test_group_law(idx, a, b):
    j2, mp2, m2 = idx
    lhs = wigner_small_d(j2, mp2, m2, a + b)
    rhs = math.fsum(wigner_small_d(j2, mp2, k2, a) * wigner_small_d(j2, k2, m2, b)
                    for k2 in range(-j2, j2 + 1, 2))
    assert lhs == pytest.approx(rhs, abs=1e-12)


# --- terminating 2F1 ---------------------------------------------------------

def test_2f1_examples():
    assert float(terminating_2f1(6, 6, 0.4)) == 1.0
    assert float(terminating_2f1(6, -6, 0.4)) == 1.0
    assert float(terminating_2f1(7, 1, 0.0)) == 1.0
    for j2 in range(0, 41):
        for m2 in range(-j2, j2 + 1, 2):
            exact = math.comb(j2, (j2 + m2) // 2)
            assert float(terminating_2f1(j2, m2, 1.0)) == pytest.approx(exact, rel=1e-13)


@settings(max_examples=50)
@given(spins(120), st.floats(0.0, 1.0))
def test_2f1_vs_mpmath(idx, eta_sq):
    j2, m2, _ = idx
    a, b = (j2 + m2) // 2, (j2 - m2) // 2
    ref = mpmath.hyp2f1(-a, -b, 1, eta_sq)
    val = terminating_2f1(j2, m2, eta_sq)
    assert val.sign == 1
    assert val.log_abs == pytest.approx(float(mpmath.log(ref)), rel=1e-13, abs=1e-13)


def test_2f1_rejects_bad_input():
    with pytest.raises(ValueError):
        terminating_2f1(2, 4, 0.5)
    with pytest.raises(ValueError):
        terminating_2f1(2, 0, 1.5)


# --- GL(2) elements ----------------------------------------------------------

@pytest.mark.parametrize("eta", [0.0, 0.2, 0.5, 0.9, 1.0])
def test_gl2_diag_hom(eta):
    g = GramMatrix(eta)
    assert gl2_diag_element(2, 2, 0, g) == pytest.approx(1 + eta**2, rel=1e-15)
    assert gl2_diag_element(0, 2, 0, g) == pytest.approx(1 - eta**2, abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 40])
def test_gl2_diag_eta_one(n):
    g = GramMatrix(1.0)
    for m2 in range(-n, n + 1, 2):
        assert gl2_diag_element(n, n, m2, g) == pytest.approx(math.comb(n, (n + m2) // 2), rel=1e-13)
        for j2 in range(abs(m2), n, 2):
            assert gl2_diag_element(j2, n, m2, g) == 0.0


def test_gl2_diag_chi_independent():
    a = GramMatrix(0.6, chi=0.0)
    b = GramMatrix(0.6, chi=1.234)
    for j2 in range(0, 21, 2):
        assert gl2_diag_element(j2, 20, 0, a) == gl2_diag_element(j2, 20, 0, b)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 14), st.floats(0.0, 0.99), st.floats(-3, 3), st.data())
def test_gl2_diag_matches_general(n, eta, chi, data):
    j2 = data.draw(st.sampled_from(range(n % 2, n + 1, 2)))
    m2 = data.draw(st.sampled_from(range(-j2, j2 + 1, 2)))
    gram = GramMatrix(eta, chi)
    direct = gl2_element(j2, n, m2, m2, gram.matrix())
    assert direct.real == pytest.approx(gl2_diag_element(j2, n, m2, gram), rel=1e-11, abs=1e-13)
    assert abs(direct.imag) < 1e-11 * max(1.0, abs(direct))


def test_gl2_identity_and_rotation():
    for j2 in range(0, 9):
        for mp2 in range(-j2, j2 + 1, 2):
            for m2 in range(-j2, j2 + 1, 2):
                assert gl2_element(j2, 8 + j2 % 2, mp2, m2, np.eye(2)) == pytest.approx(float(mp2 == m2), abs=1e-14)
                r = rotation_matrix(1.1)
                assert gl2_element(j2, 12 + j2 % 2, mp2, m2, r).real == pytest.approx(
                    wigner_small_d(j2, mp2, m2, 1.1), abs=1e-12)


def test_gl2_homomorphism():
    rng = np.random.default_rng(3)
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    j2, n = 4, 6
    idx = range(-j2, j2 + 1, 2)
    dg = np.array([[gl2_element(j2, n, a, b, g) for b in idx] for a in idx])
    dh = np.array([[gl2_element(j2, n, a, b, h) for b in idx] for a in idx])
    dgh = np.array([[gl2_element(j2, n, a, b, g @ h) for b in idx] for a in idx])
    np.testing.assert_allclose(dg @ dh, dgh, rtol=1e-11, atol=1e-11)


def test_gl2_singular():
    with pytest.raises(ValueError):
        gl2_element(2, 2, 0, 0, np.array([[1, 1], [1, 1]]))


# --- Louck coefficients ------------------------------------------------------

def occupations(n, mp2, m2):
    r1, c1 = (n + mp2) // 2, (n + m2) // 2
    for w11 in range(0, min(r1, c1) + 1):
        w12, w21 = r1 - w11, c1 - w11
        w22 = n - w11 - w12 - w21
        if min(w12, w21, w22) >= 0:
            yield OccupationMatrix(w11, w12, w21, w22)


def test_louck_hom_value():
    w = OccupationMatrix(0, 1, 1, 0)
    assert louck_coefficient(2, 2, 0, 0, w) == pytest.approx(0.5, abs=1e-16)
    assert louck_coefficient(0, 2, 0, 0, w) == pytest.approx(-0.5, abs=1e-16)


@pytest.mark.parametrize("n", [2, 3, 6, 9])
def test_louck_symmetric_sector(n):
    # j = n/2: C(W) = sqrt(prod of row and column factorials) / n!
    for mp2 in range(-n, n + 1, 2):
        for m2 in range(-n, n + 1, 2):
            for w in occupations(n, mp2, m2):
                rows = [math.factorial(v) for v in w.row_sums()]
                cols = [math.factorial(v) for v in w.col_sums()]
                expect = math.sqrt(math.prod(rows) * math.prod(cols)) / math.factorial(n)
                assert louck_coefficient(n, n, m2, mp2, w) == pytest.approx(expect, rel=1e-14)


@pytest.mark.parametrize("n,j2,mp2,m2", [(4, 0, 0, 0), (5, 3, 1, -1), (6, 2, 2, 0), (7, 5, -3, 1)])
def test_louck_reconstructs_element(n, j2, mp2, m2):
    rng = np.random.default_rng(n)
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    total = 0j
    for w in occupations(n, mp2, m2):
        arr = w.as_array()
        weight = math.factorial(n) / math.prod(math.factorial(int(v)) for v in arr.flat)
        total += louck_coefficient(j2, n, m2, mp2, w) * weight * np.prod(g ** arr)
    assert total == pytest.approx(gl2_element(j2, n, mp2, m2, g), rel=1e-11)


def test_louck_errors():
    with pytest.raises(ValueError):
        louck_coefficient(2, 2, 0, 0, OccupationMatrix(2, 0, 0, 0))
    with pytest.raises(ValueError):
        louck_coefficient(0, 32, 0, 0, OccupationMatrix(8, 8, 8, 8))
    # m' outside the spin: no monomial
    assert louck_coefficient(0, 2, 0, 2, OccupationMatrix(1, 1, 0, 0)) == 0.0


# --- small types -------------------------------------------------------------

def test_rotation_reflectivity():
    r = Rotation.from_reflectivity(0.5)
    assert r.theta == pytest.approx(math.pi / 2, rel=1e-15)
    assert r.reflectivity == pytest.approx(0.5, rel=1e-15)
    u = Rotation(0.7, 0.3, -0.2).matrix()
    np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-15)


def test_gram_matrix():
    g = GramMatrix(0.3, 0.8)
    assert g.det() == pytest.approx(1 - 0.09, rel=1e-15)
    assert np.linalg.det(g.matrix()).real == pytest.approx(g.det(), rel=1e-14)
    with pytest.raises(ValueError):
        GramMatrix(1.2)


def test_occupation_from_sequences():
    w = OccupationMatrix.from_sequences((1, 1, 2, 2, 1), (1, 2, 2, 1, 1))
    assert (w.w11, w.w12, w.w21, w.w22) == (2, 1, 1, 1)
    assert w.row_sums() == (3, 2) and w.col_sums() == (3, 2)
    with pytest.raises(ValueError):
        OccupationMatrix(-1, 0, 0, 0)


def test_multiplicity_weighting_of_louck():
    # sum over W of C(W)^2 weight gamma = 1 for every (j, m, m'); orthonormality of Fock overlaps
    n = 6
    for j2 in range(0, n + 1, 2):
        gamma = multiplicity(j2, n)
        for mp2, m2 in itertools.product(range(-j2, j2 + 1, 2), repeat=2):
            total = 0.0
            for w in occupations(n, mp2, m2):
                weight = math.factorial(n) / math.prod(math.factorial(int(v)) for v in w.as_array().flat)
                total += gamma * weight * louck_coefficient(j2, n, m2, mp2, w) ** 2
            assert total == pytest.approx(1.0, rel=1e-12)
