from fractions import Fraction
from math import pi, sqrt

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import sph_harm_y

from dtharmonics import scalar as sc
from dtharmonics.coupling import RadicalRational


@st.composite
def triples(draw, lmax=5):
    l = draw(st.integers(0, lmax))
    return sc.AngularTriple(l, draw(st.integers(-l, l)), draw(st.integers(-l, l)))


angles = st.tuples(
    st.floats(0, pi), st.floats(0, 2 * pi), st.floats(0, 2 * pi)
)


def test_triple_validation():
    with pytest.raises(ValueError, match=r"\|m\|, \|n\| <= l"):
        sc.AngularTriple(1, 2, 0)
    with pytest.raises(ValueError):
        sc.AngularTriple(-1, 0, 0)
    assert tuple(sc.AngularTriple(2, 1, -1)) == (2, 1, -1)


def test_angle_point_range():
    with pytest.raises(ValueError):
        sc.AnglePoint(4.0, 0.0, 0.0)


def test_triples_count():
    # sum_l (2l+1)^2
    assert len(sc.triples_up_to(4)) == sum((2 * l + 1) ** 2 for l in range(5))


def test_low_order_values():
    assert sc.eval_harmonic((0, 0, 0), (1.2, 0.3, 0.4)) == pytest.approx(1.0)
    assert sc.eval_harmonic((1, 0, 0), (0.0, 0.0, 0.0)) == pytest.approx(sqrt(3))
    th = 0.7
    assert sc.eval_harmonic((1, 0, 0), (th, 1.0, 2.0)) == pytest.approx(sqrt(3) * np.cos(th))


def test_normalization_exact():
    assert sc.normalization((0, 0, 0)) == RadicalRational(1, Fraction(1))
    n = sc.normalization((2, 1, 0))
    assert n.sign == -1
    assert n.radicand == Fraction(5 * 2 * 6, 1 * 2)


def test_reduction_against_scipy():
    rng = np.random.default_rng(0)
    th, ph = rng.uniform(0, pi, 50), rng.uniform(0, 2 * pi, 50)
    for l in range(6):
        for m in range(-l, l + 1):
            ref = sqrt(4 * pi) * sph_harm_y(l, m, th, ph)
            got = sc.eval_harmonic((l, m, 0), (th, ph, 0.0))
            np.testing.assert_allclose(got, ref, atol=1e-12)


def test_north_pole_selects_m_equals_n():
    for t in sc.triples_up_to(3):
        v = sc.eval_harmonic(t, (0.0, 0.4, 1.1))
        if t.m == t.n:
            assert abs(v) == pytest.approx(sqrt(2 * t.l + 1))
        else:
            assert abs(v) < 1e-14


def test_south_pole_is_regular():
    for t in sc.triples_up_to(4):
        assert np.isfinite(sc.eval_harmonic(t, (pi, 0.2, 0.3)))


@given(st.integers(0, 5), st.integers(-5, 5), angles)
def test_addition_theorem(l, n, p):
    n = max(-l, min(l, n))
    total = sum(abs(sc.eval_harmonic((l, m, n), p)) ** 2 for m in range(-l, l + 1))
    assert total == pytest.approx(2 * l + 1, rel=1e-12)


@given(triples(), angles)
def test_wigner_identity(t, p):
    y = sc.eval_harmonic(t, p)
    d = (-1) ** t.m * sqrt(2 * t.l + 1) * sc.wigner_D(t.l, -t.m, -t.n, p)
    assert abs(y - d) < 1e-12


@given(triples(), angles)
def test_conjugate_phase(t, p):
    phase, t2 = sc.conjugate_triple(t)
    assert abs(np.conj(sc.eval_harmonic(t, p)) - phase * sc.eval_harmonic(t2, p)) < 1e-12


def test_profile_matches_hypergeometric():
    # printed form, summed in 30-digit arithmetic
    mpmath.mp.dps = 30
    for t in sc.triples_up_to(4):
        l, m, n = t
        hi = max(m, n)
        for th in (0.05, 0.7, 1.6, 2.5, 3.0):
            half = mpmath.mpf(th) / 2
            ref = (
                mpmath.cos(half) ** (m + n)
                * mpmath.sin(half) ** abs(m - n)
                * mpmath.hyp2f1(hi - l, hi + l + 1, abs(m - n) + 1, mpmath.sin(half) ** 2)
            )
            assert sc.theta_profile(t, th) == pytest.approx(float(ref), rel=1e-13, abs=1e-15)


def test_ladders():
    c, t = sc.ladder_R((2, 1, 0), 1)
    assert (c, t) == (pytest.approx(2.0), sc.AngularTriple(2, 2, 0))
    c, t = sc.ladder_R((2, 2, 0), 1)
    assert c == 0 and t == sc.AngularTriple(2, 2, 0)
    c, t = sc.ladder_B((1, 0, -1), 1)
    assert (c, t) == (pytest.approx(sqrt(2)), sc.AngularTriple(1, 0, 0))
    with pytest.raises(ValueError):
        sc.ladder_B((1, 0, 0), 2)


def test_product_with_constant_is_identity():
    e = sc.product_expand((0, 0, 0), (3, 1, -2))
    assert dict(e.items()) == {sc.AngularTriple(3, 1, -2): pytest.approx(1.0)}


@given(triples(2), triples(2), angles)
def test_product_rule_pointwise(t1, t2, p):
    e = sc.product_expand(t1, t2)
    lhs = sc.eval_harmonic(t1, p) * sc.eval_harmonic(t2, p)
    assert abs(lhs - e(p)) < 1e-11
    lo = max(abs(t1.l - t2.l), abs(t1.m + t2.m), abs(t1.n + t2.n))
    assert all(lo <= t.l <= t1.l + t2.l for t, _ in e.items())


def test_expansion_arithmetic():
    a = sc.HarmonicExpansion({(1, 0, 0): 1.0, (0, 0, 0): 2.0})
    b = sc.HarmonicExpansion({(1, 0, 0): -1.0})
    s = a + b
    assert len(s) == 1 and s[(0, 0, 0)] == 2.0 and s[(1, 0, 0)] == 0
    assert a.scaled(2j)[(1, 0, 0)] == 2j


def test_pairwise_sum_matches_sum():
    x = np.random.default_rng(3).normal(size=(37, 4))
    np.testing.assert_allclose(sc.pairwise_sum(x), x.sum(axis=0), rtol=1e-14)
    np.testing.assert_allclose(sc.pairwise_sum(x, axis=1), x.sum(axis=1), rtol=1e-14)


def test_quadrature_integrates_constant():
    q = sc.QuadratureSpec(4, 4, 4)
    assert q.integrate(lambda th, ph, be: np.ones_like(th)) == pytest.approx(8 * pi**2)


def test_quadrature_too_coarse_is_rejected():
    with pytest.raises(sc.QuadratureError, match="n_phi=4"):
        sc.orthogonality_integral((3, 3, 0), (3, -3, 0), sc.QuadratureSpec(8, 4, 8))


def test_small_gram_is_identity():
    ts = sc.triples_up_to(2)
    G = sc.gram_matrix(ts, sc.QuadratureSpec(6, 8, 8))
    np.testing.assert_allclose(G / (8 * pi**2), np.eye(len(ts)), atol=1e-13)
