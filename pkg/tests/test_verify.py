from fractions import Fraction
from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import sph_harm_y

from dtharmonics import coupling as cp
from dtharmonics import verify
from dtharmonics.config import RunConfig


@given(st.integers(1, 10**6))
def test_squarefree_split(n):
    s, f = verify._squarefree_split(n)
    assert s * s * f == n
    assert all(f % (p * p) for p in range(2, 1000) if p * p <= f)


def test_six_j_contraction_small():
    got = verify.six_j_by_contraction(1, 1, 1, 1, 1, 1)
    assert got == {1: Fraction(1, 6)}
    a, f = verify._as_surd(cp.six_j(2, 2, 2, 1, 1, 1))
    assert verify.six_j_by_contraction(2, 2, 2, 1, 1, 1) == {f: a}


def test_legendre_oracle_matches_scipy():
    th = np.linspace(0.01, 3.1, 9)
    ph = np.linspace(0, 6, 9)
    for l in range(6):
        for m in range(-l, l + 1):
            np.testing.assert_allclose(verify.assoc_legendre_sph(l, m, th, ph), sph_harm_y(l, m, th, ph), atol=1e-13)


def test_ode_residual_detects_wrong_profile(monkeypatch):
    from dtharmonics import scalar as sc

    good = verify.ode_residual(sc.AngularTriple(3, 1, 0))
    assert good < 1e-6
    monkeypatch.setattr(sc, "theta_profile", lambda t, th: np.cos(th) ** 2)
    assert verify.ode_residual(sc.AngularTriple(3, 1, 0)) > 1e-2


def test_check_line_and_dict():
    c = verify.Check("a.b", True, 1e-15, 1e-12, "note")
    assert c.line().startswith("[PASS] a.b: error=1.000e-15 tol=1.0e-12 note")
    assert c.to_dict()["passed"] is True


def test_tol_verify_overrides():
    cfg = RunConfig(tol_verify=1e-30)
    c = verify._check(cfg, "x", 1e-20, 1.0)
    assert not c.passed and c.tolerance == 1e-30


def test_seed_changes_points_not_structure():
    a = verify.check_vertical(RunConfig(seed=1))
    b = verify.check_vertical(RunConfig(seed=2))
    assert [c.id for c in a] == [c.id for c in b]
    assert a[0].error != b[0].error


def test_criteria_cover_fourteen():
    assert sorted(verify.CRITERIA) == list(range(1, 15))
