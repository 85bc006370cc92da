import itertools
from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dtharmonics import dtensor as dt
from dtharmonics.dtensor import HarmonicCombination as HC
from dtharmonics.dtensor import HarmonicSignature as HS
from dtharmonics.dtensor import SignatureError, Variance

C, V = Variance.COVECTOR, Variance.VECTOR


@st.composite
def sigs(draw, kmax=3, lmax=3, variances=None):
    k = draw(st.integers(0, kmax))
    l0 = draw(st.integers(0, lmax))
    chain, prev = [], l0
    for _ in range(k):
        li = draw(st.integers(abs(prev - 1), min(prev + 1, lmax + 1)))
        chain.append(li)
        prev = li
    vs = variances or tuple(draw(st.sampled_from([C, V])) for _ in range(k))
    vs = vs[:k] if len(vs) >= k else vs + (vs[-1],) * (k - len(vs))
    m = draw(st.integers(-prev, prev))
    n = draw(st.integers(-l0, l0))
    return HS(l0, tuple(chain), vs, m, n)


angles = st.tuples(st.floats(0.01, pi - 0.01), st.floats(0, 2 * pi), st.floats(0, 2 * pi))


def comps(x, p):
    return dt.evaluate(x, p).components


# ---------------------------------------------------------------- labels


@given(sigs())
def test_signature_text_round_trip(s):
    assert HS.parse(str(s)) == s


def test_parse_examples():
    s = HS.parse("0|1,0;0,0;v,c")
    assert s == HS(0, (1, 0), (V, C), 0, 0)
    assert HS.parse("2|;1,-1;") == HS(2, (), (), 1, -1)


@pytest.mark.parametrize(
    "text, match",
    [
        ("1|3,2;0,0;c,c", r"l1 = 3 violates l1 in \|l0 - 1\| \.\. l0 \+ 1"),
        ("0|1,3;0,0;c,c", r"l2 = 3 violates l2"),
        ("1|1;2,0;c", r"\|m\| = 2 exceeds l_k = 1"),
        ("1|1;0,2;c", r"\|n\| = 2 exceeds l0 = 1"),
        ("1|1;0,0;x", "variances must be"),
        ("1|1;0,0", "lacks variances"),
        ("garbage", "cannot parse"),
    ],
)
def test_parse_errors_name_the_condition(text, match):
    with pytest.raises(SignatureError, match=match):
        HS.parse(text)


def test_signature_counts():
    # rank 1: chains (l0, l1) with |l0-1| <= l1 <= l0+1, all bounded by lmax
    expect = sum(
        (2 * l1 + 1) * (2 * l0 + 1)
        for l0 in range(3)
        for l1 in range(abs(l0 - 1), min(l0 + 1, 2) + 1)
    )
    assert len(dt.signatures(1, 2)) == expect


def test_dual_flips_variances():
    s = HS(1, (1, 2), (C, V), 0, 0)
    assert s.dual().variances == (V, C)
    assert s.dual().dual() == s


# ---------------------------------------------------------------- construction


def test_rank_zero_is_scalar_harmonic():
    from dtharmonics.scalar import eval_harmonic

    p = (0.4, 1.0, 2.0)
    assert comps(HS(2, (), (), 1, -1), p) == pytest.approx(eval_harmonic((2, 1, -1), p))


def test_rank_one_constant_is_basis_vector():
    # Y(0|1; mu, 0) is the constant spherical basis vector up to the coupling factor
    for mu in (-1, 0, 1):
        x = comps(HS(0, (1,), (V,), mu, 0), (0.3, 0.2, 0.1))
        e = dt.basis_tensor(mu).components
        ratio = x[np.argmax(abs(e))] / e[np.argmax(abs(e))]
        np.testing.assert_allclose(x, ratio * e, atol=1e-15)
        assert abs(ratio) == pytest.approx(1.0)


@given(sigs())
def test_recursive_equals_explicit(s):
    diff = dt.build_recursive(s) - dt.build_explicit(s)
    assert max(map(abs, diff.values()), default=0.0) < 1e-12


def test_basis_orthonormality():
    E = np.array([dt.basis_tensor(mu).components for mu in (-1, 0, 1)])
    np.testing.assert_allclose(E.conj() @ E.T, np.eye(3), atol=1e-15)


def test_kronecker_and_epsilon():
    p = (np.array([0.3, 1.2]), np.array([0.1, 4.0]), np.array([2.0, 5.5]))
    np.testing.assert_allclose(dt.KRONECKER.evaluate(p).components, np.broadcast_to(np.eye(3), (2, 3, 3)), atol=1e-15)
    eps = np.zeros((3, 3, 3))
    for perm in itertools.permutations(range(3)):
        eps[perm] = np.linalg.det(np.eye(3)[list(perm)])
    np.testing.assert_allclose(dt.EPSILON.evaluate(p).components, np.broadcast_to(eps, (2, 3, 3, 3)), atol=1e-15)


@given(sigs(kmax=2), angles)
def test_conjugation(s, p):
    phase, s2 = dt.conjugate_signature(s)
    np.testing.assert_allclose(np.conj(comps(s, p)), phase * comps(s2, p), atol=1e-12)


# ---------------------------------------------------------------- permutation and contraction


@given(sigs(kmax=3, lmax=2, variances=(C, C, C)), angles)
def test_transpose_matches_swapaxes(s, p):
    for i in range(1, s.k):
        got = dt.transpose_adjacent(s, i).evaluate(p).components
        np.testing.assert_allclose(got, np.swapaxes(comps(s, p), i - 1, i), atol=1e-12)


def test_transpose_rejects_mixed_variance():
    with pytest.raises(ValueError):
        dt.transpose_adjacent(HS(0, (1, 0), (V, C), 0, 0), 1)


def test_transpose_is_involution():
    s = HS(1, (2, 1), (C, C), 1, 0)
    twice = dt.transpose_adjacent(s, 1).map(lambda x: dt.transpose_adjacent(x, 1))
    assert twice.max_abs_diff(HC.single(s)) < 1e-14


def test_permute_matches_transpose():
    s = HS(1, (1, 2, 1), (C, C, C), 0, 1)
    p = (0.9, 0.4, 2.2)
    for perm in itertools.permutations(range(3)):
        got = dt.permute(s, perm).evaluate(p).components
        np.testing.assert_allclose(got, np.transpose(comps(s, p), perm), atol=1e-13)


@given(sigs(kmax=3, lmax=2, variances=(V, C, V)), angles)
def test_contract_matches_trace(s, p):
    for i in range(1, s.k):
        got = dt.contract_adjacent(s, i).evaluate(p).components
        np.testing.assert_allclose(got, np.trace(comps(s, p), axis1=i - 1, axis2=i), atol=1e-12)


@pytest.mark.parametrize(
    "variances, path",
    [((C, V, V), "left"), ((C, C, V), "right"), ((V, C, C), "left"), ((V, V, C), "right")],
)
def test_contract_general_matches_trace(variances, path):
    # the moved slot may only pass slots of its own variance
    s = HS(1, (1, 1, 1), variances, 0, 0)
    p = (0.7, 0.1, 0.5)
    ref = np.trace(comps(s, p), axis1=0, axis2=2)
    got = dt.contract_general(s, 1, 3, path=path).evaluate(p).components
    np.testing.assert_allclose(got, ref, atol=1e-13)
    other = "right" if path == "left" else "left"
    with pytest.raises(ValueError):
        dt.contract_general(s, 1, 3, path=other)


def test_trace_of_kronecker_is_three():
    tr = dt.KRONECKER.map(lambda s: dt.contract_adjacent(s, 1))
    assert tr.evaluate((0.2, 0.3, 0.4)).components == pytest.approx(3.0)


# ---------------------------------------------------------------- products


@given(sigs(kmax=1, lmax=2, variances=(C,)), sigs(kmax=1, lmax=2, variances=(V,)))
def test_closed_product_equals_oracle(a, b):
    assert dt.tensor_product_closed(a, b).max_abs_diff(dt.tensor_product_oracle(a, b)) < 1e-10


@given(sigs(kmax=2, lmax=2, variances=(C, V)), sigs(kmax=1, lmax=2, variances=(V,)), angles)
def test_closed_product_pointwise(a, b, p):
    got = dt.tensor_product_closed(a, b).evaluate(p).components
    ref = np.multiply.outer(comps(a, p), comps(b, p))
    np.testing.assert_allclose(got, ref, atol=1e-11)


@given(sigs(kmax=1, lmax=3, variances=(V,)), sigs(kmax=1, lmax=3, variances=(C,)), angles)
def test_scalar_product_pointwise(a, b, p):
    if a.k != 1 or b.k != 1:
        return
    ref = np.dot(comps(a, p), comps(b, p))
    assert abs(dt.scalar_product(a, b)(p) - ref) < 1e-11


def test_scalar_product_rejects_same_variance():
    a = HS(1, (1,), (C,), 0, 0)
    with pytest.raises(ValueError):
        dt.scalar_product(a, a)


# ---------------------------------------------------------------- orthogonality


def test_rank_two_gram_is_identity():
    ss = dt.signatures(2, 2)
    G = dt.gram_matrix(ss) / (8 * pi**2)
    np.testing.assert_allclose(G, np.eye(len(ss)), atol=1e-12)


def test_inner_product_integral_needs_dual():
    a = HS(1, (1,), (C,), 0, 0)
    with pytest.raises(ValueError):
        dt.inner_product_integral(a, a)
    assert dt.inner_product_integral(a, a.dual()) == pytest.approx(8 * pi**2)


def test_reversed_pairing_is_not_orthonormal():
    # pairing slot 1 with slot k (reversed order) breaks orthonormality at rank 2
    s = HS(1, (1, 1), (C, C), 0, 0)
    from dtharmonics.scalar import QuadratureSpec

    q = QuadratureSpec(6, 8, 8)
    th, w, ph, be, wa = q.nodes()
    T, P, B = np.meshgrid(th, ph, be, indexing="ij")
    a = comps(s, (T, P, B))
    rev = np.sum(np.conj(a) * np.swapaxes(a, -1, -2), axis=(-1, -2))
    val = np.sum(rev.reshape(len(th), -1).sum(axis=1) * w) * wa / (8 * pi**2)
    assert abs(val - 1) > 0.1
