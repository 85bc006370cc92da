import itertools
from fractions import Fraction
from math import sqrt

import pytest
from hypothesis import given, strategies as st
from sympy import Rational, nsimplify
from sympy.physics.wigner import clebsch_gordan as sp_cg
from sympy.physics.wigner import wigner_3j, wigner_6j

from dtharmonics.coupling import (
    ONE,
    ZERO,
    RadicalRational,
    SixJArgs,
    ThreeJArgs,
    clebsch_gordan,
    six_j,
    three_j,
    three_j_float,
    triangle,
)


def as_signed_square(expr):
    """sympy radical -> (sign, square) without floating point."""
    sq = nsimplify(expr**2)
    sign = 0 if expr == 0 else (1 if expr > 0 else -1)
    return sign, Fraction(int(Rational(sq).p), int(Rational(sq).q))


def rr_key(x: RadicalRational):
    return (0, Fraction(0)) if x.is_zero() else (x.sign, x.radicand)


# ---------------------------------------------------------------- sympy oracle


def test_three_j_matches_sympy_up_to_3():
    for j1, j2, j3 in itertools.product(range(4), repeat=3):
        for m1, m2 in itertools.product(range(-j1, j1 + 1), range(-j2, j2 + 1)):
            m3 = -m1 - m2
            if abs(m3) > j3:
                continue
            ref = wigner_3j(j1, j2, j3, m1, m2, m3)
            assert rr_key(three_j(j1, j2, j3, m1, m2, m3)) == as_signed_square(ref)


def test_six_j_matches_sympy_up_to_2():
    for js in itertools.product(range(3), repeat=6):
        ref = wigner_6j(*js)
        assert rr_key(six_j(*js)) == as_signed_square(ref), js


def test_clebsch_gordan_matches_sympy():
    for j1, j2 in itertools.product(range(3), repeat=2):
        for j3 in range(abs(j1 - j2), j1 + j2 + 1):
            for m1, m2 in itertools.product(range(-j1, j1 + 1), range(-j2, j2 + 1)):
                m3 = m1 + m2
                if abs(m3) > j3:
                    continue
                ref = sp_cg(j1, j2, j3, m1, m2, m3)
                assert rr_key(clebsch_gordan(j1, m1, j2, m2, j3, m3)) == as_signed_square(ref)


# ---------------------------------------------------------------- known values


def test_known_values():
    assert three_j(1, 1, 0, 0, 0, 0) == RadicalRational(-1, Fraction(1, 3))
    assert three_j(0, 0, 0, 0, 0, 0) == ONE
    assert six_j(1, 1, 1, 1, 1, 1) == RadicalRational(1, Fraction(1, 36))
    assert clebsch_gordan(1, 1, 1, -1, 0, 0) == RadicalRational(1, Fraction(1, 3))
    assert float(three_j(2, 2, 2, 0, 0, 0)) == pytest.approx(-sqrt(2 / 35))


def test_selection_rules_give_zero():
    assert three_j(1, 1, 3, 0, 0, 0).is_zero()  # triangle
    assert three_j(1, 1, 1, 1, 0, 0).is_zero()  # m sum
    assert three_j(1, 1, 1, 0, 0, 0).is_zero()  # odd sum with all m = 0
    assert six_j(1, 1, 3, 1, 1, 1).is_zero()


def test_argument_records():
    assert three_j(ThreeJArgs(1, 1, 0, 1, -1, 0)) == three_j(1, 1, 0, 1, -1, 0)
    assert six_j(SixJArgs(1, 1, 1, 1, 1, 1)) == six_j(1, 1, 1, 1, 1, 1)


def test_rejects_non_integer():
    with pytest.raises((TypeError, ValueError)):
        three_j(0.5, 0.5, 1, 0.5, -0.5, 0)


# ---------------------------------------------------------------- radical-rational arithmetic


def test_radical_rational_arithmetic():
    a = RadicalRational.sqrt_of(Fraction(2, 3))
    b = RadicalRational.from_rational(Fraction(-1, 2))
    assert (a * a).rational() == Fraction(2, 3)
    assert (a * b).square == Fraction(-1, 6)
    assert (a * b).radicand == Fraction(1, 6)
    assert (a * b).sign == -1
    assert (a / a) == ONE
    assert -ZERO == ZERO
    assert abs(b) == RadicalRational.from_rational(Fraction(1, 2))
    assert a.rational() is None
    assert float(a) == pytest.approx(sqrt(2 / 3))
    with pytest.raises(ZeroDivisionError):
        a / ZERO


fractions = st.fractions(min_value=-20, max_value=20, max_denominator=50)


@given(fractions, fractions)
def test_rational_product_is_exact(x, y):
    p = RadicalRational.from_rational(x) * RadicalRational.from_rational(y)
    assert p.rational() == x * y


# ---------------------------------------------------------------- symmetries


def labels(jmax=4):
    @st.composite
    def strat(draw):
        j1 = draw(st.integers(0, jmax))
        j2 = draw(st.integers(0, jmax))
        j3 = draw(st.integers(abs(j1 - j2), j1 + j2))
        m1 = draw(st.integers(-j1, j1))
        m2 = draw(st.integers(max(-j2, -j3 - m1), min(j2, j3 - m1)))
        return j1, j2, j3, m1, m2, -m1 - m2

    return strat()


@given(labels())
def test_sign_flip_of_m(a):
    j1, j2, j3, m1, m2, m3 = a
    phase = -1 if (j1 + j2 + j3) % 2 else 1
    lhs = three_j(j1, j2, j3, -m1, -m2, -m3)
    rhs = three_j(j1, j2, j3, m1, m2, m3)
    assert lhs == (rhs if phase == 1 else -rhs)


@given(labels())
def test_cyclic_column_permutation(a):
    j1, j2, j3, m1, m2, m3 = a
    assert three_j(j2, j3, j1, m2, m3, m1) == three_j(j1, j2, j3, m1, m2, m3)


@given(labels(3))
def test_cg_orthonormal_columns(a):
    j1, j2, j3, m1, m2, _ = a
    m3 = m1 + m2
    total = sum(
        clebsch_gordan(j1, m1, j2, m3 - m1, j3, m3).radicand
        for m1 in range(-j1, j1 + 1)
        if abs(m3 - m1) <= j2
    )
    assert total == 1


@given(st.tuples(*[st.integers(0, 3)] * 6))
def test_six_j_tetrahedral_symmetry(js):
    j1, j2, j3, j4, j5, j6 = js
    ref = six_j(*js)
    assert six_j(j2, j1, j3, j5, j4, j6) == ref
    assert six_j(j1, j5, j6, j4, j2, j3) == ref


@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
def test_triangle(a, b, c):
    assert triangle(a, b, c) == (abs(a - b) <= c <= a + b)


def test_float_view():
    assert three_j_float(1, 1, 0, 0, 0, 0) == pytest.approx(-1 / sqrt(3), abs=1e-15)
