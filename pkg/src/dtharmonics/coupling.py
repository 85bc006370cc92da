"""Exact angular-momentum coupling coefficients.

Wigner 3j and 6j symbols and Clebsch-Gordan coefficients for integer
angular momenta, returned as :class:`RadicalRational` values
``sign * sqrt(p/q)``.  Condon-Shortley phase convention throughout.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, isqrt, sqrt

__all__ = [
    "RadicalRational",
    "ThreeJArgs",
    "SixJArgs",
    "three_j",
    "six_j",
    "clebsch_gordan",
    "triangle",
]


@dataclass(frozen=True)
class RadicalRational:
    """Exact number ``sign * sqrt(radicand)`` with rational radicand.

    Closed under multiplication and division but deliberately not under
    addition.
    """

    sign: int
    radicand: Fraction

    def __post_init__(self):
        r = Fraction(self.radicand)
        object.__setattr__(self, "radicand", r)
        if r < 0:
            raise ValueError("radicand must be nonnegative")
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if (self.sign == 0) != (r == 0):
            raise ValueError("sign is zero iff radicand is zero")

    @classmethod
    def from_signed_square(cls, sign: int, square) -> "RadicalRational":
        square = Fraction(square)
        if square == 0 or sign == 0:
            return ZERO
        return cls(1 if sign > 0 else -1, square)

    @classmethod
    def from_rational(cls, value) -> "RadicalRational":
        value = Fraction(value)
        if value == 0:
            return ZERO
        return cls(1 if value > 0 else -1, value * value)

    @classmethod
    def sqrt_of(cls, value) -> "RadicalRational":
        return cls.from_signed_square(1, value)

    @property
    def square(self) -> Fraction:
        """Signed square ``sign * radicand``."""
        return self.sign * self.radicand

    def is_zero(self) -> bool:
        return self.sign == 0

    def rational(self) -> Fraction | None:
        """The value as a Fraction if it is rational, otherwise None."""
        p, q = self.radicand.numerator, self.radicand.denominator
        sp, sq = isqrt(p), isqrt(q)
        if sp * sp == p and sq * sq == q:
            return self.sign * Fraction(sp, sq)
        return None

    def __float__(self) -> float:
        # numerator and denominator may exceed float range separately
        r = self.radicand
        if r.numerator.bit_length() < 1000 and r.denominator.bit_length() < 1000:
            return self.sign * sqrt(r.numerator / r.denominator)
        return self.sign * sqrt(float(r))

    def __mul__(self, other):
        if isinstance(other, RadicalRational):
            return RadicalRational.from_signed_square(
                self.sign * other.sign, self.radicand * other.radicand
            )
        if isinstance(other, (int, Fraction)):
            return self * RadicalRational.from_rational(other)
        return float(self) * other

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RadicalRational.from_rational(other)
        if isinstance(other, RadicalRational):
            if other.is_zero():
                raise ZeroDivisionError("division by exact zero")
            return RadicalRational.from_signed_square(
                self.sign * other.sign, self.radicand / other.radicand
            )
        return float(self) / other

    def __neg__(self):
        return RadicalRational.from_signed_square(-self.sign, self.radicand)

    def __abs__(self):
        return RadicalRational.from_signed_square(abs(self.sign), self.radicand)

    def __repr__(self):
        s = "-" if self.sign < 0 else ""
        return f"RadicalRational({s}sqrt({self.radicand}))"


ZERO = RadicalRational(0, Fraction(0))
ONE = RadicalRational(1, Fraction(1))


@dataclass(frozen=True)
class ThreeJArgs:
    j1: int
    j2: int
    j3: int
    m1: int
    m2: int
    m3: int


@dataclass(frozen=True)
class SixJArgs:
    j1: int
    j2: int
    j3: int
    j4: int
    j5: int
    j6: int


def _check_ints(*args):
    for a in args:
        if int(a) != a:
            raise TypeError("only integer angular momenta are supported")


def triangle(a: int, b: int, c: int) -> bool:
    return a >= 0 and b >= 0 and c >= 0 and abs(a - b) <= c <= a + b


@lru_cache(maxsize=None)
def _fact(n: int) -> int:
    return factorial(n)


def _delta_sq(a: int, b: int, c: int) -> Fraction:
    """Squared triangle coefficient."""
    return Fraction(
        _fact(a + b - c) * _fact(a - b + c) * _fact(-a + b + c), _fact(a + b + c + 1)
    )


@lru_cache(maxsize=200_000)
def _three_j(j1, j2, j3, m1, m2, m3) -> RadicalRational:
    if m1 + m2 + m3 != 0 or not triangle(j1, j2, j3):
        return ZERO
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return ZERO
    kmin = max(0, j2 - j3 - m1, j1 - j3 + m2)
    kmax = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    total = 0
    for k in range(kmin, kmax + 1):
        den = (
            _fact(k)
            * _fact(j3 - j2 + k + m1)
            * _fact(j3 - j1 + k - m2)
            * _fact(j1 + j2 - j3 - k)
            * _fact(j1 - k - m1)
            * _fact(j2 - k + m2)
        )
        total += Fraction((-1) ** k, den)
    if total == 0:
        return ZERO
    pref = (
        _fact(j1 + m1) * _fact(j1 - m1) * _fact(j2 + m2) * _fact(j2 - m2)
        * _fact(j3 + m3) * _fact(j3 - m3)
    )
    phase = -1 if (j1 - j2 - m3) % 2 else 1
    sign = phase * (1 if total > 0 else -1)
    return RadicalRational(sign, _delta_sq(j1, j2, j3) * pref * total * total)


def three_j(*args) -> RadicalRational:
    """Wigner 3j symbol ``(j1 j2 j3; m1 m2 m3)``.

    Accepts either a :class:`ThreeJArgs` or six integers.  Selection-rule
    violations give an exact zero.

    >>> float(three_j(1, 1, 0, 0, 0, 0)) ** 2
    0.3333333333333333
    """
    if len(args) == 1 and isinstance(args[0], ThreeJArgs):
        a = args[0]
        args = (a.j1, a.j2, a.j3, a.m1, a.m2, a.m3)
    _check_ints(*args)
    return _three_j(*(int(x) for x in args))


@lru_cache(maxsize=200_000)
def _six_j(j1, j2, j3, j4, j5, j6) -> RadicalRational:
    triads = ((j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3))
    if not all(triangle(*t) for t in triads):
        return ZERO
    a = [sum(t) for t in triads]
    b = (j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4)
    total = 0
    for t in range(max(a), min(b) + 1):
        den = 1
        for ai in a:
            den *= _fact(t - ai)
        for bi in b:
            den *= _fact(bi - t)
        total += Fraction((-1) ** t * _fact(t + 1), den)
    if total == 0:
        return ZERO
    rad = total * total
    for t in triads:
        rad *= _delta_sq(*t)
    return RadicalRational(1 if total > 0 else -1, rad)


def six_j(*args) -> RadicalRational:
    """Wigner 6j symbol ``{j1 j2 j3; j4 j5 j6}`` by the Racah sum."""
    if len(args) == 1 and isinstance(args[0], SixJArgs):
        a = args[0]
        args = (a.j1, a.j2, a.j3, a.j4, a.j5, a.j6)
    _check_ints(*args)
    return _six_j(*(int(x) for x in args))


def clebsch_gordan(j1: int, m1: int, j2: int, m2: int, j3: int, m3: int) -> RadicalRational:
    """Clebsch-Gordan coefficient ``<j1 m1 j2 m2 | j3 m3>``."""
    tj = three_j(j1, j2, j3, m1, m2, -m3)
    if tj.is_zero():
        return ZERO
    phase = -1 if (j1 - j2 + m3) % 2 else 1
    return tj * RadicalRational(phase, Fraction(2 * j3 + 1))


@lru_cache(maxsize=200_000)
def three_j_float(j1, j2, j3, m1, m2, m3) -> float:
    """Cached float value of :func:`three_j`."""
    return float(_three_j(j1, j2, j3, m1, m2, m3))


@lru_cache(maxsize=200_000)
def six_j_float(j1, j2, j3, j4, j5, j6) -> float:
    return float(_six_j(j1, j2, j3, j4, j5, j6))
