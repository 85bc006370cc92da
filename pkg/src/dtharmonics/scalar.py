"""Tangent-bundle spherical harmonics Y_{l,m,n}(theta, phi, beta).

The harmonics are simultaneous eigenfunctions of R^2, R_z and B_z on the
slit tangent bundle.  Angles are the co-rotated coordinates: theta, phi
locate the base point, beta is the azimuth of the velocity in the
co-rotated frame.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, pi

import numpy as np

from .coupling import RadicalRational, clebsch_gordan

__all__ = [
    "AngularTriple",
    "AnglePoint",
    "HarmonicExpansion",
    "QuadratureSpec",
    "QuadratureError",
    "normalization",
    "theta_profile",
    "eval_harmonic",
    "wigner_D",
    "conjugate_triple",
    "ladder_R",
    "ladder_B",
    "product_expand",
    "orthogonality_integral",
    "gram_matrix",
    "triples_up_to",
    "pairwise_sum",
    "DEFAULT_PRUNE",
]

DEFAULT_PRUNE = 1e-13


@dataclass(frozen=True, order=True)
class AngularTriple:
    l: int
    m: int
    n: int

    def __post_init__(self):
        if self.l < 0:
            raise ValueError(f"l must be nonnegative, got {self.l}")
        if abs(self.m) > self.l or abs(self.n) > self.l:
            raise ValueError(f"need |m|, |n| <= l, got {(self.l, self.m, self.n)}")

    def __iter__(self):
        return iter((self.l, self.m, self.n))


def _triple(t) -> AngularTriple:
    return t if isinstance(t, AngularTriple) else AngularTriple(*t)


@dataclass(frozen=True)
class AnglePoint:
    """Co-rotated angles.  Fields may be numpy arrays of equal shape."""

    theta: float | np.ndarray
    phi: float | np.ndarray
    beta: float | np.ndarray

    def __post_init__(self):
        if np.ndim(self.theta) == 0:
            if not 0.0 <= self.theta <= pi:
                raise ValueError(f"theta must lie in [0, pi], got {self.theta}")


def triples_up_to(lmax: int) -> list[AngularTriple]:
    """All valid triples with l <= lmax, in (l, m, n) order."""
    return [
        AngularTriple(l, m, n)
        for l in range(lmax + 1)
        for m in range(-l, l + 1)
        for n in range(-l, l + 1)
    ]


@lru_cache(maxsize=None)
def _normalization(l, m, n) -> RadicalRational:
    hi, lo = max(m, n), min(m, n)
    sq = Fraction(2 * l + 1, factorial(abs(m - n)) ** 2) * Fraction(
        factorial(l - lo) * factorial(l + hi), factorial(l - hi) * factorial(l + lo)
    )
    return RadicalRational((-1) ** (hi % 2), sq)


def normalization(t) -> RadicalRational:
    """Exact normalization constant N_{l,m,n}, fixing the sign (-1)^max(m,n)."""
    return _normalization(*_triple(t))


@lru_cache(maxsize=None)
def _profile_params(l, m, n) -> tuple[int, int, int, float]:
    # The terminating 2F1(-s, s + alpha + beta + 1; alpha + 1; sin^2(theta/2)) equals
    # P_s^(alpha, beta)(cos theta) / P_s^(alpha, beta)(1).  When m + n < 0 the Euler
    # transformation keeps the cos(theta/2) exponent |m + n| nonnegative, so
    # theta = pi stays regular.  Returns (degree s, alpha, beta, 1 / P_s(1)).
    alpha, beta = abs(m - n), abs(m + n)
    s = l - max(abs(m), abs(n))
    scale = Fraction(factorial(s) * factorial(alpha), factorial(s + alpha))
    return s, alpha, beta, float(scale)


def _jacobi(s: int, alpha: int, beta: int, y):
    """P_s^(alpha, beta)(y) by the three-term recurrence in the degree."""
    p0 = np.ones_like(y)
    if s == 0:
        return p0
    p1 = 0.5 * ((alpha - beta) + (alpha + beta + 2) * y)
    ab = alpha + beta
    for k in range(2, s + 1):
        c = 2 * k + ab
        a1 = 2 * k * (k + ab) * (c - 2)
        a2 = (c - 1) * (alpha * alpha - beta * beta)
        a3 = (c - 1) * c * (c - 2)
        a4 = 2 * (k + alpha - 1) * (k + beta - 1) * c
        p0, p1 = p1, ((a2 + a3 * y) * p1 - a4 * p0) / a1
    return p1


def theta_profile(t, theta):
    """Unnormalized regular solution of the polar equation.

    cos^{m+n}(theta/2) sin^{|m-n|}(theta/2) 2F1(max-l, max+l+1; |m-n|+1; sin^2(theta/2)).
    The terminating series is evaluated as a normalized Jacobi polynomial in
    cos(theta), which avoids the cancellation of the raw power sum.
    """
    l, m, n = _triple(t)
    s, alpha, beta, scale = _profile_params(l, m, n)
    theta = np.asarray(theta, dtype=float)
    poly = scale * _jacobi(s, alpha, beta, np.cos(theta))
    return np.cos(theta / 2) ** beta * np.sin(theta / 2) ** alpha * poly


def _angles(p):
    if isinstance(p, AnglePoint):
        return p.theta, p.phi, p.beta
    return p


def eval_harmonic(t, p):
    """Evaluate Y_{l,m,n} at an :class:`AnglePoint` or a (theta, phi, beta) tuple."""
    t = _triple(t)
    theta, phi, beta = _angles(p)
    phase = np.exp(1j * (t.m * np.asarray(phi) + t.n * np.asarray(beta)))
    return float(normalization(t)) * phase * theta_profile(t, theta)


def wigner_D(l: int, m: int, n: int, p):
    """Wigner D^l_{m,n}(phi, theta, beta) from its explicit finite sum.

    Kept as an independent cross-check of :func:`eval_harmonic`; shares no
    code with it.
    """
    if abs(m) > l or abs(n) > l:
        raise ValueError("need |m|, |n| <= l")
    theta, phi, beta = _angles(p)
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    f = factorial
    total = np.zeros_like(theta)
    for k in range(max(0, n - m), min(l + n, l - m) + 1):
        w = (-1) ** k / (f(k) * f(l + n - k) * f(l - m - k) * f(m - n + k))
        total = total + w * c ** (2 * l + n - m - 2 * k) * s ** (m - n + 2 * k)
    pref = (-1) ** ((m - n) % 2) * np.sqrt(float(f(l + m) * f(l - m) * f(l + n) * f(l - n)))
    return pref * np.exp(-1j * (m * np.asarray(phi) + n * np.asarray(beta))) * total


def conjugate_triple(t) -> tuple[int, AngularTriple]:
    """conj Y_{l,m,n} = phase * Y_{l,-m,-n}."""
    l, m, n = _triple(t)
    return (-1) ** ((m + n) % 2), AngularTriple(l, -m, -n)


def _ladder(l, q, direction):
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if abs(q + direction) > l:
        return 0.0, q
    return float(np.sqrt((l - direction * q) * (l + direction * q + 1))), q + direction


def ladder_R(t, direction: int) -> tuple[float, AngularTriple]:
    """R_{+/-} Y_{l,m,n} = coeff * Y_{l,m+/-1,n}; coeff 0 at the ends of the ladder."""
    t = _triple(t)
    c, m = _ladder(t.l, t.m, direction)
    return c, AngularTriple(t.l, m, t.n)


def ladder_B(t, direction: int) -> tuple[float, AngularTriple]:
    """B_{+/-} Y_{l,m,n} = coeff * Y_{l,m,n+/-1}."""
    t = _triple(t)
    c, n = _ladder(t.l, t.n, direction)
    return c, AngularTriple(t.l, t.m, n)


@dataclass
class HarmonicExpansion:
    """Sparse complex combination of scalar harmonics."""

    terms: dict = field(default_factory=dict)
    prune: float = DEFAULT_PRUNE

    def __post_init__(self):
        self.terms = {
            _triple(k): complex(v) for k, v in self.terms.items() if abs(v) >= self.prune
        }

    def __call__(self, p):
        theta = _angles(p)[0]
        out = np.zeros(np.shape(theta), dtype=complex)
        for t, c in self.terms.items():
            out = out + c * eval_harmonic(t, p)
        return out

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, key):
        return self.terms.get(_triple(key), 0j)

    def items(self):
        return self.terms.items()

    def __add__(self, other: "HarmonicExpansion") -> "HarmonicExpansion":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return HarmonicExpansion(out, self.prune)

    def scaled(self, c) -> "HarmonicExpansion":
        return HarmonicExpansion({k: c * v for k, v in self.terms.items()}, self.prune)


def product_coefficient(t1: AngularTriple, t2: AngularTriple, l3: int) -> RadicalRational:
    """Exact coefficient of Y_{l3, m1+m2, n1+n2} in the product Y_t1 * Y_t2."""
    l1, m1, n1 = t1
    l2, m2, n2 = t2
    c1 = clebsch_gordan(l1, m1, l2, m2, l3, m1 + m2)
    c2 = clebsch_gordan(l1, n1, l2, n2, l3, n1 + n2)
    return c1 * c2 * RadicalRational.sqrt_of(Fraction((2 * l1 + 1) * (2 * l2 + 1), 2 * l3 + 1))


def product_expand(t1, t2, prune: float = DEFAULT_PRUNE) -> HarmonicExpansion:
    """Expand Y_t1 * Y_t2 over harmonics Y_{l'', m1+m2, n1+n2}."""
    t1, t2 = _triple(t1), _triple(t2)
    m, n = t1.m + t2.m, t1.n + t2.n
    lo = max(abs(t1.l - t2.l), abs(m), abs(n))
    terms = {}
    for l3 in range(lo, t1.l + t2.l + 1):
        c = product_coefficient(t1, t2, l3)
        if not c.is_zero():
            terms[AngularTriple(l3, m, n)] = float(c)
    return HarmonicExpansion(terms, prune)


class QuadratureError(ValueError):
    pass


def pairwise_sum(a, axis=0):
    """Tree reduction along ``axis``; result is independent of chunking."""
    a = np.moveaxis(np.asarray(a), axis, 0)
    while a.shape[0] > 1:
        if a.shape[0] % 2:
            a = np.concatenate([a[:-2], (a[-2] + a[-1])[None]])
        a = a[0::2] + a[1::2]
    return a[0]


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre in cos(theta) times uniform trapezoid in phi and beta."""

    n_theta: int = 32
    n_phi: int = 64
    n_beta: int = 64

    def __post_init__(self):
        if min(self.n_theta, self.n_phi, self.n_beta) < 2:
            raise ValueError("quadrature orders must be >= 2")

    def nodes(self):
        z, w = np.polynomial.legendre.leggauss(self.n_theta)
        theta = np.arccos(z)
        phi = 2 * pi * np.arange(self.n_phi) / self.n_phi
        beta = 2 * pi * np.arange(self.n_beta) / self.n_beta
        w_ang = (2 * pi / self.n_phi) * (2 * pi / self.n_beta)
        return theta, w, phi, beta, w_ang

    def check(self, theta_degree: int, max_phi_freq: int, max_beta_freq: int):
        if (
            theta_degree > 2 * self.n_theta - 1
            or max_phi_freq >= self.n_phi
            or max_beta_freq >= self.n_beta
        ):
            raise QuadratureError(
                f"quadrature (n_theta={self.n_theta}, n_phi={self.n_phi}, "
                f"n_beta={self.n_beta}) cannot integrate degree {theta_degree} in cos(theta) "
                f"with frequencies ({max_phi_freq}, {max_beta_freq}) exactly"
            )

    def integrate(self, f):
        """Integrate ``f(theta, phi, beta)`` (broadcasting arrays) against sin(theta)."""
        theta, w, phi, beta, w_ang = self.nodes()
        th, ph, be = np.meshgrid(theta, phi, beta, indexing="ij")
        vals = f(th, ph, be)
        per_node = pairwise_sum(vals.reshape(len(theta), -1), axis=1) * w_ang
        return pairwise_sum(per_node * w)


def orthogonality_integral(t1, t2, quad: QuadratureSpec | None = None) -> complex:
    """Numerical integral of Y_t1 * conj(Y_t2) over theta, phi, beta."""
    t1, t2 = _triple(t1), _triple(t2)
    quad = quad or QuadratureSpec()
    quad.check(t1.l + t2.l, abs(t1.m - t2.m), abs(t1.n - t2.n))
    return complex(
        quad.integrate(
            lambda th, ph, be: eval_harmonic(t1, (th, ph, be))
            * np.conj(eval_harmonic(t2, (th, ph, be)))
        )
    )


def gram_matrix(triples, quad: QuadratureSpec | None = None) -> np.ndarray:
    """Matrix of orthogonality integrals G[i, j] = <Y_i, Y_j> for a list of triples."""
    triples = [_triple(t) for t in triples]
    quad = quad or QuadratureSpec()
    lmax = max(t.l for t in triples)
    quad.check(2 * lmax, 2 * lmax, 2 * lmax)
    theta, w, phi, beta, w_ang = quad.nodes()
    ph, be = np.meshgrid(phi, beta, indexing="ij")
    ph, be = ph.ravel(), be.ravel()
    blocks = []
    for th, wt in zip(theta, w):
        thv = np.full_like(ph, th)
        v = np.stack([eval_harmonic(t, (thv, ph, be)) for t in triples])
        blocks.append(wt * w_ang * (v @ v.conj().T))
    return pairwise_sum(np.stack(blocks))
