"""Charts on the tangent bundle of R^3, rotation flows and Lie-derivative oracles.

Points are Cartesian pairs (x, xdot).  Co-rotated charts rotate the fiber
frame together with the base point, so rotations only move (theta, phi, beta).
Lie derivatives are central differences along exact finite rotations.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt
from typing import Callable

import numpy as np

from .dtensor import (
    ComponentTensor,
    HarmonicCombination,
    HarmonicSignature,
    Variance,
    evaluate,
    tensor_product_closed,
)
from .scalar import AngularTriple, AnglePoint, eval_harmonic

__all__ = [
    "CartesianPoint",
    "SphericalChart",
    "CylindricalChart",
    "ChartSingularity",
    "RadialFunction",
    "VerticalDifferential",
    "spherical_to_cartesian",
    "cylindrical_to_cartesian",
    "cartesian_to_cylindrical",
    "cartesian_to_spherical",
    "angles_of",
    "radial_of",
    "rotation_matrix",
    "rotation_flow",
    "lie_derivative_function",
    "lie_derivative_dtensor",
    "R_op",
    "R_squared",
    "R_ladder",
    "B_op",
    "B_ladder",
    "corotation_field",
    "harmonic_field",
    "dtensor_field",
    "vertical_differential",
    "fiber_gradient_fd",
    "DEFAULT_H",
]

DEFAULT_H = 1e-5
# second flow derivatives lose ~eps/h^2; this step keeps R^2 well inside 1e-5
DEFAULT_H2 = 1e-3


class ChartSingularity(ValueError):
    """Point lies on a chart-singular locus (axis or fiber pole)."""


@dataclass(frozen=True)
class CartesianPoint:
    x: np.ndarray
    xdot: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "xdot", np.asarray(self.xdot, dtype=float))


@dataclass(frozen=True)
class SphericalChart:
    r: float
    theta: float
    phi: float
    rbar: float
    alpha: float
    beta: float


@dataclass(frozen=True)
class CylindricalChart:
    r: float
    theta: float
    phi: float
    rhobar: float
    zbar: float
    beta: float


def _rz(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _ry(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def spherical_to_cartesian(c: SphericalChart) -> CartesianPoint:
    base = _rz(c.phi) @ _ry(c.theta)
    x = base @ np.array([0.0, 0.0, c.r])
    xdot = base @ _rz(c.beta) @ _ry(c.alpha) @ np.array([0.0, 0.0, c.rbar])
    return CartesianPoint(x, xdot)


def cylindrical_to_cartesian(c: CylindricalChart) -> CartesianPoint:
    base = _rz(c.phi) @ _ry(c.theta)
    x = base @ np.array([0.0, 0.0, c.r])
    v = np.array([c.rhobar * np.cos(c.beta), c.rhobar * np.sin(c.beta), c.zbar])
    return CartesianPoint(x, base @ v)


def cartesian_to_cylindrical(p: CartesianPoint, tol: float = 1e-14) -> CylindricalChart:
    """Inverse of :func:`cylindrical_to_cartesian` away from the z axis and rhobar = 0."""
    x, xdot = p.x, p.xdot
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise ChartSingularity("base point at the origin")
    if np.hypot(x[0], x[1]) <= tol * r:
        raise ChartSingularity("base point on the axis x1 = x2 = 0 (theta in {0, pi})")
    theta = float(np.arccos(np.clip(x[2] / r, -1.0, 1.0)))
    phi = float(np.arctan2(x[1], x[0]) % (2 * pi))
    v = (_rz(phi) @ _ry(theta)).T @ xdot
    rhobar = float(np.hypot(v[0], v[1]))
    if rhobar <= tol * max(1.0, float(np.linalg.norm(xdot))):
        raise ChartSingularity("velocity parallel to the base point (rhobar = 0)")
    beta = float(np.arctan2(v[1], v[0]) % (2 * pi))
    return CylindricalChart(r, theta, phi, rhobar, float(v[2]), beta)


def cartesian_to_spherical(p: CartesianPoint) -> SphericalChart:
    c = cartesian_to_cylindrical(p)
    rbar = float(np.hypot(c.rhobar, c.zbar))
    alpha = float(np.arctan2(c.rhobar, c.zbar))
    return SphericalChart(c.r, c.theta, c.phi, rbar, alpha, c.beta)


def angles_of(p: CartesianPoint) -> AnglePoint:
    c = cartesian_to_cylindrical(p)
    return AnglePoint(c.theta, c.phi, c.beta)


def radial_of(p: CartesianPoint) -> tuple[float, float, float]:
    c = cartesian_to_cylindrical(p)
    return c.r, c.rhobar, c.zbar


# generator matrices: r_j = (M_j x)^a d_a
_GEN = {
    1: np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]]),
    2: np.array([[0.0, 0.0, -1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]),
    3: np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
}


def rotation_matrix(j: int, t: float) -> np.ndarray:
    """exp(t M_j) for the generator r_j, by Rodrigues' formula."""
    k = _GEN[j]
    return np.eye(3) + np.sin(t) * k + (1 - np.cos(t)) * (k @ k)


def rotation_flow(j: int, t: float, p: CartesianPoint) -> CartesianPoint:
    """Flow of the complete lift of r_j: the same rotation acts on x and xdot."""
    q = rotation_matrix(j, t)
    return CartesianPoint(q @ p.x, q @ p.xdot)


def harmonic_field(t) -> Callable[[CartesianPoint], complex]:
    t = t if isinstance(t, AngularTriple) else AngularTriple(*t)
    return lambda p: complex(eval_harmonic(t, angles_of(p)))


def dtensor_field(x) -> Callable[[CartesianPoint], np.ndarray]:
    """Component field of a signature, expansion or combination."""
    return lambda p: np.asarray(evaluate(x, angles_of(p)).components)


def _pullback(field, j, t, p):
    q = rotation_matrix(j, t)
    val = np.asarray(field(rotation_flow(j, t, p)))
    # vector and covector slots both pick up Q^T in an orthonormal frame
    for axis in range(val.ndim):
        val = np.moveaxis(np.tensordot(q.T, val, axes=([1], [axis])), 0, axis)
    return val


def lie_derivative_function(f, j: int, p: CartesianPoint, h: float = DEFAULT_H):
    """Central difference of f along the lifted rotation flow."""
    if h <= 0:
        raise ValueError("step must be positive")
    return (f(rotation_flow(j, h, p)) - f(rotation_flow(j, -h, p))) / (2 * h)


def lie_derivative_dtensor(field, j: int, p: CartesianPoint, h: float = DEFAULT_H) -> np.ndarray:
    """Central difference of the finite-rotation pullback of a component field."""
    if h <= 0:
        raise ValueError("step must be positive")
    return (_pullback(field, j, h, p) - _pullback(field, j, -h, p)) / (2 * h)


def R_op(field, j: int, p: CartesianPoint, h: float = DEFAULT_H):
    """R_j = i L_{r_j}; works for scalar and tensor fields alike."""
    return 1j * lie_derivative_dtensor(field, j, p, h)


def _second(field, j, p, h):
    return (_pullback(field, j, h, p) - 2 * _pullback(field, j, 0.0, p) + _pullback(field, j, -h, p)) / h**2


def R_squared(field, p: CartesianPoint, h: float = DEFAULT_H2, richardson: int = 2):
    """R^2 = -sum_j L_{r_j}^2 from second differences along each flow.

    ``richardson`` levels of extrapolation remove the h^2, h^4, ... errors.
    """
    total = 0
    for j in (1, 2, 3):
        table = [_second(field, j, p, h / 2**i) for i in range(richardson)]
        for level in range(1, richardson):
            factor = 4**level
            table = [(factor * table[i + 1] - table[i]) / (factor - 1) for i in range(len(table) - 1)]
        total = total - table[0]
    return total


def R_ladder(field, p: CartesianPoint, direction: int, h: float = DEFAULT_H):
    return R_op(field, 1, p, h) + direction * 1j * R_op(field, 2, p, h)


def corotation_field(j: int, c: CylindricalChart) -> tuple[float, float, float]:
    """Components (d_theta, d_phi, d_beta) of the co-rotation field b_j."""
    st, tt = np.sin(c.theta), np.tan(c.theta)
    sb, cb = np.sin(c.beta), np.cos(c.beta)
    if j == 1:
        return sb, -cb / st, cb / tt
    if j == 2:
        return -cb, -sb / st, sb / tt
    if j == 3:
        return 0.0, 0.0, -1.0
    raise ValueError("j must be 1, 2 or 3")


def B_op(f, j: int, p: CartesianPoint, h: float = DEFAULT_H):
    """B_j = i L_{b_j} on functions, by a chart-coordinate directional difference."""
    c = cartesian_to_cylindrical(p)
    dth, dph, dbe = corotation_field(j, c)

    def shifted(s):
        return cylindrical_to_cartesian(
            CylindricalChart(c.r, c.theta + s * dth, c.phi + s * dph, c.rhobar, c.zbar, c.beta + s * dbe)
        )

    return 1j * (f(shifted(h)) - f(shifted(-h))) / (2 * h)


def B_ladder(f, p: CartesianPoint, direction: int, h: float = DEFAULT_H):
    return B_op(f, 1, p, h) + direction * 1j * B_op(f, 2, p, h)


@dataclass
class RadialFunction:
    """f(r, rhobar, zbar) with partials in rhobar and zbar.

    Missing partials are central differences with step ``step`` scaled by
    |(rhobar, zbar)|.
    """

    value: Callable[[float, float, float], float]
    d_rho: Callable | None = None
    d_z: Callable | None = None
    step: float = 1e-5

    def __call__(self, r, rho, z):
        return self.value(r, rho, z)

    def _fd(self, r, rho, z, which):
        h = self.step * max(1.0, np.hypot(rho, z))
        if which == "rho":
            return (self.value(r, rho + h, z) - self.value(r, rho - h, z)) / (2 * h)
        return (self.value(r, rho, z + h) - self.value(r, rho, z - h)) / (2 * h)

    def f_rho(self, r, rho, z):
        return self.d_rho(r, rho, z) if self.d_rho else self._fd(r, rho, z, "rho")

    def f_z(self, r, rho, z):
        return self.d_z(r, rho, z) if self.d_z else self._fd(r, rho, z, "z")

    def check_partials(self, samples, tol: float = 1e-5):
        """Compare supplied partials with finite differences at sample (r, rho, z)."""
        for r, rho, z in samples:
            for which, fn in (("rho", self.d_rho), ("z", self.d_z)):
                if fn is None:
                    continue
                fd = self._fd(r, rho, z, which)
                if abs(fn(r, rho, z) - fd) > tol * max(1.0, abs(fd)):
                    raise ValueError(f"d/d{which} inconsistent with the value at {(r, rho, z)}")


def _vertical_sig(n: int) -> HarmonicSignature:
    return HarmonicSignature(1, (0,), (Variance.COVECTOR,), 0, n)


@dataclass
class VerticalDifferential:
    """sum_i coef_i(r, rhobar, zbar) * Y(left_i) x Y(sig); new covector slot first."""

    terms: list
    sig: HarmonicSignature

    def coefficients(self, r, rho, z) -> list[tuple[complex, HarmonicSignature]]:
        return [(fn(r, rho, z), left) for fn, left in self.terms]

    def evaluate(self, p: CartesianPoint) -> np.ndarray:
        r, rho, z = radial_of(p)
        ang = angles_of(p)
        right = evaluate(self.sig, ang).components
        out = 0
        for c, left in self.coefficients(r, rho, z):
            out = out + c * np.multiply.outer(evaluate(left, ang).components, right)
        return out

    def bind(self, r, rho, z) -> HarmonicCombination:
        """Harmonic decomposition at fixed radial values, through the closed product."""
        vs = (Variance.COVECTOR,) + self.sig.variances
        out = HarmonicCombination(variances=vs)
        for c, left in self.coefficients(r, rho, z):
            out = out + tensor_product_closed(left, self.sig).scaled(c)
        return out


def vertical_differential(f: RadialFunction, sig: HarmonicSignature, rho_tol: float = 1e-12) -> VerticalDifferential:
    """nabla^v [f Y(sig)] = dx^a x d/dxdot^a [f Y(sig)] in harmonic form."""
    n = sig.n
    s2 = sqrt(2.0)

    def over_rho(r, rho, z):
        if n == 0:
            return 0.0
        if abs(rho) < rho_tol:
            raise ChartSingularity("f / rhobar diverges at rhobar = 0 for n != 0")
        return n * f(r, rho, z) / rho

    terms = [
        (lambda r, rho, z: (over_rho(r, rho, z) - f.f_rho(r, rho, z)) / s2, _vertical_sig(1)),
        (lambda r, rho, z: (over_rho(r, rho, z) + f.f_rho(r, rho, z)) / s2, _vertical_sig(-1)),
        (lambda r, rho, z: -f.f_z(r, rho, z), _vertical_sig(0)),
    ]
    return VerticalDifferential(terms, sig)


def fiber_gradient_fd(field, p: CartesianPoint, h: float = 1e-5) -> np.ndarray:
    """d/dxdot^a of a (scalar or tensor) field by central differences; new axis first."""
    out = []
    for a in range(3):
        e = np.zeros(3)
        e[a] = h
        plus = field(CartesianPoint(p.x, p.xdot + e))
        minus = field(CartesianPoint(p.x, p.xdot - e))
        out.append((np.asarray(plus) - np.asarray(minus)) / (2 * h))
    return np.stack(out)
