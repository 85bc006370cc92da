"""Spherically symmetric Finsler Lagrangians L(r, rhobar, zbar) in harmonic form.

Momenta, metric and inverse metric are combinations of rotation-invariant
(l_k = 0) harmonic d-tensors whose coefficients are functions of the radial
coordinates (r, rhobar, zbar).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Callable

import numpy as np

from .dtensor import ComponentTensor, HarmonicCombination, HarmonicSignature, Variance, evaluate
from .geometry import CartesianPoint, angles_of, radial_of

__all__ = [
    "LagrangianModel",
    "RadialCombination",
    "DegenerateMetric",
    "HomogeneityError",
    "momenta",
    "finsler_metric",
    "inverse_metric",
    "hessian_oracle",
    "fiber_radial",
    "builtin_model",
    "BUILTIN_MODELS",
]

PARTIALS = ("L", "L_r", "L_z", "L_rr", "L_rz", "L_zz")


class DegenerateMetric(ValueError):
    pass


class HomogeneityError(ValueError):
    pass


@dataclass
class LagrangianModel:
    """L(r, rhobar, zbar) with optional analytic partials.

    ``partials`` maps names in ``L_r, L_z, L_rr, L_rz, L_zz`` (r meaning
    rhobar, z meaning zbar) to callables; missing ones come from Richardson
    extrapolated central differences.
    """

    L: Callable[[float, float, float], float]
    partials: dict = field(default_factory=dict)
    name: str = "custom"
    step: float = 1e-3

    def _h(self, rho, z):
        return self.step * max(1e-3, float(np.hypot(rho, z)))

    def _d1(self, fn, r, rho, z, which):
        def cd(h):
            if which == "r":
                return (fn(r, rho + h, z) - fn(r, rho - h, z)) / (2 * h)
            return (fn(r, rho, z + h) - fn(r, rho, z - h)) / (2 * h)

        h = self._h(rho, z)
        return (4 * cd(h / 2) - cd(h)) / 3

    def derivatives(self, r, rho, z) -> dict:
        out = {"L": self.L(r, rho, z)}
        for name in ("L_r", "L_z"):
            if name in self.partials:
                out[name] = self.partials[name](r, rho, z)
            else:
                out[name] = self._d1(self.L, r, rho, z, name[-1])
        for name in ("L_rr", "L_rz", "L_zz"):
            if name in self.partials:
                out[name] = self.partials[name](r, rho, z)
                continue
            first = f"L_{name[2]}"
            inner = self.partials.get(first)
            if inner is None:
                inner = lambda a, b, c, w=name[2]: self._d1(self.L, a, b, c, w)
            out[name] = self._d1(inner, r, rho, z, name[3])
        return out

    def check_homogeneity(self, samples, tol: float = 1e-6):
        """Euler relation rho L_rho + z L_z = 2 L at sample points."""
        for r, rho, z in samples:
            d = self.derivatives(r, rho, z)
            lhs = rho * d["L_r"] + z * d["L_z"]
            if abs(lhs - 2 * d["L"]) > tol * max(1.0, abs(d["L"])):
                raise HomogeneityError(
                    f"L is not 2-homogeneous at (r, rhobar, zbar) = {(r, rho, z)}: "
                    f"rhobar L_rhobar + zbar L_zbar = {lhs:.6g}, 2L = {2 * d['L']:.6g}"
                )

    @classmethod
    def from_expression(cls, expr: str, name: str | None = None) -> "LagrangianModel":
        """Build a model from a sympy expression in ``r``, ``rho``, ``z``."""
        import sympy

        r, rho, z = sympy.symbols("r rho z")
        try:
            e = sympy.sympify(expr, locals={"r": r, "rho": rho, "z": z})
        except (sympy.SympifyError, SyntaxError, TypeError) as exc:
            raise ValueError(f"cannot parse Lagrangian {expr!r}: {exc}") from None
        extra = e.free_symbols - {r, rho, z}
        if extra:
            raise ValueError(f"unknown symbols in Lagrangian: {sorted(map(str, extra))}")
        derivs = {
            "L_r": sympy.diff(e, rho),
            "L_z": sympy.diff(e, z),
            "L_rr": sympy.diff(e, rho, 2),
            "L_rz": sympy.diff(e, rho, z),
            "L_zz": sympy.diff(e, z, 2),
        }

        def lam(x):
            f = sympy.lambdify((r, rho, z), x, "numpy")
            return lambda a, b, c: float(f(a, b, c))

        return cls(lam(e), {k: lam(v) for k, v in derivs.items()}, name or expr)


BUILTIN_MODELS = {
    "euclidean": "rho**2 + z**2",
    "anisotropic-quadratic": "rho**2 + 2*z**2",
    # Randers-type, 2-homogeneous but not quadratic in the fiber
    "randers": "(sqrt(rho**2 + z**2) + 3*z/(10*(1 + r**2)))**2",
}


def builtin_model(name: str) -> LagrangianModel:
    if name not in BUILTIN_MODELS:
        raise KeyError(f"unknown model {name!r}; choose from {sorted(BUILTIN_MODELS)}")
    return LagrangianModel.from_expression(BUILTIN_MODELS[name], name)


@dataclass
class RadialCombination:
    """sum_i coef_i(r, rhobar, zbar) * Y(sig_i) with function-valued coefficients."""

    terms: list
    variances: tuple

    @property
    def signatures(self) -> list[HarmonicSignature]:
        return [s for _, s in self.terms]

    def bind(self, r, rho, z) -> HarmonicCombination:
        out: dict = {}
        for fn, s in self.terms:
            out[s] = out.get(s, 0) + fn(r, rho, z)
        return HarmonicCombination(out, prune=0.0, variances=self.variances)

    def evaluate(self, p: CartesianPoint) -> np.ndarray:
        return self.bind(*radial_of(p)).evaluate(angles_of(p)).components

    def sample(self, grid) -> list[dict]:
        """Coefficients on a list of (r, rhobar, zbar) points, as JSON-ready records."""
        rows = []
        for r, rho, z in grid:
            rows.append(
                {
                    "r": r,
                    "rhobar": rho,
                    "zbar": z,
                    "coefficients": [
                        {"signature": str(s), "value": [float(np.real(c)), float(np.imag(c))]}
                        for s, c in ((s, fn(r, rho, z)) for fn, s in self.terms)
                    ],
                }
            )
        return rows


C = Variance.COVECTOR
V = Variance.VECTOR


def _sig(l0, n, variances, chain=(1, 0)):
    return HarmonicSignature(l0, chain, variances, 0, n)


def _guard_rho(rho):
    if rho <= 0:
        raise DegenerateMetric("the metric coefficients need rhobar > 0")


def momenta(model: LagrangianModel) -> RadialCombination:
    """p_a = (1/2) dL/dxdot^a as a rank-1 covector combination."""
    d = model.derivatives
    s2 = sqrt(2.0)
    terms = [
        (lambda r, rho, z: -0.5 * d(r, rho, z)["L_z"], _sig(1, 0, (C,), (0,))),
        (lambda r, rho, z: -d(r, rho, z)["L_r"] / (2 * s2), _sig(1, 1, (C,), (0,))),
        (lambda r, rho, z: d(r, rho, z)["L_r"] / (2 * s2), _sig(1, -1, (C,), (0,))),
    ]
    return RadialCombination(terms, (C,))


def finsler_metric(model: LagrangianModel) -> RadialCombination:
    """g_ab = (1/2) d^2 L / dxdot^a dxdot^b as a rank-2 covariant combination."""

    def parts(r, rho, z):
        _guard_rho(rho)
        d = model.derivatives(r, rho, z)
        return d, d["L_r"] / rho

    def c0(r, rho, z):
        d, q = parts(r, rho, z)
        return -(q + d["L_rr"] + d["L_zz"]) / (2 * sqrt(3.0))

    def c2(r, rho, z):
        d, q = parts(r, rho, z)
        return -(q + d["L_rr"] - 2 * d["L_zz"]) / (2 * sqrt(6.0))

    def c1(r, rho, z):
        return 0.5 * parts(r, rho, z)[0]["L_rz"]

    def c22(r, rho, z):
        d, q = parts(r, rho, z)
        return 0.25 * (d["L_rr"] - q)

    vs = (C, C)
    terms = [
        (c0, _sig(0, 0, vs)),
        (c2, _sig(2, 0, vs)),
        (c1, _sig(2, 1, vs)),
        (lambda *a: -c1(*a), _sig(2, -1, vs)),
        (c22, _sig(2, 2, vs)),
        (c22, _sig(2, -2, vs)),
    ]
    return RadialCombination(terms, vs)


def degeneracy_ratio(d: dict, rho: float) -> float:
    """Dimensionless size of the inverse-metric denominators (0 means degenerate)."""
    det = d["L_rz"] ** 2 - d["L_rr"] * d["L_zz"]
    det_scale = max(d["L_rz"] ** 2, abs(d["L_rr"] * d["L_zz"]), 1e-300)
    scale = max(abs(d["L_rr"]), abs(d["L_zz"]), abs(d["L_rz"]), 1e-300)
    return min(abs(det) / det_scale, abs(d["L_r"] / rho) / scale)


def inverse_metric(model: LagrangianModel, threshold: float = 1e-10) -> RadialCombination:
    """g^{ab} as a rank-2 contravariant combination."""

    def parts(r, rho, z):
        _guard_rho(rho)
        d = model.derivatives(r, rho, z)
        ratio = degeneracy_ratio(d, rho)
        if ratio < threshold:
            raise DegenerateMetric(
                f"metric degenerate at (r, rhobar, zbar) = {(r, rho, z)} "
                f"(ratio {ratio:.3g} < threshold {threshold:.3g})"
            )
        det = d["L_rz"] ** 2 - d["L_rr"] * d["L_zz"]
        return d, det, d["L_r"] * det

    def c0(r, rho, z):
        d, det, den = parts(r, rho, z)
        return 2 / sqrt(3.0) * (d["L_r"] * (d["L_rr"] + d["L_zz"]) - rho * det) / den

    def c2(r, rho, z):
        d, det, den = parts(r, rho, z)
        return -sqrt(2.0 / 3.0) * (d["L_r"] * (2 * d["L_rr"] - d["L_zz"]) + rho * det) / den

    def c1(r, rho, z):
        d, det, _ = parts(r, rho, z)
        return 2 * d["L_rz"] / det

    def c22(r, rho, z):
        d, det, den = parts(r, rho, z)
        return -(d["L_r"] * d["L_zz"] + rho * det) / den

    vs = (V, V)
    terms = [
        (c0, _sig(0, 0, vs)),
        (c2, _sig(2, 0, vs)),
        (c1, _sig(2, 1, vs)),
        (lambda *a: -c1(*a), _sig(2, -1, vs)),
        (c22, _sig(2, 2, vs)),
        (c22, _sig(2, -2, vs)),
    ]
    return RadialCombination(terms, vs)


def fiber_radial(x, xdot) -> tuple[float, float, float]:
    """(r, rhobar, zbar) straight from Cartesian data, without any angular chart."""
    x, xdot = np.asarray(x, float), np.asarray(xdot, float)
    r = float(np.linalg.norm(x))
    z = float(xdot @ x) / r
    rho = float(np.linalg.norm(xdot - z * x / r))
    return r, rho, z


def hessian_oracle(model: LagrangianModel, p: CartesianPoint, h: float = 1e-3) -> ComponentTensor:
    """(1/2) d^2 L / dxdot^a dxdot^b by Richardson-extrapolated central differences."""
    if not np.any(p.xdot):
        raise ValueError("xdot must be nonzero")
    step = h * float(np.linalg.norm(p.xdot))

    def L(v):
        return model.L(*fiber_radial(p.x, v))

    def hess(s):
        out = np.zeros((3, 3))
        eye = np.eye(3) * s
        for a in range(3):
            for b in range(a, 3):
                ea, eb = eye[a], eye[b]
                val = (
                    L(p.xdot + ea + eb) - L(p.xdot + ea - eb) - L(p.xdot - ea + eb) + L(p.xdot - ea - eb)
                ) / (4 * s * s)
                out[a, b] = out[b, a] = val
        return out

    g = 0.5 * (4 * hess(step / 2) - hess(step)) / 3
    return ComponentTensor((C, C), g)
