"""Identity checks against independent oracles.

Each ``check_*`` function returns a list of :class:`Check` records with the
measured error and the tolerance it was held to.  The CLI ``verify`` command
and the acceptance tests both run these.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import factorial, gcd, isqrt, pi, sqrt

import numpy as np

from . import coupling as cp
from . import dtensor as dt
from . import finsler as fs
from . import geometry as geo
from . import scalar as sc
from .config import RunConfig

EIGHT_PI2 = 8 * pi**2


@dataclass
class Check:
    id: str
    passed: bool
    error: float
    tolerance: float
    detail: str = ""

    def to_dict(self):
        d = asdict(self)
        d["error"] = float(self.error)
        d["tolerance"] = float(self.tolerance)
        return d

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.id}: error={self.error:.3e} tol={self.tolerance:.1e} {self.detail}".rstrip()


def _check(cfg: RunConfig, cid: str, error: float, tol: float, detail: str = "") -> Check:
    tol = cfg.tol_verify if cfg.tol_verify is not None else tol
    error = float(error)
    return Check(cid, bool(error <= tol), error, tol, detail)


def _rng(cfg: RunConfig, salt: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, salt])


def random_angles(rng, n):
    return (rng.uniform(0, pi, n), rng.uniform(0, 2 * pi, n), rng.uniform(0, 2 * pi, n))


def random_tangent_point(rng) -> geo.CartesianPoint:
    """Generic point away from the axis and from rhobar = 0."""
    c = geo.CylindricalChart(
        rng.uniform(0.5, 2.0),
        rng.uniform(0.3, pi - 0.3),
        rng.uniform(0, 2 * pi),
        rng.uniform(0.3, 2.0),
        rng.uniform(-1.5, 1.5),
        rng.uniform(0, 2 * pi),
    )
    return geo.cylindrical_to_cartesian(c)


# ---------------------------------------------------------------- coupling


def _squarefree_split(n: int) -> tuple[int, int]:
    """n = s^2 * f with f squarefree; returns (s, f)."""
    s, f = 1, 1
    p = 2
    while p * p <= n and p < 1000:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        s *= p ** (e // 2)
        f *= p ** (e % 2)
        p += 1
    r = isqrt(n)
    if r * r == n:
        s *= r
    else:
        f *= n
    return s, f


def _as_surd(x: cp.RadicalRational) -> tuple[Fraction, int]:
    """x = a * sqrt(f) with rational a and squarefree integer f."""
    if x.is_zero():
        return Fraction(0), 1
    p, q = x.radicand.numerator, x.radicand.denominator
    s, f = _squarefree_split(p * q)
    return x.sign * Fraction(s, q), f


def _surd_mul(a, b):
    (ra, fa), (rb, fb) = a, b
    g = gcd(fa, fb)
    return ra * rb * g, (fa // g) * (fb // g)


def six_j_by_contraction(j1, j2, j3, j4, j5, j6) -> dict[int, Fraction]:
    """Exact sum of four 3j symbols over all magnetic numbers, grouped by surd."""
    total: dict[int, Fraction] = {}
    surd = {}

    def tj(*a):
        if a not in surd:
            surd[a] = _as_surd(cp.three_j(*a))
        return surd[a]

    js = j1 + j2 + j3 + j4 + j5 + j6
    for m1 in range(-j1, j1 + 1):
        for m2 in range(-j2, j2 + 1):
            m3 = -m1 - m2
            if abs(m3) > j3:
                continue
            for m5 in range(-j5, j5 + 1):
                m6 = m5 - m1
                m4 = m5 + m3
                if abs(m6) > j6 or abs(m4) > j4:
                    continue
                term = tj(j1, j2, j3, -m1, -m2, -m3)
                for f in (tj(j1, j5, j6, m1, -m5, m6), tj(j4, j2, j6, m4, m2, -m6), tj(j4, j5, j3, -m4, m5, m3)):
                    term = _surd_mul(term, f)
                    if term[0] == 0:
                        break
                if term[0] == 0:
                    continue
                sign = -1 if (js - (m1 + m2 + m3 + m4 + m5 + m6)) % 2 else 1
                total[term[1]] = total.get(term[1], 0) + sign * term[0]
    return {f: v for f, v in total.items() if v != 0}


def check_coupling(cfg: RunConfig, jmax3: int = 6, jmax6: int = 4) -> list[Check]:
    # orthogonality: sum_j3 (2 j3 + 1) 3j^2 = 1, exact
    worst = Fraction(0)
    count = 0
    for j1 in range(jmax3 + 1):
        for j2 in range(jmax3 + 1):
            for m1 in range(-j1, j1 + 1):
                for m2 in range(-j2, j2 + 1):
                    s = sum(
                        (2 * j3 + 1) * cp.three_j(j1, j2, j3, m1, m2, -m1 - m2).radicand
                        for j3 in range(abs(j1 - j2), j1 + j2 + 1)
                    )
                    worst = max(worst, abs(s - 1))
                    count += 1
    checks = [_check(cfg, "coupling.three_j_orthogonality", float(worst), 0.0, f"{count} sums, exact")]

    # column permutations, exact RadicalRational equality
    mismatches = 0
    count = 0
    perms = list(itertools.permutations(range(3)))
    for js in itertools.product(range(jmax3 + 1), repeat=3):
        if not cp.triangle(*js):
            continue
        odd_phase = -1 if sum(js) % 2 else 1
        for m1 in range(-js[0], js[0] + 1):
            for m2 in range(-js[1], js[1] + 1):
                ms = (m1, m2, -m1 - m2)
                if abs(ms[2]) > js[2]:
                    continue
                ref = cp.three_j(*js, *ms)
                for perm in perms:
                    parity = sum(1 for a, b in itertools.combinations(perm, 2) if a > b) % 2
                    val = cp.three_j(*(js[i] for i in perm), *(ms[i] for i in perm))
                    expect = ref if not parity else (ref if odd_phase == 1 else -ref)
                    mismatches += val != expect
                    count += 1
    checks.append(_check(cfg, "coupling.three_j_column_symmetry", mismatches, 0, f"{count} permuted symbols, exact"))

    # 6j closed form against the four-3j contraction, exact
    mismatches = 0
    count = 0
    for js in itertools.product(range(jmax6 + 1), repeat=6):
        j1, j2, j3, j4, j5, j6 = js
        closed = cp.six_j(*js)
        triads = ((j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3))
        if not all(cp.triangle(*t) for t in triads):
            mismatches += not closed.is_zero()
            continue
        count += 1
        contracted = six_j_by_contraction(*js)
        a, f = _as_surd(closed)
        expect = {f: a} if a != 0 else {}
        mismatches += contracted != expect
    checks.append(_check(cfg, "coupling.six_j_vs_contraction", mismatches, 0, f"{count} admissible symbols, exact"))
    return checks


# ---------------------------------------------------------------- scalar harmonics


def assoc_legendre_sph(l: int, m: int, theta, phi):
    """Orthonormal Y_lm (Condon-Shortley) from the three-term Legendre recurrence."""
    am = abs(m)
    x = np.cos(theta)
    sx = np.sin(theta)
    pmm = np.ones_like(x)
    for i in range(1, am + 1):
        pmm = -pmm * (2 * i - 1) * sx
    if l == am:
        plm = pmm
    else:
        p1 = x * (2 * am + 1) * pmm
        p0 = pmm
        plm = p1
        for ll in range(am + 2, l + 1):
            plm = (x * (2 * ll - 1) * p1 - (ll + am - 1) * p0) / (ll - am)
            p0, p1 = p1, plm
    norm = sqrt((2 * l + 1) / (4 * pi) * factorial(l - am) / factorial(l + am))
    y = norm * plm * np.exp(1j * am * phi)
    if m < 0:
        y = (-1) ** am * np.conj(y)
    return y


def ode_residual(t: sc.AngularTriple, h: float = 1e-4, npts: int = 200) -> float:
    """max |polar ODE residual| / max |Theta| on [0.1, pi - 0.1] with 5-point stencils."""
    l, m, n = t
    th = np.linspace(0.1, pi - 0.1, npts)
    f = [sc.theta_profile(t, th + k * h) for k in (-2, -1, 0, 1, 2)]
    d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
    d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    res = d2 + d1 / np.tan(th) + ((2 * m * n * np.cos(th) - m * m - n * n) / np.sin(th) ** 2 + l * (l + 1)) * f[2]
    return float(np.abs(res).max() / max(np.abs(f[2]).max(), 1e-300))


def check_scalar_orthogonality(cfg: RunConfig) -> list[Check]:
    quad = sc.QuadratureSpec(cfg.quad_theta, cfg.quad_phi, cfg.quad_beta)
    G = sc.gram_matrix(sc.triples_up_to(4), quad)
    err = np.abs(G / EIGHT_PI2 - np.eye(len(G))).max()
    return [_check(cfg, "scalar.orthogonality_gram_l4", err, 1e-9,
                   f"{len(G)}x{len(G)} Gram, quadrature {quad.n_theta}x{quad.n_phi}x{quad.n_beta}")]


def check_wigner_identity(cfg: RunConfig) -> list[Check]:
    pts = random_angles(_rng(cfg, 3), 200)
    err = 0.0
    for t in sc.triples_up_to(5):
        y = sc.eval_harmonic(t, pts)
        d = (-1) ** (t.m % 2) * sqrt(2 * t.l + 1) * sc.wigner_D(t.l, -t.m, -t.n, pts)
        err = max(err, np.abs(y - d).max())
    return [_check(cfg, "scalar.wigner_D_identity_l5", err, 1e-12, "200 random points")]


def check_reduction(cfg: RunConfig) -> list[Check]:
    pts = random_angles(_rng(cfg, 4), 200)
    err = 0.0
    for t in sc.triples_up_to(5):
        if t.n == 0:
            ref = sqrt(4 * pi) * assoc_legendre_sph(t.l, t.m, pts[0], pts[1])
            err = max(err, np.abs(sc.eval_harmonic(t, pts) - ref).max())
    return [_check(cfg, "scalar.reduction_n0_l5", err, 1e-12, "vs three-term Legendre recurrence")]


def check_ode(cfg: RunConfig) -> list[Check]:
    err = max(ode_residual(t) for t in sc.triples_up_to(4))
    return [_check(cfg, "scalar.theta_ode_residual_l4", err, 1e-6, "h=1e-4, theta in [0.1, pi-0.1]")]


def check_scalar(cfg: RunConfig) -> list[Check]:
    return (
        check_scalar_orthogonality(cfg)
        + check_wigner_identity(cfg)
        + check_reduction(cfg)
        + check_ode(cfg)
        + check_scalar_operators(cfg)
        + check_product_rule(cfg)
    )


def check_scalar_operators(cfg: RunConfig, lmax: int = 3) -> list[Check]:
    rng = _rng(cfg, 5)
    h = cfg.fd_step
    errs = dict(R2=0.0, Rz=0.0, Bz=0.0, Rpm=0.0, Bpm=0.0)
    for t in sc.triples_up_to(lmax):
        f = geo.harmonic_field(t)
        p = random_tangent_point(rng)
        v = f(p)
        errs["R2"] = max(errs["R2"], abs(geo.R_squared(f, p) - t.l * (t.l + 1) * v))
        errs["Rz"] = max(errs["Rz"], abs(geo.R_op(f, 3, p, h) - t.m * v))
        errs["Bz"] = max(errs["Bz"], abs(geo.B_op(f, 3, p, h) - t.n * v))
        for d in (1, -1):
            c, t2 = sc.ladder_R(t, d)
            ref = c * geo.harmonic_field(t2)(p) if c else 0.0
            errs["Rpm"] = max(errs["Rpm"], abs(geo.R_ladder(f, p, d, h) - ref))
            c, t2 = sc.ladder_B(t, d)
            ref = c * geo.harmonic_field(t2)(p) if c else 0.0
            errs["Bpm"] = max(errs["Bpm"], abs(geo.B_ladder(f, p, d, h) - ref))
    return [_check(cfg, f"scalar.operator_{k}_l{lmax}", v, 1e-5) for k, v in errs.items()]


def check_product_rule(cfg: RunConfig, lmax: int = 3, npts: int = 100) -> list[Check]:
    rng = _rng(cfg, 7)
    pts = random_angles(rng, npts)
    triples = sc.triples_up_to(lmax)
    vals = {t: sc.eval_harmonic(t, pts) for t in triples + sc.triples_up_to(2 * lmax)}
    err = 0.0
    bad_range = 0
    for t1 in triples:
        for t2 in triples:
            exp = sc.product_expand(t1, t2)
            lo = max(abs(t1.l - t2.l), abs(t1.m + t2.m), abs(t1.n + t2.n))
            approx = np.zeros(npts, dtype=complex)
            for t, c in exp.items():
                bad_range += not (lo <= t.l <= t1.l + t2.l)
                approx += c * vals[t]
            err = max(err, np.abs(vals[t1] * vals[t2] - approx).max())
    return [
        _check(cfg, "scalar.product_rule_l3", err, 1e-10, f"{len(triples)**2} pairs x {npts} points"),
        _check(cfg, "scalar.product_rule_range", bad_range, 0, "emitted l'' outside the allowed range"),
    ]


# ---------------------------------------------------------------- d-tensors


def _eps() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for perm in itertools.permutations(range(3)):
        eps[perm] = np.linalg.det(np.eye(3)[list(perm)])
    return eps


def check_construction(cfg: RunConfig) -> list[Check]:
    err = 0.0
    count = 0
    for k in range(4):
        for s in dt.signatures(k, 3):
            diff = dt.build_recursive(s) - dt.build_explicit(s)
            err = max([err] + [abs(v) for v in diff.values()])
            count += 1
    return [_check(cfg, "dtensor.recursive_vs_explicit_k3_l3", err, 1e-12, f"{count} signatures")]


def check_constants(cfg: RunConfig) -> list[Check]:
    rng = _rng(cfg, 11)
    pts = random_angles(rng, 50)
    kron = np.abs(dt.KRONECKER.evaluate(pts).components - np.eye(3)).max()
    eps = np.abs(dt.EPSILON.evaluate(pts).components - _eps()).max()
    inv = 0.0
    for comb in (dt.KRONECKER, dt.EPSILON):
        field = geo.dtensor_field(comb)
        for _ in range(5):
            p = random_tangent_point(rng)
            for j in (1, 2, 3):
                inv = max(inv, np.abs(geo.R_op(field, j, p, cfg.fd_step)).max())
    return [
        _check(cfg, "dtensor.kronecker_constant", kron, 1e-14),
        _check(cfg, "dtensor.epsilon_constant", eps, 1e-14),
        _check(cfg, "dtensor.constants_rotation_invariant", inv, 1e-6),
    ]


def check_dtensor(cfg: RunConfig) -> list[Check]:
    return (
        check_construction(cfg)
        + check_constants(cfg)
        + check_dtensor_operators(cfg)
        + check_conjugation(cfg)
        + check_permutation_contraction(cfg)
        + check_products(cfg)
        + check_dtensor_orthogonality(cfg)
    )


def check_dtensor_operators(cfg: RunConfig, kmax: int = 2, lmax: int = 3) -> list[Check]:
    rng = _rng(cfg, 13)
    h = cfg.fd_step
    errs = dict(R2=0.0, Rz=0.0, Rpm=0.0)
    count = 0
    for k in range(kmax + 1):
        for s in dt.signatures(k, lmax):
            field = geo.dtensor_field(s)
            p = random_tangent_point(rng)
            v = field(p)
            errs["R2"] = max(errs["R2"], np.abs(geo.R_squared(field, p) - s.lk * (s.lk + 1) * v).max())
            errs["Rz"] = max(errs["Rz"], np.abs(geo.R_op(field, 3, p, h) - s.m * v).max())
            for d in (1, -1):
                if abs(s.m + d) <= s.lk:
                    c = sqrt((s.lk - d * s.m) * (s.lk + d * s.m + 1))
                    ref = c * geo.dtensor_field(s.replace(m=s.m + d))(p)
                else:
                    ref = 0.0
                errs["Rpm"] = max(errs["Rpm"], np.abs(geo.R_ladder(field, p, d, h) - ref).max())
            count += 1
    return [
        _check(cfg, f"dtensor.operator_{key}_k{kmax}_l{lmax}", v, 1e-5, f"{count} signatures")
        for key, v in errs.items()
    ]


def check_conjugation(cfg: RunConfig) -> list[Check]:
    pts = random_angles(_rng(cfg, 17), 20)
    err = 0.0
    for k in range(3):
        for s in dt.signatures(k, 2):
            phase, s2 = dt.conjugate_signature(s)
            a = np.conj(dt.evaluate(s, pts).components)
            err = max(err, np.abs(a - phase * dt.evaluate(s2, pts).components).max())
    return [_check(cfg, "dtensor.conjugate_phase", err, 1e-12)]


def _mixed_patterns(k):
    return list(itertools.product((dt.Variance.COVECTOR, dt.Variance.VECTOR), repeat=k))


def check_permutation_contraction(cfg: RunConfig, lmax: int = 2, npts: int = 50) -> list[Check]:
    pts = random_angles(_rng(cfg, 19), npts)
    err_t = 0.0
    err_c = 0.0
    err_trace = 0.0
    for k in (2, 3):
        for vs in _mixed_patterns(k):
            for s in dt.signatures(k, lmax, vs):
                comps = None
                for i in range(1, k):
                    if vs[i - 1] == vs[i]:
                        comps = dt.evaluate(s, pts).components if comps is None else comps
                        got = dt.transpose_adjacent(s, i).evaluate(pts).components
                        ax = comps.ndim - k + i - 1
                        err_t = max(err_t, np.abs(got - np.swapaxes(comps, ax, ax + 1)).max())
                    else:
                        comps = dt.evaluate(s, pts).components if comps is None else comps
                        got = dt.contract_adjacent(s, i).evaluate(pts).components
                        ax = comps.ndim - k + i - 1
                        err_c = max(err_c, np.abs(got - np.trace(comps, axis1=ax, axis2=ax + 1)).max())
                if k == 2 and vs[0] != vs[1]:
                    l0, l1, l2 = s.ls
                    expect = dt.HarmonicCombination(variances=())
                    if l0 == l2:
                        coef = (-1) ** ((l0 - l1) % 2) * sqrt((2 * l1 + 1) / (2 * l0 + 1))
                        expect = dt.HarmonicCombination({dt.HarmonicSignature(l0, (), (), s.m, s.n): coef})
                    err_trace = max(err_trace, dt.contract_adjacent(s, 1).max_abs_diff(expect))
    return [
        _check(cfg, "dtensor.transpose_pointwise_k3_l2", err_t, 1e-10, f"{npts} points"),
        _check(cfg, "dtensor.contract_pointwise_k3_l2", err_c, 1e-10, f"{npts} points"),
        _check(cfg, "dtensor.rank2_trace_formula", err_trace, 1e-12),
    ]


def check_products(cfg: RunConfig, lmax: int = 2, kmax: int = 2, npts: int = 10) -> list[Check]:
    C, V = dt.Variance.COVECTOR, dt.Variance.VECTOR
    err = 0.0
    pairs = 0
    for k1 in range(kmax + 1):
        for k2 in range(kmax + 1 - k1):
            left = dt.signatures(k1, lmax, (C,) * k1)
            right = dt.signatures(k2, lmax, (V,) * k2)
            for a in left:
                for b in right:
                    closed = dt.tensor_product_closed(a, b)
                    oracle = dt.tensor_product_oracle(a, b)
                    err = max(err, closed.max_abs_diff(oracle))
                    pairs += 1
    checks = [_check(cfg, "dtensor.product_closed_vs_oracle", err, 1e-10, f"{pairs} pairs")]

    rng = _rng(cfg, 23)
    pts = random_angles(rng, npts)
    err = 0.0
    sample = [(a, b) for a in dt.signatures(1, lmax, (C,)) for b in dt.signatures(1, lmax, (V,))]
    for idx in rng.choice(len(sample), size=min(60, len(sample)), replace=False):
        a, b = sample[idx]
        ref = np.einsum("pa,pb->pab", dt.evaluate(a, pts).components, dt.evaluate(b, pts).components)
        err = max(err, np.abs(dt.tensor_product_closed(a, b).evaluate(pts).components - ref).max())
    checks.append(_check(cfg, "dtensor.product_pointwise", err, 1e-10, "60 random rank-1 pairs"))

    err = 0.0
    pts = random_angles(rng, 50)
    for a in dt.signatures(1, lmax, (V,)):
        ea = dt.evaluate(a, pts).components
        for b in dt.signatures(1, lmax, (C,)):
            ref = np.einsum("pa,pa->p", ea, dt.evaluate(b, pts).components)
            err = max(err, np.abs(dt.scalar_product(a, b)(pts) - ref).max())
    checks.append(_check(cfg, "dtensor.scalar_product_pointwise", err, 1e-10, "all rank-1 pairs, 50 points"))
    return checks


def check_dtensor_orthogonality(cfg: RunConfig, kmax: int = 2, lmax: int = 3) -> list[Check]:
    checks = []
    for k in range(kmax + 1):
        sigs = dt.signatures(k, lmax)
        G = dt.gram_matrix(sigs) / EIGHT_PI2
        err = np.abs(G - np.eye(len(sigs))).max()
        checks.append(_check(cfg, f"dtensor.orthogonality_gram_k{k}_l{lmax}", err, 1e-8, f"{len(sigs)} signatures"))
    return checks


# ---------------------------------------------------------------- geometry


POLY_RADIAL = [
    geo.RadialFunction(lambda r, rho, z: rho**2 + z**2),
    geo.RadialFunction(lambda r, rho, z: z**2),
    geo.RadialFunction(lambda r, rho, z: rho**3 * z - 2 * rho * z**2 + r * rho + 0.5),
]


def check_geometry(cfg: RunConfig) -> list[Check]:
    rng = _rng(cfg, 29)
    checks = []

    err = 0.0
    for _ in range(20):
        c = geo.CylindricalChart(*rng.uniform([0.5, 0.3, 0, 0.3, -1, 0], [2, pi - 0.3, 2 * pi, 2, 1, 2 * pi]))
        back = geo.cartesian_to_cylindrical(geo.cylindrical_to_cartesian(c))
        err = max(err, np.abs(np.subtract(
            (back.r, back.theta, back.phi, back.rhobar, back.zbar, back.beta),
            (c.r, c.theta, c.phi, c.rhobar, c.zbar, c.beta))).max())
    checks.append(_check(cfg, "geometry.cylindrical_round_trip", err, 1e-12))

    # functions of (r, rbar, alpha) only are rotation invariant
    def radial_only(p):
        s = geo.cartesian_to_spherical(p)
        return s.r**2 + np.sin(s.alpha) * s.rbar + s.r * s.rbar

    err = 0.0
    for _ in range(10):
        p = random_tangent_point(rng)
        err = max(err, max(abs(geo.lie_derivative_function(radial_only, j, p, cfg.fd_step)) for j in (1, 2, 3)))
    checks.append(_check(cfg, "geometry.generators_act_on_angles_only", err, 1e-6))

    # [R_j, R_k] = i eps_jkl R_l and [B_j, R_k] = 0 by nested differences
    f = lambda p: geo.harmonic_field((2, 1, -1))(p) + 0.5 * geo.harmonic_field((1, 0, 1))(p)
    h = 1e-4
    err_rr = err_br = 0.0
    eps = _eps()
    for _ in range(3):
        p = random_tangent_point(rng)
        for j, k in ((1, 2), (2, 3), (3, 1)):
            rj = lambda q, j=j: geo.R_op(f, j, q, h)
            rk = lambda q, k=k: geo.R_op(f, k, q, h)
            comm = geo.R_op(rk, j, p, h) - geo.R_op(rj, k, p, h)
            rhs = sum(1j * eps[j - 1, k - 1, l - 1] * geo.R_op(f, l, p, h) for l in (1, 2, 3))
            err_rr = max(err_rr, abs(comm - rhs))
        for j in (1, 2, 3):
            for k in (1, 2, 3):
                bj = lambda q, j=j: geo.B_op(f, j, q, h)
                rk = lambda q, k=k: geo.R_op(f, k, q, h)
                comm = geo.B_op(rk, j, p, h) - geo.R_op(bj, k, p, h)
                err_br = max(err_br, abs(comm))
    checks.append(_check(cfg, "geometry.so3_commutators", err_rr, 1e-4))
    checks.append(_check(cfg, "geometry.corotation_commutes", err_br, 1e-4))

    # second-order convergence of the flow derivative
    t = sc.AngularTriple(3, 2, 1)
    f = geo.harmonic_field(t)
    p = random_tangent_point(rng)
    exact = t.m * f(p)
    e1 = abs(geo.R_op(f, 3, p, 1e-2) - exact)
    e2 = abs(geo.R_op(f, 3, p, 5e-3) - exact)
    ratio = e1 / e2
    checks.append(_check(cfg, "geometry.fd_second_order", abs(ratio - 4.0), 0.2, f"error ratio {ratio:.3f}"))

    checks.extend(check_vertical(cfg))
    return checks


def check_vertical(cfg: RunConfig, lmax: int = 2, npts: int = 5) -> list[Check]:
    rng = _rng(cfg, 31)
    err = 0.0
    count = 0
    sigs = dt.signatures(0, lmax) + dt.signatures(1, lmax) + dt.signatures(1, lmax, (dt.Variance.VECTOR,))
    for f in POLY_RADIAL:
        for s in sigs:
            vd = geo.vertical_differential(f, s)
            field = geo.dtensor_field(s)
            composed = lambda q, field=field, f=f: f(*geo.radial_of(q)) * field(q)
            for _ in range(npts):
                p = random_tangent_point(rng)
                ref = geo.fiber_gradient_fd(composed, p, 1e-6)
                scale = max(1.0, np.abs(ref).max())
                err = max(err, np.abs(vd.evaluate(p) - ref).max() / scale)
                count += 1
    checks = [_check(cfg, "geometry.vertical_differential_fd", err, 1e-5, f"{count} point evaluations")]

    err = 0.0
    for s in dt.signatures(1, 1):
        vd = geo.vertical_differential(POLY_RADIAL[2], s)
        p = random_tangent_point(rng)
        a = vd.bind(*geo.radial_of(p)).evaluate(geo.angles_of(p)).components
        err = max(err, np.abs(a - vd.evaluate(p)).max())
    checks.append(_check(cfg, "geometry.vertical_differential_decomposed", err, 1e-10))
    return checks


# ---------------------------------------------------------------- Finsler


def check_finsler(cfg: RunConfig, npts: int = 50) -> list[Check]:
    rng = _rng(cfg, 37)
    checks = []
    eu = fs.builtin_model("euclidean")
    g = fs.finsler_metric(eu)
    err = max(np.abs(g.evaluate(random_tangent_point(rng)) - np.eye(3)).max() for _ in range(npts))
    checks.append(_check(cfg, "finsler.euclidean_metric_identity", err, 1e-12, f"{npts} points"))

    for name in ("anisotropic-quadratic", "randers"):
        model = fs.builtin_model(name)
        g, gi, mom = fs.finsler_metric(model), fs.inverse_metric(model), fs.momenta(model)
        e_h = e_i = e_p = 0.0
        for _ in range(npts):
            p = random_tangent_point(rng)
            G = g.evaluate(p)
            e_h = max(e_h, np.abs(G - fs.hessian_oracle(model, p).components).max())
            e_i = max(e_i, np.abs(G @ gi.evaluate(p) - np.eye(3)).max())
            ref = 0.5 * geo.fiber_gradient_fd(lambda q: model.L(*fs.fiber_radial(q.x, q.xdot)), p, 1e-6)
            e_p = max(e_p, np.abs(mom.evaluate(p) - ref).max())
        checks.append(_check(cfg, f"finsler.{name}.metric_vs_hessian", e_h, 1e-5, f"{npts} points"))
        checks.append(_check(cfg, f"finsler.{name}.metric_times_inverse", e_i, 1e-8, f"{npts} points"))
        checks.append(_check(cfg, f"finsler.{name}.momenta_vs_fd", e_p, 1e-5, f"{npts} points"))
        lk = [s.lk for comb in (g, gi, mom) for s in comb.signatures]
        checks.append(_check(cfg, f"finsler.{name}.invariant_signatures", max(lk), 0, "max l_k emitted"))

    # harmonic-level check: g x g^-1 contracted over the middle slots is the Kronecker tensor
    model = fs.builtin_model("anisotropic-quadratic")
    g, gi = fs.finsler_metric(model), fs.inverse_metric(model)
    err = 0.0
    for _ in range(3):
        r, rho, z = rng.uniform(0.5, 2), rng.uniform(0.3, 2), rng.uniform(-1, 1)
        gb, gib = g.bind(r, rho, z), gi.bind(r, rho, z)
        prod = dt.HarmonicCombination(variances=gb.variances + gib.variances)
        for s1, c1 in gb.items():
            for s2, c2 in gib.items():
                prod = prod + dt.tensor_product_closed(s1, s2).scaled(c1 * c2)
        contracted = prod.map(lambda s: dt.contract_adjacent(s, 2))
        kron = dt.HarmonicCombination(
            {dt.HarmonicSignature(0, (1, 0), ("c", "v"), 0, 0): -sqrt(3.0)}
        )
        err = max(err, contracted.max_abs_diff(kron))
    checks.append(_check(cfg, "finsler.metric_inverse_harmonic_contraction", err, 1e-8))

    err = 0.0
    model = fs.builtin_model("randers")
    g = fs.finsler_metric(model)
    for _ in range(10):
        p = random_tangent_point(rng)
        for lam in (0.5, 2.0, 10.0):
            q = geo.CartesianPoint(p.x, lam * p.xdot)
            err = max(err, np.abs(g.evaluate(q) - g.evaluate(p)).max())
    checks.append(_check(cfg, "finsler.metric_zero_homogeneous", err, 1e-6))
    return checks


SUITES = {
    "coupling": check_coupling,
    "scalar": check_scalar,
    "dtensor": check_dtensor,
    "geometry": check_geometry,
    "finsler": check_finsler,
}


# acceptance criterion number -> the checks that decide it
CRITERIA = {
    1: (check_coupling,),
    2: (check_scalar_orthogonality,),
    3: (check_wigner_identity,),
    4: (check_reduction,),
    5: (check_scalar_operators, check_dtensor_operators),
    6: (check_ode,),
    7: (check_product_rule,),
    8: (check_construction,),
    9: (check_constants,),
    10: (check_permutation_contraction,),
    11: (check_products,),
    12: (check_dtensor_orthogonality,),
    13: (check_vertical,),
    14: (check_finsler,),
}


def run_criterion(number: int, cfg: RunConfig) -> list[Check]:
    checks = []
    for fn in CRITERIA[number]:
        checks.extend(fn(cfg))
    return sorted(checks, key=lambda c: c.id)


def run_suite(name: str, cfg: RunConfig) -> list[Check]:
    names = list(SUITES) if name == "all" else [name]
    checks = []
    for n in names:
        checks.extend(SUITES[n](cfg))
    return sorted(checks, key=lambda c: c.id)
