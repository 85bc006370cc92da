"""Spherical harmonic d-tensors and their algebra.

A harmonic d-tensor is labelled by a :class:`HarmonicSignature`
``(l0 | l1 ... lk; m, n)`` plus one variance per slot.  Its expansion over
products ``Y_{l0,m0,n} e_mu1 x ... x e_muk`` is an :class:`ExpandedDTensor`;
identities (transposition, contraction, products) return
:class:`HarmonicCombination` objects, i.e. complex-weighted sums of
signatures.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import sqrt

import numpy as np

from .coupling import ONE, RadicalRational, three_j, three_j_float, six_j_float, triangle
from .scalar import (
    DEFAULT_PRUNE,
    AngularTriple,
    AnglePoint,
    HarmonicExpansion,
    QuadratureSpec,
    eval_harmonic,
    product_expand,
)

__all__ = [
    "Variance",
    "HarmonicSignature",
    "ExpandedDTensor",
    "HarmonicCombination",
    "ComponentTensor",
    "SignatureError",
    "basis_tensor",
    "build_recursive",
    "build_explicit",
    "evaluate",
    "conjugate_signature",
    "transpose_adjacent",
    "permute",
    "contract_adjacent",
    "contract_general",
    "tensor_product_closed",
    "tensor_product_oracle",
    "scalar_product",
    "inner_product_integral",
    "project",
    "signatures",
    "KRONECKER",
    "EPSILON",
]

MUS = (-1, 0, 1)
_S2 = sqrt(2.0)


class Variance(str, enum.Enum):
    VECTOR = "v"
    COVECTOR = "c"

    @property
    def dual(self) -> "Variance":
        return Variance.COVECTOR if self is Variance.VECTOR else Variance.VECTOR


class SignatureError(ValueError):
    """A signature violates the index conditions on (l0 | l1..lk; m, n)."""


def _variances(vs) -> tuple[Variance, ...]:
    return tuple(Variance(v) for v in vs)


@dataclass(frozen=True, order=True)
class HarmonicSignature:
    l0: int
    chain: tuple[int, ...]
    variances: tuple[Variance, ...]
    m: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "chain", tuple(int(c) for c in self.chain))
        object.__setattr__(self, "variances", _variances(self.variances))
        if len(self.chain) != len(self.variances):
            raise SignatureError("need exactly one variance per chain entry")
        if self.l0 < 0:
            raise SignatureError(f"l0 must be nonnegative, got {self.l0}")
        prev = self.l0
        for i, li in enumerate(self.chain, start=1):
            if not (abs(prev - 1) <= li <= prev + 1):
                raise SignatureError(
                    f"l{i} = {li} violates l{i} in |l{i-1} - 1| .. l{i-1} + 1 with l{i-1} = {prev}"
                )
            prev = li
        if abs(self.m) > self.lk:
            raise SignatureError(f"|m| = {abs(self.m)} exceeds l_k = {self.lk}")
        if abs(self.n) > self.l0:
            raise SignatureError(f"|n| = {abs(self.n)} exceeds l0 = {self.l0}")

    @property
    def k(self) -> int:
        return len(self.chain)

    @property
    def lk(self) -> int:
        return self.chain[-1] if self.chain else self.l0

    @property
    def ls(self) -> tuple[int, ...]:
        """Full chain (l0, l1, ..., lk)."""
        return (self.l0,) + self.chain

    def replace(self, **kw) -> "HarmonicSignature":
        d = dict(l0=self.l0, chain=self.chain, variances=self.variances, m=self.m, n=self.n)
        d.update(kw)
        return HarmonicSignature(**d)

    def dual(self) -> "HarmonicSignature":
        return self.replace(variances=tuple(v.dual for v in self.variances))

    def __str__(self):
        chain = ",".join(map(str, self.chain))
        vs = ",".join(v.value for v in self.variances)
        return f"{self.l0}|{chain};{self.m},{self.n};{vs}"

    @classmethod
    def parse(cls, text: str) -> "HarmonicSignature":
        """Parse ``"l0|l1,...,lk;m,n;v|c per slot"``, e.g. ``"0|1,0;0,0;v,c"``."""
        try:
            head, mn, *rest = text.strip().split(";")
            l0, chain = head.split("|")
            chain = tuple(int(c) for c in chain.split(",") if c.strip())
            m, n = (int(x) for x in mn.split(","))
            vs = tuple(v.strip() for v in rest[0].split(",") if v.strip()) if rest else ()
        except ValueError as exc:
            raise SignatureError(f"cannot parse signature {text!r}: {exc}") from None
        if not vs and chain:
            raise SignatureError(f"signature {text!r} lacks variances")
        try:
            vs = _variances(vs)
        except ValueError:
            raise SignatureError(f"variances must be 'v' or 'c' in {text!r}") from None
        return cls(int(l0), chain, vs, m, n)


def signatures(k: int, lmax: int, variances=None):
    """All valid rank-k signatures with every l <= lmax."""
    variances = _variances(variances or (Variance.COVECTOR,) * k)
    out = []

    def chains(prev, depth):
        if depth == 0:
            yield ()
            return
        for li in range(abs(prev - 1), min(prev + 1, lmax) + 1):
            for rest in chains(li, depth - 1):
                yield (li,) + rest

    for l0 in range(lmax + 1):
        for chain in chains(l0, k):
            lk = chain[-1] if chain else l0
            for m in range(-lk, lk + 1):
                for n in range(-l0, l0 + 1):
                    out.append(HarmonicSignature(l0, chain, variances, m, n))
    return out


@dataclass
class ComponentTensor:
    """Cartesian components of a d-tensor; trailing axes are the k slots of length 3."""

    variances: tuple
    components: np.ndarray

    def __post_init__(self):
        self.variances = _variances(self.variances)
        self.components = np.asarray(self.components)
        k = len(self.variances)
        if self.components.shape[self.components.ndim - k:] != (3,) * k:
            raise ValueError("component array must end in k axes of length 3")

    @property
    def rank(self) -> int:
        return len(self.variances)


_E = {
    -1: np.array([1.0, -1j, 0.0]) / _S2,
    0: np.array([0.0, 0.0, 1.0], dtype=complex),
    1: -np.array([1.0, 1j, 0.0]) / _S2,
}


def basis_tensor(mu: int, v=Variance.VECTOR) -> ComponentTensor:
    """Spherical basis e_mu (vector) or e^mu (covector) in Cartesian components."""
    return ComponentTensor((Variance(v),), _E[mu].copy())


@lru_cache(maxsize=None)
def _monomial(mus: tuple[int, ...]) -> np.ndarray:
    out = np.ones(())
    for mu in mus:
        out = np.multiply.outer(out, _E[mu])
    return out.astype(complex)


@dataclass
class ExpandedDTensor:
    """Sparse expansion ``sum c * Y_{l0,m0,n} e_mu1 x ... x e_muk``, keyed by (m0, mus)."""

    l0: int
    n: int
    variances: tuple
    terms: dict = field(default_factory=dict)
    prune: float = DEFAULT_PRUNE

    def __post_init__(self):
        self.variances = _variances(self.variances)
        self.terms = {
            (int(m0), tuple(mus)): complex(c)
            for (m0, mus), c in self.terms.items()
            if abs(c) >= self.prune
        }
        for m0, _ in self.terms:
            if abs(m0) > self.l0:
                raise ValueError(f"|m0| = {abs(m0)} exceeds l0 = {self.l0}")

    @property
    def k(self) -> int:
        return len(self.variances)

    def __sub__(self, other: "ExpandedDTensor") -> dict:
        keys = set(self.terms) | set(other.terms)
        return {key: self.terms.get(key, 0) - other.terms.get(key, 0) for key in keys}


def _coupling_factor(l_new: int, l_prev: int, m_new: int, m_prev: int, mu: int) -> RadicalRational:
    tj = three_j(l_new, l_prev, 1, m_new, -m_prev, -mu)
    if tj.is_zero():
        return tj
    return tj * RadicalRational((-1) ** ((l_new - m_new) % 2), Fraction(2 * l_new + 1))


@lru_cache(maxsize=None)
def _explicit_terms(l0: int, chain: tuple, m: int) -> dict:
    ls = (l0,) + chain
    k = len(chain)
    terms = {}
    for mus in itertools.product(MUS, repeat=k):
        # m_{i-1} = m_i - mu_i, walking back from m_k = m
        ms = [m]
        for mu in reversed(mus):
            ms.append(ms[-1] - mu)
        ms.reverse()
        if abs(ms[0]) > l0:
            continue
        coef = ONE
        for i in range(1, k + 1):
            coef = coef * _coupling_factor(ls[i], ls[i - 1], ms[i], ms[i - 1], mus[i - 1])
            if coef.is_zero():
                break
        if not coef.is_zero():
            terms[(ms[0], mus)] = float(coef)
    return terms


def build_explicit(sig: HarmonicSignature) -> ExpandedDTensor:
    """Expansion from the closed product of 3j factors over the whole chain.

    Each coefficient is an exact radical-rational product before conversion
    to float.
    """
    return ExpandedDTensor(sig.l0, sig.n, sig.variances, _explicit_terms(sig.l0, sig.chain, sig.m))


@lru_cache(maxsize=4096)
def _recursive_terms(l0: int, chain: tuple, m: int) -> dict:
    if not chain:
        return {(m, ()): 1.0}
    lk, lprev = chain[-1], (chain[-2] if len(chain) > 1 else l0)
    pref = (-1) ** ((lk - m) % 2) * sqrt(2 * lk + 1)
    out: dict = {}
    for mprev in range(-lprev, lprev + 1):
        for mu in MUS:
            w = three_j_float(lk, lprev, 1, m, -mprev, -mu)
            if w == 0.0:
                continue
            for (m0, mus), c in _recursive_terms(l0, chain[:-1], mprev).items():
                key = (m0, mus + (mu,))
                out[key] = out.get(key, 0.0) + pref * w * c
    return out


def build_recursive(sig: HarmonicSignature) -> ExpandedDTensor:
    """Expansion by coupling one basis vector at a time onto the rank k-1 tensors."""
    return ExpandedDTensor(sig.l0, sig.n, sig.variances, _recursive_terms(sig.l0, sig.chain, sig.m))


def _point_shape(p):
    theta = p.theta if isinstance(p, AnglePoint) else p[0]
    return np.shape(theta)


def evaluate(x, p) -> ComponentTensor:
    """Cartesian components of an expansion, signature or combination at angle point(s)."""
    if isinstance(x, HarmonicSignature):
        x = build_explicit(x)
    if isinstance(x, HarmonicCombination):
        return x.evaluate(p)
    shape = _point_shape(p)
    out = np.zeros(shape + (3,) * x.k, dtype=complex)
    cache = {}
    for (m0, mus), c in x.terms.items():
        if m0 not in cache:
            cache[m0] = eval_harmonic(AngularTriple(x.l0, m0, x.n), p)
        y = np.asarray(cache[m0])
        out = out + c * np.multiply.outer(y, _monomial(mus))
    return ComponentTensor(x.variances, out)


@dataclass
class HarmonicCombination:
    """Sparse complex-weighted sum of signatures sharing rank and variances."""

    terms: dict = field(default_factory=dict)
    prune: float = DEFAULT_PRUNE
    variances: tuple | None = None

    def __post_init__(self):
        self.terms = {s: complex(c) for s, c in self.terms.items() if abs(c) >= self.prune}
        patterns = {s.variances for s in self.terms}
        if len(patterns) > 1:
            raise ValueError("all signatures in a combination must share the variance pattern")
        if patterns:
            self.variances = patterns.pop()
        elif self.variances is not None:
            self.variances = _variances(self.variances)

    @classmethod
    def single(cls, sig: HarmonicSignature, coef=1.0) -> "HarmonicCombination":
        return cls({sig: coef})

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __getitem__(self, sig):
        return self.terms.get(sig, 0j)

    def items(self):
        return self.terms.items()

    def __add__(self, other: "HarmonicCombination") -> "HarmonicCombination":
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out.get(s, 0) + c
        return HarmonicCombination(out, self.prune, self.variances or other.variances)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, c) -> "HarmonicCombination":
        return HarmonicCombination(
            {s: c * v for s, v in self.terms.items()}, self.prune, self.variances
        )

    __rmul__ = scaled

    def max_abs_diff(self, other: "HarmonicCombination") -> float:
        keys = set(self.terms) | set(other.terms)
        return max((abs(self[s] - other[s]) for s in keys), default=0.0)

    def map(self, op) -> "HarmonicCombination":
        """Apply a linear signature-level operation ``op(sig) -> combination`` term by term."""
        out = HarmonicCombination(prune=self.prune)
        for s, c in self.terms.items():
            out = out + op(s).scaled(c)
        return out

    def evaluate(self, p) -> ComponentTensor:
        if not self.terms:
            k = len(self.variances or ())
            return ComponentTensor(self.variances or (), np.zeros(_point_shape(p) + (3,) * k, complex))
        total = None
        for s, c in self.terms.items():
            comp = evaluate(s, p).components * c
            total = comp if total is None else total + comp
        return ComponentTensor(self.variances, total)


def conjugate_signature(sig: HarmonicSignature) -> tuple[int, HarmonicSignature]:
    """conj Y(sig) = phase * Y(sig with m, n negated)."""
    phase = (-1) ** ((sig.l0 + sig.lk + sig.m + sig.n + sig.k) % 2)
    return phase, sig.replace(m=-sig.m, n=-sig.n)


def transpose_adjacent(sig: HarmonicSignature, i: int) -> HarmonicCombination:
    """Swap slots i and i+1 (1-based) as a combination over the new intermediate l_i."""
    if not 1 <= i <= sig.k - 1:
        raise ValueError(f"need 1 <= i <= k-1, got i={i}, k={sig.k}")
    if sig.variances[i - 1] != sig.variances[i]:
        raise ValueError("transposition of slots with different variance is not defined")
    ls = sig.ls
    lprev, li, lnext = ls[i - 1], ls[i], ls[i + 1]
    terms = {}
    for l in range(abs(lprev - 1), lprev + 2):
        if not triangle(l, lnext, 1):
            continue
        w = six_j_float(lprev, li, 1, lnext, l, 1)
        if w == 0.0:
            continue
        coef = (-1) ** ((l + li) % 2) * sqrt((2 * l + 1) * (2 * li + 1)) * w
        chain = list(sig.chain)
        chain[i - 1] = l
        terms[sig.replace(chain=tuple(chain))] = coef
    return HarmonicCombination(terms, variances=sig.variances)


def _bubble_path(perm) -> list[int]:
    """Adjacent swaps (0-based left positions) turning identity order into ``perm``."""
    target = {orig: pos for pos, orig in enumerate(perm)}
    cur = list(range(len(perm)))
    swaps = []
    changed = True
    while changed:
        changed = False
        for p in range(len(cur) - 1):
            if target[cur[p]] > target[cur[p + 1]]:
                cur[p], cur[p + 1] = cur[p + 1], cur[p]
                swaps.append(p)
                changed = True
    return swaps


def permute(x, perm) -> HarmonicCombination:
    """Permute slots: new slot j holds old slot ``perm[j]`` (as ``np.transpose``)."""
    comb = x if isinstance(x, HarmonicCombination) else HarmonicCombination.single(x)
    perm = tuple(perm)
    k = len(comb.variances or ())
    if sorted(perm) != list(range(k)):
        raise ValueError(f"{perm} is not a permutation of {k} slots")
    for p in _bubble_path(perm):
        comb = comb.map(lambda s, p=p: transpose_adjacent(s, p + 1))
    return comb


def contract_adjacent(sig: HarmonicSignature, i: int) -> HarmonicCombination:
    """Trace over slots i and i+1 (1-based), which must have opposite variance."""
    if not 1 <= i <= sig.k - 1:
        raise ValueError(f"need 1 <= i <= k-1, got i={i}, k={sig.k}")
    if sig.variances[i - 1] == sig.variances[i]:
        raise ValueError("contraction needs one vector and one covector slot")
    ls = sig.ls
    vs = sig.variances[: i - 1] + sig.variances[i + 1:]
    if ls[i - 1] != ls[i + 1]:
        return HarmonicCombination(variances=vs)
    coef = (-1) ** ((ls[i + 1] - ls[i]) % 2) * sqrt((2 * ls[i] + 1) / (2 * ls[i + 1] + 1))
    chain = sig.chain[: i - 1] + sig.chain[i + 1:]
    return HarmonicCombination({sig.replace(chain=chain, variances=vs): coef}, variances=vs)


def contract_general(x, i: int, j: int, path: str = "left") -> HarmonicCombination:
    """Trace over slots i < j (1-based), permuting j next to i first.

    ``path="left"`` moves slot j down to i+1; ``path="right"`` moves slot i up
    to j-1.  Both give the same combination.
    """
    comb = x if isinstance(x, HarmonicCombination) else HarmonicCombination.single(x)
    if not i < j:
        raise ValueError("need i < j")
    k = len(comb.variances)
    order = list(range(k))
    if path == "left":
        order.insert(i, order.pop(j - 1))
        at = i
    elif path == "right":
        order.insert(j - 2, order.pop(i - 1))
        at = j - 1
    else:
        raise ValueError("path must be 'left' or 'right'")
    comb = permute(comb, order)
    return comb.map(lambda s: contract_adjacent(s, at))


def _chain_range(prev: int, lmax: int | None = None):
    hi = prev + 1 if lmax is None else min(prev + 1, lmax)
    return range(abs(prev - 1), hi + 1)


def _all_chains(l0: int, k: int):
    if k == 0:
        yield ()
        return
    for l1 in _chain_range(l0):
        for rest in _all_chains(l1, k - 1):
            yield (l1,) + rest


def _chain_weight(ls, ms, mus) -> float:
    """prod_i (-1)^{l_i - m_i} sqrt(2 l_i + 1) 3j(l_i l_{i-1} 1; m_i -m_{i-1} -mu_i)."""
    w = 1.0
    for i in range(1, len(ls)):
        tj = three_j_float(ls[i], ls[i - 1], 1, ms[i], -ms[i - 1], -mus[i - 1])
        if tj == 0.0:
            return 0.0
        w *= (-1) ** ((ls[i] - ms[i]) % 2) * sqrt(2 * ls[i] + 1) * tj
    return w


def _ms_from(m0: int, mus) -> list[int]:
    ms = [m0]
    for mu in mus:
        ms.append(ms[-1] + mu)
    return ms


def tensor_product_closed(sig1: HarmonicSignature, sig2: HarmonicSignature) -> HarmonicCombination:
    """Decompose Y(sig1) x Y(sig2) by the closed 3j-product formula.

    The scalar parts couple to l0'' through the product rule; the k basis
    vectors of the first factor then couple into l''_1..l''_k and those of
    the second factor into l''_{k+1}..l''_{k+k'}.
    """
    k1, k2 = sig1.k, sig2.k
    ls1, ls2 = sig1.ls, sig2.ls
    n2 = sig1.n + sig2.n
    mtot = sig1.m + sig2.m
    variances = sig1.variances + sig2.variances

    # uncoupled terms: (m0, m0', mus1, mus2) -> weight of each factor
    left = []
    for mus1 in itertools.product(MUS, repeat=k1):
        m0 = sig1.m - sum(mus1)
        if abs(m0) > sig1.l0:
            continue
        w1 = _chain_weight(ls1, _ms_from(m0, mus1), mus1)
        if w1:
            left.append((m0, mus1, w1))
    right = []
    for mus2 in itertools.product(MUS, repeat=k2):
        m0p = sig2.m - sum(mus2)
        if abs(m0p) > sig2.l0:
            continue
        w2 = _chain_weight(ls2, _ms_from(m0p, mus2), mus2)
        if w2:
            right.append((m0p, mus2, w2))

    terms = {}
    for l0pp in range(abs(sig1.l0 - sig2.l0), sig1.l0 + sig2.l0 + 1):
        if abs(n2) > l0pp:
            continue
        tn = three_j_float(sig1.l0, sig2.l0, l0pp, sig1.n, sig2.n, -n2)
        if tn == 0.0:
            continue
        for chain in _all_chains(l0pp, k1 + k2):
            lspp = (l0pp,) + chain
            if abs(mtot) > lspp[-1]:
                continue
            total = 0.0
            for m0, mus1, w1 in left:
                for m0p, mus2, w2 in right:
                    m0pp = m0 + m0p
                    if abs(m0pp) > l0pp:
                        continue
                    tm = three_j_float(sig1.l0, sig2.l0, l0pp, m0, m0p, -m0pp)
                    if tm == 0.0:
                        continue
                    mus = mus1 + mus2
                    wpp = _chain_weight(lspp, _ms_from(m0pp, mus), mus)
                    if wpp == 0.0:
                        continue
                    phase = (-1) ** ((m0 + m0p + sig1.n + sig2.n) % 2)
                    # w1, w2, wpp already carry their sqrt(2l+1) factors
                    total += phase * tm * tn * w1 * w2 * wpp
            if total:
                total *= sqrt(2 * l0pp + 1) * sqrt(2 * sig1.l0 + 1) * sqrt(2 * sig2.l0 + 1)
                sig = HarmonicSignature(l0pp, chain, variances, mtot, n2)
                terms[sig] = terms.get(sig, 0.0) + total
    return HarmonicCombination(terms, variances=variances)


def project(x: ExpandedDTensor, lmax_chain: int | None = None) -> HarmonicCombination:
    """Re-express an expansion over harmonic signatures with the same l0 and n.

    The map from (m0, mus) monomials to signatures at fixed l0 is an orthogonal
    change of basis, so each coefficient is a plain dot product.
    """
    out = {}
    for chain in _all_chains(x.l0, x.k):
        lk = chain[-1] if chain else x.l0
        for m in range(-lk, lk + 1):
            sig = HarmonicSignature(x.l0, chain, x.variances, m, x.n)
            basis = build_explicit(sig)
            c = sum(v * x.terms.get(key, 0) for key, v in basis.terms.items())
            if abs(c) >= x.prune:
                out[sig] = c
    return HarmonicCombination(out, x.prune, x.variances)


def tensor_product_oracle(x1, x2) -> HarmonicCombination:
    """Product by multiplying expansions and reprojecting onto signatures."""
    if isinstance(x1, HarmonicSignature):
        x1 = build_explicit(x1)
    if isinstance(x2, HarmonicSignature):
        x2 = build_explicit(x2)
    variances = x1.variances + x2.variances
    # group by (l0'', n'') since projection works at fixed scalar label
    grouped: dict = {}
    for (m0, mus1), c1 in x1.terms.items():
        for (m0p, mus2), c2 in x2.terms.items():
            prod = product_expand(AngularTriple(x1.l0, m0, x1.n), AngularTriple(x2.l0, m0p, x2.n))
            for t, c in prod.items():
                bucket = grouped.setdefault((t.l, t.n), {})
                key = (t.m, mus1 + mus2)
                bucket[key] = bucket.get(key, 0) + c1 * c2 * c
    out = HarmonicCombination(variances=variances)
    for (l0pp, npp), terms in sorted(grouped.items()):
        out = out + project(ExpandedDTensor(l0pp, npp, variances, terms))
    return out


def scalar_product(vec_sig: HarmonicSignature, covec_sig: HarmonicSignature) -> HarmonicExpansion:
    """Contraction A^a B_a of a rank-1 vector and a rank-1 covector harmonic."""
    if vec_sig.k != 1 or covec_sig.k != 1:
        raise ValueError("scalar product needs two rank-1 signatures")
    if vec_sig.variances[0] == covec_sig.variances[0]:
        raise ValueError("scalar product needs one vector and one covector")
    l0, l1, m, n = vec_sig.l0, vec_sig.chain[0], vec_sig.m, vec_sig.n
    l0p, l1p, mp, np_ = covec_sig.l0, covec_sig.chain[0], covec_sig.m, covec_sig.n
    mm, nn = m + mp, n + np_
    pref = sqrt((2 * l0 + 1) * (2 * l1 + 1) * (2 * l0p + 1) * (2 * l1p + 1))
    terms = {}
    for lpp in range(max(abs(l0 - l0p), abs(l1 - l1p), abs(mm), abs(nn)),
                     min(l0 + l0p, l1 + l1p) + 1):
        w = (
            three_j_float(lpp, l0p, l0, -nn, np_, n)
            * three_j_float(lpp, l1p, l1, -mm, mp, m)
            * six_j_float(1, l0, l1, lpp, l1p, l0p)
        )
        if w == 0.0:
            continue
        phase = (-1) ** ((l0 + l1p + lpp + mm + nn) % 2)
        terms[AngularTriple(lpp, mm, nn)] = phase * pref * sqrt(2 * lpp + 1) * w
    return HarmonicExpansion(terms)


def pairing(a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
    """<A, B> = conj(A_{a1..ak}) B^{a1..ak} summed over the trailing k axes.

    Slots pair in their natural order; pairing A's first slot with B's last
    does not give an orthonormal system beyond rank 1.
    """
    axes = tuple(range(-k, 0))
    return np.sum(np.conj(a) * b, axis=axes) if k else np.conj(a) * b


def _default_quad(lmax: int) -> QuadratureSpec:
    return QuadratureSpec(lmax + 2, 2 * lmax + 2, 2 * lmax + 2)


def inner_product_integral(a_sig, b_sig, quad: QuadratureSpec | None = None) -> complex:
    """Integral of the pointwise pairing of two dual-variance harmonic d-tensors."""
    if a_sig.k != b_sig.k:
        raise ValueError("rank mismatch")
    if any(va == vb for va, vb in zip(a_sig.variances, b_sig.variances)):
        raise ValueError("second argument must have the dual variance pattern")
    lmax = max(a_sig.ls + b_sig.ls)
    quad = quad or _default_quad(lmax)
    quad.check(2 * lmax, 2 * lmax, 2 * lmax)
    ea, eb = build_explicit(a_sig), build_explicit(b_sig)

    def f(th, ph, be):
        p = (th, ph, be)
        return pairing(evaluate(ea, p).components, evaluate(eb, p).components, a_sig.k)

    return complex(quad.integrate(f))


def gram_matrix(sigs, quad: QuadratureSpec | None = None) -> np.ndarray:
    """Matrix of inner-product integrals <Y(s_i), Y(s_j)^dual> over a list of signatures."""
    lmax = max(max(s.ls) for s in sigs)
    quad = quad or _default_quad(lmax)
    quad.check(2 * lmax, 2 * lmax, 2 * lmax)
    theta, w, phi, beta, w_ang = quad.nodes()
    th, ph, be = (a.ravel() for a in np.meshgrid(theta, phi, beta, indexing="ij"))
    weights = np.repeat(w, len(phi) * len(beta)) * w_ang
    k = sigs[0].k
    vals = np.stack(
        [evaluate(s, (th, ph, be)).components.reshape(len(th), 3**k) for s in sigs]
    )
    # duals share component values; pairing is conj(A) . B per point
    vals = vals * np.sqrt(weights)[None, :, None]
    flat = vals.reshape(len(sigs), -1)
    return flat.conj() @ flat.T


def _kronecker() -> HarmonicCombination:
    sig = HarmonicSignature(0, (1, 0), (Variance.VECTOR, Variance.COVECTOR), 0, 0)
    return HarmonicCombination({sig: -sqrt(3.0)})


def _epsilon() -> HarmonicCombination:
    sig = HarmonicSignature(0, (1, 1, 0), (Variance.COVECTOR,) * 3, 0, 0)
    return HarmonicCombination({sig: 1j * sqrt(6.0)})


KRONECKER = _kronecker()
EPSILON = _epsilon()
