"""JSON encoding of labels, expansions and combinations.

Complex numbers are ``[re, im]`` pairs.  Terms are emitted in sorted label
order and ``dumps`` sorts keys, so equal objects encode to identical bytes.
"""
from __future__ import annotations

import json

import numpy as np

from .dtensor import ExpandedDTensor, HarmonicCombination, HarmonicSignature, Variance
from .scalar import AngularTriple, HarmonicExpansion


def _f(x: float) -> float:
    x = float(x)
    return 0.0 if x == 0 else x  # drop the sign of negative zero


def complex_to_json(c, prune: float = 0.0) -> list[float]:
    c = complex(c)
    re = c.real if abs(c.real) >= prune else 0.0
    im = c.imag if abs(c.imag) >= prune else 0.0
    return [_f(re), _f(im)]


def complex_from_json(v) -> complex:
    re, im = v
    return complex(re, im)


def array_to_json(a, prune: float = 0.0):
    """Nested lists of [re, im] pairs, one per entry of ``a``."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return complex_to_json(a, prune)
    return [array_to_json(x, prune) for x in a]


def triple_to_json(t: AngularTriple) -> dict:
    return {"l": t.l, "m": t.m, "n": t.n}


def triple_from_json(d) -> AngularTriple:
    return AngularTriple(int(d["l"]), int(d["m"]), int(d["n"]))


def signature_to_json(sig: HarmonicSignature) -> dict:
    return {
        "label": str(sig),
        "l0": sig.l0,
        "chain": list(sig.chain),
        "m": sig.m,
        "n": sig.n,
        "variances": [v.value for v in sig.variances],
    }


def signature_from_json(d) -> HarmonicSignature:
    if isinstance(d, str):
        return HarmonicSignature.parse(d)
    return HarmonicSignature(int(d["l0"]), tuple(d["chain"]), tuple(d["variances"]), int(d["m"]), int(d["n"]))


def combination_to_json(c: HarmonicCombination, prune: float = 0.0) -> dict:
    return {
        "type": "combination",
        "variances": [Variance(v).value for v in (c.variances or ())],
        "terms": [
            {"signature": str(s), "value": complex_to_json(v, prune)}
            for s, v in sorted(c.items())
        ],
    }


def combination_from_json(d) -> HarmonicCombination:
    terms = {HarmonicSignature.parse(t["signature"]): complex_from_json(t["value"]) for t in d["terms"]}
    return HarmonicCombination(terms, prune=0.0, variances=tuple(d["variances"]))


def expansion_to_json(e: HarmonicExpansion, prune: float = 0.0) -> dict:
    return {
        "type": "scalar_expansion",
        "terms": [
            {"triple": [t.l, t.m, t.n], "value": complex_to_json(v, prune)}
            for t, v in sorted(e.items())
        ],
    }


def expansion_from_json(d) -> HarmonicExpansion:
    return HarmonicExpansion({AngularTriple(*t["triple"]): complex_from_json(t["value"]) for t in d["terms"]}, prune=0.0)


def dtensor_expansion_to_json(x: ExpandedDTensor, prune: float = 0.0) -> dict:
    return {
        "type": "dtensor_expansion",
        "l0": x.l0,
        "n": x.n,
        "variances": [v.value for v in x.variances],
        "terms": [
            {"m0": m0, "mus": list(mus), "value": complex_to_json(v, prune)}
            for (m0, mus), v in sorted(x.terms.items())
        ],
    }


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
