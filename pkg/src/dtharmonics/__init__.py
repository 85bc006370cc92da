"""Spherical harmonic d-tensors on the tangent bundle of R^3."""
from .config import RunConfig
from .coupling import RadicalRational, clebsch_gordan, six_j, three_j
from .dtensor import (
    EPSILON,
    KRONECKER,
    HarmonicCombination,
    HarmonicSignature,
    SignatureError,
    Variance,
    build_explicit,
    build_recursive,
    contract_adjacent,
    evaluate,
    scalar_product,
    signatures,
    tensor_product_closed,
    transpose_adjacent,
)
from .scalar import AnglePoint, AngularTriple, HarmonicExpansion, QuadratureSpec, eval_harmonic, product_expand

__version__ = "0.1.0"
