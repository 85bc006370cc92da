import json

import numpy as np
from hypothesis import given, strategies as st

from dtharmonics import dtensor as dt
from dtharmonics import serialize as ser
from dtharmonics.scalar import HarmonicExpansion, product_expand

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(finite, finite)
def test_complex_round_trip(re, im):
    c = complex(re, im)
    assert ser.complex_from_json(json.loads(json.dumps(ser.complex_to_json(c)))) == c


def test_negative_zero_and_prune():
    assert ser.complex_to_json(complex(-0.0, -0.0)) == [0.0, 0.0]
    assert json.dumps(ser.complex_to_json(-1e-17 + 2j, prune=1e-13)) == "[0.0, 2.0]"


def test_signature_round_trip():
    for s in dt.signatures(2, 1, ("v", "c")):
        d = ser.signature_to_json(s)
        assert ser.signature_from_json(d) == s
        assert ser.signature_from_json(d["label"]) == s


def test_combination_round_trip_and_order():
    a = dt.tensor_product_closed(dt.HarmonicSignature.parse("1|1;0,1;c"), dt.HarmonicSignature.parse("1|0;0,-1;v"))
    d = ser.combination_to_json(a)
    labels = [t["signature"] for t in d["terms"]]
    assert labels == [str(s) for s in sorted(a.terms)]
    b = ser.combination_from_json(json.loads(ser.dumps(d)))
    assert a.max_abs_diff(b) == 0.0
    assert b.variances == a.variances


def test_expansion_round_trip():
    e = product_expand((1, 1, 0), (2, -1, 1))
    back = ser.expansion_from_json(json.loads(ser.dumps(ser.expansion_to_json(e))))
    assert dict(back.items()) == dict(e.items())


def test_dumps_is_canonical():
    x = {"b": [1.0, 2.0], "a": {"y": 1, "x": 2}}
    y = {"a": {"x": 2, "y": 1}, "b": [1.0, 2.0]}
    assert ser.dumps(x) == ser.dumps(y)


def test_array_encoding_shape():
    arr = np.arange(6).reshape(2, 3) * (1 + 1j)
    enc = ser.array_to_json(arr)
    assert np.array(enc).shape == (2, 3, 2)
    assert enc[1][2] == [5.0, 5.0]


def test_dtensor_expansion_encoding():
    x = dt.build_explicit(dt.HarmonicSignature.parse("1|1;0,0;c"))
    d = ser.dtensor_expansion_to_json(x)
    assert d["l0"] == 1 and d["variances"] == ["c"]
    assert len(d["terms"]) == len(x.terms)
