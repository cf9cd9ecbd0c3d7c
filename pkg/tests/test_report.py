import json
from fractions import Fraction

import jsonschema
import numpy as np
import pytest
from hypothesis import given, strategies as st

from dca.report import Report, dumps, schema


def test_unknown_provenance():
    with pytest.raises(ValueError):
        Report("x").claim("a", 1, 1, "guess", True)


def test_serialization_of_exact_values():
    rep = Report("x")
    rep.claim("frac", Fraction(1, 3), Fraction(2), "derived", False)
    rep.data["np"] = np.float64(0.25)
    rep.data["pts"] = {(1, 2)}
    d = json.loads(rep.to_json())
    assert d["claims"][0]["expected"] == "1/3" and d["claims"][0]["computed"] == 2
    assert d["data"]["np"] == 0.25 and d["data"]["pts"] == [[1, 2]]
    assert d["pass"] is False
    jsonschema.validate(d, schema())


def test_lines():
    rep = Report("x")
    rep.claim("a", 1, 1, "trivial", True)
    rep.claim("b", 1, 2, "trivial", False)
    assert rep.lines() == ["PASS  a: expected 1, got 1", "FAIL  b: expected 1, got 2"]


def test_extend_prefixes_data():
    a, b = Report("a"), Report("b")
    b.data["k"] = 1
    b.claim("c", 1, 1, "trivial", True)
    a.extend(b)
    assert a.data == {"b:k": 1} and len(a.claims) == 1


@given(st.dictionaries(st.text(max_size=5), st.floats(allow_nan=False, allow_infinity=False)))
def test_dumps_is_stable_and_round_trips(d):
    text = dumps(d)
    assert dumps(json.loads(text)) == text
    assert json.loads(text) == d
