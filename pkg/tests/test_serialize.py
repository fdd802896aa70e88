import json

import numpy as np
import pytest

from qsdsim.serialize import (
    complex_pair,
    dumps,
    jsonify,
    parse_complex,
    parse_polar,
    round_sig,
    table_csv,
)


def test_round_sig():
    assert round_sig(0.9714045207910318) == 0.9714045208
    assert round_sig(0.0) == 0.0
    assert round_sig(1.0) == 1.0
    assert round_sig(1.23456789012345e-7) == 1.234567890e-7


def test_parse_complex():
    assert parse_complex("0.5,-0.25") == 0.5 - 0.25j
    assert parse_complex("0.7") == 0.7 + 0j
    with pytest.raises(ValueError):
        parse_complex("1,2,3")


def test_parse_polar():
    z = parse_polar("2,1.5707963267948966")
    assert abs(z - 2j) < 1e-12
    assert parse_polar("0.5") == 0.5 + 0j
    with pytest.raises(ValueError):
        parse_polar("1,2,3")


def test_jsonify_types():
    payload = jsonify(
        {
            "f": np.float64(0.12345678901234),
            "i": np.int64(3),
            "b": np.bool_(True),
            "z": 1 + 2j,
            "zr": 2 + 0j,
            "arr": np.arange(3),
            "nested": [(1, 2.0)],
            "none": None,
        }
    )
    assert payload["f"] == 0.123456789
    assert payload["i"] == 3 and isinstance(payload["i"], int)
    assert payload["b"] is True
    assert payload["z"] == [1.0, 2.0]
    assert payload["zr"] == 2.0
    assert payload["arr"] == [0, 1, 2]
    assert payload["nested"] == [[1, 2.0]]
    with pytest.raises(TypeError):
        jsonify({"bad": object()})


def test_dumps_deterministic_and_sorted():
    a = dumps({"b": 1.0, "a": np.pi})
    b = dumps({"a": np.pi, "b": 1.0})
    assert a == b
    assert a.endswith("\n")
    parsed = json.loads(a)
    assert parsed["a"] == 3.141592654


def test_complex_pair_rounding():
    assert complex_pair(np.exp(0.25j)) == [0.9689124217, 0.2474039593]


def test_table_csv():
    text = table_csv(np.array([[0.25, 0.75], [0.5, 0.5]]))
    lines = text.strip().split("\n")
    assert lines[0] == "k,j,p"
    assert lines[1] == "1,1,0.25"
    assert lines[4] == "2,2,0.5"
    assert len(lines) == 5
