import math

import numpy as np
from hypothesis import given, strategies as st

from hetnet_ee.csvio import emit_csv, read_csv, render_csv


def test_header_only(tmp_path):
    p = tmp_path / "e.csv"
    emit_csv([], ["a", "b"], p)
    assert p.read_bytes() == b"a,b\n"


def test_comments_and_rows():
    text = render_csv([{"x": 1, "y": 0.1}, [2, None]], ["x", "y"], comments=["seed: 1", ""])
    assert text == "# seed: 1\n#\nx,y\n1,0.10000000000000001\n2,\n"


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
def test_round_trip(values):
    text = render_csv([[v] for v in values], ["v"])
    back = [float(line) for line in text.splitlines()[1:]]
    assert back == values
    assert render_csv([[v] for v in back], ["v"]) == text


def test_write_read_write_idempotent(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv([{"k": "x", "v": math.pi}, {"k": "y", "v": np.float64(1e-300)}], ["k", "v"], a, ["hello"])
    comments, rows, schema = read_csv(a)
    emit_csv([{"k": r["k"], "v": float(r["v"])} for r in rows], schema, b, comments)
    assert a.read_bytes() == b.read_bytes()


def test_schema_mismatch():
    import pytest
    with pytest.raises(ValueError):
        render_csv([{"z": 1}], ["x"])
    with pytest.raises(ValueError):
        render_csv([[1, 2]], ["x"])
