import json
import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from elliptica.report import VerificationReport, check_rng, decode_complex, encode, reports_to_json


def test_from_residual_flags():
    assert VerificationReport.from_residual("a", "s", {}, 1e-9, 1e-8).passed
    assert not VerificationReport.from_residual("a", "s", {}, 1e-7, 1e-8).passed
    assert not VerificationReport.from_residual("a", "s", {}, math.nan, 1e-8).passed
    assert VerificationReport.from_residual("a", "s", {}, 0.0, 0.0).passed


def test_json_schema_and_timing():
    r = VerificationReport.from_residual("a", "s", {"eta": 0.1 + 0.2j}, 1e-9, 1e-8, extra=np.inf)
    r.wall_time = 1.5
    doc = json.loads(reports_to_json([r], {"seed": 1}))
    assert doc["schema"] == 1
    rec = doc["records"][0]
    assert rec["params"]["eta"] == [0.1, 0.2]
    assert "wall_time" not in rec
    assert rec["details"]["extra"] == "inf"
    timed = json.loads(reports_to_json([r], {}, include_timing=True))
    assert timed["records"][0]["wall_time"] == 1.5


@given(st.complex_numbers(allow_nan=False, allow_infinity=False))
def test_complex_round_trip(z):
    assert decode_complex(encode(z)) == z


def test_check_rng_depends_on_name_and_seed():
    a = check_rng(5, "x").normal(size=3)
    assert np.array_equal(a, check_rng(5, "x").normal(size=3))
    assert not np.array_equal(a, check_rng(5, "y").normal(size=3))
    assert not np.array_equal(a, check_rng(6, "x").normal(size=3))


def test_summary_line():
    line = VerificationReport.from_residual("ybe", "s", {}, 2e-15, 1e-8).summary_line()
    assert line.startswith("[PASS] ybe")
