import io
import json
import math
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from awlab.cli import WordSyntaxError, parse_word_expr, run
from awlab.words import WordExpr


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    return code, buf.getvalue()


def call_json(*argv):
    code, text = call(*argv)
    return code, json.loads(text)


@pytest.fixture
def half_block(tmp_path):
    path = tmp_path / "rep.json"
    path.write_text(json.dumps({"trivial_dim": 0,
                                "blocks": [{"frequency": math.log(2), "multiplicity": 1}]}))
    return str(path)


# grammar


def test_parse_simple_word():
    assert parse_word_expr("s(1) s(2)") == WordExpr.from_word([("s(1)", False), ("s(2)", False)])


def test_parse_coefficients_and_signs():
    e = parse_word_expr("-2 s(1) + (1-0.5j) * l*(2) l(1) - 3")
    expected = (-2 * WordExpr.gen("s(1)")
                + (1 - 0.5j) * WordExpr.gen("l(2)", True) * WordExpr.gen("l(1)") - 3)
    assert e == expected


def test_parse_y_letters():
    assert parse_word_expr("y* y") == WordExpr.gen("y", True) * WordExpr.gen("y")
    assert parse_word_expr("2j y") == 2j * WordExpr.gen("y")


@pytest.mark.parametrize("text", ["", "s(1) +", "s(0)", "x(1)", "s(1) * s(2)", "(1+2) s(1)",
                                  "s(1) s(2) )"])
def test_parse_errors(text):
    with pytest.raises(WordSyntaxError):
        parse_word_expr(text)


letter_text = st.sampled_from(["s(1)", "s(2)", "l(1)", "l*(2)", "y", "y*"])
terms = st.tuples(st.integers(-9, 9), st.lists(letter_text, min_size=1, max_size=4))


@given(st.lists(terms, min_size=1, max_size=4))
def test_parse_roundtrip(parts):
    pieces, expected = [], WordExpr()
    for coef, letters in parts:
        pieces.append(f"{'+' if coef >= 0 else '-'} {abs(coef)} {' '.join(letters)}")
        word = parse_word_expr(" ".join(letters))
        expected = expected + coef * word
    assert parse_word_expr(" ".join(pieces)) == expected


# commands


def test_classify(half_block):
    code, doc = call_json("classify", "--rep", half_block)
    assert code == 0
    assert doc["type"] == "III_lambda" and doc["lambda"] == 0.5 and doc["s_invariant"] == ["2"]
    assert doc["status"] == "PASS"


def test_classify_needs_rep():
    code, doc = call_json("classify")
    assert code == 2 and doc["error"]["code"] == "missing_rep"


def test_classify_bad_rep(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"trivial_dim": 0, "blocks": [{"frequency": -1, "multiplicity": 1}]}')
    code, doc = call_json("classify", "--rep", str(path))
    assert code == 2 and doc["error"]["code"] == "non_positive_frequency"
    code, doc = call_json("classify", "--rep", str(tmp_path / "missing.json"))
    assert code == 2 and doc["error"]["code"] == "io_error"


@pytest.mark.parametrize("args, value", [
    (["s(1) s(1)"], 0.25),
    (["s(1) s(1) s(1) s(1)"], 0.125),
    (["4 s(1) s(1) - 1"], 0.0),
    (["l*(1) l(1)"], 1.0),
    (["y* y", "--lambda", "0.5"], 1.0),
    (["y y*", "--lambda", "0.5"], 0.5),
    (["s(1) s(2)"], 0.0),
])
def test_moments(args, value):
    code, doc = call_json("moments", *args)
    assert code == 0
    assert abs(complex(*doc["value"]) - value) < 1e-12
    assert doc["exact"]


def test_moments_on_rep(half_block):
    code, doc = call_json("moments", "s(1) s(1)", "--rep", half_block)
    assert code == 0 and abs(doc["value"][0] - 0.25) < 1e-12


def test_moments_inexact_flag():
    code, doc = call_json("moments", "s(1) s(1) s(1) s(1)", "--depth", "2")
    assert code == 0 and not doc["exact"]


def test_moments_errors(half_block):
    code, doc = call_json("moments", "s(1) +")
    assert code == 2 and doc["error"]["code"] == "word_syntax"
    code, doc = call_json("moments", "s(3)", "--rep", half_block)
    assert code == 2 and doc["error"]["code"] == "index_out_of_range"
    code, doc = call_json("moments", "s(1) s(2) s(3)", "--depth", "12", "--max-dim", "1000")
    assert code == 2 and doc["error"]["code"] == "budget_exceeded"
    assert doc["error"]["required_dim"] == (3 ** 13 - 1) // 2


def test_verify_semicircle():
    code, doc = call_json("verify", "semicircle", "--depth", "8")
    assert code == 0 and doc["pass"] and doc["status"] == "PASS"
    assert doc["max_rel_error_even"] <= 1e-12
    assert doc["config"]["depth"] == 8


def test_verify_tla_depth_guard():
    code, doc = call_json("verify", "tla", "--depth", "6")
    assert code == 2 and doc["error"]["code"] == "depth_too_small"


def test_verify_tla_csv():
    code, text = call("verify", "tla", "--depth", "7", "--format", "csv")
    lines = text.splitlines()
    # two depths are too few for the factor-2 improvement, so the verdict fails
    assert code == 1 and lines[0] == "k,l,depth,defect" and len(lines) == 1 + 2 * 16


def test_usage_errors():
    assert call("verify", "nothing")[0] == 2
    assert call("frobnicate")[0] == 2
    assert call()[0] == 2


def test_matrix_model_csv_and_json():
    code, text = call("matrix-model", "--n", "64", "--samples", "10", "--seed", "3",
                      "--format", "csv")
    assert text.startswith("# family=gue_single n=64 samples=10 seed=3")
    assert code in (0, 1)
    code, doc = call_json("matrix-model", "--n", "64", "--samples", "10", "--seed", "3")
    assert doc["seed"] == 3 and len(doc["rows"]) == 4


def test_byte_identical_output():
    args = ("verify", "barnett", "--samples", "10")
    assert call(*args) == call(*args)
    args = ("matrix-model", "--n", "32", "--samples", "5", "--seed", "11")
    assert call(*args) == call(*args)


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "awlab.cli", "moments", "s(1) s(1)"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert abs(json.loads(proc.stdout)["value"][0] - 0.25) < 1e-12
