import numpy as np
import pytest

from gausscorr import cmio
from gausscorr.cmio import CMParseError

from oracles import random_mixed


def test_round_trip_is_exact(tmp_path):
    sigma = random_mixed(3, np.random.default_rng(5))
    path = tmp_path / "s.cm"
    cmio.save(path, sigma, comment="test state\nsecond line")
    back = cmio.load(path)
    # as_cm symmetrizes; the input is symmetric to rounding
    assert np.array_equal(back, 0.5 * (sigma + sigma.T))
    text = path.read_text()
    assert text.startswith("# test state\n# second line\n3\n")


def test_comments_and_blank_lines_skipped():
    text = "# header\n\n1\n# between\n2 0\n0 2\n"
    assert np.array_equal(cmio.loads(text), np.diag([2.0, 2.0]))


@pytest.mark.parametrize("text, line, fragment", [
    ("", None, "empty"),
    ("x\n1 0\n0 1\n", 1, "mode count"),
    ("0\n", 1, "positive"),
    ("1\n1 0\n", 2, "expected 2 matrix rows"),
    ("1\n1 0 0\n0 1\n", 2, "expected 2 values"),
    ("1\n1 0\n0 abc\n", 3, "non-numeric"),
])
def test_parse_errors_carry_line(text, line, fragment):
    with pytest.raises(CMParseError) as info:
        cmio.loads(text)
    assert info.value.line == line
    assert fragment in str(info.value)


def test_five_by_five_rejected():
    text = "2\n" + "\n".join(" ".join("1" for _ in range(5)) for _ in range(5)) + "\n"
    with pytest.raises(CMParseError):
        cmio.loads(text)


def test_asymmetric_rejected():
    with pytest.raises(ValueError):
        cmio.loads("1\n1 0.5\n0 1\n")


def test_full_precision_written():
    text = cmio.dumps(np.array([[1 / 3, 0], [0, 3.0]]))
    assert "0.3333333333333333" in text
