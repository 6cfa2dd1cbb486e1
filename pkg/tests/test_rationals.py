from fractions import Fraction

import pytest

from tropcount.commontypes import ParseError
from tropcount.rationals import format_rational, format_vector, parse_int_vector, parse_rational, parse_rational_token


@pytest.mark.parametrize(
    "value,expected",
    (
        (Fraction(0), "0"),
        (Fraction(3), "3"),
        (Fraction(-3), "-3"),
        (Fraction(1, 2), "1/2"),
        (Fraction(-7, 3), "-7/3"),
        (Fraction(6, 4), "3/2"),
        (5, "5"),
    ),
)
def test_format_rational(value, expected):
    assert format_rational(value) == expected


@pytest.mark.parametrize(
    "text,expected",
    (
        ("0", Fraction(0)),
        ("-0", Fraction(0)),
        ("+4", Fraction(4)),
        ("12", Fraction(12)),
        ("1/2", Fraction(1, 2)),
        ("-7/3", Fraction(-7, 3)),
        ("6/4", Fraction(3, 2)),
        (" 5 ", Fraction(5)),
    ),
)
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize(
    "text",
    (
        pytest.param("", id="empty"),
        pytest.param("   ", id="blank"),
        pytest.param("0.5", id="decimal"),
        pytest.param("1e3", id="exponent"),
        pytest.param("1/0", id="zero-denominator"),
        pytest.param("1/-2", id="signed-denominator"),
        pytest.param("a/b", id="letters"),
        pytest.param("1//2", id="double-slash"),
    ),
)
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_format_vector():
    assert format_vector((Fraction(1, 2), 0, -3)) == "1/2 0 -3"


def test_parse_int_vector_reports_line():
    assert parse_int_vector(["1", "-2"], 4) == (1, -2)
    with pytest.raises(ParseError, match="line 4"):
        parse_int_vector(["1", "x"], 4)


def test_parse_rational_token_reports_line():
    assert parse_rational_token("3/9", 2) == Fraction(1, 3)
    with pytest.raises(ParseError, match="line 2") as excinfo:
        parse_rational_token("0.25", 2)
    assert excinfo.value.line_number == 2
