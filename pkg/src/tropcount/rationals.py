"""Functions to convert exact rationals to and from text, as an integer or `p/q`."""

import fractions
import re
import typing

from .commontypes import ParseError

RATIONAL_MATCHER = re.compile(r"^([+-]?)(\d+)(?:/(\d+))?$")

type Rational = fractions.Fraction | int


def format_rational(val: Rational) -> str:
    val = fractions.Fraction(val)
    if val.denominator == 1:
        return str(val.numerator)
    return f"{val.numerator}/{val.denominator}"


def parse_rational(val: str) -> fractions.Fraction:
    val = val.strip()
    if len(val) == 0:
        raise ValueError("Empty rational string")
    match = RATIONAL_MATCHER.match(val)
    if match is None:
        raise ValueError(f"Invalid rational string {val!r}; expected integer or p/q")
    sign, numerator, denominator = match.groups()
    if denominator is not None and int(denominator) == 0:
        raise ValueError(f"Invalid rational string {val!r}; zero denominator")
    result = fractions.Fraction(int(numerator), int(denominator) if denominator is not None else 1)
    return -result if sign == "-" else result


def format_vector(v: typing.Iterable[Rational]) -> str:
    return " ".join(format_rational(x) for x in v)


def parse_int_vector(tokens: typing.Sequence[str], line_number: typing.Optional[int] = None) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in tokens)
    except ValueError as exc:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", line_number) from exc


def parse_rational_token(token: str, line_number: typing.Optional[int] = None) -> fractions.Fraction:
    try:
        return parse_rational(token)
    except ValueError as exc:
        raise ParseError(str(exc), line_number) from exc
