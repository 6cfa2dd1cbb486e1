import enum
import typing

type IntVector = tuple[int, ...]


class TropcountError(Exception):
    """Base class for every error the package raises on purpose."""


class ParseError(TropcountError):
    def __init__(self, message: str, line_number: typing.Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class OutputFormat(enum.Enum):
    JSON_LINES = "json-lines"
    TEXT = "text"


def is_zero_vector(v: typing.Sequence) -> bool:
    return all(x == 0 for x in v)


def add_vectors(a: typing.Sequence, b: typing.Sequence) -> tuple:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} != {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def sub_vectors(a: typing.Sequence, b: typing.Sequence) -> tuple:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} != {len(b)}")
    return tuple(x - y for x, y in zip(a, b))


def scale_vector(c, v: typing.Sequence) -> tuple:
    return tuple(c * x for x in v)


def negate_vector(v: typing.Sequence) -> tuple:
    return tuple(-x for x in v)
