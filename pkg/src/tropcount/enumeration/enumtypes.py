import fractions
import typing

import msgspec

from ..commontypes import TropcountError
from ..tropical.curves import RationalVector, TropicalMap


class EnumerationError(TropcountError):
    pass


class NonGenericConfiguration(EnumerationError):
    """The point configuration sits on a wall; draw another one."""


class ResamplingExhausted(EnumerationError):
    def __init__(self, attempts: int):
        self.attempts = attempts
        super().__init__(f"no generic configuration found in {attempts} attempts")


class NotTrivalent(EnumerationError):
    def __init__(self, vertex: str, slopes: typing.Sequence):
        self.vertex = vertex
        super().__init__(f"vertex {vertex} is not trivalent (flag slopes {list(slopes)})")


class Solution(msgspec.Struct, kw_only=True, frozen=True):
    map: TropicalMap
    multiplicity: fractions.Fraction


class EnumerationResult(msgspec.Struct, kw_only=True, frozen=True):
    solutions: tuple[Solution, ...]
    seed: typing.Optional[int] = None
    attempt: int = 0
    # the point conditions, for plane curve counts
    points: tuple[RationalVector, ...] = ()

    @property
    def total(self) -> fractions.Fraction:
        return sum((s.multiplicity for s in self.solutions), fractions.Fraction(0))
