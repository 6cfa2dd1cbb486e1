from __future__ import annotations

import fractions
import functools
import itertools
import math
import typing

import msgspec

from ..commontypes import IntVector, TropcountError, is_zero_vector, negate_vector
from ..lattice import IntegerMatrix, is_primitive, kernel_basis, matrix_rank, quotient_by_span, solve_exact, smith_normal_form


class ConeError(TropcountError):
    pass


class NonSimplicial(ConeError):
    def __init__(self, cone: Cone):
        self.cone = cone
        super().__init__(f"cone {cone.rays} is not simplicial")


def nonnegative_circuit_support(columns: typing.Sequence[IntVector]) -> frozenset[int]:
    """Union of the supports of the sign-consistent circuits among `columns`.

    A nonnegative nonzero relation between the columns exists iff this is nonempty, and a strictly
    positive one exists iff it covers every column, since such relations split conformally into circuits.
    """
    covered: set[int] = set()
    if not columns:
        return frozenset()
    rank = len(columns[0])
    for size in range(1, min(len(columns), rank + 1) + 1):
        for subset in itertools.combinations(range(len(columns)), size):
            if covered.issuperset(subset):
                continue
            basis = kernel_basis(IntegerMatrix.from_columns([columns[i] for i in subset], rank))
            if len(basis) != 1:
                continue
            relation = basis[0]
            if any(c == 0 for c in relation):
                continue
            if all(c > 0 for c in relation) or all(c < 0 for c in relation):
                covered.update(subset)
    return frozenset(covered)


class Cone(msgspec.Struct, frozen=True, kw_only=True, dict=True):
    ambient_rank: int
    rays: tuple[IntVector, ...]

    @classmethod
    def make(cls, rays: typing.Iterable[typing.Sequence[int]], ambient_rank: int) -> Cone:
        cleaned = sorted({tuple(int(x) for x in r) for r in rays})
        for r in cleaned:
            if len(r) != ambient_rank:
                raise ValueError(f"ray {r} does not live in rank {ambient_rank}")
            if not is_primitive(r):
                raise ValueError(f"ray {r} is not primitive")
        cone = cls(ambient_rank=ambient_rank, rays=tuple(cleaned))
        if not cone.is_strictly_convex():
            raise ValueError(f"cone {cone.rays} contains a line")
        return cone

    @classmethod
    def zero(cls, ambient_rank: int) -> Cone:
        return cls(ambient_rank=ambient_rank, rays=())

    @functools.cached_property
    def dimension(self) -> int:
        if not self.rays:
            return 0
        return matrix_rank(IntegerMatrix.from_columns(self.rays, self.ambient_rank))

    @property
    def is_simplicial(self) -> bool:
        return self.dimension == len(self.rays)

    def is_strictly_convex(self) -> bool:
        if self.is_simplicial:
            return True
        return not nonnegative_circuit_support(self.rays)

    def coordinates(self, v: typing.Sequence) -> typing.Optional[tuple[fractions.Fraction, ...]]:
        """Coefficients of v over the generators of a simplicial cone, or None if v is not in their span."""
        if not self.is_simplicial:
            raise NonSimplicial(self)
        if not self.rays:
            return () if is_zero_vector(v) else None
        return solve_exact(self.rays, v)

    def contains(self, v: typing.Sequence) -> bool:
        if is_zero_vector(v):
            return True
        if self.is_simplicial:
            coords = self.coordinates(v)
            return coords is not None and all(c >= 0 for c in coords)
        scaled = _integral(v)
        return len(self.rays) in nonnegative_circuit_support((*self.rays, negate_vector(scaled)))

    def relative_interior_contains(self, v: typing.Sequence) -> bool:
        if not self.rays:
            return is_zero_vector(v)
        if self.is_simplicial:
            coords = self.coordinates(v)
            return coords is not None and all(c > 0 for c in coords)
        if is_zero_vector(v):
            return False
        columns = (*self.rays, negate_vector(_integral(v)))
        return len(nonnegative_circuit_support(columns)) == len(columns)

    def contains_cone(self, other: Cone) -> bool:
        return all(self.contains(r) for r in other.rays)

    def has_face(self, other: Cone) -> bool:
        return other in self.faces()

    @functools.cached_property
    def _faces(self) -> tuple[Cone, ...]:
        found = []
        for size in range(len(self.rays) + 1):
            for subset in itertools.combinations(self.rays, size):
                if self.is_simplicial or self._spans_face(subset):
                    found.append(Cone(ambient_rank=self.ambient_rank, rays=subset))
        return tuple(found)

    def faces(self) -> tuple[Cone, ...]:
        """Every face, from the zero cone up to the cone itself."""
        return self._faces

    def facets(self) -> tuple[Cone, ...]:
        return tuple(f for f in self.faces() if f.dimension == self.dimension - 1)

    def _spans_face(self, subset: tuple[IntVector, ...]) -> bool:
        # subset spans a face iff the other rays stay pointed and nonzero modulo its span
        quotient = quotient_by_span(self.ambient_rank, subset)
        images = [quotient.apply(r) for r in self.rays if r not in subset]
        if not images:
            return True
        if any(is_zero_vector(im) for im in images):
            return False
        if quotient.quotient_rank == 0:
            return False
        return not nonnegative_circuit_support(images)

    def is_smooth(self) -> bool:
        if not self.is_simplicial:
            return False
        if not self.rays:
            return True
        snf = smith_normal_form(IntegerMatrix.from_columns(self.rays, self.ambient_rank))
        return snf.rank == len(self.rays) and all(d == 1 for d in snf.invariant_factors)

    def sort_key(self):
        return (self.dimension, self.rays)


def _integral(v: typing.Sequence) -> IntVector:
    """A positive multiple of a rational vector with integer entries."""
    fracs = [fractions.Fraction(x) for x in v]
    scale = math.lcm(1, *(f.denominator for f in fracs))
    return tuple(int(f * scale) for f in fracs)


def relative_interiors_meet(a: Cone, b: Cone) -> bool:
    if not a.rays or not b.rays:
        return not a.rays and not b.rays
    columns = (*a.rays, *(negate_vector(r) for r in b.rays))
    return len(nonnegative_circuit_support(columns)) == len(columns)
