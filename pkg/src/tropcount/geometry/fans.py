from __future__ import annotations

import enum
import fractions
import functools
import itertools
import logging
import random
import typing

import msgspec

from ..commontypes import IntVector, TropcountError, is_zero_vector
from ..lattice import primitive
from .cones import Cone, NonSimplicial, relative_interiors_meet

logger = logging.getLogger(__name__)

COMPLETENESS_SAMPLES = 64


class FanError(TropcountError):
    pass


class FanAxiomViolation(FanError):
    def __init__(self, first: Cone, second: Cone):
        self.cones = (first, second)
        super().__init__(f"cones {first.rays} and {second.rays} meet outside a common face")


class NotInSupport(FanError):
    def __init__(self, v: typing.Sequence):
        self.vector = tuple(v)
        super().__init__(f"vector {self.vector} is not in the support of the fan")


class FanMismatch(FanError):
    pass


class StandardFan(enum.Enum):
    P1 = enum.auto()
    P2 = enum.auto()
    PRODUCT = enum.auto()


class Fan(msgspec.Struct, frozen=True, kw_only=True, dict=True):
    ambient_rank: int
    cones: tuple[Cone, ...]

    @functools.cached_property
    def rays(self) -> tuple[IntVector, ...]:
        return tuple(sorted(c.rays[0] for c in self.cones if len(c.rays) == 1))

    @functools.cached_property
    def maximal_cones(self) -> tuple[Cone, ...]:
        return tuple(c for c in self.cones if not any(c != other and other.has_face(c) for other in self.cones))

    @property
    def is_simplicial(self) -> bool:
        return all(c.is_simplicial for c in self.cones)

    def ray_cone(self, ray: typing.Sequence[int]) -> typing.Optional[Cone]:
        ray = tuple(ray)
        return next((c for c in self.cones if c.rays == (ray,)), None)

    def cones_containing(self, v: typing.Sequence) -> tuple[Cone, ...]:
        return tuple(c for c in self.cones if c.contains(v))

    def refines(self, other: Fan) -> bool:
        if self.ambient_rank != other.ambient_rank:
            return False
        return all(any(big.contains_cone(c) for big in other.maximal_cones) for c in self.maximal_cones)

    def is_complete(self) -> bool:
        return is_complete(self)


def _sorted_cones(cones: typing.Iterable[Cone]) -> tuple[Cone, ...]:
    return tuple(sorted(set(cones), key=Cone.sort_key))


def make_fan(cones: typing.Iterable[Cone], ambient_rank: typing.Optional[int] = None) -> Fan:
    cones = list(cones)
    if ambient_rank is None:
        if not cones:
            raise ValueError("cannot infer the ambient rank of an empty fan")
        ambient_rank = cones[0].ambient_rank
    if any(c.ambient_rank != ambient_rank for c in cones):
        raise ValueError("cones do not share an ambient rank")
    closure = {face for c in cones for face in c.faces()}
    closure.add(Cone.zero(ambient_rank))
    ordered = _sorted_cones(closure)
    for first, second in itertools.combinations(ordered, 2):
        if relative_interiors_meet(first, second):
            raise FanAxiomViolation(first, second)
    logger.debug("built fan with %d cones in rank %d", len(ordered), ambient_rank)
    return Fan(ambient_rank=ambient_rank, cones=ordered)


def find_cone(fan: Fan, v: typing.Sequence) -> tuple[Cone, tuple[fractions.Fraction, ...]]:
    """The cone whose relative interior holds v, with the positive coefficients of v over its generators."""
    if len(v) != fan.ambient_rank:
        raise ValueError(f"vector {tuple(v)} does not live in rank {fan.ambient_rank}")
    if is_zero_vector(v):
        return Cone.zero(fan.ambient_rank), ()
    for cone in fan.cones:
        if not cone.rays:
            continue
        if not cone.is_simplicial:
            if cone.relative_interior_contains(v):
                raise NonSimplicial(cone)
            continue
        coords = cone.coordinates(v)
        if coords is not None and all(c > 0 for c in coords):
            return cone, coords
    raise NotInSupport(v)


def is_smooth(cone: Cone) -> bool:
    return cone.is_smooth()


def _facet_pairing_holds(fan: Fan) -> bool:
    maximal = fan.maximal_cones
    if any(c.dimension != fan.ambient_rank for c in maximal):
        return False
    for cone in maximal:
        for facet in cone.facets():
            if sum(1 for other in maximal if other.has_face(facet)) != 2:
                return False
    return True


def is_complete(fan: Fan, seed: int = 0) -> bool:
    if fan.ambient_rank == 0:
        return True
    if not _facet_pairing_holds(fan):
        return False
    rng = random.Random(seed)
    for _ in range(COMPLETENESS_SAMPLES):
        v = tuple(rng.randint(-50, 50) for _ in range(fan.ambient_rank))
        try:
            find_cone(fan, v)
        except NotInSupport:
            logger.debug("sample %s escapes the fan", v)
            return False
        except NonSimplicial:
            pass
    return True


def star_subdivision(fan: Fan, ray: typing.Sequence[int]) -> Fan:
    ray = primitive(tuple(ray))
    if is_zero_vector(ray):
        raise ValueError("cannot subdivide at the zero vector")
    find_cone(fan, ray)
    if ray in fan.rays:
        return fan
    new_cones = []
    for cone in fan.cones:
        if not cone.contains(ray):
            new_cones.append(cone)
            continue
        for face in cone.faces():
            if not face.contains(ray):
                new_cones.append(Cone.make((*face.rays, ray), fan.ambient_rank))
    return make_fan(new_cones, fan.ambient_rank)


def product_fan(first: Fan, second: Fan) -> Fan:
    rank = first.ambient_rank + second.ambient_rank
    pad_first = (0,) * second.ambient_rank
    pad_second = (0,) * first.ambient_rank
    cones = [
        Cone.make([r + pad_first for r in a.rays] + [pad_second + r for r in b.rays], rank)
        for a in first.maximal_cones
        for b in second.maximal_cones
    ]
    return make_fan(cones, rank)


def _consecutive_cones(rays: typing.Sequence[IntVector], rank: int) -> list[Cone]:
    return [Cone.make((rays[i], rays[(i + 1) % len(rays)]), rank) for i in range(len(rays))]


def standard_fan(name: StandardFan, *factors: Fan) -> Fan:
    match name:
        case StandardFan.P1:
            return make_fan([Cone.make([(1,)], 1), Cone.make([(-1,)], 1)], 1)
        case StandardFan.P2:
            return make_fan(_consecutive_cones([(1, 0), (0, 1), (-1, -1)], 2), 2)
        case StandardFan.PRODUCT:
            if len(factors) != 2:
                raise ValueError("a product fan needs exactly two factors")
            return product_fan(*factors)


def common_refinement(first: Fan, second: Fan) -> Fan:
    if first == second or first.refines(second):
        return first
    if second.refines(first):
        return second
    raise FanMismatch("neither fan refines the other")
