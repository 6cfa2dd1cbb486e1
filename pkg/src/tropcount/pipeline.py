"""The rubber class gamma_rub on plane curve types, and the counts it pairs with.

gamma_rub is built from the Severi contact data: the first marking of trivial contact is the anchor and is pinned to the
origin, and every other trivial-contact marking is an insertion. On a fixed genus-0 type, walk from the anchor to each
insertion. The insertion contributes the product of its x- and y-displacements, provided the walk never leaves the closed
positive quadrant, and 0 otherwise. gamma_rub is the product of these contributions.
"""

from __future__ import annotations

import dataclasses
import enum
import fractions
import functools
import logging
import random
import typing

import msgspec
import sympy

from .commontypes import IntVector, TropcountError
from .contact import SEVERI_ENDS, ContactData, ContactMismatch
from .enumeration.covers import enumerate_tropical_covers
from .enumeration.enumtypes import EnumerationResult
from .enumeration.plane import enumerate_with_resampling
from .geometry.cones import Cone
from .geometry.fans import StandardFan, standard_fan
from .geometry.piecewise import PiecewisePolynomial, evaluate, point_class
from .tropical.curves import CombinatorialType, TropicalMap, canonical_form, contract_edge, point_incidence, relabel_markings, solve_balanced_map, tree_path
from .util import map_in_processes

logger = logging.getLogger(__name__)

AXES = 2
QUADRANT: tuple[IntVector, ...] = ((1, 0), (0, 1))
DEFAULT_SCAN_SEEDS = (0, 1, 2, 3, 4)


class PipelineError(TropcountError):
    pass


class PathSign(enum.Enum):
    ALWAYS_NONNEG = enum.auto()
    ALWAYS_NEGATIVE = enum.auto()
    MIXED = enum.auto()


class GammaRubSpec(msgspec.Struct, kw_only=True, frozen=True):
    contact: ContactData
    anchor_marking: int
    insertion_markings: tuple[int, ...]
    axis_count: int = AXES

    def __post_init__(self):
        trivial = self.contact.trivial_markings
        if self.anchor_marking in self.insertion_markings:
            raise ValueError(f"anchor marking {self.anchor_marking} is also an insertion")
        if sorted((self.anchor_marking, *self.insertion_markings)) != list(trivial):
            raise ValueError("anchor and insertions must be exactly the markings of trivial contact")

    @classmethod
    def for_contact(cls, contact: ContactData) -> GammaRubSpec:
        if contact.rank != AXES:
            raise ContactMismatch(f"gamma_rub needs plane contact data, got rank {contact.rank}")
        trivial = contact.trivial_markings
        if not trivial:
            raise ContactMismatch("gamma_rub needs at least one marking of trivial contact")
        spec = cls(contact=contact, anchor_marking=trivial[0], insertion_markings=trivial[1:])
        if spec.is_experimental:
            logger.warning("gamma_rub for degree %d genus %d is experimental", spec.degree, contact.genus)
        return spec

    @property
    def degree(self) -> int:
        return sum(1 for v in self.contact.degree_vectors() if v == SEVERI_ENDS[0])

    @property
    def is_experimental(self) -> bool:
        return (self.degree, self.contact.genus) != (2, 0)

    @property
    def expected_degree(self) -> int:
        return self.axis_count * len(self.insertion_markings)


def _check_type(spec: GammaRubSpec, ctype: CombinatorialType):
    if ctype.ambient_rank != spec.contact.rank:
        raise ContactMismatch(f"type lives in rank {ctype.ambient_rank}, contact data in rank {spec.contact.rank}")
    if ctype.markings != tuple(range(1, spec.contact.n + 1)):
        raise ContactMismatch(f"type carries markings {ctype.markings}, contact data has {spec.contact.n}")
    for leg in ctype.legs:
        if leg.slope != spec.contact.column(leg.marking):
            raise ContactMismatch(f"marking {leg.marking} has slope {leg.slope}, contact data says {spec.contact.column(leg.marking)}")


@functools.cache
def gamma_rub_piecewise(spec: GammaRubSpec) -> PiecewisePolynomial:
    """The contribution of one insertion as a function of its displacement from the anchor.

    This is the product of the Courant functions of (1,0) and (0,1) on the fan of P^2, the class of the torus-fixed
    point of the positive quadrant: x*y on that quadrant and 0 on the other two cones.
    """
    fan = standard_fan(StandardFan.P2)
    return point_class(fan, Cone.make(QUADRANT, spec.contact.rank))


def _insertion_factor(spec: GammaRubSpec, tmap: TropicalMap, anchor: str, marking: int) -> fractions.Fraction:
    ctype = tmap.type
    running = [fractions.Fraction(0)] * ctype.ambient_rank
    for step in tree_path(ctype, anchor, ctype.vertex_of_marking(marking)):
        slope = ctype.slope_from(step.edge, step.tail)
        running = [x + tmap.length_of[step.edge] * s for x, s in zip(running, slope)]
        if any(x < 0 for x in running):
            return fractions.Fraction(0)
    return evaluate(gamma_rub_piecewise(spec), running)


def gamma_rub_value(spec: GammaRubSpec, ctype: CombinatorialType, lengths: typing.Mapping[str, typing.Any]) -> fractions.Fraction:
    _check_type(spec, ctype)
    tmap = solve_balanced_map(ctype, lengths, (spec.anchor_marking, (0,) * ctype.ambient_rank))
    anchor = ctype.vertex_of_marking(spec.anchor_marking)
    value = fractions.Fraction(1)
    for marking in spec.insertion_markings:
        value *= _insertion_factor(spec, tmap, anchor, marking)
        if value == 0:
            break
    return value


def length_symbols(ctype: CombinatorialType) -> dict[str, sympy.Symbol]:
    return {e.id: sympy.Symbol(f"l_{e.id}", positive=True) for e in ctype.edges}


def _sign(form: dict[str, int]) -> PathSign:
    coefficients = [c for c in form.values() if c != 0]
    if all(c > 0 for c in coefficients):
        return PathSign.ALWAYS_NONNEG
    if all(c < 0 for c in coefficients):
        return PathSign.ALWAYS_NEGATIVE
    return PathSign.MIXED


@dataclasses.dataclass(frozen=True)
class GammaRubPolynomial:
    ctype: CombinatorialType
    symbols: dict[str, sympy.Symbol]
    # the walk to each insertion along each axis, with the worst sign any partial sum takes
    path_signs: tuple[tuple[int, int, PathSign], ...]
    # None when some walk changes sign inside the cone of the type
    expression: typing.Optional[sympy.Expr]

    @property
    def chamber_dependent(self) -> bool:
        return self.expression is None

    @property
    def is_zero(self) -> bool:
        return self.expression is not None and self.expression == 0

    @property
    def total_degree(self) -> int:
        if self.expression is None or self.expression == 0:
            return 0
        if not self.symbols:
            return 0
        return sympy.Poly(self.expression, *self.symbols.values()).total_degree()

    def linear_factor_count(self) -> int:
        """Number of degree-one factors, with multiplicity."""
        if self.expression is None or self.expression == 0 or not self.symbols:
            return 0
        _, factors = sympy.factor_list(self.expression, *self.symbols.values())
        return sum(multiplicity for factor, multiplicity in factors if sympy.Poly(factor, *self.symbols.values()).total_degree() == 1)

    def evaluate(self, lengths: typing.Mapping[str, typing.Any]) -> fractions.Fraction:
        if self.expression is None:
            raise PipelineError("gamma_rub is not a single polynomial on this type")
        substitution = {self.symbols[e]: sympy.Rational(str(fractions.Fraction(lengths[e]))) for e in self.symbols}
        value = sympy.Rational(self.expression.subs(substitution))
        return fractions.Fraction(int(value.p), int(value.q))


def gamma_rub_polynomial(spec: GammaRubSpec, ctype: CombinatorialType) -> GammaRubPolynomial:
    _check_type(spec, ctype)
    symbols = length_symbols(ctype)
    anchor = ctype.vertex_of_marking(spec.anchor_marking)
    signs = []
    factors = []
    chamber_dependent = False
    vanishes = False
    for marking in spec.insertion_markings:
        path = tree_path(ctype, anchor, ctype.vertex_of_marking(marking))
        for axis in range(spec.axis_count):
            form: dict[str, int] = {}
            worst = PathSign.ALWAYS_NONNEG
            for step in path:
                form[step.edge] = form.get(step.edge, 0) + ctype.slope_from(step.edge, step.tail)[axis]
                sign = _sign(form)
                if sign is PathSign.ALWAYS_NEGATIVE:
                    worst = sign
                elif sign is PathSign.MIXED and worst is PathSign.ALWAYS_NONNEG:
                    worst = sign
            signs.append((marking, axis, worst))
            if worst is PathSign.ALWAYS_NEGATIVE:
                vanishes = True
            elif worst is PathSign.MIXED:
                chamber_dependent = True
            factors.append(sum((c * symbols[e] for e, c in form.items()), sympy.Integer(0)))
    if vanishes:
        expression = sympy.Integer(0)
    elif chamber_dependent:
        expression = None
    else:
        expression = sympy.expand(sympy.Mul(*factors))
    return GammaRubPolynomial(ctype=ctype, symbols=symbols, path_signs=tuple(signs), expression=expression)


class InterpolationReport(msgspec.Struct, kw_only=True, frozen=True):
    seed: int
    consistent: bool
    degree: int
    matches_symbolic: typing.Optional[bool]
    samples: tuple[tuple[int, fractions.Fraction], ...]


def interpolation_check(spec: GammaRubSpec, ctype: CombinatorialType, seed: int = 0) -> InterpolationReport:
    """Restrict gamma_rub to a random line through the cone of the type and test that it is a polynomial there.

    The line is base + t * direction with positive rational entries, sampled at t = 1..D+2 where D is the expected
    degree. The first D+1 samples determine the interpolating polynomial and the last one checks it.
    """
    rng = random.Random(seed)
    base = {e.id: fractions.Fraction(rng.randint(1, 97), rng.randint(1, 13)) for e in ctype.edges}
    direction = {e.id: fractions.Fraction(rng.randint(1, 97), rng.randint(1, 13)) for e in ctype.edges}
    t = sympy.Symbol("t")
    degree = spec.expected_degree
    samples = []
    for k in range(1, degree + 3):
        lengths = {e: base[e] + k * direction[e] for e in base}
        samples.append((k, gamma_rub_value(spec, ctype, lengths)))
    points = [(k, sympy.Rational(v.numerator, v.denominator)) for k, v in samples[:-1]]
    interpolated = sympy.expand(sympy.interpolate(points, t))
    check_at, check_value = samples[-1]
    consistent = interpolated.subs(t, check_at) == sympy.Rational(check_value.numerator, check_value.denominator)
    found_degree = 0 if interpolated == 0 else sympy.Poly(interpolated, t).degree()
    symbolic = gamma_rub_polynomial(spec, ctype)
    matches = None
    if not symbolic.chamber_dependent:
        line = {sym: sympy.Rational(str(base[e])) + t * sympy.Rational(str(direction[e])) for e, sym in symbolic.symbols.items()}
        matches = sympy.expand(symbolic.expression.subs(line, simultaneous=True) - interpolated) == 0
    return InterpolationReport(seed=seed, consistent=bool(consistent), degree=found_degree, matches_symbolic=matches, samples=tuple(samples))


class SupportEntry(msgspec.Struct, kw_only=True, frozen=True):
    type: CombinatorialType
    chamber_dependent: bool
    total_degree: int


def _anchored_variants(spec: GammaRubSpec, ctype: CombinatorialType) -> list[CombinatorialType]:
    """The type relabelled so that each trivial-contact marking in turn plays the anchor."""
    variants = []
    for marking in (spec.anchor_marking, *spec.insertion_markings):
        variants.append(relabel_markings(ctype, {spec.anchor_marking: marking, marking: spec.anchor_marking}))
    return variants


def _degenerations(ctype: CombinatorialType) -> list[CombinatorialType]:
    return [contract_edge(ctype, e.id) for e in ctype.edges]


async def support_scan(
    spec: GammaRubSpec,
    seeds: typing.Sequence[int] = DEFAULT_SCAN_SEEDS,
    *,
    extra_types: typing.Iterable[CombinatorialType] = (),
    jobs: int = 1,
) -> list[SupportEntry]:
    """Types of degree-2 genus-0 curves on which gamma_rub does not vanish identically.

    Candidates are the solution types of seeded enumerations under every choice of anchor, together with their
    single-edge degenerations and any extra types supplied.
    """
    if (spec.degree, spec.contact.genus) != (2, 0):
        raise PipelineError("the support scan only runs for degree 2, genus 0")
    candidates: dict[CombinatorialType, None] = {}
    for ctype in extra_types:
        candidates.setdefault(canonical_form(ctype))
    for seed in seeds:
        result = await enumerate_with_resampling(2, 0, seed, jobs=jobs)
        for solution in result.solutions:
            for variant in _anchored_variants(spec, solution.map.type):
                candidates.setdefault(canonical_form(variant))
                for degenerate in _degenerations(variant):
                    candidates.setdefault(canonical_form(degenerate))
    ordered = list(candidates)
    logger.debug("support scan: %d candidate types", len(ordered))
    polynomials = await map_in_processes(functools.partial(gamma_rub_polynomial, spec), ordered, jobs)
    entries = [
        SupportEntry(type=p.ctype, chamber_dependent=p.chamber_dependent, total_degree=p.total_degree)
        for p in polynomials
        if not p.is_zero
    ]
    logger.info("support scan: %d of %d types carry gamma_rub", len(entries), len(ordered))
    return entries


async def checked_plane_enumeration(d: int, g: int, seed: int = 0, *, jobs: int = 1, **kwargs) -> EnumerationResult:
    """Enumerate plane curves and confirm that every solution passes through its point conditions exactly."""
    result = await enumerate_with_resampling(d, g, seed, jobs=jobs, **kwargs)
    points = {3 * d + 1 + i: p for i, p in enumerate(result.points)}
    for solution in result.solutions:
        residuals = point_incidence(solution.map, points)
        if any(any(x != 0 for x in r) for r in residuals.values()):
            raise PipelineError("an enumerated curve misses its point conditions")
    return result


async def severi_via_pipeline(d: int, g: int, seed: int = 0, *, jobs: int = 1, **kwargs) -> int:
    """Pair the point insertions with the tropical double ramification locus by counting the curves through the points."""
    result = await checked_plane_enumeration(d, g, seed, jobs=jobs, **kwargs)
    if result.total.denominator != 1:
        raise PipelineError(f"the point insertions pair to {result.total}, which is not an integer")
    return result.total.numerator


async def hurwitz_via_pipeline(d: int, g: int, *, jobs: int = 1) -> fractions.Fraction:
    result = await enumerate_tropical_covers(d, g, jobs=jobs)
    return result.total
