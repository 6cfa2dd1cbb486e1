"""Contact data, the evaluation space it determines, and the effectivity test."""

from __future__ import annotations

import logging
import typing

import msgspec

from .commontypes import IntVector, TropcountError, is_zero_vector
from .geometry.cones import Cone
from .geometry.fans import Fan, find_cone
from .lattice import IntegerMatrix, QuotientLattice, cokernel_is_free, kernel_basis, quotient_by_span, quotient_by_vectors_iterated

logger = logging.getLogger(__name__)

SEVERI_ENDS: tuple[IntVector, ...] = ((1, 0), (0, 1), (-1, -1))


class ContactError(TropcountError):
    pass


class ContactMismatch(ContactError):
    pass


class NotEffective(ContactError):
    def __init__(self, report: EffectivityReport):
        self.report = report
        super().__init__("the evaluation map has a nontrivial kernel, so the contact data is not effective")


class ContactData(msgspec.Struct, frozen=True, kw_only=True):
    genus: int
    matrix: IntegerMatrix

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError(f"genus must be nonnegative, got {self.genus}")
        for i in range(self.matrix.rows):
            if sum(self.matrix.row(i)) != 0:
                raise ValueError(f"row {i + 1} of the contact matrix sums to {sum(self.matrix.row(i))}, not 0")

    @classmethod
    def from_columns(cls, genus: int, columns: typing.Sequence[typing.Sequence[int]], rank: typing.Optional[int] = None) -> ContactData:
        if rank is None:
            if not columns:
                raise ValueError("cannot infer the target rank without any columns")
            rank = len(columns[0])
        if any(len(c) != rank for c in columns):
            raise ValueError(f"every contact column must have length {rank}")
        return cls(genus=genus, matrix=IntegerMatrix.from_columns(columns, rank))

    @property
    def n(self) -> int:
        return self.matrix.cols

    @property
    def rank(self) -> int:
        return self.matrix.rows

    def column(self, marking: int) -> IntVector:
        """Contact vector of a marking, numbered from 1."""
        if not 1 <= marking <= self.n:
            raise IndexError(f"marking {marking} is not in 1..{self.n}")
        return self.matrix.column(marking - 1)

    def degree_vectors(self) -> tuple[IntVector, ...]:
        return tuple(self.matrix.column(j) for j in range(self.n))

    @property
    def nonzero_markings(self) -> tuple[int, ...]:
        return tuple(i + 1 for i, v in enumerate(self.degree_vectors()) if not is_zero_vector(v))

    @property
    def trivial_markings(self) -> tuple[int, ...]:
        return tuple(i + 1 for i, v in enumerate(self.degree_vectors()) if is_zero_vector(v))

    def without_trivial_markings(self) -> ContactData:
        columns = [self.column(i) for i in self.nonzero_markings]
        return ContactData.from_columns(self.genus, columns, self.rank)


def severi_contact_data(d: int, g: int) -> ContactData:
    if d < 1 or g < 0:
        raise ValueError(f"need d >= 1 and g >= 0, got d={d}, g={g}")
    columns = [end for end in SEVERI_ENDS for _ in range(d)]
    columns += [(0, 0)] * (3 * d - 1 + g)
    return ContactData.from_columns(g, columns, 2)


def hurwitz_contact_data(d: int, g: int) -> ContactData:
    if d < 1 or g < 0:
        raise ValueError(f"need d >= 1 and g >= 0, got d={d}, g={g}")
    columns = [(1,)] * d + [(-1,)] * d + [(0,)] * (2 * d - 2 + 2 * g)
    return ContactData.from_columns(g, columns, 1)


class MarkingStratum(msgspec.Struct, frozen=True, kw_only=True):
    # None stands for the whole target: the marking has trivial contact
    stratum_cone: typing.Optional[Cone]
    quotient: QuotientLattice


class EvaluationSpaceSpec(msgspec.Struct, frozen=True, kw_only=True):
    ambient_rank: int
    per_marking: tuple[MarkingStratum, ...]

    @property
    def product_rank(self) -> int:
        return sum(m.quotient.quotient_rank for m in self.per_marking)

    def project(self, v: typing.Sequence[int]) -> IntVector:
        """Image of a vector of N under the diagonal evaluation map."""
        return tuple(x for m in self.per_marking for x in m.quotient.apply(v))


def evaluation_space(fan: Fan, contact: ContactData) -> EvaluationSpaceSpec:
    if fan.ambient_rank != contact.rank:
        raise ContactMismatch(f"fan lives in rank {fan.ambient_rank} but the contact data in rank {contact.rank}")
    strata = []
    for v in contact.degree_vectors():
        if is_zero_vector(v):
            strata.append(MarkingStratum(stratum_cone=None, quotient=QuotientLattice.identity(contact.rank)))
            continue
        cone, _ = find_cone(fan, v)
        quotient = quotient_by_vectors_iterated(contact.rank, cone.rays)
        strata.append(MarkingStratum(stratum_cone=cone, quotient=quotient))
    spec = EvaluationSpaceSpec(ambient_rank=contact.rank, per_marking=tuple(strata))
    logger.debug("evaluation space of %d markings has rank %d", contact.n, spec.product_rank)
    return spec


class EffectivityReport(msgspec.Struct, frozen=True, kw_only=True):
    phi: IntegerMatrix
    injective: bool
    cokernel_free_after_saturation: bool

    @property
    def effective(self) -> bool:
        return self.injective


def evaluation_matrix(spec: EvaluationSpaceSpec) -> IntegerMatrix:
    phi = IntegerMatrix.zeros(0, spec.ambient_rank)
    for stratum in spec.per_marking:
        phi = phi.stack(stratum.quotient.projection)
    return phi


def effectivity_check(fan: Fan, contact: ContactData) -> EffectivityReport:
    if contact.rank == 0:
        # the empty contact matrix: nothing to evaluate, vacuously effective
        return EffectivityReport(phi=IntegerMatrix.zeros(0, 0), injective=True, cokernel_free_after_saturation=True)
    phi = evaluation_matrix(evaluation_space(fan, contact))
    injective = not kernel_basis(phi)
    report = EffectivityReport(phi=phi, injective=injective, cokernel_free_after_saturation=injective and cokernel_is_free(phi))
    logger.debug("effectivity: injective=%s, free cokernel=%s", report.injective, report.cokernel_free_after_saturation)
    return report


def rubber_quotient(spec: EvaluationSpaceSpec, report: EffectivityReport) -> QuotientLattice:
    """Quotient of the evaluation space by the saturated image of N, i.e. configurations up to translation."""
    if not report.effective:
        raise NotEffective(report)
    if report.phi.rows != spec.product_rank:
        raise ContactMismatch("report and evaluation space disagree on the product rank")
    images = [report.phi.column(j) for j in range(report.phi.cols)]
    return quotient_by_span(spec.product_rank, images)
