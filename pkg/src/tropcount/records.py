"""Output records: one JSON object per line for machines, one line of text per record for people.

Every record carries the command that produced it and the seed. Rationals are encoded as `p/q` strings, never floats.
"""

import fractions
import typing

import msgspec

from .rationals import format_rational, format_vector, parse_rational


class Record(msgspec.Struct, kw_only=True, frozen=True, tag_field="kind"):
    command: str
    seed: int


class SolutionRecord(Record, kw_only=True, frozen=True, tag="solution"):
    index: int
    multiplicity: fractions.Fraction
    # the solution in the curve file format
    curve: str


class TotalRecord(Record, kw_only=True, frozen=True, tag="total"):
    total: fractions.Fraction
    solutions: int
    attempt: int = 0


class OracleRecord(Record, kw_only=True, frozen=True, tag="oracle"):
    oracle: str
    expected: fractions.Fraction
    found: fractions.Fraction

    @property
    def ok(self) -> bool:
        return self.expected == self.found


class EffectivityRecord(Record, kw_only=True, frozen=True, tag="effectivity"):
    phi: tuple[tuple[int, ...], ...]
    injective: bool
    cokernel_free: bool
    effective: bool
    vacuous: bool


class MarkingRecord(msgspec.Struct, kw_only=True, frozen=True):
    marking: int
    # rays of the cone whose dual stratum the marking lands in; None for the whole target
    stratum: typing.Optional[tuple[tuple[int, ...], ...]]
    quotient_rank: int


class EvaluationSpaceRecord(Record, kw_only=True, frozen=True, tag="evalspace"):
    markings: tuple[MarkingRecord, ...]
    product_rank: int
    # rank after dividing by translations; None when the data is not effective
    rubber_rank: typing.Optional[int]


class GammaRubRecord(Record, kw_only=True, frozen=True, tag="gammarub"):
    # the polynomial in the gamma_rub text format
    polynomial: str
    total_degree: int
    linear_factors: int
    chamber_dependent: bool
    value: typing.Optional[fractions.Fraction]
    interpolation_consistent: bool
    experimental: bool


class SupportRecord(Record, kw_only=True, frozen=True, tag="support"):
    # the type in the curve file format, every edge at length 1
    curve: str
    total_degree: int
    chamber_dependent: bool


type AnyRecord = SolutionRecord | TotalRecord | OracleRecord | EffectivityRecord | EvaluationSpaceRecord | GammaRubRecord | SupportRecord


def _enc_hook(obj: typing.Any) -> typing.Any:
    if isinstance(obj, fractions.Fraction):
        return format_rational(obj)
    raise NotImplementedError(f"Objects of type {type(obj)} are not supported")


def _dec_hook(typ: type, obj: typing.Any) -> typing.Any:
    if typ is fractions.Fraction and isinstance(obj, str):
        return parse_rational(obj)
    raise NotImplementedError(f"Objects of type {typ} are not supported")


_encoder = msgspec.json.Encoder(enc_hook=_enc_hook)
_decoder = msgspec.json.Decoder(AnyRecord, dec_hook=_dec_hook)


def encode_json_line(record: Record) -> bytes:
    return _encoder.encode(record) + b"\n"


def decode_json_lines(data: bytes) -> list[Record]:
    return [_decoder.decode(line) for line in data.splitlines() if line.strip()]


def _yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


def format_text(record: Record) -> str:
    match record:
        case SolutionRecord(index=index, multiplicity=multiplicity, curve=curve):
            body = "".join(f"    {line}\n" for line in curve.splitlines())
            return f"solution {index}: multiplicity {format_rational(multiplicity)}\n{body}"
        case TotalRecord(total=total, solutions=solutions, attempt=attempt):
            return f"total {format_rational(total)} from {solutions} solutions (seed {record.seed}, attempt {attempt})\n"
        case OracleRecord(oracle=oracle, expected=expected, found=found):
            verdict = "ok" if record.ok else "MISMATCH"
            return f"oracle {oracle}: expected {format_rational(expected)}, found {format_rational(found)}: {verdict}\n"
        case EffectivityRecord(phi=phi, injective=injective, cokernel_free=cokernel_free, effective=effective, vacuous=vacuous):
            lines = ["phi:"] + [f"    {format_vector(row)}" for row in phi]
            lines.append(f"injective: {_yes_no(injective)}")
            lines.append(f"cokernel free after saturation: {_yes_no(cokernel_free)}")
            if vacuous:
                lines.append("effective (vacuous)")
            else:
                lines.append("effective" if effective else "NOT effective")
            return "\n".join(lines) + "\n"
        case EvaluationSpaceRecord(markings=markings, product_rank=product_rank, rubber_rank=rubber_rank):
            lines = []
            for m in markings:
                where = "whole target" if m.stratum is None else "stratum of " + ", ".join(f"({format_vector(r)})" for r in m.stratum)
                lines.append(f"marking {m.marking}: {where}, rank {m.quotient_rank}")
            lines.append(f"product rank {product_rank}")
            lines.append("rubber rank " + ("n/a (not effective)" if rubber_rank is None else str(rubber_rank)))
            return "\n".join(lines) + "\n"
        case GammaRubRecord() as r:
            lines = [f"gamma_rub{' (experimental)' if r.experimental else ''}:"]
            lines += [f"    {line}" for line in r.polynomial.splitlines()]
            lines.append(f"total degree {r.total_degree}, {r.linear_factors} linear factors")
            if r.value is not None:
                lines.append(f"value at file lengths {format_rational(r.value)}")
            lines.append(f"interpolation consistent: {_yes_no(r.interpolation_consistent)}")
            return "\n".join(lines) + "\n"
        case SupportRecord(curve=curve, total_degree=total_degree, chamber_dependent=chamber_dependent):
            what = "chamber-dependent" if chamber_dependent else f"degree {total_degree}"
            body = "".join(f"    {line}\n" for line in curve.splitlines())
            return f"support type ({what}):\n{body}"
    raise TypeError(f"no text form for {type(record).__name__}")
