from __future__ import annotations

import argparse
import fractions
import logging
import os
import pathlib
import sys
import tempfile
import typing

import cattrs
import msgspec
import trio

from .commontypes import OutputFormat, ParseError, TropcountError
from .contact import ContactData, ContactError, effectivity_check, evaluation_space, rubber_quotient, severi_contact_data
from .enumeration.covers import enumerate_tropical_covers
from .enumeration.enumtypes import EnumerationResult, ResamplingExhausted
from .enumeration.oracles import hurwitz_factorization_oracle, wdvv_oracle
from .fileformats import CurveFile, format_curve, format_gamma_rub, gamma_rub_terms, parse_contacts, parse_curve, parse_fan
from .pipeline import GammaRubSpec, checked_plane_enumeration, gamma_rub_polynomial, interpolation_check, support_scan
from .records import (
    EffectivityRecord,
    EvaluationSpaceRecord,
    GammaRubRecord,
    MarkingRecord,
    OracleRecord,
    Record,
    SolutionRecord,
    SupportRecord,
    TotalRecord,
    encode_json_line,
    format_text,
)
from .rendering.svg import render_svg
from .settings import Settings
from .util import invoke

logger = logging.getLogger(__name__)

EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_ORACLE_MISMATCH = 3


class RunConfig(msgspec.Struct, kw_only=True, frozen=True):
    command: str
    parameters: dict[str, typing.Any]
    settings: Settings

    @property
    def seed(self) -> int:
        return self.settings.seed


class CommandOutput(msgspec.Struct, kw_only=True, frozen=True):
    data: bytes
    status: int = 0


def positive_int(val: str) -> int:
    try:
        result = int(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{val!r} is not an integer")
    if result < 1:
        raise argparse.ArgumentTypeError(f"{val!r} must be at least 1")
    return result


def nonnegative_int(val: str) -> int:
    try:
        result = int(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{val!r} is not an integer")
    if result < 0:
        raise argparse.ArgumentTypeError(f"{val!r} must not be negative")
    return result


def read_input(path: pathlib.Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc


def write_output(data: bytes, dest: typing.Optional[pathlib.Path]):
    """Write everything at once; a file destination is replaced atomically by renaming a temporary file over it."""
    if dest is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    fd, temp_name = tempfile.mkstemp(dir=dest.parent, prefix=f".{dest.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(temp_name, dest)
    except BaseException:
        pathlib.Path(temp_name).unlink(missing_ok=True)
        raise


def emit(config: RunConfig, records: typing.Iterable[Record]) -> bytes:
    match config.settings.format:
        case OutputFormat.JSON_LINES:
            return b"".join(encode_json_line(r) for r in records)
        case OutputFormat.TEXT:
            return "".join(format_text(r) for r in records).encode()


def _enumeration_records(config: RunConfig, result: EnumerationResult) -> list[Record]:
    records: list[Record] = [
        SolutionRecord(command=config.command, seed=config.seed, index=n, multiplicity=s.multiplicity, curve=format_curve(s.map))
        for n, s in enumerate(result.solutions, start=1)
    ]
    records.append(
        TotalRecord(
            command=config.command,
            seed=config.seed,
            total=result.total,
            solutions=len(result.solutions),
            attempt=result.attempt,
        )
    )
    return records


def _oracle_record(config: RunConfig, name: str, expected, found) -> OracleRecord:
    record = OracleRecord(command=config.command, seed=config.seed, oracle=name, expected=fractions.Fraction(expected), found=fractions.Fraction(found))
    if not record.ok:
        logger.error("%s oracle says %s, enumeration found %s", name, record.expected, record.found)
    return record


async def cmd_severi(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    settings = config.settings
    result = await checked_plane_enumeration(
        args.degree,
        args.genus,
        settings.seed,
        jobs=settings.jobs,
        max_resamples=settings.max_resamples,
        coordinate_range=settings.coordinate_range,
    )
    logger.info("seed %d gave a generic configuration on attempt %d", settings.seed, result.attempt)
    records = _enumeration_records(config, result)
    status = 0
    if args.oracle:
        oracle = _oracle_record(config, "wdvv", wdvv_oracle(args.degree), result.total)
        records.append(oracle)
        status = 0 if oracle.ok else EXIT_ORACLE_MISMATCH
    return CommandOutput(data=emit(config, records), status=status)


async def cmd_hurwitz(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    result = await enumerate_tropical_covers(args.degree, args.genus, jobs=config.settings.jobs)
    records = _enumeration_records(config, result)
    status = 0
    if args.oracle:
        oracle = _oracle_record(config, "hurwitz", hurwitz_factorization_oracle(args.degree, args.genus), result.total)
        records.append(oracle)
        status = 0 if oracle.ok else EXIT_ORACLE_MISMATCH
    return CommandOutput(data=emit(config, records), status=status)


async def cmd_effectivity(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    fan = parse_fan(read_input(args.fan))
    contact = parse_contacts(read_input(args.contacts))
    report = effectivity_check(fan, contact)
    record = EffectivityRecord(
        command=config.command,
        seed=config.seed,
        phi=tuple(tuple(row) for row in report.phi.to_rows()),
        injective=report.injective,
        cokernel_free=report.cokernel_free_after_saturation,
        effective=report.effective,
        vacuous=contact.rank == 0,
    )
    return CommandOutput(data=emit(config, [record]))


async def cmd_evalspace(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    fan = parse_fan(read_input(args.fan))
    contact = parse_contacts(read_input(args.contacts), rank=fan.ambient_rank)
    spec = evaluation_space(fan, contact)
    report = effectivity_check(fan, contact)
    rubber_rank = rubber_quotient(spec, report).quotient_rank if report.effective else None
    markings = tuple(
        MarkingRecord(
            marking=n,
            stratum=None if m.stratum_cone is None else m.stratum_cone.rays,
            quotient_rank=m.quotient.quotient_rank,
        )
        for n, m in enumerate(spec.per_marking, start=1)
    )
    record = EvaluationSpaceRecord(command=config.command, seed=config.seed, markings=markings, product_rank=spec.product_rank, rubber_rank=rubber_rank)
    return CommandOutput(data=emit(config, [record]))


def _contact_of_curve(curve: CurveFile) -> ContactData:
    ctype = curve.type
    try:
        return ContactData.from_columns(ctype.genus, [ctype.leg(m).slope for m in ctype.markings], ctype.ambient_rank)
    except ValueError as exc:
        raise ContactError(f"the legs of the curve are not contact data: {exc}") from exc


async def cmd_gammarub(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    curve = parse_curve(read_input(args.curve)) if args.curve is not None else None
    records: list[Record] = []
    if args.scan:
        spec = GammaRubSpec.for_contact(severi_contact_data(2, 0))
        extra = () if curve is None else (curve.type,)
        entries = await support_scan(spec, extra_types=extra, jobs=config.settings.jobs)
        for entry in entries:
            representative = CurveFile(type=entry.type, lengths=tuple((e.id, fractions.Fraction(1)) for e in entry.type.edges))
            records.append(
                SupportRecord(
                    command=config.command,
                    seed=config.seed,
                    curve=format_curve(representative),
                    total_degree=entry.total_degree,
                    chamber_dependent=entry.chamber_dependent,
                )
            )
        return CommandOutput(data=emit(config, records))
    if curve is None:
        raise ParseError("gammarub needs a curve file unless --scan is given")
    spec = GammaRubSpec.for_contact(_contact_of_curve(curve))
    polynomial = gamma_rub_polynomial(spec, curve.type)
    interpolation = interpolation_check(spec, curve.type, config.seed)
    terms = None if polynomial.chamber_dependent else gamma_rub_terms(polynomial.expression, polynomial.symbols)
    records.append(
        GammaRubRecord(
            command=config.command,
            seed=config.seed,
            polynomial=format_gamma_rub(terms),
            total_degree=polynomial.total_degree,
            linear_factors=polynomial.linear_factor_count(),
            chamber_dependent=polynomial.chamber_dependent,
            value=None if polynomial.chamber_dependent else polynomial.evaluate(dict(curve.lengths)),
            interpolation_consistent=interpolation.consistent,
            experimental=spec.is_experimental,
        )
    )
    return CommandOutput(data=emit(config, records))


async def cmd_render(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    tmap = parse_curve(read_input(args.curve)).solve()
    svg = render_svg(tmap, unit=config.settings.svg_unit, leg_length=config.settings.svg_leg_length, seed=config.seed)
    return CommandOutput(data=svg.encode())


async def cmd_oracle(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    match args.oracle_name:
        case "wdvv":
            value = fractions.Fraction(wdvv_oracle(args.degree))
        case "hurwitz":
            value = hurwitz_factorization_oracle(args.degree, args.genus)
    record = TotalRecord(command=config.command, seed=config.seed, total=value, solutions=0)
    return CommandOutput(data=emit(config, [record]))


COMMANDS = {
    "severi": cmd_severi,
    "hurwitz": cmd_hurwitz,
    "effectivity": cmd_effectivity,
    "evalspace": cmd_evalspace,
    "gammarub": cmd_gammarub,
    "render": cmd_render,
    "oracle": cmd_oracle,
}

# global flags are accepted before or after the command name; SUPPRESS keeps a subcommand from resetting them
common = argparse.ArgumentParser(add_help=False)
common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for random point configurations")
common.add_argument("--format", choices=[f.value for f in OutputFormat], default=argparse.SUPPRESS)
common.add_argument("--jobs", type=positive_int, default=argparse.SUPPRESS, help="worker threads (default from TROPCOUNT_JOBS)")
common.add_argument("--out", type=pathlib.Path, default=argparse.SUPPRESS, help="write here instead of stdout")
common.add_argument("--config", type=pathlib.Path, default=argparse.SUPPRESS, help="JSON settings file")
common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)

parser = argparse.ArgumentParser(prog="tropcount", description="Exact tropical counts of plane curves and covers of the line.", parents=[common])
subparsers = parser.add_subparsers(dest="command", required=True)


def _add_count_arguments(sub: argparse.ArgumentParser, oracle_help: str):
    sub.add_argument("-d", "--degree", type=positive_int, required=True)
    sub.add_argument("-g", "--genus", type=nonnegative_int, default=0)
    sub.add_argument("--oracle", action="store_true", help=oracle_help)
    sub.add_argument("--unsafe", action="store_true", help="allow degrees above the configured safe maximum")


severi_parser = subparsers.add_parser("severi", parents=[common], help="count plane curves through general points")
_add_count_arguments(severi_parser, "check the count against Kontsevich's recursion (genus 0 only)")
severi_parser.add_argument("--max-resamples", type=positive_int, default=None)

hurwitz_parser = subparsers.add_parser("hurwitz", parents=[common], help="count covers of the line with simple branching")
_add_count_arguments(hurwitz_parser, "check the count against transposition factorizations")

for name, help_text in (("effectivity", "check that the evaluation map is injective"), ("evalspace", "describe the evaluation space")):
    sub = subparsers.add_parser(name, parents=[common], help=help_text)
    sub.add_argument("fan", type=pathlib.Path)
    sub.add_argument("contacts", type=pathlib.Path)

gammarub_parser = subparsers.add_parser("gammarub", parents=[common], help="gamma_rub on a curve type")
gammarub_parser.add_argument("curve", type=pathlib.Path, nargs="?")
gammarub_parser.add_argument("--scan", action="store_true", help="list the degree-2 types on which gamma_rub is nonzero")

render_parser = subparsers.add_parser("render", parents=[common], help="draw a genus-0 map as SVG")
render_parser.add_argument("curve", type=pathlib.Path)
render_parser.add_argument("svg", type=pathlib.Path, nargs="?", help="output file (same as --out)")

oracle_parser = subparsers.add_parser("oracle", parents=[common], help="classical counts")
oracle_subparsers = oracle_parser.add_subparsers(dest="oracle_name", required=True)
wdvv_parser = oracle_subparsers.add_parser("wdvv", parents=[common])
wdvv_parser.add_argument("-d", "--degree", type=positive_int, required=True)
oracle_hurwitz_parser = oracle_subparsers.add_parser("hurwitz", parents=[common])
oracle_hurwitz_parser.add_argument("-d", "--degree", type=positive_int, required=True)
oracle_hurwitz_parser.add_argument("-g", "--genus", type=nonnegative_int, default=0)


def build_run_config(args: argparse.Namespace, environ: typing.Optional[typing.Mapping[str, str]] = None) -> RunConfig:
    """Environment first, then the settings file, then flags."""
    settings = Settings.from_environment(environ)
    if getattr(args, "config", None) is not None:
        settings = Settings.load(args.config, base=settings)
    fmt = getattr(args, "format", None)
    out = getattr(args, "svg", None) or getattr(args, "out", None)
    settings = settings.with_overrides(
        seed=getattr(args, "seed", None),
        jobs=getattr(args, "jobs", None),
        format=OutputFormat(fmt) if fmt is not None else None,
        out=out,
        max_resamples=getattr(args, "max_resamples", None),
    )
    skipped = {"seed", "format", "jobs", "out", "config", "verbose", "svg", "command"}
    parameters = {k: str(v) if isinstance(v, pathlib.Path) else v for k, v in sorted(vars(args).items()) if k not in skipped}
    return RunConfig(command=args.command, parameters=parameters, settings=settings)


def _check_usage(args: argparse.Namespace, config: RunConfig):
    match args.command:
        case "severi":
            limit = config.settings.max_safe_degree
        case "hurwitz":
            limit = config.settings.max_safe_cover_degree
        case _:
            limit = None
    if limit is not None and args.degree > limit and not args.unsafe:
        parser.error(f"degree {args.degree} is above {limit}; pass --unsafe to run it anyway")
    if args.command == "severi" and args.oracle and args.genus != 0:
        parser.error("the severi oracle only covers genus 0")


async def run_command(config: RunConfig, args: argparse.Namespace) -> int:
    output = await invoke(COMMANDS[config.command], config=config, args=args)
    write_output(output.data, config.settings.out)
    return output.status


def main(argv=sys.argv):
    """
    Args:
        argv (list): List of arguments
    Returns:
        int: A return code
    """
    args = parser.parse_args(argv[1:])
    verbosity = getattr(args, "verbose", 0)
    logging.basicConfig(level=logging.DEBUG if verbosity >= 2 else logging.INFO if verbosity == 1 else logging.WARNING)
    try:
        config = build_run_config(args)
    except (ValueError, OSError, cattrs.BaseValidationError) as exc:
        print(f"tropcount: bad settings: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _check_usage(args, config)
    logger.info("running %s with seed %d", config.command, config.seed)
    try:
        return trio.run(run_command, config, args)
    except (ParseError, ResamplingExhausted) as exc:
        print(f"tropcount: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TropcountError, ValueError) as exc:
        print(f"tropcount: {exc}", file=sys.stderr)
        return EXIT_FAILURE
