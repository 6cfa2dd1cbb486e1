"""Line-oriented text formats for fans, piecewise polynomials, contact data, curves and gamma_rub polynomials.

Every format is a sequence of lines of whitespace-separated tokens. Blank lines and anything after a `#` are ignored.
Rationals are written as integers or `p/q` and nothing else. Parsers raise ParseError carrying the 1-based line number.

Fan:
    rank 2
    ray 1 0
    ray 0 1
    ray -1 -1
    cone 0 1
    cone 1 2
    cone 0 2

Piecewise polynomial: a fan followed by one `poly <cone index> <coeff> <exp1> ... <expk> ...` line per maximal cone,
each monomial being a coefficient followed by k exponents. Cone indices count `cone` lines from 0.

Contact data:
    genus 0
    contacts
    1 0
    0 1
    -1 -1

Curve:
    vertex a genus 0
    edge a b length 3/2 slope 1 1
    leg a marking 1 slope -1 -1
    position a 0 0

Edges are named e1, e2, ... in file order. The optional `position` line pins one vertex; without it the first vertex
sits at the origin.

gamma_rub: one `term <coeff> <edge>^<exp> ...` line per monomial, `term 0` for the zero polynomial, or the single line
`chamber-dependent`.
"""

from __future__ import annotations

import collections.abc
import fractions
import typing

import msgspec
import sympy

from .commontypes import IntVector, ParseError
from .contact import ContactData
from .geometry.cones import Cone
from .geometry.fans import Fan, make_fan
from .geometry.piecewise import DiscontinuousPieces, PiecewisePolynomial, ambient_symbols, check_continuity, from_sympy, make_poly, to_sympy
from .lattice import is_primitive
from .rationals import format_rational, format_vector, parse_int_vector, parse_rational_token
from .tropical.curves import CombinatorialType, EdgeType, LegType, RationalVector, TropicalMap, Vertex, solve_balanced_map

type Line = tuple[int, list[str]]


def _lines(text: str) -> collections.abc.Iterator[Line]:
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield number, line.split()


def _int_token(token: str, line_number: int, what: str) -> int:
    try:
        return int(token)
    except ValueError as exc:
        raise ParseError(f"expected an integer {what}, got {token!r}", line_number) from exc


def _expect(tokens: list[str], position: int, keyword: str, line_number: int):
    if len(tokens) <= position or tokens[position] != keyword:
        raise ParseError(f"expected {keyword!r} at token {position + 1}", line_number)


def _sorted_monomials[K](terms: typing.Mapping[K, typing.Any]) -> list[tuple[K, typing.Any]]:
    return sorted(terms.items(), key=lambda item: item[0], reverse=True)


class _FanBuilder:
    def __init__(self):
        self.rank: typing.Optional[int] = None
        self.rays: list[IntVector] = []
        self.cones: list[Cone] = []

    def feed(self, number: int, tokens: list[str]) -> bool:
        """Consume a fan line; False if the keyword belongs to someone else."""
        match tokens:
            case ["rank", value]:
                if self.rank is not None:
                    raise ParseError("rank given twice", number)
                self.rank = _int_token(value, number, "rank")
                if self.rank < 1:
                    raise ParseError(f"rank must be positive, got {self.rank}", number)
            case ["rank", *_]:
                raise ParseError("expected `rank <k>`", number)
            case ["ray", *coords]:
                rank = self._require_rank(number)
                ray = parse_int_vector(coords, number)
                if len(ray) != rank:
                    raise ParseError(f"ray has {len(ray)} coordinates, expected {rank}", number)
                if not is_primitive(ray):
                    raise ParseError(f"ray {ray} is not primitive", number)
                self.rays.append(ray)
            case ["cone", *indices]:
                rank = self._require_rank(number)
                rays = []
                for token in indices:
                    index = _int_token(token, number, "ray index")
                    if not 0 <= index < len(self.rays):
                        raise ParseError(f"ray index {index} out of range 0..{len(self.rays) - 1}", number)
                    rays.append(self.rays[index])
                try:
                    self.cones.append(Cone.make(rays, rank))
                except ValueError as exc:
                    raise ParseError(str(exc), number) from exc
            case _:
                return False
        return True

    def _require_rank(self, number: int) -> int:
        if self.rank is None:
            raise ParseError("`rank` must come first", number)
        return self.rank

    def build(self) -> Fan:
        if self.rank is None:
            raise ParseError("missing `rank` line")
        return make_fan(self.cones, self.rank)


def parse_fan(text: str) -> Fan:
    builder = _FanBuilder()
    for number, tokens in _lines(text):
        if not builder.feed(number, tokens):
            raise ParseError(f"unexpected line {' '.join(tokens)!r} in a fan file", number)
    return builder.build()


def _fan_lines(fan: Fan) -> tuple[list[str], dict[Cone, int]]:
    lines = [f"rank {fan.ambient_rank}"]
    index = {ray: i for i, ray in enumerate(fan.rays)}
    lines += [f"ray {format_vector(ray)}" for ray in fan.rays]
    cone_index = {}
    for n, cone in enumerate(fan.maximal_cones):
        cone_index[cone] = n
        lines.append(" ".join(["cone", *(str(index[r]) for r in cone.rays)]))
    return lines, cone_index


def format_fan(fan: Fan) -> str:
    lines, _ = _fan_lines(fan)
    return "\n".join(lines) + "\n"


def parse_piecewise(text: str) -> PiecewisePolynomial:
    builder = _FanBuilder()
    polys: list[tuple[int, int, list[str]]] = []
    for number, tokens in _lines(text):
        if builder.feed(number, tokens):
            continue
        match tokens:
            case ["poly", index, *monomials]:
                polys.append((number, _int_token(index, number, "cone index"), monomials))
            case _:
                raise ParseError(f"unexpected line {' '.join(tokens)!r} in a piecewise polynomial file", number)
    fan = builder.build()
    rank = fan.ambient_rank
    maximal = set(fan.maximal_cones)
    pieces: dict[Cone, sympy.Poly] = {}
    for number, index, monomials in polys:
        if not 0 <= index < len(builder.cones):
            raise ParseError(f"cone index {index} out of range 0..{len(builder.cones) - 1}", number)
        cone = builder.cones[index]
        if cone not in maximal:
            raise ParseError(f"cone {index} is not a maximal cone of the fan", number)
        if cone in pieces:
            raise ParseError(f"cone {index} has two polynomials", number)
        if len(monomials) % (rank + 1) != 0:
            raise ParseError(f"monomials need a coefficient and {rank} exponents each", number)
        terms = {}
        for start in range(0, len(monomials), rank + 1):
            coeff = parse_rational_token(monomials[start], number)
            exponents = tuple(_int_token(t, number, "exponent") for t in monomials[start + 1 : start + rank + 1])
            if any(e < 0 for e in exponents):
                raise ParseError(f"negative exponent in {exponents}", number)
            terms[exponents] = terms.get(exponents, fractions.Fraction(0)) + coeff
        xs = ambient_symbols(rank)
        expr = sum((to_sympy(c) * sympy.Mul(*(x**e for x, e in zip(xs, exponents))) for exponents, c in terms.items()), sympy.Integer(0))
        pieces[cone] = make_poly(expr, rank)
    missing = [c for c in fan.maximal_cones if c not in pieces]
    if missing:
        raise ParseError(f"no polynomial for maximal cone {missing[0].rays}")
    f = PiecewisePolynomial(fan=fan, pieces=tuple((c, pieces[c]) for c in fan.maximal_cones))
    try:
        check_continuity(f)
    except DiscontinuousPieces as exc:
        raise ParseError(str(exc)) from exc
    return f


def format_piecewise(f: PiecewisePolynomial) -> str:
    lines, cone_index = _fan_lines(f.fan)
    for cone, poly in f.pieces:
        tokens = ["poly", str(cone_index[cone])]
        for exponents, coeff in _sorted_monomials(poly.as_dict(native=False)):
            tokens += [format_rational(from_sympy(coeff)), *(str(e) for e in exponents)]
        lines.append(" ".join(tokens))
    return "\n".join(lines) + "\n"


def parse_contacts(text: str, rank: typing.Optional[int] = None) -> ContactData:
    genus = None
    columns: list[IntVector] = []
    in_contacts = False
    for number, tokens in _lines(text):
        match tokens:
            case ["genus", value] if not in_contacts:
                if genus is not None:
                    raise ParseError("genus given twice", number)
                genus = _int_token(value, number, "genus")
            case ["contacts"] if not in_contacts:
                if genus is None:
                    raise ParseError("`genus` must come before `contacts`", number)
                in_contacts = True
            case _ if in_contacts:
                column = parse_int_vector(tokens, number)
                expected = rank if rank is not None else (len(columns[0]) if columns else len(column))
                if len(column) != expected:
                    raise ParseError(f"contact vector has {len(column)} entries, expected {expected}", number)
                columns.append(column)
            case _:
                raise ParseError(f"unexpected line {' '.join(tokens)!r} in a contacts file", number)
    if genus is None or not in_contacts:
        raise ParseError("a contacts file needs `genus <g>` and `contacts` lines")
    if not columns and rank is None:
        # no columns at all is the empty matrix
        rank = 0
    try:
        return ContactData.from_columns(genus, columns, rank)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def format_contacts(contact: ContactData) -> str:
    lines = [f"genus {contact.genus}", "contacts"]
    lines += [format_vector(v) for v in contact.degree_vectors()]
    return "\n".join(lines) + "\n"


class CurveFile(msgspec.Struct, kw_only=True, frozen=True):
    type: CombinatorialType
    lengths: tuple[tuple[str, fractions.Fraction], ...]
    anchor: typing.Optional[tuple[str, RationalVector]] = None

    def solve(self) -> TropicalMap:
        anchor = self.anchor
        if anchor is None:
            anchor = (self.type.vertices[0].id, (fractions.Fraction(0),) * self.type.ambient_rank)
        return solve_balanced_map(self.type, dict(self.lengths), anchor)


def parse_curve(text: str) -> CurveFile:
    vertices: list[Vertex] = []
    edges: list[EdgeType] = []
    legs: list[LegType] = []
    lengths: list[tuple[str, fractions.Fraction]] = []
    anchor = None
    rank: typing.Optional[int] = None

    def slope_of(tokens: list[str], number: int) -> IntVector:
        nonlocal rank
        slope = parse_int_vector(tokens, number)
        if rank is None:
            rank = len(slope)
        if not slope or len(slope) != rank:
            raise ParseError(f"slope {slope} does not have {rank} entries", number)
        return slope

    for number, tokens in _lines(text):
        match tokens:
            case ["vertex", vertex_id]:
                vertices.append(Vertex(id=vertex_id))
            case ["vertex", vertex_id, "genus", genus]:
                genus = _int_token(genus, number, "genus")
                if genus < 0:
                    raise ParseError(f"negative genus {genus}", number)
                vertices.append(Vertex(id=vertex_id, genus=genus))
            case ["edge", source, target, "length", length, "slope", *slope]:
                edge_id = f"e{len(edges) + 1}"
                value = parse_rational_token(length, number)
                if value <= 0:
                    raise ParseError(f"edge length must be positive, got {format_rational(value)}", number)
                edges.append(EdgeType(id=edge_id, source=source, target=target, slope=slope_of(slope, number)))
                lengths.append((edge_id, value))
            case ["leg", vertex_id, "marking", marking, "slope", *slope]:
                legs.append(LegType(vertex=vertex_id, marking=_int_token(marking, number, "marking"), slope=slope_of(slope, number)))
            case ["position", vertex_id, *coords]:
                if anchor is not None:
                    raise ParseError("only one `position` line is allowed", number)
                anchor = (vertex_id, tuple(parse_rational_token(t, number) for t in coords))
            case [("vertex" | "edge" | "leg" | "position") as keyword, *_]:
                raise ParseError(f"malformed {keyword} line", number)
            case _:
                raise ParseError(f"unexpected line {' '.join(tokens)!r} in a curve file", number)
    if not vertices:
        raise ParseError("a curve file needs at least one vertex")
    if rank is None:
        raise ParseError("cannot infer the target rank without any edges or legs")
    if anchor is not None and len(anchor[1]) != rank:
        raise ParseError(f"position {anchor[1]} does not have {rank} entries")
    try:
        ctype = CombinatorialType(ambient_rank=rank, vertices=tuple(vertices), edges=tuple(edges), legs=tuple(legs))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    if anchor is not None and anchor[0] not in {v.id for v in vertices}:
        raise ParseError(f"position given for unknown vertex {anchor[0]}")
    return CurveFile(type=ctype, lengths=tuple(lengths), anchor=anchor)


def format_curve(subject: TropicalMap | CurveFile) -> str:
    """Write a map (with the position of its first vertex) or a parsed curve file back out.

    Edges are written in type order, so a type whose edges are already named e1, e2, ... keeps its edge names.
    """
    if isinstance(subject, TropicalMap):
        ctype, lengths = subject.type, subject.length_of
        first = ctype.vertices[0].id
        anchor = (first, subject.position_of[first])
    else:
        ctype, lengths, anchor = subject.type, dict(subject.lengths), subject.anchor
    lines = [f"vertex {v.id} genus {v.genus}" for v in ctype.vertices]
    lines += [f"edge {e.source} {e.target} length {format_rational(lengths[e.id])} slope {format_vector(e.slope)}" for e in ctype.edges]
    lines += [f"leg {leg.vertex} marking {leg.marking} slope {format_vector(leg.slope)}" for leg in sorted(ctype.legs, key=lambda leg: leg.marking)]
    if anchor is not None:
        lines.append(f"position {anchor[0]} {format_vector(anchor[1])}")
    return "\n".join(lines) + "\n"


type GammaRubTerms = dict[tuple[tuple[str, int], ...], fractions.Fraction]


def gamma_rub_terms(expression, symbols: typing.Mapping[str, sympy.Symbol]) -> GammaRubTerms:
    """The monomials of a polynomial in edge-length symbols, keyed by (edge id, exponent) pairs."""
    names = list(symbols)
    if expression == 0:
        return {}
    if not names:
        return {(): from_sympy(expression)}
    terms = {}
    for exponents, coeff in sympy.Poly(expression, *symbols.values()).as_dict(native=False).items():
        terms[tuple(sorted((n, e) for n, e in zip(names, exponents) if e))] = from_sympy(coeff)
    return terms


def format_gamma_rub(terms: typing.Optional[GammaRubTerms]) -> str:
    if terms is None:
        return "chamber-dependent\n"
    if not terms:
        return "term 0\n"
    lines = []
    for monomial, coeff in sorted(terms.items(), key=lambda item: (-sum(e for _, e in item[0]), item[0])):
        factors = [name if e == 1 else f"{name}^{e}" for name, e in monomial]
        lines.append(" ".join(["term", format_rational(coeff), *factors]))
    return "\n".join(lines) + "\n"


def parse_gamma_rub(text: str) -> typing.Optional[GammaRubTerms]:
    terms: GammaRubTerms = {}
    chamber_dependent = False
    for number, tokens in _lines(text):
        match tokens:
            case ["chamber-dependent"]:
                chamber_dependent = True
            case ["term", coeff, *factors]:
                value = parse_rational_token(coeff, number)
                exponents: dict[str, int] = {}
                for factor in factors:
                    name, _, power = factor.partition("^")
                    exponents[name] = exponents.get(name, 0) + (_int_token(power, number, "exponent") if power else 1)
                monomial = tuple(sorted(exponents.items()))
                total = terms.get(monomial, fractions.Fraction(0)) + value
                if total:
                    terms[monomial] = total
                else:
                    terms.pop(monomial, None)
            case _:
                raise ParseError(f"unexpected line {' '.join(tokens)!r} in a gamma_rub file", number)
    if chamber_dependent:
        if terms:
            raise ParseError("a chamber-dependent file cannot also list terms")
        return None
    return terms
