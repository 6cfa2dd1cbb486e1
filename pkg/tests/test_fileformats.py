from fractions import Fraction

import pytest

from tropcount.commontypes import ParseError
from tropcount.contact import severi_contact_data
from tropcount.fileformats import (
    format_contacts,
    format_curve,
    format_fan,
    format_gamma_rub,
    format_piecewise,
    gamma_rub_terms,
    parse_contacts,
    parse_curve,
    parse_fan,
    parse_gamma_rub,
    parse_piecewise,
)
from tropcount.geometry.cones import Cone
from tropcount.geometry.fans import StandardFan, standard_fan
from tropcount.geometry.piecewise import evaluate, point_class
from tropcount.pipeline import GammaRubSpec, gamma_rub_polynomial

P2 = standard_fan(StandardFan.P2)

P2_TEXT = """\
# the fan of the projective plane
rank 2
ray 1 0
ray 0 1
ray -1 -1
cone 0 1
cone 1 2
cone 0 2
"""

CONIC_TEXT = """\
vertex A
vertex B
vertex C
vertex D
vertex E
edge A B length 1 slope 2 2
edge B C length 1 slope 1 2
edge B D length 1 slope 1 0
edge C E length 1 slope 1 1
leg E marking 1 slope 1 0
leg D marking 2 slope 1 0
leg C marking 3 slope 0 1
leg E marking 4 slope 0 1
leg A marking 5 slope -1 -1
leg A marking 6 slope -1 -1
leg A marking 7 slope 0 0
leg D marking 8 slope 0 0
leg C marking 9 slope 0 0
leg E marking 10 slope 0 0
leg B marking 11 slope 0 0
"""


def test_parse_fan():
    assert parse_fan(P2_TEXT) == P2


def test_format_fan():
    assert format_fan(P2) == "rank 2\nray -1 -1\nray 0 1\nray 1 0\ncone 0 1\ncone 0 2\ncone 1 2\n"
    assert parse_fan(format_fan(P2)) == P2


@pytest.mark.parametrize(
    "text,line",
    (
        pytest.param("ray 1 0\n", 1, id="ray-before-rank"),
        pytest.param("rank 2\nray 2 0\n", 2, id="non-primitive-ray"),
        pytest.param("rank 2\nray 1 0 0\n", 2, id="ray-length"),
        pytest.param("rank 2\nray 1 0\ncone 0 1\n", 3, id="ray-index-out-of-range"),
        pytest.param("rank 2\nray 1 0\nray -1 0\ncone 0 1\n", 4, id="cone-with-a-line"),
        pytest.param("rank 2\n\n# comment\nrank 3\n", 4, id="rank-twice"),
        pytest.param("rank 0\n", 1, id="rank-zero"),
        pytest.param("rank two\n", 1, id="rank-not-a-number"),
        pytest.param("rank 2\nwall 1 0\n", 2, id="unknown-keyword"),
        pytest.param("rank 2\nray 1/2 0\n", 2, id="rational-ray"),
    ),
)
def test_parse_fan_errors(text, line):
    with pytest.raises(ParseError) as excinfo:
        parse_fan(text)
    assert excinfo.value.line_number == line


def test_parse_fan_needs_rank():
    with pytest.raises(ParseError, match="rank"):
        parse_fan("# nothing\n")


def test_parse_piecewise():
    f = parse_piecewise(P2_TEXT + "poly 0 1 1 1\npoly 1\npoly 2\n")
    assert f.fan == P2
    assert evaluate(f, (2, 3)) == 6
    assert evaluate(f, (-1, 4)) == 0
    assert f.pieces == point_class(P2, Cone.make([(1, 0), (0, 1)], 2)).pieces


def test_format_piecewise():
    f = point_class(P2, Cone.make([(1, 0), (0, 1)], 2))
    text = format_piecewise(f)
    assert text.endswith("poly 2 1 1 1\n")
    assert parse_piecewise(text).pieces == f.pieces


def test_piecewise_collects_repeated_monomials():
    f = parse_piecewise(P2_TEXT + "poly 0 1/2 1 0 1/2 1 0\npoly 1 1 1 0\npoly 2 1 1 0\n")
    assert all(evaluate(f, v) == v[0] for v in ((3, 1), (-2, 5), (-1, -7)))


@pytest.mark.parametrize(
    "polys,line",
    (
        pytest.param("poly 0 1 1\npoly 1\npoly 2\n", 9, id="monomial-arity"),
        pytest.param("poly 0\npoly 0\npoly 1\npoly 2\n", 10, id="cone-twice"),
        pytest.param("poly 7\npoly 1\npoly 2\n", 9, id="cone-index"),
        pytest.param("poly 0 1 -1 0\npoly 1\npoly 2\n", 9, id="negative-exponent"),
        pytest.param("poly 0 0.5 1 0\npoly 1\npoly 2\n", 9, id="decimal-coefficient"),
        pytest.param("poly 0\npoly 1\n", None, id="missing-cone"),
        pytest.param("poly 0 1 0 0\npoly 1\npoly 2\n", None, id="discontinuous"),
    ),
)
def test_parse_piecewise_errors(polys, line):
    with pytest.raises(ParseError) as excinfo:
        parse_piecewise(P2_TEXT + polys)
    assert excinfo.value.line_number == line


def test_parse_piecewise_rejects_non_maximal_cones():
    with pytest.raises(ParseError, match="not a maximal cone"):
        parse_piecewise("rank 1\nray 1\nray -1\ncone 0\ncone 1\ncone\npoly 2\npoly 0\npoly 1\n")


def test_contacts_round_trip():
    contact = severi_contact_data(2, 0)
    text = format_contacts(contact)
    assert text.startswith("genus 0\ncontacts\n1 0\n1 0\n0 1\n")
    assert parse_contacts(text) == contact
    assert parse_contacts(text, rank=2) == contact


def test_empty_contacts_are_the_empty_matrix():
    contact = parse_contacts("genus 0\ncontacts\n")
    assert contact.rank == 0
    assert contact.n == 0


@pytest.mark.parametrize(
    "text,rank,line",
    (
        pytest.param("contacts\n1\n-1\n", None, 1, id="contacts-before-genus"),
        pytest.param("genus 0\ngenus 1\ncontacts\n", None, 2, id="genus-twice"),
        pytest.param("genus 0\ncontacts\n1 0\n-1\n", None, 4, id="ragged"),
        pytest.param("genus 0\ncontacts\n1\n-1\n", 2, 3, id="wrong-rank"),
        pytest.param("genus 0\ncontacts\n1 x\n", None, 3, id="not-an-integer"),
        pytest.param("genus 0\ncontacts\n1 0\n0 1\n", None, None, id="nonzero-sum"),
        pytest.param("genus 0\n", None, None, id="no-contacts-line"),
        pytest.param("genus -1\ncontacts\n1\n-1\n", None, None, id="negative-genus"),
        pytest.param("degree 3\n", None, 1, id="unknown-keyword"),
    ),
)
def test_parse_contacts_errors(text, rank, line):
    with pytest.raises(ParseError) as excinfo:
        parse_contacts(text, rank)
    assert excinfo.value.line_number == line


def test_parse_curve(conic_type):
    parsed = parse_curve(CONIC_TEXT)
    assert parsed.type == conic_type
    assert dict(parsed.lengths) == {"e1": 1, "e2": 1, "e3": 1, "e4": 1}
    assert parsed.anchor is None
    tmap = parsed.solve()
    assert tmap.position_of["A"] == (0, 0)
    assert tmap.position_of["E"] == (4, 5)


def test_parse_curve_with_position():
    parsed = parse_curve(CONIC_TEXT + "position C 1/2 -1\n")
    assert parsed.anchor == ("C", (Fraction(1, 2), Fraction(-1)))
    assert parsed.solve().position_of["A"] == (Fraction(-5, 2), -5)


def test_format_curve_round_trip():
    parsed = parse_curve(CONIC_TEXT.replace("length 1 slope 1 0", "length 3/7 slope 1 0"))
    assert parse_curve(format_curve(parsed)) == parsed
    tmap = parsed.solve()
    text = format_curve(tmap)
    assert "edge B D length 3/7 slope 1 0\n" in text
    assert text.endswith("position A 0 0\n")
    assert parse_curve(text).solve() == tmap


def test_parse_curve_genus_and_rank_one():
    parsed = parse_curve("vertex a genus 2\nleg a marking 1 slope 1\nleg a marking 2 slope -1\n")
    assert parsed.type.ambient_rank == 1
    assert parsed.type.genus == 2
    assert parsed.solve().position_of == {"a": (0,)}


@pytest.mark.parametrize(
    "text,line",
    (
        pytest.param("vertex a\nvertex b\nedge a b length 0 slope 1\n", 3, id="zero-length"),
        pytest.param("vertex a\nvertex b\nedge a b length -2 slope 1\n", 3, id="negative-length"),
        pytest.param("vertex a\nleg a marking 1 slope 1 0\nleg a marking 2 slope -1\n", 3, id="slope-rank"),
        pytest.param("vertex a\nleg a marking one slope 1\n", 2, id="marking-not-an-integer"),
        pytest.param("vertex a genus -1\n", 1, id="negative-genus"),
        pytest.param("vertex\n", 1, id="malformed-vertex"),
        pytest.param("vertex a\nedge a b 1 slope 1\n", 2, id="malformed-edge"),
        pytest.param("vertex a\nleg a marking 1 slope 0\nposition a 0\nposition a 1\n", 4, id="position-twice"),
        pytest.param("vertex a\nface a\n", 2, id="unknown-keyword"),
        pytest.param("vertex a\nleg a marking 1 slope 0\nleg a marking 1 slope 0\n", None, id="repeated-marking"),
        pytest.param("vertex a\nvertex b\nleg a marking 1 slope 0\n", None, id="disconnected"),
        pytest.param("vertex a\nleg a marking 1 slope 0\nposition b 0\n", None, id="position-unknown-vertex"),
        pytest.param("vertex a\nleg a marking 1 slope 0 0\nposition a 0\n", None, id="position-rank"),
        pytest.param("leg a marking 1 slope 0\n", None, id="no-vertices"),
        pytest.param("vertex a\n", None, id="no-rank"),
    ),
)
def test_parse_curve_errors(text, line):
    with pytest.raises(ParseError) as excinfo:
        parse_curve(text)
    assert excinfo.value.line_number == line


def test_gamma_rub_terms_round_trip(conic_type):
    spec = GammaRubSpec.for_contact(severi_contact_data(2, 0))
    poly = gamma_rub_polynomial(spec, conic_type)
    terms = gamma_rub_terms(poly.expression, poly.symbols)
    assert all(sum(e for _, e in monomial) == 8 for monomial in terms)
    assert terms[(("e1", 8),)] == 256
    text = format_gamma_rub(terms)
    assert text.startswith("term ")
    assert parse_gamma_rub(text) == terms


@pytest.mark.parametrize(
    "terms,text",
    (
        (None, "chamber-dependent\n"),
        ({}, "term 0\n"),
        ({(): Fraction(3)}, "term 3\n"),
        ({(("e1", 2),): Fraction(1, 2), (("e1", 1), ("e2", 1)): Fraction(-1)}, "term -1 e1 e2\nterm 1/2 e1^2\n"),
    ),
)
def test_format_gamma_rub(terms, text):
    assert format_gamma_rub(terms) == text
    assert parse_gamma_rub(text) == terms


def test_parse_gamma_rub_combines_terms():
    assert parse_gamma_rub("term 2 e1 e2\nterm -2 e2 e1\n") == {}
    assert parse_gamma_rub("term 1 e1 e1\n") == {(("e1", 2),): 1}
    with pytest.raises(ParseError):
        parse_gamma_rub("chamber-dependent\nterm 1 e1\n")
    with pytest.raises(ParseError) as excinfo:
        parse_gamma_rub("term 1 e1^x\n")
    assert excinfo.value.line_number == 1
