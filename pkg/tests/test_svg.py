from fractions import Fraction

import pytest

from tropcount.fileformats import parse_curve
from tropcount.rendering.svg import format_decimal, read_seed, read_segments, read_vertex_positions, render_svg
from tropcount.tropical.curves import CurveError, solve_balanced_map

UNIT_LENGTHS = {"e1": 1, "e2": 1, "e3": 1, "e4": 1}


@pytest.fixture
def conic_map(conic_type):
    return solve_balanced_map(conic_type, UNIT_LENGTHS, (7, (0, 0)))


def test_vertices_carry_exact_positions(conic_map):
    svg = render_svg(conic_map)
    assert read_vertex_positions(svg) == conic_map.position_of


def test_edges_follow_the_solved_map(conic_map):
    unit = 40
    segments = read_segments(render_svg(conic_map, unit=unit))
    assert set(segments) == {"e1", "e2", "e3", "e4"}
    for e in conic_map.type.edges:
        start, end, screen = segments[e.id]
        assert start == conic_map.position_of[e.source]
        assert end == conic_map.position_of[e.target]
        (x1, y1), (x2, y2) = start, end
        assert screen == tuple(format_decimal(v) for v in (unit * x1, -unit * y1, unit * x2, -unit * y2))
    assert segments["e1"][2] == ("0", "0", "80", "-80")


def test_legs(conic_map):
    svg = render_svg(conic_map, leg_length=Fraction(1, 2))
    arrows = read_segments(svg, "leg")
    assert set(arrows) == {"1", "2", "3", "4", "5", "6"}
    assert arrows["1"][1] == (Fraction(9, 2), 5)
    assert arrows["5"][1] == (Fraction(-1, 2), Fraction(-1, 2))
    contracted = read_segments(svg, "leg contracted")
    assert set(contracted) == {"7", "8", "9", "10", "11"}
    assert contracted["8"][0] == (3, 2)
    assert contracted["8"][1] == (Fraction(13, 4), Fraction(9, 4))
    assert 'stroke-dasharray="4 3"' in svg
    assert 'marker-end="url(#arrow)"' in svg


def test_picture_size_covers_the_drawing(conic_map):
    svg = render_svg(conic_map)
    # x runs from -1 to 5 and y from -1 to 6, plus half a unit on each side
    assert 'width="280"' in svg
    assert 'height="320"' in svg
    assert 'viewBox="-60 -260 280 320"' in svg


def test_rendering_is_deterministic(conic_map):
    assert render_svg(conic_map) == render_svg(conic_map)


def test_seed_goes_into_the_description(conic_map):
    svg = render_svg(conic_map, seed=17)
    assert '<desc data-seed="17">seed 17</desc>' in svg
    assert read_seed(svg) == 17
    assert read_vertex_positions(svg) == conic_map.position_of
    assert read_seed(render_svg(conic_map)) is None


def test_maps_to_the_line():
    tmap = parse_curve(
        "vertex a\nvertex b\nedge a b length 3/2 slope 2\n"
        "leg a marking 1 slope -1\nleg a marking 2 slope -1\nleg b marking 3 slope 1\nleg b marking 4 slope 1\n"
    ).solve()
    svg = render_svg(tmap, unit=10)
    assert read_vertex_positions(svg) == {"a": (0, 0), "b": (Fraction(3), 0)}
    (start, end, screen), = read_segments(svg).values()
    assert screen == ("0", "0", "30", "0")
    assert 'stroke-width="2"' in svg


def test_rank_three_maps_are_refused():
    tmap = parse_curve("vertex a\nleg a marking 1 slope 1 0 0\nleg a marking 2 slope -1 0 0\n").solve()
    with pytest.raises(CurveError):
        render_svg(tmap)


@pytest.mark.parametrize(
    "unit,leg_length",
    (
        (0, Fraction(1)),
        (-40, Fraction(1)),
        (40, Fraction(0)),
    ),
)
def test_render_rejects_bad_sizes(conic_map, unit, leg_length):
    with pytest.raises(ValueError):
        render_svg(conic_map, unit=unit, leg_length=leg_length)


@pytest.mark.parametrize(
    "value,expected",
    (
        (Fraction(0), "0"),
        (Fraction(-40), "-40"),
        (Fraction(5, 2), "2.5"),
        (Fraction(2, 3), "0.666667"),
        (Fraction(-1, 8), "-0.125"),
    ),
)
def test_format_decimal(value, expected):
    assert format_decimal(value) == expected
