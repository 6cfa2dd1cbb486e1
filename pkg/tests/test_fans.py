from fractions import Fraction

import pytest

from tropcount.geometry.cones import Cone, NonSimplicial
from tropcount.geometry.fans import (
    FanAxiomViolation,
    FanMismatch,
    NotInSupport,
    StandardFan,
    common_refinement,
    find_cone,
    is_complete,
    is_smooth,
    make_fan,
    product_fan,
    standard_fan,
    star_subdivision,
)


def cone(*rays):
    return Cone.make(rays, len(rays[0]))


P1 = standard_fan(StandardFan.P1)
P2 = standard_fan(StandardFan.P2)


def test_standard_fans():
    assert P1.rays == ((-1,), (1,))
    assert len(P1.cones) == 3
    assert P2.rays == ((-1, -1), (0, 1), (1, 0))
    assert len(P2.cones) == 7
    assert len(P2.maximal_cones) == 3
    assert all(c.dimension == 2 for c in P2.maximal_cones)
    assert P2.is_simplicial
    assert all(is_smooth(c) for c in P2.cones)
    assert is_complete(P1)
    assert is_complete(P2)


def test_product_fan():
    square = standard_fan(StandardFan.PRODUCT, P1, P1)
    assert square == product_fan(P1, P1)
    assert square.ambient_rank == 2
    assert len(square.maximal_cones) == 4
    assert set(square.rays) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert is_complete(square)
    with pytest.raises(ValueError):
        standard_fan(StandardFan.PRODUCT, P1)


@pytest.mark.parametrize(
    "cones",
    (
        pytest.param([cone((1, 0), (0, 1)), cone((1, 1), (0, 1))], id="overlapping"),
        pytest.param([cone((1, 0), (0, 1)), cone((1, 0), (1, 1))], id="nested"),
        pytest.param([cone((1, 0), (0, 1)), cone((1, 1),)], id="ray-inside"),
        pytest.param([cone((1, 0, 0), (0, 1, 0)), cone((1, 1, -1), (0, 0, 1))], id="crossing-in-rank-3"),
    ),
)
def test_fan_axioms_rejected(cones):
    with pytest.raises(FanAxiomViolation):
        make_fan(cones)


@pytest.mark.parametrize(
    "cones,maximal",
    (
        pytest.param([cone((1, 0), (0, 1)), cone((0, 1), (-1, 0))], 2, id="sharing-a-ray"),
        pytest.param([cone((1, 0), (0, 1)), cone((-1, 0), (0, -1))], 2, id="meeting-at-origin"),
        pytest.param([cone((1, 0), (0, 1)), cone((1, 0),)], 1, id="face-given-twice"),
        pytest.param([cone((1, 0, 0), (0, 1, 0), (0, 0, 1)), cone((1, 0, 0), (0, 1, 0), (-1, -1, -1))], 2, id="rank-3"),
    ),
)
def test_fan_axioms_accepted(cones, maximal):
    fan = make_fan(cones)
    assert len(fan.maximal_cones) == maximal
    assert not is_complete(fan)


@pytest.mark.parametrize(
    "rays",
    (
        pytest.param([(2, 0)], id="non-primitive"),
        pytest.param([(1, 0), (-1, 0)], id="contains-a-line"),
        pytest.param([(1, 0, 0)], id="wrong-rank"),
    ),
)
def test_cone_make_rejects(rays):
    with pytest.raises(ValueError):
        Cone.make(rays, 2)


def test_cone_faces():
    quadrant = cone((1, 0), (0, 1))
    assert len(quadrant.faces()) == 4
    assert len(quadrant.facets()) == 2
    assert quadrant.has_face(cone((1, 0),))
    assert not quadrant.has_face(cone((1, 1),))
    assert quadrant.contains((3, 0))
    assert not quadrant.contains((-1, 2))
    assert quadrant.relative_interior_contains((1, 2))
    assert not quadrant.relative_interior_contains((1, 0))
    assert quadrant.is_smooth()
    assert not cone((1, 0), (1, 2)).is_smooth()


def test_non_simplicial_cone():
    pyramid = Cone.make([(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)], 3)
    assert pyramid.dimension == 3
    assert not pyramid.is_simplicial
    assert pyramid.contains((0, 0, 1))
    assert not pyramid.contains((0, 0, -1))
    assert pyramid.relative_interior_contains((0, 0, 1))
    fan = make_fan([pyramid])
    assert not fan.is_simplicial
    with pytest.raises(NonSimplicial):
        find_cone(fan, (0, 0, 1))


@pytest.mark.parametrize(
    "v,rays,coords",
    (
        ((1, 0), ((1, 0),), (1,)),
        ((2, 3), ((0, 1), (1, 0)), (3, 2)),
        ((-1, 0), ((-1, -1), (0, 1)), (1, 1)),
        ((Fraction(1, 2), Fraction(-1, 2)), ((-1, -1), (1, 0)), (Fraction(1, 2), 1)),
        ((0, 0), (), ()),
    ),
)
def test_find_cone(v, rays, coords):
    found, found_coords = find_cone(P2, v)
    assert found.rays == rays
    assert found_coords == coords


def test_find_cone_outside_support():
    half = make_fan([cone((1, 0), (0, 1))])
    with pytest.raises(NotInSupport):
        find_cone(half, (-1, -1))
    with pytest.raises(ValueError):
        find_cone(half, (1, 0, 0))


def test_star_subdivision():
    subdivided = star_subdivision(P2, (1, 1))
    assert (1, 1) in subdivided.rays
    assert len(subdivided.maximal_cones) == 4
    assert is_complete(subdivided)
    assert find_cone(subdivided, (2, 2))[0].rays == ((1, 1),)
    assert star_subdivision(P2, (1, 0)) == P2
    assert star_subdivision(P2, (2, 2)) == subdivided
    with pytest.raises(ValueError):
        star_subdivision(P2, (0, 0))


def test_refinement():
    subdivided = star_subdivision(P2, (1, 1))
    assert subdivided.refines(P2)
    assert not P2.refines(subdivided)
    assert common_refinement(P2, subdivided) == subdivided
    assert common_refinement(subdivided, P2) == subdivided
    assert common_refinement(P2, P2) == P2
    flipped = make_fan([cone((-1, 0), (0, -1)), cone((0, -1), (1, 1)), cone((-1, 0), (1, 1))])
    with pytest.raises(FanMismatch):
        common_refinement(P2, flipped)
