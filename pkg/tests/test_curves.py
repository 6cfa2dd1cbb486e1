from fractions import Fraction

import msgspec
import pytest

from tropcount.tropical.curves import (
    Edge,
    EdgeType,
    Flag,
    Leg,
    NotATree,
    NotBalanced,
    TropicalCurve,
    Vertex,
    balancing_check,
    canonical_form,
    contract_edge,
    edge_residuals,
    point_incidence,
    relabel_markings,
    solve_balanced_map,
    stability_check,
    tree_path,
)

UNIT_LENGTHS = {"e1": 1, "e2": 1, "e3": 1, "e4": 1}


@pytest.fixture
def cycle_type(make_plane_type):
    return make_plane_type(
        (("e1", "A", "B", (1, 0)), ("e2", "A", "B", (1, 0))),
        (("A", 1, (-2, 0)), ("B", 2, (2, 0))),
    )


def test_conic_is_balanced_and_stable(conic_type):
    report = balancing_check(conic_type)
    assert report.balanced
    assert all(r == (0, 0) for _, r in report.residuals)
    assert stability_check(conic_type).stable
    assert conic_type.is_tree
    assert conic_type.genus == 0
    assert conic_type.markings == tuple(range(1, 12))


def test_unbalanced_type(conic_type):
    broken = msgspec.structs.replace(conic_type, edges=(*conic_type.edges[:-1], EdgeType(id="e4", source="C", target="E", slope=(2, 1))))
    report = balancing_check(broken)
    assert not report.balanced
    assert dict(report.residuals)["C"] == (1, 0)
    assert dict(report.residuals)["E"] == (-1, 0)
    with pytest.raises(NotBalanced, match="unbalanced vertices"):
        stability_check(broken)


@pytest.mark.parametrize(
    "edges,legs,genera,stable",
    (
        pytest.param(
            (("e1", "A", "B", (0, 0)),),
            (("A", 1, (1, 0)), ("A", 2, (-1, 0)), ("B", 3, (0, 0))),
            None,
            False,
            id="bivalent-contracted",
        ),
        pytest.param(
            (("e1", "A", "B", (0, 0)),),
            (("A", 1, (1, 0)), ("A", 2, (-1, 0)), ("B", 3, (0, 0))),
            {"B": 1},
            True,
            id="contracted-with-genus",
        ),
        pytest.param(
            (("e1", "A", "B", (-1, 0)),),
            (("A", 1, (1, 0)), ("B", 2, (-1, 0))),
            None,
            False,
            id="linear-bivalent",
        ),
        pytest.param(
            (("e1", "A", "B", (0, 0)),),
            (("A", 1, (1, 0)), ("A", 2, (-1, 0)), ("B", 3, (0, 0)), ("B", 4, (0, 0))),
            None,
            True,
            id="trivalent-contracted",
        ),
    ),
)
def test_stability(make_plane_type, edges, legs, genera, stable):
    assert stability_check(make_plane_type(edges, legs, genera)).stable == stable


def test_solve_balanced_map(conic_type):
    tmap = solve_balanced_map(conic_type, UNIT_LENGTHS, (7, (0, 0)))
    assert tmap.position_of == {"A": (0, 0), "B": (2, 2), "C": (3, 4), "D": (3, 2), "E": (4, 5)}
    assert all(r == (0, 0) for _, r in edge_residuals(tmap))
    assert tmap.marking_position(10) == (4, 5)
    assert point_incidence(tmap, {8: (3, 2), 9: (0, 0)}) == {8: (0, 0), 9: (3, 4)}
    assert tmap.curve.edge("e2").length == 1


def test_solve_balanced_map_with_vertex_anchor(conic_type):
    lengths = {"e1": Fraction(1, 2), "e2": 3, "e3": Fraction(5, 3), "e4": 2}
    tmap = solve_balanced_map(conic_type, lengths, ("B", (1, 1)))
    assert tmap.position_of["A"] == (0, 0)
    assert tmap.position_of["D"] == (Fraction(8, 3), 1)
    assert tmap.position_of["E"] == (6, 9)
    assert all(r == (0, 0) for _, r in edge_residuals(tmap))


@pytest.mark.parametrize(
    "lengths,anchor",
    (
        pytest.param({"e1": 1, "e2": 1, "e3": 1}, (7, (0, 0)), id="missing-length"),
        pytest.param({**UNIT_LENGTHS, "e2": 0}, (7, (0, 0)), id="zero-length"),
        pytest.param({**UNIT_LENGTHS, "e2": Fraction(-1, 2)}, (7, (0, 0)), id="negative-length"),
        pytest.param(UNIT_LENGTHS, (7, (0, 0, 0)), id="anchor-rank"),
    ),
)
def test_solve_balanced_map_rejects(conic_type, lengths, anchor):
    with pytest.raises(ValueError):
        solve_balanced_map(conic_type, lengths, anchor)


def test_cycles_are_not_trees(cycle_type):
    assert cycle_type.genus == 1
    assert not cycle_type.is_tree
    with pytest.raises(NotATree):
        solve_balanced_map(cycle_type, {"e1": 1, "e2": 1}, ("A", (0, 0)))
    with pytest.raises(NotATree):
        tree_path(cycle_type, "A", "B")
    with pytest.raises(NotATree):
        canonical_form(cycle_type)


def test_tree_path(conic_type):
    steps = tree_path(conic_type, "E", "D")
    assert [(s.edge, s.tail, s.head) for s in steps] == [("e4", "E", "C"), ("e2", "C", "B"), ("e3", "B", "D")]
    assert conic_type.slope_from("e4", "E") == (-1, -1)
    assert tree_path(conic_type, "A", "A") == ()


def test_contract_edge(conic_type):
    contracted = contract_edge(conic_type, "e3")
    assert [v.id for v in contracted.vertices] == ["A", "B", "C", "E"]
    assert contracted.vertex_of_marking(2) == "B"
    assert contracted.vertex_of_marking(8) == "B"
    assert balancing_check(contracted).balanced
    assert contracted.genus == 0


def test_contracting_a_cycle_keeps_the_genus(cycle_type):
    once = contract_edge(cycle_type, "e1")
    assert [(e.source, e.target) for e in once.edges] == [("A", "A")]
    twice = contract_edge(once, "e2")
    assert twice.vertices == (Vertex(id="A", genus=1),)
    assert twice.edges == ()
    assert once.genus == twice.genus == cycle_type.genus == 1


def test_canonical_form_identifies_isomorphic_types(conic_type, crossing_conic_type, make_plane_type):
    renamed = {"A": "p", "B": "q", "C": "r", "D": "s", "E": "t"}
    flipped = make_plane_type(
        (
            ("x", "q", "p", (-2, -2)),
            ("y", "q", "r", (1, 2)),
            ("z", "s", "q", (-1, 0)),
            ("w", "t", "r", (-1, -1)),
        ),
        tuple((renamed[leg.vertex], leg.marking, leg.slope) for leg in conic_type.legs),
    )
    assert canonical_form(flipped) == canonical_form(conic_type)
    assert canonical_form(canonical_form(conic_type)) == canonical_form(conic_type)
    assert canonical_form(crossing_conic_type) != canonical_form(conic_type)
    swapped = relabel_markings(conic_type, {1: 4, 4: 1})
    assert canonical_form(swapped) != canonical_form(conic_type)


def test_relabel_markings(conic_type):
    swapped = relabel_markings(conic_type, {7: 10, 10: 7})
    assert swapped.vertex_of_marking(7) == "E"
    assert swapped.vertex_of_marking(10) == "A"
    assert swapped.markings == conic_type.markings


@pytest.mark.parametrize(
    "vertices,edges,legs",
    (
        pytest.param([Vertex(id="A"), Vertex(id="B")], [Edge(id="e1", source="A", target="B", length=Fraction(0))], [], id="zero-length"),
        pytest.param([Vertex(id="A"), Vertex(id="B")], [], [], id="disconnected"),
        pytest.param([Vertex(id="A")], [], [Leg(vertex="A", marking=2)], id="marking-gap"),
        pytest.param([Vertex(id="A"), Vertex(id="A")], [], [], id="duplicate-vertex"),
        pytest.param([Vertex(id="A")], [], [Leg(vertex="B", marking=1)], id="unknown-vertex"),
        pytest.param([], [], [], id="empty"),
    ),
)
def test_tropical_curve_validation(vertices, edges, legs):
    with pytest.raises(ValueError):
        TropicalCurve(vertices=tuple(vertices), edges=tuple(edges), legs=tuple(legs))


def test_slopes_must_match_rank(make_plane_type):
    with pytest.raises(ValueError, match="rank 2"):
        make_plane_type((("e1", "A", "B", (1, 0, 0)),), (("A", 1, (-1, 0)), ("B", 2, (1, 0))))


def test_flags_and_betti_number(conic_type, cycle_type):
    assert conic_type.flags_at("B") == (
        Flag(vertex="B", edge="e1", at_source=False),
        Flag(vertex="B", edge="e2", at_source=True),
        Flag(vertex="B", edge="e3", at_source=True),
        Flag(vertex="B", marking=11),
    )
    assert [conic_type.flag_slope(f) for f in conic_type.flags_at("B")] == [(-2, -2), (1, 2), (1, 0), (0, 0)]
    assert conic_type.betti_number == 0
    assert cycle_type.betti_number == 1
    assert len(cycle_type.flags_at("A")) == 3
