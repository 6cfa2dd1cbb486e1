import pytest

from tropcount.contact import severi_contact_data
from tropcount.tropical.curves import CombinatorialType, EdgeType, LegType, Vertex


def plane_type(edges, legs, genera=None) -> CombinatorialType:
    """Build a rank-2 type from (id, source, target, slope) edges and (vertex, marking, slope) legs."""
    names = []
    for _, source, target, _ in edges:
        names += [n for n in (source, target) if n not in names]
    names += [v for v, _, _ in legs if v not in names]
    genera = genera or {}
    return CombinatorialType(
        ambient_rank=2,
        vertices=tuple(Vertex(id=n, genus=genera.get(n, 0)) for n in names),
        edges=tuple(EdgeType(id=e, source=s, target=t, slope=slope) for e, s, t, slope in edges),
        legs=tuple(sorted((LegType(vertex=v, marking=m, slope=slope) for v, m, slope in legs), key=lambda leg: leg.marking)),
    )


CONIC_EDGES = (
    ("e1", "A", "B", (2, 2)),
    ("e2", "B", "C", (1, 2)),
    ("e3", "B", "D", (1, 0)),
    ("e4", "C", "E", (1, 1)),
)

CONIC_LEGS = (
    ("E", 1, (1, 0)),
    ("D", 2, (1, 0)),
    ("C", 3, (0, 1)),
    ("E", 4, (0, 1)),
    ("A", 5, (-1, -1)),
    ("A", 6, (-1, -1)),
    ("A", 7, (0, 0)),
    ("D", 8, (0, 0)),
    ("C", 9, (0, 0)),
    ("E", 10, (0, 0)),
    ("B", 11, (0, 0)),
)


@pytest.fixture
def conic_contact():
    return severi_contact_data(2, 0)


@pytest.fixture
def conic_type() -> CombinatorialType:
    """A genus-0 conic type whose anchor (marking 7) sits below and left of every insertion."""
    return plane_type(CONIC_EDGES, CONIC_LEGS)


@pytest.fixture
def crossing_conic_type() -> CombinatorialType:
    """A conic type where the walk to the last vertex turns back across the vertical axis."""
    return plane_type(
        (
            ("e1", "A", "B", (1, 1)),
            ("e2", "B", "C", (0, 1)),
            ("e3", "C", "D", (-1, 1)),
        ),
        (
            ("B", 1, (1, 0)),
            ("C", 2, (1, 0)),
            ("D", 3, (0, 1)),
            ("D", 4, (0, 1)),
            ("A", 5, (-1, -1)),
            ("D", 6, (-1, -1)),
            ("A", 7, (0, 0)),
            ("B", 8, (0, 0)),
            ("C", 9, (0, 0)),
            ("D", 10, (0, 0)),
            ("D", 11, (0, 0)),
        ),
    )


@pytest.fixture
def make_plane_type():
    return plane_type


@pytest.fixture
def anchored_insertion_conic_type() -> CombinatorialType:
    """The conic type with insertion 11 moved onto the anchor vertex."""
    legs = tuple(("A", marking, slope) if marking == 11 else (v, marking, slope) for v, marking, slope in CONIC_LEGS)
    return plane_type(CONIC_EDGES, legs)
