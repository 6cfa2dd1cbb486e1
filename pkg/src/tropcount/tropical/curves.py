"""Abstract tropical curves, their combinatorial types, and parameterized maps into Q^r.

Flags are the incidence primitive: every edge contributes one flag at each end and every leg contributes a single flag.
Slopes are stored as full integer vectors (direction times weight), read outward from the vertex a flag is based at.
"""

from __future__ import annotations

import collections
import fractions
import functools
import logging
import typing

import msgspec
import networkx as nx

from ..commontypes import IntVector, TropcountError, add_vectors, is_zero_vector, negate_vector, scale_vector, sub_vectors
from ..geometry.cones import Cone

logger = logging.getLogger(__name__)

type RationalVector = tuple[fractions.Fraction, ...]


class CurveError(TropcountError):
    pass


class NotBalanced(CurveError):
    def __init__(self, report: BalancingReport):
        self.report = report
        bad = ", ".join(f"{v}: {r}" for v, r in report.residuals if not is_zero_vector(r))
        super().__init__(f"unbalanced vertices ({bad})")


class NotATree(CurveError):
    pass


class Vertex(msgspec.Struct, kw_only=True, frozen=True):
    id: str
    genus: int = 0


class Edge(msgspec.Struct, kw_only=True, frozen=True):
    id: str
    source: str
    target: str
    length: fractions.Fraction


class Leg(msgspec.Struct, kw_only=True, frozen=True):
    vertex: str
    marking: int


class Flag(msgspec.Struct, kw_only=True, frozen=True):
    vertex: str
    edge: typing.Optional[str] = None
    marking: typing.Optional[int] = None
    # for edge flags: whether the flag sits at the source end of its edge
    at_source: bool = True


class PathStep(msgspec.Struct, kw_only=True, frozen=True):
    edge: str
    tail: str
    head: str


def _build_graph(vertex_ids: typing.Iterable[str], edges: typing.Iterable) -> nx.MultiGraph:
    graph = nx.MultiGraph()
    graph.add_nodes_from(vertex_ids)
    for e in edges:
        graph.add_edge(e.source, e.target, key=e.id)
    return graph


def _validate_incidence(vertices, edges, legs):
    ids = [v.id for v in vertices]
    if not ids:
        raise ValueError("a tropical curve needs at least one vertex")
    if len(set(ids)) != len(ids):
        raise ValueError("vertex ids are not distinct")
    known = set(ids)
    edge_ids = [e.id for e in edges]
    if len(set(edge_ids)) != len(edge_ids):
        raise ValueError("edge ids are not distinct")
    for e in edges:
        if e.source not in known or e.target not in known:
            raise ValueError(f"edge {e.id} joins unknown vertices {e.source} and {e.target}")
    for leg in legs:
        if leg.vertex not in known:
            raise ValueError(f"marking {leg.marking} sits on unknown vertex {leg.vertex}")
    markings = sorted(leg.marking for leg in legs)
    if markings != list(range(1, len(markings) + 1)):
        raise ValueError(f"marking labels must be exactly 1..{len(markings)}, got {markings}")
    if not nx.is_connected(_build_graph(ids, edges)):
        raise ValueError("the underlying graph is not connected")


class _Graph(msgspec.Struct, kw_only=True, frozen=True, dict=True):
    vertices: tuple[Vertex, ...]
    edges: tuple
    legs: tuple

    @functools.cached_property
    def graph(self) -> nx.MultiGraph:
        return _build_graph((v.id for v in self.vertices), self.edges)

    @functools.cached_property
    def _vertex_index(self) -> dict[str, Vertex]:
        return {v.id: v for v in self.vertices}

    @functools.cached_property
    def _edge_index(self) -> dict:
        return {e.id: e for e in self.edges}

    def vertex(self, vertex_id: str) -> Vertex:
        return self._vertex_index[vertex_id]

    def edge(self, edge_id: str):
        return self._edge_index[edge_id]

    @property
    def betti_number(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    @property
    def genus(self) -> int:
        return self.betti_number + sum(v.genus for v in self.vertices)

    @property
    def is_tree(self) -> bool:
        return self.betti_number == 0

    @property
    def markings(self) -> tuple[int, ...]:
        return tuple(sorted(leg.marking for leg in self.legs))

    def vertex_of_marking(self, marking: int) -> str:
        for leg in self.legs:
            if leg.marking == marking:
                return leg.vertex
        raise KeyError(f"no leg carries marking {marking}")

    def flags_at(self, vertex_id: str) -> tuple[Flag, ...]:
        flags = []
        for e in self.edges:
            if e.source == vertex_id:
                flags.append(Flag(vertex=vertex_id, edge=e.id, at_source=True))
            if e.target == vertex_id:
                flags.append(Flag(vertex=vertex_id, edge=e.id, at_source=False))
        flags.extend(Flag(vertex=vertex_id, marking=leg.marking) for leg in self.legs if leg.vertex == vertex_id)
        return tuple(flags)


class TropicalCurve(_Graph, kw_only=True, frozen=True, dict=True):
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    legs: tuple[Leg, ...]

    def __post_init__(self):
        _validate_incidence(self.vertices, self.edges, self.legs)
        for e in self.edges:
            if e.length <= 0:
                raise ValueError(f"edge {e.id} has nonpositive length {e.length}")


class EdgeType(msgspec.Struct, kw_only=True, frozen=True):
    id: str
    source: str
    target: str
    # slope of the flag at the source end; the target end carries the negation
    slope: IntVector


class LegType(msgspec.Struct, kw_only=True, frozen=True):
    vertex: str
    marking: int
    slope: IntVector


class CombinatorialType(_Graph, kw_only=True, frozen=True, dict=True):
    """A tropical curve without edge lengths, decorated with slopes and optionally with cones of the target fan."""

    ambient_rank: int
    vertices: tuple[Vertex, ...]
    edges: tuple[EdgeType, ...]
    legs: tuple[LegType, ...]
    vertex_cones: tuple[tuple[str, Cone], ...] = ()
    edge_cones: tuple[tuple[str, Cone], ...] = ()
    leg_cones: tuple[tuple[int, Cone], ...] = ()

    def __post_init__(self):
        _validate_incidence(self.vertices, self.edges, self.legs)
        for item in (*self.edges, *self.legs):
            if len(item.slope) != self.ambient_rank:
                raise ValueError(f"slope {item.slope} does not live in rank {self.ambient_rank}")
        edges = {e.id: e for e in self.edges}
        for edge_id, cone in self.edge_cones:
            if not cone.contains(edges[edge_id].slope):
                raise ValueError(f"slope of edge {edge_id} does not lie in its cone {cone.rays}")
        legs = {leg.marking: leg for leg in self.legs}
        for marking, cone in self.leg_cones:
            if not cone.contains(legs[marking].slope):
                raise ValueError(f"slope of marking {marking} does not lie in its cone {cone.rays}")

    def flag_slope(self, flag: Flag) -> IntVector:
        if flag.edge is not None:
            slope = self.edge(flag.edge).slope
            return slope if flag.at_source else negate_vector(slope)
        return self.leg(flag.marking).slope

    def leg(self, marking: int) -> LegType:
        return next(leg for leg in self.legs if leg.marking == marking)

    def slope_from(self, edge_id: str, vertex_id: str) -> IntVector:
        e = self.edge(edge_id)
        if e.source == vertex_id:
            return e.slope
        if e.target == vertex_id:
            return negate_vector(e.slope)
        raise ValueError(f"edge {edge_id} is not incident to {vertex_id}")

    def cone_of_vertex(self, vertex_id: str) -> typing.Optional[Cone]:
        return dict(self.vertex_cones).get(vertex_id)

    def cone_of_flag(self, flag: Flag) -> typing.Optional[Cone]:
        if flag.edge is not None:
            return dict(self.edge_cones).get(flag.edge)
        return dict(self.leg_cones).get(flag.marking)


class TropicalMap(msgspec.Struct, kw_only=True, frozen=True, dict=True):
    type: CombinatorialType
    lengths: tuple[tuple[str, fractions.Fraction], ...]
    positions: tuple[tuple[str, RationalVector], ...]

    @functools.cached_property
    def length_of(self) -> dict[str, fractions.Fraction]:
        return dict(self.lengths)

    @functools.cached_property
    def position_of(self) -> dict[str, RationalVector]:
        return dict(self.positions)

    @functools.cached_property
    def curve(self) -> TropicalCurve:
        edges = tuple(Edge(id=e.id, source=e.source, target=e.target, length=self.length_of[e.id]) for e in self.type.edges)
        legs = tuple(Leg(vertex=leg.vertex, marking=leg.marking) for leg in self.type.legs)
        return TropicalCurve(vertices=self.type.vertices, edges=edges, legs=legs)

    def marking_position(self, marking: int) -> RationalVector:
        return self.position_of[self.type.vertex_of_marking(marking)]


class BalancingReport(msgspec.Struct, kw_only=True, frozen=True):
    balanced: bool
    residuals: tuple[tuple[str, IntVector], ...]


class StabilityReport(msgspec.Struct, kw_only=True, frozen=True):
    stable: bool
    violations: tuple[str, ...]


def balancing_check(subject: TropicalMap | CombinatorialType) -> BalancingReport:
    ctype = subject.type if isinstance(subject, TropicalMap) else subject
    residuals = []
    for v in ctype.vertices:
        total = (0,) * ctype.ambient_rank
        for flag in ctype.flags_at(v.id):
            total = add_vectors(total, ctype.flag_slope(flag))
        residuals.append((v.id, total))
    return BalancingReport(balanced=all(is_zero_vector(r) for _, r in residuals), residuals=tuple(residuals))


def stability_check(ctype: CombinatorialType) -> StabilityReport:
    balance = balancing_check(ctype)
    if not balance.balanced:
        raise NotBalanced(balance)
    violations = []
    for v in ctype.vertices:
        flags = ctype.flags_at(v.id)
        slopes = [ctype.flag_slope(f) for f in flags]
        if all(is_zero_vector(s) for s in slopes):
            if v.genus == 0 and len(flags) < 3:
                violations.append(f"contracted vertex {v.id} has genus 0 and only {len(flags)} flags")
            continue
        if v.genus == 0 and len(flags) == 2:
            # balanced and bivalent, so the two slopes are opposite: the vertex is linear
            own = ctype.cone_of_vertex(v.id)
            if all(ctype.cone_of_flag(f) == own for f in flags):
                violations.append(f"linear bivalent vertex {v.id} lies in the same cone as both of its flags")
    return StabilityReport(stable=not violations, violations=tuple(violations))


def edge_residuals(tmap: TropicalMap) -> tuple[tuple[str, RationalVector], ...]:
    """position(target) - position(source) - length * slope, per edge."""
    residuals = []
    for e in tmap.type.edges:
        expected = add_vectors(tmap.position_of[e.source], scale_vector(tmap.length_of[e.id], e.slope))
        residuals.append((e.id, sub_vectors(tmap.position_of[e.target], expected)))
    return tuple(residuals)


def _require_tree(subject):
    if not subject.is_tree:
        raise NotATree(f"the curve has first Betti number {subject.betti_number}")


def tree_path(subject: TropicalCurve | CombinatorialType, a: str, b: str) -> tuple[PathStep, ...]:
    _require_tree(subject)
    graph = subject.graph
    vertices = nx.shortest_path(graph, a, b)
    steps = []
    for tail, head in zip(vertices, vertices[1:]):
        (edge_id,) = graph[tail][head]
        steps.append(PathStep(edge=edge_id, tail=tail, head=head))
    return tuple(steps)


def solve_balanced_map(
    ctype: CombinatorialType,
    lengths: typing.Mapping[str, typing.Any],
    anchor: tuple[str | int, typing.Sequence],
) -> TropicalMap:
    """The unique map of a genus-0 type with the given edge lengths, pinned by placing one vertex (or marking) at a point."""
    _require_tree(ctype)
    balance = balancing_check(ctype)
    if not balance.balanced:
        raise NotBalanced(balance)
    exact_lengths = {}
    for e in ctype.edges:
        if e.id not in lengths:
            raise ValueError(f"no length given for edge {e.id}")
        length = fractions.Fraction(lengths[e.id])
        if length <= 0:
            raise ValueError(f"edge {e.id} has nonpositive length {length}")
        exact_lengths[e.id] = length
    where, point = anchor
    root = ctype.vertex_of_marking(where) if isinstance(where, int) else where
    if len(point) != ctype.ambient_rank:
        raise ValueError(f"anchor point {tuple(point)} does not live in rank {ctype.ambient_rank}")
    positions = {root: tuple(fractions.Fraction(x) for x in point)}
    graph = ctype.graph
    for tail, head in nx.bfs_edges(graph, root):
        (edge_id,) = graph[tail][head]
        step = scale_vector(exact_lengths[edge_id], ctype.slope_from(edge_id, tail))
        positions[head] = add_vectors(positions[tail], step)
    return TropicalMap(
        type=ctype,
        lengths=tuple((e.id, exact_lengths[e.id]) for e in ctype.edges),
        positions=tuple((v.id, positions[v.id]) for v in ctype.vertices),
    )


def point_incidence(tmap: TropicalMap, points: typing.Mapping[int, typing.Sequence]) -> dict[int, RationalVector]:
    """Residual between the image of each listed marking and its prescribed point."""
    return {marking: sub_vectors(tmap.marking_position(marking), tuple(fractions.Fraction(x) for x in p)) for marking, p in points.items()}


def contract_edge(ctype: CombinatorialType, edge_id: str) -> CombinatorialType:
    """Collapse one edge, merging its target vertex into its source; a loop raises the vertex genus instead."""
    e = ctype.edge(edge_id)
    keep, gone = e.source, e.target
    merged_genus = ctype.vertex(keep).genus + (1 if keep == gone else ctype.vertex(gone).genus)
    vertices = tuple(
        Vertex(id=v.id, genus=merged_genus) if v.id == keep else v for v in ctype.vertices if v.id != gone or keep == gone
    )

    def moved(vertex_id: str) -> str:
        return keep if vertex_id == gone else vertex_id

    edges = tuple(
        EdgeType(id=other.id, source=moved(other.source), target=moved(other.target), slope=other.slope)
        for other in ctype.edges
        if other.id != edge_id
    )
    legs = tuple(LegType(vertex=moved(leg.vertex), marking=leg.marking, slope=leg.slope) for leg in ctype.legs)
    return CombinatorialType(
        ambient_rank=ctype.ambient_rank,
        vertices=vertices,
        edges=edges,
        legs=legs,
        vertex_cones=tuple((v, c) for v, c in ctype.vertex_cones if v != gone),
        edge_cones=tuple((x, c) for x, c in ctype.edge_cones if x != edge_id),
        leg_cones=ctype.leg_cones,
    )


def relabel_markings(ctype: CombinatorialType, mapping: typing.Mapping[int, int]) -> CombinatorialType:
    legs = tuple(LegType(vertex=leg.vertex, marking=mapping.get(leg.marking, leg.marking), slope=leg.slope) for leg in ctype.legs)
    leg_cones = tuple((mapping.get(m, m), c) for m, c in ctype.leg_cones)
    return msgspec.structs.replace(ctype, legs=tuple(sorted(legs, key=lambda leg: leg.marking)), leg_cones=leg_cones)


def canonical_form(ctype: CombinatorialType) -> CombinatorialType:
    """Rename the vertices and edges of a genus-0 type so that isomorphic types compare equal.

    Leg markings are kept, so only marking-preserving isomorphisms are identified. Cone decorations are dropped.
    """
    _require_tree(ctype)
    graph = ctype.graph
    root = ctype.vertex_of_marking(min(ctype.markings)) if ctype.legs else ctype.vertices[0].id
    legs_at = collections.defaultdict(list)
    for leg in ctype.legs:
        legs_at[leg.vertex].append((leg.marking, leg.slope))

    @functools.cache
    def signature(vertex_id: str, parent: typing.Optional[str]) -> tuple:
        children = []
        for neighbour in graph[vertex_id]:
            if neighbour == parent:
                continue
            (edge_id,) = graph[vertex_id][neighbour]
            children.append((ctype.slope_from(edge_id, vertex_id), signature(neighbour, vertex_id)))
        return (ctype.vertex(vertex_id).genus, tuple(sorted(legs_at[vertex_id])), tuple(sorted(children)))

    vertices: list[Vertex] = []
    edges: list[EdgeType] = []
    names: dict[str, str] = {}

    def visit(vertex_id: str, parent: typing.Optional[str]):
        names[vertex_id] = f"v{len(names) + 1}"
        vertices.append(Vertex(id=names[vertex_id], genus=ctype.vertex(vertex_id).genus))
        children = [n for n in graph[vertex_id] if n != parent]
        children.sort(key=lambda n: (ctype.slope_from(next(iter(graph[vertex_id][n])), vertex_id), signature(n, vertex_id)))
        for child in children:
            (edge_id,) = graph[vertex_id][child]
            slope = ctype.slope_from(edge_id, vertex_id)
            visit(child, vertex_id)
            edges.append(EdgeType(id=f"e{len(edges) + 1}", source=names[vertex_id], target=names[child], slope=slope))

    visit(root, None)
    legs = tuple(sorted((LegType(vertex=names[leg.vertex], marking=leg.marking, slope=leg.slope) for leg in ctype.legs), key=lambda x: x.marking))
    return CombinatorialType(ambient_rank=ctype.ambient_rank, vertices=tuple(vertices), edges=tuple(edges), legs=legs)
