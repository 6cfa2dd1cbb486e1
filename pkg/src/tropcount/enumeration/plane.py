"""Plane tropical curves of degree d and genus g through 3d - 1 + g points.

Cut at the marked points, a simple curve through general points falls apart into trees that each contain exactly one
end. Orienting every such tree towards its end turns it into a flow: rays leave the marked points, merge pairwise at
trivalent vertices and finally leave as an end. The search builds these flows bottom-up over subsets of the points.
Each merge vertex is solved exactly, and only merges that happen at positive distance along both rays are kept.

For genus g, g marked points on cycles are first cut open. Each contributes two bare rays (one per half of its edge),
and the remaining points then carve a tree. Among all admissible cuts only the one where every cut point has the lowest
index on the cycle it closes is searched, so each curve is reached once; solutions are still deduplicated by their exact
image.

Item sets are bitmasks: bit i is the uncut point i, higher bits are the halves of cut points. Positions are kept as
integer triples (x, y, w) standing for (x / w, y / w).
"""

from __future__ import annotations

import fractions
import functools
import itertools
import logging
import math
import typing

import msgspec

from ..commontypes import IntVector, add_vectors, is_zero_vector, negate_vector
from ..contact import SEVERI_ENDS
from ..tropical.curves import CombinatorialType, EdgeType, LegType, RationalVector, TropicalMap, Vertex
from ..util import map_in_processes
from .configs import PointConfiguration, random_configuration
from .enumtypes import EnumerationResult, NonGenericConfiguration, NotTrivalent, ResamplingExhausted, Solution

logger = logging.getLogger(__name__)

DEFAULT_MAX_RESAMPLES = 8

# a node is ("p", point index) for a marked point or ("m", position) for a merge vertex; ends head into END
type Node = tuple
type Piece = tuple[Node, Node, IntVector]
# (point index, ()) is an uncut point; (point index, w) is one half of a cut point, leaving it in direction w
type Item = tuple[int, IntVector]
type Homogeneous = tuple[int, int, int]
# a side mask for genus 0, (cut points, their edge directions) otherwise
type Task = int | tuple[tuple[int, ...], tuple[IntVector, ...]]

END: Node = ("end",)


def _det(u: typing.Sequence, v: typing.Sequence):
    return u[0] * v[1] - u[1] * v[0]


def within_degree(w: IntVector, degree: int) -> bool:
    """Edge directions of a degree-d plane curve fit in the hexagon |x|, |y|, |x - y| <= d."""
    return abs(w[0]) <= degree and abs(w[1]) <= degree and abs(w[0] - w[1]) <= degree


def _positive(w: IntVector) -> IntVector:
    return w if w > (0, 0) else negate_vector(w)


def cycle_directions(degree: int) -> list[IntVector]:
    """Weighted directions, up to sign, that an edge on a cycle of a simple degree-d curve can take.

    Such an edge borders a bounded region of the complement, so its dual segment in the subdivision of the degree-d
    triangle ends at an interior lattice point.

    >>> cycle_directions(2)
    []
    >>> cycle_directions(3)
    [(0, 1), (1, -1), (1, 0), (1, 1), (1, 2), (2, 1)]
    """
    lattice = [(i, j) for i in range(degree + 1) for j in range(degree + 1 - i)]
    interior = [(i, j) for i, j in lattice if i >= 1 and j >= 1 and i + j <= degree - 1]
    found = {_positive((v[1] - q[1], q[0] - v[0])) for v in interior for q in lattice if q != v}
    return sorted(found)


def _homogeneous(point: RationalVector) -> Homogeneous:
    w = math.lcm(*(fractions.Fraction(x).denominator for x in point))
    x, y = (int(fractions.Fraction(c) * w) for c in point)
    return x, y, w


def _rational(position: Homogeneous) -> RationalVector:
    x, y, w = position
    return fractions.Fraction(x, w), fractions.Fraction(y, w)


class _Flow(msgspec.Struct, frozen=True):
    start: Node
    origin: Homogeneous
    direction: IntVector
    ends: tuple[int, int, int]
    multiplicity: int
    # the pieces added by this step and the flows it was built from
    links: tuple[Piece, ...] = ()
    parts: tuple[_Flow, ...] = ()

    def pieces(self) -> frozenset[Piece]:
        found = set()
        stack = [self]
        while stack:
            flow = stack.pop()
            found.update(flow.links)
            stack.extend(flow.parts)
        return frozenset((_node(tail), _node(head), slope) for tail, head, slope in found)


def _node(node: Node) -> Node:
    return ("m", _rational(node[1])) if node[0] == "m" else node


class _FlowSearch:
    def __init__(self, degree: int, points: typing.Sequence[RationalVector], genus: int = 0):
        self.degree = degree
        self.genus = genus
        self.points = tuple(points)
        self.origins = tuple(_homogeneous(p) for p in self.points)
        self.point_bits = (1 << len(self.points)) - 1
        self._items: list[Item] = [(i, ()) for i in range(len(self.points))]
        self._bits: dict[Item, int] = {item: 1 << i for i, item in enumerate(self._items)}
        self._admissible: dict[int, list[IntVector]] = {}
        self._open_cut: dict[int, int] = {}
        self._flows: dict[int, list[_Flow]] = {}
        self._spines: dict[tuple[int, IntVector, int], list[_Flow]] = {}
        self._closed: dict[tuple[int, IntVector, int], list[_Flow]] = {}

    def bit(self, item: Item) -> int:
        found = self._bits.get(item)
        if found is None:
            found = 1 << len(self._items)
            self._items.append(item)
            self._bits[item] = found
        return found

    def _members(self, mask: int) -> typing.Iterator[tuple[int, Item]]:
        while mask:
            low = mask & -mask
            mask ^= low
            yield low, self._items[low.bit_length() - 1]

    def _bare(self, index: int, direction: IntVector) -> _Flow:
        return _Flow(("p", index), self.origins[index], direction, (0, 0, 0), 1)

    def admissible(self, mask: int) -> list[IntVector]:
        """Directions in which a closed flow can leave a point and absorb the items of `mask`.

        Such a flow ends in one more end than it absorbs uncut points, and by balancing its direction is the sum of those
        ends minus the directions of the cut halves flowing into it.
        """
        cached = self._admissible.get(mask)
        if cached is not None:
            return cached
        total = (mask & self.point_bits).bit_count() + 1
        tx = ty = 0
        for _, (_, half) in self._members(mask & ~self.point_bits):
            tx += half[0]
            ty += half[1]
        found = []
        for a in range(min(self.degree, total) + 1):
            for b in range(min(self.degree, total - a) + 1):
                c = total - a - b
                if c > self.degree:
                    continue
                v = (a - c - tx, b - c - ty)
                if not is_zero_vector(v) and within_degree(v, self.degree):
                    found.append(v)
        self._admissible[mask] = found
        return found

    def open_cut(self, mask: int) -> int:
        """Highest cut point with exactly one half in `mask`, or -1.

        A point whose far side holds exactly one half of a cut point lies on the cycle that cut opened.
        """
        cached = self._open_cut.get(mask)
        if cached is not None:
            return cached
        found = -1
        for _, (index, half) in self._members(mask & ~self.point_bits):
            if not mask & self._bits.get((index, negate_vector(half)), 0):
                found = max(found, index)
        self._open_cut[mask] = found
        return found

    def merge(self, first: _Flow, second: _Flow) -> typing.Optional[_Flow]:
        u, v = first.direction, second.direction
        det = _det(u, v)
        if det == 0:
            return None
        direction = (u[0] + v[0], u[1] + v[1])
        if not within_degree(direction, self.degree):
            return None
        ends = tuple(a + b for a, b in zip(first.ends, second.ends))
        if any(e > self.degree for e in ends):
            return None
        x1, y1, w1 = first.origin
        x2, y2, w2 = second.origin
        ox, oy = x2 * w1 - x1 * w2, y2 * w1 - y1 * w2
        # first.origin + t * u == second.origin + s * v with t = tn / (w1 w2 det) and s = sn / (w1 w2 det)
        tn = ox * v[1] - oy * v[0]
        sn = ox * u[1] - oy * u[0]
        if tn == 0 or sn == 0:
            raise NonGenericConfiguration(f"rays from {_rational(first.origin)} and {_rational(second.origin)} meet at an existing vertex")
        if (tn > 0) != (det > 0) or (sn > 0) != (det > 0):
            return None
        scale = w2 * det
        position = (x1 * scale + tn * u[0], y1 * scale + tn * u[1], w1 * scale)
        if scale < 0:
            position = tuple(-c for c in position)
        common = math.gcd(*position)
        position = tuple(c // common for c in position)
        node = ("m", position)
        return _Flow(
            node,
            position,
            direction,
            ends,
            first.multiplicity * second.multiplicity * abs(det),
            ((first.start, node, u), (second.start, node, v)),
            (first, second),
        )

    def flows(self, mask: int) -> list[_Flow]:
        """Every open flow whose leaves use exactly the items of `mask`, each uncut leaf carrying its closed far half."""
        cached = self._flows.get(mask)
        if cached is not None:
            return cached
        found = []
        for low, (index, half) in self._members(mask):
            rest = mask ^ low
            if half:
                if not rest:
                    found.append(self._bare(index, half))
                continue
            if index < self.open_cut(rest):
                continue
            for back in self.admissible(rest):
                for closed in self.closed(index, back, rest):
                    found.append(_Flow(("p", index), self.origins[index], negate_vector(back), closed.ends, closed.multiplicity, parts=(closed,)))
        # splits keep the lowest item on the left
        others = mask ^ (mask & -mask)
        right = others
        while right:
            right_flows = self.flows(right)
            if right_flows:
                for a in self.flows(mask ^ right):
                    for b in right_flows:
                        merged = self.merge(a, b)
                        if merged is not None:
                            found.append(merged)
            right = (right - 1) & others
        self._flows[mask] = found
        return found

    def spines(self, index: int, direction: IntVector, mask: int) -> list[_Flow]:
        """The ray from a point in a fixed direction after merging with flows that together use exactly `mask`."""
        if not mask:
            return [self._bare(index, direction)]
        key = (index, direction, mask)
        cached = self._spines.get(key)
        if cached is not None:
            return cached
        found = []
        last = mask
        while last:
            tails = self.flows(last)
            if tails:
                for spine in self.spines(index, direction, mask ^ last):
                    for tail in tails:
                        merged = self.merge(spine, tail)
                        if merged is not None:
                            found.append(merged)
            last = (last - 1) & mask
        self._spines[key] = found
        return found

    def closed(self, index: int, direction: IntVector, mask: int) -> list[_Flow]:
        key = (index, direction, mask)
        cached = self._closed.get(key)
        if cached is not None:
            return cached
        result = []
        for spine in self.spines(index, direction, mask):
            if spine.direction not in SEVERI_ENDS:
                continue
            slot = SEVERI_ENDS.index(spine.direction)
            ends = tuple(e + (1 if i == slot else 0) for i, e in enumerate(spine.ends))
            if ends[slot] > self.degree:
                continue
            result.append(
                _Flow(spine.start, spine.origin, spine.direction, ends, spine.multiplicity, ((spine.start, END, spine.direction),), (spine,))
            )
        self._closed[key] = result
        return result

    def tasks(self) -> list[Task]:
        """Side masks of the root point's edge for genus 0; every choice of cut points and cycle directions otherwise."""
        if self.genus == 0:
            rest = self.point_bits ^ 1
            sides = []
            side = rest
            while True:
                sides.append(side)
                if not side:
                    break
                side = (side - 1) & rest
            return sides[::-1]
        directions = cycle_directions(self.degree)
        return [
            (cuts, chosen)
            for cuts in itertools.combinations(range(len(self.points)), self.genus)
            for chosen in itertools.product(directions, repeat=self.genus)
        ]

    def run(self, task: Task) -> list[tuple[frozenset[Piece], int]]:
        full = (self.degree,) * 3
        found = []
        match task:
            case int(side):
                other = self.point_bits ^ 1 ^ side
                for w in self.admissible(side):
                    if w < (0, 0):
                        continue
                    right = self.closed(0, negate_vector(w), other)
                    if not right:
                        continue
                    for a in self.closed(0, w, side):
                        for b in right:
                            if add_vectors(a.ends, b.ends) == full:
                                found.append((a.pieces() | b.pieces(), a.multiplicity * b.multiplicity))
            case (cuts, chosen):
                # the whole curve is one closed flow leaving the first cut point, with its other half somewhere inside
                mask = self.point_bits
                for c in cuts:
                    mask &= ~(1 << c)
                mask |= self.bit((cuts[0], negate_vector(chosen[0])))
                for c, w in zip(cuts[1:], chosen[1:]):
                    mask |= self.bit((c, w)) | self.bit((c, negate_vector(w)))
                for flow in self.closed(cuts[0], chosen[0], mask):
                    if flow.ends == full:
                        found.append((flow.pieces(), flow.multiplicity))
        return found


def _search_chunk(degree: int, points: tuple[RationalVector, ...], genus: int, chunk: list[Task]) -> list[tuple[frozenset[Piece], int]]:
    """Run a share of the tasks against one search, so its flows are shared across them."""
    search = _FlowSearch(degree, points, genus)
    found = []
    for task in chunk:
        found.extend(search.run(task))
    return found


def _length(tail: RationalVector, head: RationalVector, slope: IntVector) -> fractions.Fraction:
    j = next(j for j, w in enumerate(slope) if w != 0)
    return (head[j] - tail[j]) / slope[j]


def build_map(degree: int, points: typing.Sequence[RationalVector], pieces: frozenset[Piece]) -> TropicalMap:
    """Turn the pieces of an assembled flow into a tropical map with canonically labelled ends."""
    first_point_marking = 3 * degree + 1
    merges = sorted({node for piece in pieces for node in piece[:2] if node[0] == "m"})
    names = {("p", i): f"p{first_point_marking + i}" for i in range(len(points))}
    names.update({node: f"v{k + 1}" for k, node in enumerate(merges)})
    positions = {("p", i): tuple(points[i]) for i in range(len(points))}
    positions.update({node: node[1] for node in merges})
    for node in merges:
        incoming = sum(1 for piece in pieces if piece[1] == node)
        outgoing = sum(1 for piece in pieces if piece[0] == node)
        if (incoming, outgoing) != (2, 1):
            raise NonGenericConfiguration(f"vertices collide at {node[1]}")
    edges = []
    lengths = []
    end_legs: list[list[tuple]] = [[] for _ in SEVERI_ENDS]
    for tail, head, slope in sorted(pieces):
        if head == END:
            end_legs[SEVERI_ENDS.index(slope)].append(positions[tail] + (names[tail],))
            continue
        edge_id = f"e{len(edges) + 1}"
        edges.append(EdgeType(id=edge_id, source=names[tail], target=names[head], slope=slope))
        lengths.append((edge_id, _length(positions[tail], positions[head], slope)))
    legs = []
    for slot, starts in enumerate(end_legs):
        for rank, start in enumerate(sorted(starts)):
            legs.append(LegType(vertex=start[-1], marking=slot * degree + rank + 1, slope=SEVERI_ENDS[slot]))
    legs.extend(LegType(vertex=names[("p", i)], marking=first_point_marking + i, slope=(0, 0)) for i in range(len(points)))
    vertices = tuple(Vertex(id=names[("p", i)]) for i in range(len(points))) + tuple(Vertex(id=names[m]) for m in merges)
    ctype = CombinatorialType(ambient_rank=2, vertices=vertices, edges=tuple(edges), legs=tuple(legs))
    return TropicalMap(
        type=ctype,
        lengths=tuple(lengths),
        positions=tuple((names[node], positions[node]) for node in [("p", i) for i in range(len(points))] + merges),
    )


def curve_image(tmap: TropicalMap) -> frozenset[tuple]:
    """The weighted segments and ends a plane map draws, independent of how its edges are oriented or labelled."""
    found = set()
    for e in tmap.type.edges:
        start, end, slope = tmap.position_of[e.source], tmap.position_of[e.target], e.slope
        if end < start:
            start, end, slope = end, start, negate_vector(slope)
        found.add((start, end, slope))
    for leg in tmap.type.legs:
        if not is_zero_vector(leg.slope):
            found.add((tmap.position_of[leg.vertex], None, leg.slope))
    return frozenset(found)


def mikhalkin_multiplicity(tmap: TropicalMap | CombinatorialType) -> int:
    """Product of |det| over the trivalent vertices; a marked point sitting inside an edge contributes 1."""
    ctype = tmap.type if isinstance(tmap, TropicalMap) else tmap
    result = 1
    for v in ctype.vertices:
        slopes = [ctype.flag_slope(f) for f in ctype.flags_at(v.id)]
        moving = [s for s in slopes if not is_zero_vector(s)]
        if len(moving) == 2 and len(slopes) == 3 and is_zero_vector(add_vectors(*moving)):
            continue
        if len(slopes) != 3 or len(moving) != 3:
            raise NotTrivalent(v.id, slopes)
        result *= abs(_det(moving[0], moving[1]))
    return result


def _solution_sort_key(pieces: frozenset[Piece]):
    return sorted(pieces)


async def enumerate_plane_curves(degree: int, genus: int, config: PointConfiguration, *, jobs: int = 1) -> EnumerationResult:
    if degree < 1 or genus < 0:
        raise ValueError(f"need degree >= 1 and genus >= 0, got d={degree}, g={genus}")
    expected = 3 * degree - 1 + genus
    if len(config.points) != expected:
        raise ValueError(f"degree {degree}, genus {genus} needs {expected} points, got {len(config.points)}")
    if config.dimension != 2:
        raise ValueError("plane curves need points in the plane")
    if jobs < 1:
        raise ValueError(f"need at least one job, got {jobs}")
    tasks = _FlowSearch(degree, config.points, genus).tasks()
    chunks = [tasks[k::jobs] for k in range(min(jobs, len(tasks)))]
    logger.debug("d=%d g=%d: %d search tasks in %d chunks", degree, genus, len(tasks), len(chunks))
    found = await map_in_processes(functools.partial(_search_chunk, degree, config.points, genus), chunks, jobs)
    curves: dict[frozenset, tuple[frozenset[Piece], TropicalMap, int]] = {}
    for pieces, multiplicity in itertools.chain.from_iterable(found):
        tmap = build_map(degree, config.points, pieces)
        image = curve_image(tmap)
        if image in curves:
            logger.debug("d=%d g=%d: curve reached twice", degree, genus)
            continue
        curves[image] = (pieces, tmap, multiplicity)
    solutions = []
    for pieces, tmap, multiplicity in sorted(curves.values(), key=lambda c: _solution_sort_key(c[0])):
        if mikhalkin_multiplicity(tmap) != multiplicity:
            raise NonGenericConfiguration("vertex multiplicities disagree with the assembled flow")
        solutions.append(Solution(map=tmap, multiplicity=fractions.Fraction(multiplicity)))
    result = EnumerationResult(solutions=tuple(solutions), seed=config.seed, attempt=config.attempt, points=config.points)
    logger.debug("d=%d g=%d: %d curves, total %s", degree, genus, len(solutions), result.total)
    return result


async def enumerate_with_resampling(
    degree: int,
    genus: int,
    seed: int = 0,
    *,
    jobs: int = 1,
    max_resamples: int = DEFAULT_MAX_RESAMPLES,
    coordinate_range: typing.Optional[int] = None,
) -> EnumerationResult:
    count = 3 * degree - 1 + genus
    extra = {} if coordinate_range is None else {"coordinate_range": coordinate_range}
    for attempt in range(max_resamples):
        config = random_configuration(count, seed, attempt, **extra)
        try:
            return await enumerate_plane_curves(degree, genus, config, jobs=jobs)
        except NonGenericConfiguration as exc:
            logger.info("seed %d attempt %d is not generic (%s); resampling", seed, attempt, exc)
    raise ResamplingExhausted(max_resamples)


async def severi_degree(degree: int, genus: int, seed: int = 0, **kwargs) -> int:
    result = await enumerate_with_resampling(degree, genus, seed, **kwargs)
    total = result.total
    if total.denominator != 1:
        raise ValueError(f"plane curve count {total} is not an integer")
    return total.numerator
