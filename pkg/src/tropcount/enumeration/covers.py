"""Tropical covers of the line with simple branching, by monodromy graphs.

Branch points sit at 1..r with r = 2d - 2 + 2g. Sweeping from left to right, d strands of weight 1 come in from the
left end; at each branch point two strands join or one strand splits in two, and d strands of weight 1 leave to the
right. Vertex 0 stands for the left end and r + 1 for the right end.
"""

import collections
import fractions
import functools
import itertools
import logging
import math
import typing

import networkx as nx

from ..tropical.curves import CombinatorialType, EdgeType, LegType, TropicalMap, Vertex
from ..util import map_in_processes
from .enumtypes import EnumerationResult, Solution

logger = logging.getLogger(__name__)

# (tail, head, weight) with tail < head in sweep order
type Strip = tuple[int, int, int]
# (edges closed so far, strands still open as (start, weight)), both sorted
type Partial = tuple[tuple[Strip, ...], tuple[tuple[int, int], ...]]

PARALLEL_DEPTH = 2


def branch_count(d: int, g: int) -> int:
    return 2 * d - 2 + 2 * g


def _advance(partial: Partial, k: int) -> set[Partial]:
    edges, strands = partial
    found = set()
    for i, j in itertools.combinations(range(len(strands)), 2):
        (si, wi), (sj, wj) = strands[i], strands[j]
        rest = [s for n, s in enumerate(strands) if n not in (i, j)]
        found.add((tuple(sorted((*edges, (si, k, wi), (sj, k, wj)))), tuple(sorted((*rest, (k, wi + wj))))))
    for i, (s, w) in enumerate(strands):
        rest = [x for n, x in enumerate(strands) if n != i]
        for a in range(1, w // 2 + 1):
            found.add((tuple(sorted((*edges, (s, k, w)))), tuple(sorted((*rest, (k, a), (k, w - a))))))
    return found


def _sweep(partials: typing.Iterable[Partial], first: int, last: int) -> set[Partial]:
    layer = set(partials)
    for k in range(first, last + 1):
        following: set[Partial] = set()
        for partial in layer:
            following |= _advance(partial, k)
        layer = following
    return layer


def _is_connected(edges: typing.Sequence[Strip], r: int) -> bool:
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(1, r + 1))
    for n, (tail, head, _) in enumerate(edges):
        inner = [v for v in (tail, head) if 1 <= v <= r]
        if len(inner) == 2:
            graph.add_edge(tail, head)
        elif not inner:
            graph.add_node(("through", n))
    return graph.number_of_nodes() > 0 and nx.is_connected(graph)


def _close(partial: Partial, r: int) -> typing.Optional[tuple[Strip, ...]]:
    edges, strands = partial
    if any(w != 1 for _, w in strands):
        return None
    closed = tuple(sorted((*edges, *((s, r + 1, 1) for s, _ in strands))))
    return closed if _is_connected(closed, r) else None


def cover_multiplicity(edges: typing.Sequence[Strip], r: int) -> fractions.Fraction:
    """Product of the interior edge weights over the automorphisms permuting identical edges."""
    weights = math.prod(w for tail, head, w in edges if tail != 0 and head != r + 1)
    automorphisms = math.prod(math.factorial(c) for c in collections.Counter(edges).values())
    return fractions.Fraction(weights, automorphisms)


def cover_map(d: int, edges: typing.Sequence[Strip], r: int) -> TropicalMap:
    """The cover as a map to R^1 with branch point k at k; right ends are markings 1..d, left ends d+1..2d."""
    if r == 0:
        vertices = (Vertex(id="b0"),)
        legs = (LegType(vertex="b0", marking=1, slope=(1,)), LegType(vertex="b0", marking=2, slope=(-1,)))
        ctype = CombinatorialType(ambient_rank=1, vertices=vertices, edges=(), legs=legs)
        return TropicalMap(type=ctype, lengths=(), positions=(("b0", (fractions.Fraction(0),)),))
    vertices = tuple(Vertex(id=f"b{k}") for k in range(1, r + 1))
    inner = []
    lengths = []
    rights = []
    lefts = []
    for tail, head, w in edges:
        if tail == 0:
            lefts.append(head)
        elif head == r + 1:
            rights.append(tail)
        else:
            edge_id = f"e{len(inner) + 1}"
            inner.append(EdgeType(id=edge_id, source=f"b{tail}", target=f"b{head}", slope=(w,)))
            lengths.append((edge_id, fractions.Fraction(head - tail, w)))
    legs = [LegType(vertex=f"b{k}", marking=n + 1, slope=(1,)) for n, k in enumerate(sorted(rights))]
    legs += [LegType(vertex=f"b{k}", marking=d + n + 1, slope=(-1,)) for n, k in enumerate(sorted(lefts))]
    legs += [LegType(vertex=f"b{k}", marking=2 * d + k, slope=(0,)) for k in range(1, r + 1)]
    ctype = CombinatorialType(ambient_rank=1, vertices=vertices, edges=tuple(inner), legs=tuple(legs))
    return TropicalMap(type=ctype, lengths=tuple(lengths), positions=tuple((f"b{k}", (fractions.Fraction(k),)) for k in range(1, r + 1)))


def _finish(r: int, depth: int, prefix: Partial) -> list[tuple[Strip, ...]]:
    closed = (_close(p, r) for p in _sweep([prefix], depth + 1, r))
    return [c for c in closed if c is not None]


async def enumerate_tropical_covers(d: int, g: int, *, jobs: int = 1) -> EnumerationResult:
    if d < 1 or g < 0:
        raise ValueError(f"need d >= 1 and g >= 0, got d={d}, g={g}")
    r = branch_count(d, g)
    start: Partial = ((), tuple((0, 1) for _ in range(d)))
    depth = min(PARALLEL_DEPTH, r)
    prefixes = sorted(_sweep([start], 1, depth))
    chunks = await map_in_processes(functools.partial(_finish, r, depth), prefixes, jobs)
    graphs = sorted({edges for chunk in chunks for edges in chunk})
    solutions = tuple(Solution(map=cover_map(d, edges, r), multiplicity=cover_multiplicity(edges, r)) for edges in graphs)
    result = EnumerationResult(solutions=solutions)
    logger.debug("degree %d genus %d covers: %d monodromy graphs, total %s", d, g, len(solutions), result.total)
    return result
