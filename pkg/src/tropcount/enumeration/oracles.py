"""Independent counts to check the tropical enumerations against."""

import collections
import fractions
import functools
import itertools
import logging
import math

logger = logging.getLogger(__name__)


@functools.cache
def wdvv_oracle(d: int) -> int:
    """Rational plane curves of degree d through 3d - 1 points, by Kontsevich's recursion.

    >>> [wdvv_oracle(d) for d in range(1, 5)]
    [1, 1, 12, 620]
    """
    if d < 1:
        raise ValueError(f"degree must be positive, got {d}")
    if d == 1:
        return 1
    total = 0
    for d1 in range(1, d):
        d2 = d - d1
        total += wdvv_oracle(d1) * wdvv_oracle(d2) * d1 * d1 * d2 * (d2 * math.comb(3 * d - 4, 3 * d1 - 2) - d1 * math.comb(3 * d - 4, 3 * d1 - 1))
    return total


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(p[q[i]] for i in range(len(q)))


def _join_orbits(orbits: frozenset[frozenset[int]], i: int, j: int) -> frozenset[frozenset[int]]:
    first = next(o for o in orbits if i in o)
    if j in first:
        return orbits
    second = next(o for o in orbits if j in o)
    return (orbits - {first, second}) | {first | second}


def hurwitz_factorization_oracle(d: int, g: int) -> fractions.Fraction:
    """Transitive r-tuples of transpositions in S_d with trivial product, divided by d!, where r = 2d - 2 + 2g.

    >>> hurwitz_factorization_oracle(3, 0)
    Fraction(4, 1)
    """
    if d < 1 or g < 0:
        raise ValueError(f"need d >= 1 and g >= 0, got d={d}, g={g}")
    r = 2 * d - 2 + 2 * g
    transpositions = []
    for i, j in itertools.combinations(range(d), 2):
        swap = list(range(d))
        swap[i], swap[j] = j, i
        transpositions.append(((i, j), tuple(swap)))
    identity = tuple(range(d))
    states: collections.Counter = collections.Counter({(identity, frozenset(frozenset([k]) for k in range(d))): 1})
    for _ in range(r):
        following: collections.Counter = collections.Counter()
        for (product, orbits), count in states.items():
            for (i, j), swap in transpositions:
                following[(_compose(product, swap), _join_orbits(orbits, i, j))] += count
        states = following
    transitive = frozenset([frozenset(range(d))])
    count = states[(identity, transitive)]
    logger.debug("S_%d: %d transitive factorizations of length %d", d, count, r)
    return fractions.Fraction(count, math.factorial(d))
