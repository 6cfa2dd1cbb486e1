"""Exact integer linear algebra: Smith and Hermite forms, kernels and lattice quotients.

Everything here works on Python integers, so there is no overflow however large the pivots get.
"""

from __future__ import annotations

import fractions
import logging
import math
import typing

import msgspec

from .commontypes import IntVector, is_zero_vector

logger = logging.getLogger(__name__)


class IntegerMatrix(msgspec.Struct, frozen=True, kw_only=True):
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError(f"negative shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"expected {self.rows * self.cols} entries for a {self.rows}x{self.cols} matrix, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: typing.Sequence[typing.Sequence[int]], cols: typing.Optional[int] = None) -> IntegerMatrix:
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("Not all rows are of equal length")
        return cls(rows=len(rows), cols=cols, entries=tuple(int(x) for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: typing.Sequence[typing.Sequence[int]], rows: int) -> IntegerMatrix:
        return cls.from_rows([[c[i] for c in columns] for i in range(rows)], cols=len(columns))

    @classmethod
    def identity(cls, n: int) -> IntegerMatrix:
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntegerMatrix:
        return cls(rows=rows, cols=cols, entries=(0,) * (rows * cols))

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> IntVector:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> IntVector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> IntegerMatrix:
        return IntegerMatrix.from_rows([list(self.column(j)) for j in range(self.cols)], cols=self.rows)

    def __matmul__(self, other):
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        other_cols = [other.column(j) for j in range(other.cols)]
        return IntegerMatrix.from_rows(
            [[sum(a * b for a, b in zip(self.row(i), col)) for col in other_cols] for i in range(self.rows)],
            cols=other.cols,
        )

    def apply(self, v: typing.Sequence) -> tuple:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} does not fit a {self.rows}x{self.cols} matrix")
        return tuple(sum(a * x for a, x in zip(self.row(i), v)) for i in range(self.rows))

    def stack(self, other: IntegerMatrix) -> IntegerMatrix:
        if self.cols != other.cols:
            raise ValueError("cannot stack matrices with different column counts")
        return IntegerMatrix(rows=self.rows + other.rows, cols=self.cols, entries=self.entries + other.entries)

    def is_zero(self) -> bool:
        return is_zero_vector(self.entries)

    def diagonal(self) -> IntVector:
        return tuple(self[i, i] for i in range(min(self.rows, self.cols)))


class SmithDecomposition(msgspec.Struct, frozen=True, kw_only=True):
    U: IntegerMatrix
    D: IntegerMatrix
    V: IntegerMatrix

    @property
    def invariant_factors(self) -> IntVector:
        return tuple(d for d in self.D.diagonal() if d != 0)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


class QuotientLattice(msgspec.Struct, frozen=True, kw_only=True):
    ambient_rank: int
    projection: IntegerMatrix

    @property
    def quotient_rank(self) -> int:
        return self.projection.rows

    def apply(self, v: typing.Sequence) -> tuple:
        return self.projection.apply(v)

    def compose(self, inner: QuotientLattice) -> QuotientLattice:
        """The quotient obtained by applying `inner` first and then this one."""
        if inner.quotient_rank != self.ambient_rank:
            raise ValueError("quotients do not compose")
        return QuotientLattice(ambient_rank=inner.ambient_rank, projection=self.projection @ inner.projection)

    @classmethod
    def identity(cls, rank: int) -> QuotientLattice:
        return cls(ambient_rank=rank, projection=IntegerMatrix.identity(rank))


class _Working:
    """Mutable copy of a matrix together with the row and column operations applied to it."""

    def __init__(self, a: IntegerMatrix):
        self.m = a.rows
        self.n = a.cols
        self.d = a.to_rows()
        self.u = IntegerMatrix.identity(self.m).to_rows()
        self.v = IntegerMatrix.identity(self.n).to_rows()

    def swap_rows(self, i: int, j: int):
        self.d[i], self.d[j] = self.d[j], self.d[i]
        self.u[i], self.u[j] = self.u[j], self.u[i]

    def swap_cols(self, i: int, j: int):
        for row in self.d:
            row[i], row[j] = row[j], row[i]
        for row in self.v:
            row[i], row[j] = row[j], row[i]

    def add_row(self, target: int, source: int, factor: int):
        for mat in (self.d, self.u):
            src = mat[source]
            mat[target] = [t + factor * s for t, s in zip(mat[target], src)]

    def add_col(self, target: int, source: int, factor: int):
        for mat in (self.d, self.v):
            for row in mat:
                row[target] += factor * row[source]

    def negate_row(self, i: int):
        self.d[i] = [-x for x in self.d[i]]
        self.u[i] = [-x for x in self.u[i]]

    def smallest_entry(self, t: int) -> typing.Optional[tuple[int, int]]:
        best = None
        for i in range(t, self.m):
            for j in range(t, self.n):
                x = self.d[i][j]
                if x != 0 and (best is None or abs(x) < abs(self.d[best[0]][best[1]])):
                    best = (i, j)
        return best


def smith_normal_form(a: IntegerMatrix) -> SmithDecomposition:
    w = _Working(a)
    for t in range(min(w.m, w.n)):
        pivot_at = w.smallest_entry(t)
        if pivot_at is None:
            break
        w.swap_rows(t, pivot_at[0])
        w.swap_cols(t, pivot_at[1])
        while True:
            p = w.d[t][t]
            for i in range(t + 1, w.m):
                q = w.d[i][t] // p
                if q:
                    w.add_row(i, t, -q)
            for j in range(t + 1, w.n):
                q = w.d[t][j] // p
                if q:
                    w.add_col(j, t, -q)
            # any remainder is smaller than the pivot, so moving it into place makes progress
            leftover_row = next((i for i in range(t + 1, w.m) if w.d[i][t] != 0), None)
            if leftover_row is not None:
                w.swap_rows(t, leftover_row)
                continue
            leftover_col = next((j for j in range(t + 1, w.n) if w.d[t][j] != 0), None)
            if leftover_col is not None:
                w.swap_cols(t, leftover_col)
                continue
            # divisibility chain: the pivot must divide everything below and to the right
            bad_row = next((i for i in range(t + 1, w.m) for j in range(t + 1, w.n) if w.d[i][j] % p != 0), None)
            if bad_row is not None:
                w.add_row(t, bad_row, 1)
                continue
            break
        if w.d[t][t] < 0:
            w.negate_row(t)
    return SmithDecomposition(
        U=IntegerMatrix.from_rows(w.u, cols=w.m),
        D=IntegerMatrix.from_rows(w.d, cols=w.n),
        V=IntegerMatrix.from_rows(w.v, cols=w.n),
    )


def hermite_normal_form(rows: typing.Sequence[typing.Sequence[int]]) -> list[IntVector]:
    """Row-style Hermite normal form; zero rows are dropped.

    >>> hermite_normal_form([[2, 4], [1, 3]])
    [(1, 1), (0, 2)]
    """
    work = [list(r) for r in rows]
    if not work:
        return []
    ncols = len(work[0])
    r = 0
    for c in range(ncols):
        while True:
            candidates = [i for i in range(r, len(work)) if work[i][c] != 0]
            if not candidates:
                break
            best = min(candidates, key=lambda i: (abs(work[i][c]), i))
            work[r], work[best] = work[best], work[r]
            done = True
            for i in range(r + 1, len(work)):
                q = work[i][c] // work[r][c]
                if q:
                    work[i] = [x - q * y for x, y in zip(work[i], work[r])]
                if work[i][c] != 0:
                    done = False
            if done:
                break
        if r >= len(work) or work[r][c] == 0:
            continue
        if work[r][c] < 0:
            work[r] = [-x for x in work[r]]
        for i in range(r):
            q = work[i][c] // work[r][c]
            if q:
                work[i] = [x - q * y for x, y in zip(work[i], work[r])]
        r += 1
        if r == len(work):
            break
    return [tuple(row) for row in work[:r]]


def matrix_rank(a: IntegerMatrix) -> int:
    return smith_normal_form(a).rank


def kernel_basis(a: IntegerMatrix) -> list[IntVector]:
    snf = smith_normal_form(a)
    k = snf.rank
    basis = [snf.V.column(j) for j in range(k, a.cols)]
    return hermite_normal_form(basis)


def quotient_by_span(rank: int, vectors: typing.Sequence[typing.Sequence[int]]) -> QuotientLattice:
    """Quotient of Z^rank by the saturation of the span of `vectors`."""
    vectors = [v for v in vectors if not is_zero_vector(v)]
    if not vectors:
        return QuotientLattice.identity(rank)
    snf = smith_normal_form(IntegerMatrix.from_columns(vectors, rank))
    rows = [snf.U.row(i) for i in range(snf.rank, rank)]
    projection = IntegerMatrix.from_rows(hermite_normal_form(rows), cols=rank) if rows else IntegerMatrix.zeros(0, rank)
    return QuotientLattice(ambient_rank=rank, projection=projection)


def quotient_by_vector(rank: int, w: typing.Sequence[int]) -> QuotientLattice:
    if len(w) != rank:
        raise ValueError(f"vector of length {len(w)} in a rank {rank} lattice")
    return quotient_by_span(rank, [w])


def quotient_by_vectors_iterated(rank: int, vectors: typing.Sequence[typing.Sequence[int]]) -> QuotientLattice:
    """Kill the vectors one at a time, each through the quotient built so far."""
    quotient = QuotientLattice.identity(rank)
    for w in vectors:
        step = quotient_by_vector(quotient.quotient_rank, quotient.apply(w))
        quotient = step.compose(quotient)
    return quotient


def cokernel_is_free(a: IntegerMatrix) -> bool:
    return all(d == 1 for d in smith_normal_form(a).invariant_factors)


def is_saturated(vectors: typing.Sequence[typing.Sequence[int]], rank: int) -> bool:
    if not vectors:
        return True
    return cokernel_is_free(IntegerMatrix.from_rows(vectors, cols=rank))


def primitive(v: typing.Sequence[int]) -> IntVector:
    g = math.gcd(*v)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


def is_primitive(v: typing.Sequence[int]) -> bool:
    return math.gcd(*v) == 1


def solve_exact(columns: typing.Sequence[typing.Sequence], target: typing.Sequence) -> typing.Optional[tuple[fractions.Fraction, ...]]:
    """Solve sum(x_i * columns[i]) = target over the rationals.

    Returns None when the target is outside the span. The columns must be linearly independent.
    """
    ncols = len(columns)
    nrows = len(target)
    aug = [[fractions.Fraction(columns[j][i]) for j in range(ncols)] + [fractions.Fraction(target[i])] for i in range(nrows)]
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if aug[i][c] != 0), None)
        if pivot is None:
            raise ValueError("columns are linearly dependent")
        aug[r], aug[pivot] = aug[pivot], aug[r]
        lead = aug[r][c]
        aug[r] = [x / lead for x in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][c] != 0:
                factor = aug[i][c]
                aug[i] = [x - factor * y for x, y in zip(aug[i], aug[r])]
        r += 1
    if any(aug[i][ncols] != 0 for i in range(r, nrows)):
        return None
    return tuple(aug[i][ncols] for i in range(ncols))
