"""Strict piecewise polynomials on simplicial fans.

Each maximal cone carries a polynomial in the ambient coordinates x1..xk with rational coefficients. Two
cones must agree on the span of their common face.
"""

from __future__ import annotations

import dataclasses
import fractions
import functools
import itertools
import logging
import typing

import sympy

from ..commontypes import TropcountError
from ..lattice import IntegerMatrix, primitive, solve_exact
from .cones import Cone, NonSimplicial, _integral
from .fans import Fan, FanMismatch, find_cone

logger = logging.getLogger(__name__)


class RayNotInFan(TropcountError):
    pass


class NotConeCompatible(TropcountError):
    def __init__(self, cone: Cone):
        self.cone = cone
        super().__init__(f"cone {cone.rays} does not map into a single cone of the target fan")


class DiscontinuousPieces(TropcountError):
    pass


@functools.cache
def ambient_symbols(rank: int) -> tuple[sympy.Symbol, ...]:
    if rank < 1:
        raise ValueError("piecewise polynomials need an ambient rank of at least 1")
    return tuple(sympy.symbols(f"x1:{rank + 1}"))


def to_sympy(value) -> sympy.Rational:
    value = fractions.Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def from_sympy(value) -> fractions.Fraction:
    value = sympy.Rational(value)
    return fractions.Fraction(int(value.p), int(value.q))


def make_poly(expr, rank: int) -> sympy.Poly:
    return sympy.Poly(expr, *ambient_symbols(rank), domain=sympy.QQ)


@dataclasses.dataclass(frozen=True)
class PiecewisePolynomial:
    fan: Fan
    pieces: tuple[tuple[Cone, sympy.Poly], ...]

    @functools.cached_property
    def _by_cone(self) -> dict[Cone, sympy.Poly]:
        return dict(self.pieces)

    def on(self, cone: Cone) -> sympy.Poly:
        return self._by_cone[cone]

    @property
    def symbols(self) -> tuple[sympy.Symbol, ...]:
        return ambient_symbols(self.fan.ambient_rank)

    def __add__(self, other):
        if not isinstance(other, PiecewisePolynomial):
            return NotImplemented
        return pp_add(self, other)

    def __mul__(self, other):
        if isinstance(other, PiecewisePolynomial):
            return pp_mul(self, other)
        if isinstance(other, (int, fractions.Fraction)):
            return pp_scale(self, other)
        return NotImplemented

    __rmul__ = __mul__


def _from_pieces(fan: Fan, pieces: typing.Mapping[Cone, sympy.Poly], check: bool = True) -> PiecewisePolynomial:
    ordered = tuple((cone, pieces[cone]) for cone in fan.maximal_cones)
    result = PiecewisePolynomial(fan=fan, pieces=ordered)
    if check:
        check_continuity(result)
    return result


def check_continuity(f: PiecewisePolynomial):
    """Raise DiscontinuousPieces unless adjacent pieces agree on every shared face."""
    rank = f.fan.ambient_rank
    xs = ambient_symbols(rank)
    for (a, pa), (b, pb) in itertools.combinations(f.pieces, 2):
        common = tuple(r for r in a.rays if r in b.rays)
        ts = sympy.symbols(f"t0:{len(common)}") if common else ()
        substitution = {x: sum((t * r[j] for t, r in zip(ts, common)), sympy.Integer(0)) for j, x in enumerate(xs)}
        difference = sympy.expand(pa.as_expr().subs(substitution, simultaneous=True) - pb.as_expr().subs(substitution, simultaneous=True))
        if difference != 0:
            raise DiscontinuousPieces(f"pieces on {a.rays} and {b.rays} disagree on their common face {common}")


def _require_simplicial(fan: Fan):
    for cone in fan.cones:
        if not cone.is_simplicial:
            raise NonSimplicial(cone)


def dual_form(cone: Cone, index: int) -> tuple[fractions.Fraction, ...]:
    """The linear form on the span of a simplicial cone that is 1 on one generator and 0 on the others."""
    rays = cone.rays
    gram = [[sum(a * b for a, b in zip(u, w)) for w in rays] for u in rays]
    target = [1 if i == index else 0 for i in range(len(rays))]
    coefficients = solve_exact([[gram[i][j] for i in range(len(rays))] for j in range(len(rays))], target)
    return tuple(sum((c * u[j] for c, u in zip(coefficients, rays)), fractions.Fraction(0)) for j in range(cone.ambient_rank))


def _linear_expr(form: typing.Sequence, rank: int):
    return sum((to_sympy(c) * x for c, x in zip(form, ambient_symbols(rank))), sympy.Integer(0))


def constant(fan: Fan, value) -> PiecewisePolynomial:
    return _from_pieces(fan, {cone: make_poly(to_sympy(value), fan.ambient_rank) for cone in fan.maximal_cones}, check=False)


def linear_function(fan: Fan, form: typing.Sequence) -> PiecewisePolynomial:
    expr = _linear_expr(form, fan.ambient_rank)
    return _from_pieces(fan, {cone: make_poly(expr, fan.ambient_rank) for cone in fan.maximal_cones}, check=False)


def courant_function(fan: Fan, ray: Cone | typing.Sequence[int]) -> PiecewisePolynomial:
    _require_simplicial(fan)
    if isinstance(ray, Cone):
        if len(ray.rays) != 1:
            raise RayNotInFan(f"{ray.rays} is not a ray")
        generator = ray.rays[0]
    else:
        generator = primitive(tuple(ray))
    if generator not in fan.rays:
        raise RayNotInFan(f"{generator} is not a ray of the fan")
    pieces = {}
    for cone in fan.maximal_cones:
        if generator in cone.rays:
            pieces[cone] = make_poly(_linear_expr(dual_form(cone, cone.rays.index(generator)), fan.ambient_rank), fan.ambient_rank)
        else:
            pieces[cone] = make_poly(0, fan.ambient_rank)
    return _from_pieces(fan, pieces)


def point_class(fan: Fan, cone: Cone) -> PiecewisePolynomial:
    """Product of the Courant functions of a maximal cone's rays: the class of its torus-fixed point."""
    if cone not in fan.maximal_cones:
        raise ValueError(f"{cone.rays} is not a maximal cone of the fan")
    result = constant(fan, 1)
    for ray in cone.rays:
        result = pp_mul(result, courant_function(fan, ray))
    return result


def _same_fan(f: PiecewisePolynomial, g: PiecewisePolynomial):
    if f.fan != g.fan:
        raise FanMismatch("piecewise polynomials live on different fans; refine to a common fan first")


def pp_add(f: PiecewisePolynomial, g: PiecewisePolynomial) -> PiecewisePolynomial:
    _same_fan(f, g)
    return _from_pieces(f.fan, {cone: f.on(cone) + g.on(cone) for cone in f.fan.maximal_cones}, check=False)


def pp_mul(f: PiecewisePolynomial, g: PiecewisePolynomial) -> PiecewisePolynomial:
    _same_fan(f, g)
    return _from_pieces(f.fan, {cone: f.on(cone) * g.on(cone) for cone in f.fan.maximal_cones}, check=False)


def pp_scale(f: PiecewisePolynomial, c) -> PiecewisePolynomial:
    factor = to_sympy(c)
    return _from_pieces(f.fan, {cone: f.on(cone) * factor for cone in f.fan.maximal_cones}, check=False)


def maximal_cone_containing(fan: Fan, v: typing.Sequence) -> Cone:
    scaled = _integral(v)
    carrier, _ = find_cone(fan, scaled)
    return next(m for m in fan.maximal_cones if m.has_face(carrier))


def evaluate(f: PiecewisePolynomial, v: typing.Sequence) -> fractions.Fraction:
    cone = maximal_cone_containing(f.fan, v)
    return from_sympy(f.on(cone)(*(to_sympy(x) for x in v)))


def restrict_to_cone(f: PiecewisePolynomial, cone: Cone) -> sympy.Poly:
    return f.on(cone)


def refine(f: PiecewisePolynomial, finer: Fan) -> PiecewisePolynomial:
    if not finer.refines(f.fan):
        raise FanMismatch("target fan does not refine the fan of the function")
    pieces = {}
    for cone in finer.maximal_cones:
        coarse = next(c for c in f.fan.maximal_cones if c.contains_cone(cone))
        pieces[cone] = f.on(coarse)
    return _from_pieces(finer, pieces, check=False)


def pullback(f: PiecewisePolynomial, matrix: IntegerMatrix, source: Fan) -> PiecewisePolynomial:
    """Compose f with the linear map `matrix` from the lattice of `source` into the lattice of f's fan."""
    if matrix.rows != f.fan.ambient_rank or matrix.cols != source.ambient_rank:
        raise ValueError(f"a {matrix.rows}x{matrix.cols} matrix does not map rank {source.ambient_rank} into rank {f.fan.ambient_rank}")
    xs = ambient_symbols(source.ambient_rank)
    images = {
        y: sum((matrix[j, k] * xs[k] for k in range(source.ambient_rank)), sympy.Integer(0))
        for j, y in enumerate(ambient_symbols(f.fan.ambient_rank))
    }
    pieces = {}
    for cone in source.maximal_cones:
        image_rays = [matrix.apply(r) for r in cone.rays]
        target = next((t for t in f.fan.maximal_cones if all(t.contains(im) for im in image_rays)), None)
        if target is None:
            raise NotConeCompatible(cone)
        expr = f.on(target).as_expr().subs(images, simultaneous=True)
        pieces[cone] = make_poly(sympy.expand(expr), source.ambient_rank)
    logger.debug("pulled back along a %dx%d map onto %d cones", matrix.rows, matrix.cols, len(pieces))
    return _from_pieces(source, pieces, check=False)


def is_zero(f: PiecewisePolynomial) -> bool:
    return all(p.is_zero for _, p in f.pieces)
