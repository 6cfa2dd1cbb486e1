"""SVG pictures of tropical maps to R^1 and R^2.

A point (x, y) of the target is drawn at (unit * x, -unit * y), so the y axis points up on screen. Edges are segments
between the solved vertex positions, legs are arrows along their slopes, and contracted legs are short dashed strokes.
Every element carries its exact rational coordinates in data-* attributes next to the decimal ones SVG needs.
"""

from __future__ import annotations

import fractions
import logging
import typing
import xml.etree.ElementTree as ET

import msgspec

from ..commontypes import is_zero_vector
from ..rationals import format_rational, parse_rational
from ..tropical.curves import CurveError, RationalVector, TropicalMap

logger = logging.getLogger(__name__)

SVG_NAMESPACE = "http://www.w3.org/2000/svg"
DECIMAL_PLACES = 6
MARGIN_UNITS = fractions.Fraction(1, 2)
# directions of the dashed strokes marking contracted legs, cycled per vertex
CONTRACTED_DIRECTIONS = ((1, 1), (-1, 1), (-1, -1), (1, -1))


class ScreenTransform(msgspec.Struct, frozen=True):
    unit: int

    def apply(self, point: RationalVector) -> tuple[fractions.Fraction, fractions.Fraction]:
        x, y = _planar(point)
        return self.unit * x, -self.unit * y


def _planar(point: typing.Sequence) -> tuple[fractions.Fraction, fractions.Fraction]:
    match len(point):
        case 1:
            return fractions.Fraction(point[0]), fractions.Fraction(0)
        case 2:
            return fractions.Fraction(point[0]), fractions.Fraction(point[1])
    raise CurveError(f"can only draw maps to R^1 or R^2, not R^{len(point)}")


def format_decimal(value: fractions.Fraction) -> str:
    """Round to a fixed number of places with integer arithmetic and drop trailing zeros.

    >>> format_decimal(fractions.Fraction(-1, 3))
    '-0.333333'
    >>> format_decimal(fractions.Fraction(40))
    '40'
    """
    scaled = round(value * 10**DECIMAL_PLACES)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**DECIMAL_PLACES)
    digits = f"{frac:0{DECIMAL_PLACES}d}".rstrip("0")
    return f"{sign}{whole}.{digits}" if digits else f"{sign}{whole}"


def _exact(prefix: str, point: tuple[fractions.Fraction, fractions.Fraction]) -> dict[str, str]:
    return {f"data-{prefix}x": format_rational(point[0]), f"data-{prefix}y": format_rational(point[1])}


def _segment(parent: ET.Element, css_class: str, start, end, screen: ScreenTransform, **attributes) -> ET.Element:
    (x1, y1), (x2, y2) = screen.apply(start), screen.apply(end)
    element = ET.SubElement(
        parent,
        "line",
        {
            "class": css_class,
            "x1": format_decimal(x1),
            "y1": format_decimal(y1),
            "x2": format_decimal(x2),
            "y2": format_decimal(y2),
            **_exact("1", _planar(start)),
            **_exact("2", _planar(end)),
        },
    )
    for key, value in attributes.items():
        element.set(key.replace("_", "-"), value)
    return element


def render_svg(
    tmap: TropicalMap,
    *,
    unit: int = 40,
    leg_length: fractions.Fraction = fractions.Fraction(1),
    seed: typing.Optional[int] = None,
) -> str:
    """Draw tmap; the seed of the run that produced it, if any, goes into a desc element."""
    if unit <= 0 or leg_length <= 0:
        raise ValueError("unit and leg length must be positive")
    ctype = tmap.type
    screen = ScreenTransform(unit=unit)
    root = ET.Element("svg", {"xmlns": SVG_NAMESPACE, "data-unit": str(unit)})
    if seed is not None:
        ET.SubElement(root, "desc", {"data-seed": str(seed)}).text = f"seed {seed}"
    defs = ET.SubElement(root, "defs")
    marker = ET.SubElement(
        defs, "marker", {"id": "arrow", "viewBox": "0 0 10 10", "refX": "10", "refY": "5", "markerWidth": "6", "markerHeight": "6", "orient": "auto"}
    )
    ET.SubElement(marker, "path", {"d": "M 0 0 L 10 5 L 0 10 z"})

    drawn_points: list[tuple[fractions.Fraction, fractions.Fraction]] = []
    edges = ET.SubElement(root, "g", {"class": "edges", "stroke": "black"})
    for e in ctype.edges:
        start, end = tmap.position_of[e.source], tmap.position_of[e.target]
        weight = max(abs(x) for x in e.slope) if e.slope else 0
        _segment(
            edges,
            "edge",
            start,
            end,
            screen,
            data_edge=e.id,
            data_length=format_rational(tmap.length_of[e.id]),
            stroke_width=str(max(weight, 1)),
        )
        drawn_points += [_planar(start), _planar(end)]

    legs = ET.SubElement(root, "g", {"class": "legs", "stroke": "black"})
    contracted_seen: dict[str, int] = {}
    for leg in sorted(ctype.legs, key=lambda leg: leg.marking):
        start = tmap.position_of[leg.vertex]
        if is_zero_vector(leg.slope):
            n = contracted_seen.get(leg.vertex, 0)
            contracted_seen[leg.vertex] = n + 1
            dx, dy = CONTRACTED_DIRECTIONS[n % len(CONTRACTED_DIRECTIONS)]
            x, y = _planar(start)
            end = (x + dx * leg_length / 2, y + dy * leg_length / 2)
            _segment(legs, "leg contracted", start, end, screen, data_marking=str(leg.marking), stroke_dasharray="4 3")
        else:
            x, y = _planar(start)
            sx, sy = _planar(leg.slope)
            end = (x + leg_length * sx, y + leg_length * sy)
            _segment(legs, "leg", start, end, screen, data_marking=str(leg.marking), marker_end="url(#arrow)")
        drawn_points += [_planar(start), end]

    vertices = ET.SubElement(root, "g", {"class": "vertices"})
    for v in ctype.vertices:
        point = _planar(tmap.position_of[v.id])
        cx, cy = screen.apply(point)
        ET.SubElement(
            vertices,
            "circle",
            {"class": "vertex", "cx": format_decimal(cx), "cy": format_decimal(cy), "r": "3", "data-vertex": v.id, **_exact("", point)},
        )
        drawn_points.append(point)

    xs = [screen.apply(p)[0] for p in drawn_points]
    ys = [screen.apply(p)[1] for p in drawn_points]
    margin = MARGIN_UNITS * unit
    left, top = min(xs) - margin, min(ys) - margin
    width, height = max(xs) - min(xs) + 2 * margin, max(ys) - min(ys) + 2 * margin
    root.set("width", format_decimal(width))
    root.set("height", format_decimal(height))
    root.set("viewBox", " ".join(format_decimal(v) for v in (left, top, width, height)))
    logger.debug("rendered %d vertices, %d edges, %d legs", len(ctype.vertices), len(ctype.edges), len(ctype.legs))
    return ET.tostring(root, encoding="unicode") + "\n"


def _find(root: ET.Element, tag: str) -> list[ET.Element]:
    return root.findall(f".//{{{SVG_NAMESPACE}}}{tag}")


def read_vertex_positions(svg: str) -> dict[str, tuple[fractions.Fraction, fractions.Fraction]]:
    """The exact position of every vertex in a rendered picture."""
    root = ET.fromstring(svg)
    return {c.get("data-vertex"): (parse_rational(c.get("data-x")), parse_rational(c.get("data-y"))) for c in _find(root, "circle")}


def read_segments(svg: str, css_class: str = "edge") -> dict[str, tuple[tuple[fractions.Fraction, ...], tuple[fractions.Fraction, ...], tuple[str, ...]]]:
    """Exact endpoints and decimal screen coordinates of the segments of one class, keyed by edge id or marking."""
    root = ET.fromstring(svg)
    found = {}
    for line in _find(root, "line"):
        if line.get("class") != css_class:
            continue
        key = line.get("data-edge") or line.get("data-marking")
        start = (parse_rational(line.get("data-1x")), parse_rational(line.get("data-1y")))
        end = (parse_rational(line.get("data-2x")), parse_rational(line.get("data-2y")))
        found[key] = (start, end, tuple(line.get(a) for a in ("x1", "y1", "x2", "y2")))
    return found


def read_seed(svg: str) -> typing.Optional[int]:
    desc = ET.fromstring(svg).find(f"{{{SVG_NAMESPACE}}}desc")
    if desc is None:
        return None
    return int(desc.get("data-seed"))
