"""Named polygon fixtures used by tests, scripts, and demos.

Everything here is deterministic: fixed coordinates or seeded construction.
"""
from __future__ import annotations

import math

from .geometry import Point, SimplePolygon


def l_hexagon() -> SimplePolygon:
    """L-shaped orthogonal hexagon with a single reflex corner at (2, 2)."""
    return SimplePolygon([(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)])


def crown_hexagon() -> SimplePolygon:
    """Hexagon with two reflex vertices whose star regions are disjoint."""
    return SimplePolygon([(0, 0), (6, 0), (6, 4), (5, 1), (1, 1), (0, 4)])


def hexagon_three_reflex() -> SimplePolygon:
    """Triangle with all three edges dented inward (three reflex vertices)."""
    return SimplePolygon([(0, 0), (8, 4), (16, 0), (11, 6.4), (8, 14), (5, 6.4)])


def septagon_three_stars() -> SimplePolygon:
    """Septagon with three reflex vertices (dented triangle, one corner chamfered)."""
    return SimplePolygon(
        [(0, 0), (8, 4), (14.8, 0.6), (15.25, 0.96), (11, 6.4), (8, 14), (5, 6.4)])


def comb_three_teeth() -> SimplePolygon:
    """13-gon: room with three narrow teeth; star regions pairwise disjoint."""
    return SimplePolygon([
        (0, 0), (16, 0), (16, 6), (14, 6), (13, 1), (12, 6), (9, 6), (8, 1),
        (7, 6), (4, 6), (3, 1), (2, 6), (0, 6),
    ])


def snake_corridor() -> SimplePolygon:
    """12-gon S-shaped corridor (width 1, three legs)."""
    return SimplePolygon([
        (0, 0), (12, 0), (12, 5), (2, 5), (2, 8), (12, 8), (12, 9), (1, 9),
        (1, 4), (11, 4), (11, 1), (0, 1),
    ])


def nonagon_with_notch() -> SimplePolygon:
    """9-gon, convex except for one notch vertex."""
    return SimplePolygon(
        [(0, 0), (5, -1), (10, 0), (12, 4), (10, 8), (5, 9), (0, 8), (2.5, 4.5), (-1, 3)])


def convex_ngon(n: int, seed: int = 0) -> SimplePolygon:
    """Convex n-gon: points in angular order on an ellipse with jittered angles."""
    phase = 0.37 * seed
    pts = []
    for k in range(n):
        base = 2 * math.pi * k / n
        jitter = 0.25 * (2 * math.pi / n) * math.sin(3.7 * k + phase)
        th = base + jitter
        pts.append((6.0 * math.cos(th), 4.5 * math.sin(th)))
    return SimplePolygon(pts)


def staircase(steps: int = 3) -> SimplePolygon:
    """Orthogonal staircase with ``steps`` steps (2*steps + 2 vertices)."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    pts = [(0.0, 0.0), (float(steps), 0.0)]
    for k in range(steps, 0, -1):
        pts.append((float(k), float(steps - k + 1)))
        pts.append((float(k - 1), float(steps - k + 1)))
    return SimplePolygon(pts)


def twenty_gon() -> SimplePolygon:
    """20-gon: rectangle with four rectangular notches (orthogonal)."""
    return SimplePolygon([
        (0, 0), (3, 0), (3, 3), (5, 3), (5, 0), (11, 0), (11, 3), (13, 3), (13, 0),
        (16, 0), (16, 10), (13, 10), (13, 7), (11, 7), (11, 10), (5, 10), (5, 7),
        (3, 7), (3, 10), (0, 10),
    ])


def plus_sign() -> SimplePolygon:
    """Plus-shaped orthogonal 12-gon; quadrilateralizes to a degree-4 star."""
    return SimplePolygon([
        (2, 0), (4, 0), (4, 2), (6, 2), (6, 4), (4, 4), (4, 6), (2, 6), (2, 4),
        (0, 4), (0, 2), (2, 2),
    ])


def plus_sign_quads() -> list[tuple[int, int, int, int]]:
    """Convex quadrilateralization of ``plus_sign`` (vertex indices)."""
    return [(0, 1, 2, 11), (2, 3, 4, 5), (11, 2, 5, 8), (5, 6, 7, 8), (8, 9, 10, 11)]


def rectangle(w: float = 4.0, h: float = 2.0) -> SimplePolygon:
    return SimplePolygon([(0, 0), (w, 0), (w, h), (0, h)])


def corpus() -> dict[str, SimplePolygon]:
    """Acceptance corpus: >= 20 fixtures across the shapes the suite exercises."""
    shapes: dict[str, SimplePolygon] = {}
    for n in range(10, 25):
        shapes[f"convex_{n}"] = convex_ngon(n, seed=n)
    shapes["l_hexagon"] = l_hexagon()
    shapes["crown_hexagon"] = crown_hexagon()
    shapes["hexagon_three_reflex"] = hexagon_three_reflex()
    shapes["septagon_three_stars"] = septagon_three_stars()
    shapes["comb_three_teeth"] = comb_three_teeth()
    shapes["snake_corridor"] = snake_corridor()
    shapes["nonagon_with_notch"] = nonagon_with_notch()
    shapes["staircase_3"] = staircase(3)
    shapes["staircase_8"] = staircase(8)
    shapes["twenty_gon"] = twenty_gon()
    shapes["plus_sign"] = plus_sign()
    return shapes


def orthogonal_corpus() -> dict[str, SimplePolygon]:
    return {
        "rectangle": rectangle(),
        "l_hexagon": l_hexagon(),
        "staircase_3": staircase(3),
        "staircase_8": staircase(8),
        "plus_sign": plus_sign(),
        "twenty_gon": twenty_gon(),
    }
