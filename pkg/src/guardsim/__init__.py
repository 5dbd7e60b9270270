"""Guard deployment and intruder tracking in simple polygons."""

from .geometry import (
    EPS,
    DegenerateInput,
    DegeneratePolygon,
    Point,
    PolyPath,
    Ray,
    SimplePolygon,
    segment_visible,
    shortest_path,
    visibility_polygon,
)

__all__ = [
    "EPS",
    "DegenerateInput",
    "DegeneratePolygon",
    "Point",
    "PolyPath",
    "Ray",
    "SimplePolygon",
    "segment_visible",
    "shortest_path",
    "visibility_polygon",
]
