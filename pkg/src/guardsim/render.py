"""SVG rendering of plans and traces.

Conventions: polygon outline in black, partition fills in a muted palette,
star regions hatched green, dynamic zones translucent orange (64-segment
arcs from the plan payload), road maps as solid blue lines, static guards as
blue dots, intruder trajectory in red.
"""
from __future__ import annotations

import math

from .deploy import DeploymentPlan
from .geometry import SimplePolygon
from .simulate import SimTrace
from .starzones import star_region

PALETTE = ["#dce9f5", "#f5e9dc", "#e3f5dc", "#f5dcE9", "#ecdcf5",
           "#f5f2dc", "#dcf5f0", "#f0dcdc"]


class _Svg:
    def __init__(self, bbox, margin=0.6, scale=48.0):
        x0, y0, x1, y1 = bbox
        self.x0 = x0 - margin
        self.y1 = y1 + margin
        self.scale = scale
        self.w = (x1 - x0 + 2 * margin) * scale
        self.h = (y1 - y0 + 2 * margin) * scale
        self.parts: list[str] = []

    def pt(self, x: float, y: float) -> str:
        return f"{(x - self.x0) * self.scale:.2f},{(self.y1 - y) * self.scale:.2f}"

    def poly(self, pts, fill="none", stroke="black", width=1.5, opacity=1.0,
             dash=None, close=True):
        d = " ".join(self.pt(x, y) for x, y in pts)
        tag = "polygon" if close else "polyline"
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<{tag} points="{d}" fill="{fill}" stroke="{stroke}" '
            f'stroke-width="{width}" fill-opacity="{opacity}"{extra}/>')

    def dot(self, x, y, r=5.0, fill="#1f4fd8"):
        self.parts.append(
            f'<circle cx="{(x - self.x0) * self.scale:.2f}" '
            f'cy="{(self.y1 - y) * self.scale:.2f}" r="{r}" fill="{fill}"/>')

    def text(self, x, y, s, size=12):
        self.parts.append(
            f'<text x="{(x - self.x0) * self.scale:.2f}" '
            f'y="{(self.y1 - y) * self.scale:.2f}" font-size="{size}" '
            f'font-family="sans-serif">{s}</text>')

    def dumps(self) -> str:
        return (f'<svg xmlns="http://www.w3.org/2000/svg" '
                f'width="{self.w:.0f}" height="{self.h:.0f}">\n'
                + "\n".join(self.parts) + "\n</svg>\n")


def render_plan(plan: DeploymentPlan, trace: SimTrace | None = None) -> str:
    P = plan.polygon
    svg = _Svg(P.bbox)
    pieces = [a.polygon for a in plan.assignments]
    for k, piece in enumerate(pieces):
        svg.poly([(v.x, v.y) for v in piece.vertices],
                 fill=PALETTE[k % len(PALETTE)], stroke="#999", width=0.8)
    for piece in pieces:
        for i in piece.reflex_vertices():
            try:
                sr = star_region(piece, i)
            except Exception:
                continue
            svg.poly([(v.x, v.y) for v in sr.region.vertices],
                     fill="#3fae5a", stroke="#2d7a40", width=0.6, opacity=0.25)
    for a in plan.assignments:
        if a.mode != "mobile":
            continue
        for z in a.zones:
            outline = z.boundary_polygon(a.polygon)
            if outline is not None:
                svg.poly([(v.x, v.y) for v in outline.vertices],
                         fill="#f28c28", stroke="#b35f00", width=0.6, opacity=0.3)
        wps = a.road_map.path.waypoints
        svg.poly([(p.x, p.y) for p in wps], stroke="#1f4fd8", width=3.0,
                 close=False)
        for st in a.road_map.stations:
            svg.dot(st.point.x, st.point.y, r=4.0, fill="#14337f")
    svg.poly([(v.x, v.y) for v in P.vertices], stroke="black", width=2.0)
    for a in plan.assignments:
        if a.mode == "static":
            svg.dot(a.position.x, a.position.y, r=5.0)
    if trace is not None and len(trace.records) > 1:
        svg.poly([r.intruder for r in trace.records], stroke="#c62828",
                 width=1.5, close=False)
        for gi in range(len(trace.records[0].guards)):
            svg.poly([r.guards[gi] for r in trace.records], stroke="#1f4fd8",
                     width=1.0, close=False, dash="4,3")
        bx, by = trace.records[-1].intruder
        svg.dot(bx, by, r=4.0, fill="#c62828")
    label = (f"guards={plan.guard_total} bound&lt;{plan.bound} "
             f"({plan.bound_kind}) v*={plan.global_v_star:.4g}")
    svg.text(P.bbox[0], P.bbox[3] + 0.35, label)
    return svg.dumps()
