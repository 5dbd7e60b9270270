"""Per-partition guard assignment and the whole-polygon deployment plan.

Case ladder per partition: a nonempty kernel (the polygon is star-shaped)
gets one static guard at the kernel centroid; otherwise the star regions of
the reflex vertices drive a mobile guard with a road map, dynamic zones, and
the minimum speed from the min-max program.  Nonagons are first split into a
pentagon (static guard) and a hexagon (recursed).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import DegenerateInput, Point, SimplePolygon, visibility_polygon
from .partition import (
    PartitionSet,
    guard_budget,
    minimal_partition,
    nonagon_split,
)
from .starzones import (
    DynamicZone,
    RoadMap,
    SpeedBound,
    StarRegion,
    UnsupportedStarTopology,
    build_dynamic_zones,
    build_road_map,
    speed_bound,
    star_region,
)


class CoverageGapError(RuntimeError):
    """Diagnostic: a piece that should admit one static guard does not."""


@dataclass(frozen=True)
class GuardAssignment:
    partition_id: int
    polygon: SimplePolygon
    mode: str                                # "static" | "mobile"
    position: Point | None = None            # static guards
    road_map: RoadMap | None = None          # mobile guards
    zones: tuple[DynamicZone, ...] = ()
    v_star: float = 0.0

    def initial_position(self) -> Point:
        if self.mode == "static":
            return self.position
        return self.road_map.anchor()


@dataclass(frozen=True)
class DeploymentPlan:
    polygon: SimplePolygon
    assignments: tuple[GuardAssignment, ...]
    ve: float
    global_v_star: float
    guard_total: int
    bound: int
    bound_kind: str                          # "n/3" | "n/4"
    satisfies_bound: bool
    partition_set: PartitionSet | None = None
    quad_group_sizes: tuple[int, ...] = ()   # orthogonal pipeline metadata
    quad_leftover: int = 0

    def mobile_assignments(self) -> tuple[GuardAssignment, ...]:
        return tuple(a for a in self.assignments if a.mode == "mobile")


def polygon_kernel(P: SimplePolygon) -> SimplePolygon | None:
    """Intersection of all edge half-planes: nonempty iff P is star-shaped."""
    x0, y0, x1, y1 = P.bbox
    pad = 1.0 + max(x1 - x0, y1 - y0)
    ring = [(x0 - pad, y0 - pad), (x1 + pad, y0 - pad),
            (x1 + pad, y1 + pad), (x0 - pad, y1 + pad)]
    for i in range(P.n):
        a, b = P.edge(i)
        out = []
        m = len(ring)
        for k in range(m):
            p, q = ring[k], ring[(k + 1) % m]
            vp = (b.x - a.x) * (p[1] - a.y) - (b.y - a.y) * (p[0] - a.x)
            vq = (b.x - a.x) * (q[1] - a.y) - (b.y - a.y) * (q[0] - a.x)
            if vp >= -1e-12:
                out.append(p)
            if (vp > 1e-12 and vq < -1e-12) or (vp < -1e-12 and vq > 1e-12):
                t = vp / (vp - vq)
                out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
        ring = out
        if len(ring) < 3:
            return None
    from .geometry import _clean_ring
    ring = _clean_ring(ring, P.diameter)
    if len(ring) < 3:
        return None
    try:
        return SimplePolygon(ring)
    except Exception:
        return None


def _kernel_anchor(kernel: SimplePolygon) -> Point:
    c = kernel.centroid
    if kernel.contains(c):
        return c
    return kernel.vertices[0]


def covers_whole(piece: SimplePolygon, g: Point, rel_tol: float = 1e-9) -> bool:
    vis = visibility_polygon(piece, g)
    return vis.area >= piece.area * (1 - rel_tol)


def _static_assignment(pid: int, piece: SimplePolygon) -> GuardAssignment | None:
    kernel = polygon_kernel(piece)
    if kernel is None:
        return None
    g = _kernel_anchor(kernel)
    if not covers_whole(piece, g):
        raise CoverageGapError(
            f"kernel point of partition {pid} fails the visibility area check")
    return GuardAssignment(pid, piece, "static", position=g)


def deploy_piece(pid: int, piece: SimplePolygon, ve: float) -> GuardAssignment:
    """Static guard when the piece is star-shaped, mobile guard otherwise."""
    static = _static_assignment(pid, piece)
    if static is not None:
        return static
    regions = [star_region(piece, i) for i in piece.reflex_vertices()]
    road_map = build_road_map(piece, regions)
    if road_map.is_static:
        g = road_map.anchor()
        if not covers_whole(piece, g):
            raise CoverageGapError(
                f"static star anchor of partition {pid} fails coverage")
        return GuardAssignment(pid, piece, "static", position=g)
    sb = speed_bound(piece, road_map, ve=ve)
    zones = build_dynamic_zones(piece, road_map, ve=ve, vp=sb.v_star)
    return GuardAssignment(pid, piece, "mobile", road_map=road_map,
                           zones=tuple(zones), v_star=sb.v_star)


def deploy_partition(partition: SimplePolygon, ve: float = 1.0,
                     pid: int = 0) -> list[GuardAssignment]:
    """One guard for a hexagon / septagon / octagon (or smaller star-shaped piece)."""
    if partition.n == 9:
        return deploy_nonagon(partition, ve=ve, pid=pid)
    return [deploy_piece(pid, partition, ve)]


def deploy_nonagon(partition: SimplePolygon, ve: float = 1.0,
                   pid: int = 0) -> list[GuardAssignment]:
    """Pentagon half gets a static guard; hexagon half is deployed normally."""
    if partition.n != 9:
        raise DegenerateInput("deploy_nonagon expects a 9-gon")
    pent, hexa = nonagon_split(partition)
    static = _static_assignment(pid, pent)
    if static is None:
        raise CoverageGapError(
            "nonagon pentagon half is not star-shaped; no single static guard")
    return [static] + [deploy_piece(pid + 1, hexa, ve)]


def deploy_from_partition_set(ps: PartitionSet, ve: float = 1.0) -> DeploymentPlan:
    assignments: list[GuardAssignment] = []
    per_partition: list[int] = []
    pid = 0
    for piece in ps.partitions:
        got = deploy_partition(piece.polygon, ve=ve, pid=pid)
        pid += len(got)
        assignments.extend(got)
        per_partition.append(len(got))
    if ps.remainder is not None:
        static = _static_assignment(pid, ps.remainder.polygon)
        if static is None:
            raise CoverageGapError("remainder piece is not star-shaped")
        assignments.append(static)
        pid += 1
    total, bound, ok = guard_budget(ps, per_partition)
    assert total == len(assignments)
    global_v = max((a.v_star for a in assignments), default=0.0)
    return DeploymentPlan(
        polygon=ps.polygon,
        assignments=tuple(assignments),
        ve=ve,
        global_v_star=global_v,
        guard_total=total,
        bound=bound,
        bound_kind="n/3",
        satisfies_bound=ok,
        partition_set=ps,
    )


def deploy_polygon(P: SimplePolygon, ve: float = 1.0) -> DeploymentPlan:
    """Full pipeline: minimal partition, per-piece guards, budget check."""
    return deploy_from_partition_set(minimal_partition(P), ve=ve)
