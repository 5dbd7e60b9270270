"""2-D geometry kernel: points, simple polygons, visibility, geodesics.

All boundary decisions use a single world-unit tolerance ``EPS`` (1e-9 by
default, overridable through the ``GUARDSIM_EPS`` environment variable).
Points within EPS of the boundary count as inside; a line of sight may graze
the boundary, including passing exactly through a reflex corner.
"""
from __future__ import annotations

import heapq
import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from numba import njit

EPS = float(os.environ.get("GUARDSIM_EPS", "1e-9"))

# parameter-space tolerance for intersection bookkeeping (dimensionless)
_PAR_TOL = 1e-12


@njit(cache=True)
def _contains_kernel(px: float, py: float, edges: np.ndarray, tol: float) -> bool:
    n = edges.shape[0]
    inside = False
    for i in range(n):
        ax, ay = edges[i, 0, 0], edges[i, 0, 1]
        bx, by = edges[i, 1, 0], edges[i, 1, 1]
        ex, ey = bx - ax, by - ay
        seg2 = ex * ex + ey * ey
        t = ((px - ax) * ex + (py - ay) * ey) / seg2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        dx = px - (ax + t * ex)
        dy = py - (ay + t * ey)
        if dx * dx + dy * dy <= tol * tol:
            return True
        if (ay > py) != (by > py):
            xint = ax + (py - ay) * ex / ey
            if px < xint:
                inside = not inside
    return inside


@njit(cache=True)
def _contains_many_kernel(pts: np.ndarray, edges: np.ndarray,
                          tol: float) -> np.ndarray:
    out = np.empty(pts.shape[0], dtype=np.bool_)
    for k in range(pts.shape[0]):
        out[k] = _contains_kernel(pts[k, 0], pts[k, 1], edges, tol)
    return out


@njit(cache=True)
def _segment_inside_kernel(ax: float, ay: float, bx: float, by: float,
                           edges: np.ndarray, tol: float) -> bool:
    if not _contains_kernel(ax, ay, edges, tol):
        return False
    if not _contains_kernel(bx, by, edges, tol):
        return False
    abx, aby = bx - ax, by - ay
    length = math.hypot(abx, aby)
    if length <= tol:
        return True
    n = edges.shape[0]
    ts = np.empty(2 * n + 2 + 4 * n)
    count = 0
    ts[count] = 0.0
    count += 1
    ts[count] = 1.0
    count += 1
    for i in range(n):
        cx, cy = edges[i, 0, 0], edges[i, 0, 1]
        dx, dy = edges[i, 1, 0], edges[i, 1, 1]
        rx, ry = dx - cx, dy - cy
        denom = abx * ry - aby * rx
        acx, acy = cx - ax, cy - ay
        if abs(denom) > 1e-12:
            t = (acx * ry - acy * rx) / denom
            s = (acx * aby - acy * abx) / denom
            if -1e-12 < t < 1.0 + 1e-12 and -1e-12 < s < 1.0 + 1e-12:
                tt = t
                if tt < 0.0:
                    tt = 0.0
                elif tt > 1.0:
                    tt = 1.0
                ts[count] = tt
                count += 1
        else:
            perp = abs(acx * aby - acy * abx) / length
            if perp <= tol:
                for qx, qy in ((cx, cy), (dx, dy)):
                    t = ((qx - ax) * abx + (qy - ay) * aby) / (length * length)
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                    ts[count] = t
                    count += 1
    sub = np.sort(ts[:count])
    prev = sub[0]
    for k in range(1, count):
        cur = sub[k]
        if cur - prev > 1e-12:
            mx = ax + (prev + cur) * 0.5 * abx
            my = ay + (prev + cur) * 0.5 * aby
            if not _contains_kernel(mx, my, edges, tol):
                return False
            prev = cur
    return True


class DegeneratePolygon(ValueError):
    """Raised when a vertex ring fails simple-polygon validation."""


class DegenerateInput(ValueError):
    """Raised when an operation's geometric precondition is violated."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DegenerateInput(f"non-finite point ({self.x}, {self.y})")

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)

    def dist(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Ray:
    """Half-line from ``origin`` along a unit ``direction``."""

    origin: Point
    direction: tuple[float, float]

    def __post_init__(self):
        dx, dy = self.direction
        norm = math.hypot(dx, dy)
        if abs(norm - 1.0) > 1e-12:
            raise DegenerateInput(f"ray direction not unit length: {norm}")

    def point_at(self, t: float) -> Point:
        return Point(self.origin.x + t * self.direction[0],
                     self.origin.y + t * self.direction[1])


def make_ray(origin: Point, toward: tuple[float, float]) -> Ray:
    """Ray from origin in the (unnormalized) direction ``toward``."""
    n = math.hypot(*toward)
    if n <= 0:
        raise DegenerateInput("zero ray direction")
    return Ray(origin, (toward[0] / n, toward[1] / n))


def cross(ox: float, oy: float, ax: float, ay: float, bx: float, by: float) -> float:
    """Twice the signed area of triangle (o, a, b)."""
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def orient(o: Point, a: Point, b: Point) -> float:
    return cross(o.x, o.y, a.x, a.y, b.x, b.y)


def _ring_signed_area(pts: Sequence[Point]) -> float:
    s = 0.0
    n = len(pts)
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        s += a.x * b.y - b.x * a.y
    return 0.5 * s


def _segments_properly_cross(a: Point, b: Point, c: Point, d: Point) -> bool:
    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    return (o1 * o2 < 0) and (o3 * o4 < 0)


def _point_on_segment(p: Point, a: Point, b: Point, tol: float) -> bool:
    abx, aby = b.x - a.x, b.y - a.y
    apx, apy = p.x - a.x, p.y - a.y
    seg2 = abx * abx + aby * aby
    if seg2 == 0.0:
        return p.dist(a) <= tol
    t = (apx * abx + apy * aby) / seg2
    t = min(1.0, max(0.0, t))
    qx, qy = a.x + t * abx, a.y + t * aby
    return math.hypot(p.x - qx, p.y - qy) <= tol


class SimplePolygon:
    """Counterclockwise simple polygon with per-vertex reflex classification.

    Construction validates: n >= 3, finite coordinates, no repeated or
    collinear consecutive vertices, positive signed area, and no
    self-intersections.  Instances are immutable.
    """

    __slots__ = ("vertices", "n", "reflex_flags", "_cache")

    def __init__(self, vertices: Iterable[Point | tuple[float, float]]):
        pts = tuple(v if isinstance(v, Point) else Point(float(v[0]), float(v[1]))
                    for v in vertices)
        if len(pts) < 3:
            raise DegeneratePolygon("polygon needs at least 3 vertices")
        n = len(pts)
        scale = max(max(abs(p.x), abs(p.y)) for p in pts) + 1.0
        dup_tol = scale * 1e-12
        for i in range(n):
            if pts[i].dist(pts[(i + 1) % n]) <= dup_tol:
                raise DegeneratePolygon(f"repeated consecutive vertex at index {i}")
        area2 = 2.0 * _ring_signed_area(pts)
        if area2 <= 0:
            raise DegeneratePolygon("vertices must wind counterclockwise")
        col_tol = scale * scale * 1e-12
        flags = []
        for i in range(n):
            c = orient(pts[i - 1], pts[i], pts[(i + 1) % n])
            if abs(c) <= col_tol:
                raise DegeneratePolygon(f"collinear consecutive vertices at index {i}")
            flags.append(c < 0)
        for i in range(n):
            a, b = pts[i], pts[(i + 1) % n]
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue
                c, d = pts[j], pts[(j + 1) % n]
                if _segments_properly_cross(a, b, c, d):
                    raise DegeneratePolygon(f"edges {i} and {j} intersect")
                # improper contact between non-adjacent edges also breaks simplicity
                if (_point_on_segment(c, a, b, dup_tol) or _point_on_segment(d, a, b, dup_tol)
                        or _point_on_segment(a, c, d, dup_tol) or _point_on_segment(b, c, d, dup_tol)):
                    raise DegeneratePolygon(f"edges {i} and {j} touch")
        self.vertices = pts
        self.n = n
        self.reflex_flags = tuple(flags)
        self._cache: dict = {}

    @classmethod
    def from_coords(cls, coords: Sequence[Sequence[float]]) -> "SimplePolygon":
        """Build from raw coordinate pairs, reversing clockwise input."""
        pts = [Point(float(c[0]), float(c[1])) for c in coords]
        if len(pts) >= 3 and _ring_signed_area(pts) < 0:
            pts.reverse()
        return cls(pts)

    # -- cached derived data ------------------------------------------------

    def _edges_array(self) -> np.ndarray:
        arr = self._cache.get("edges")
        if arr is None:
            v = np.array([(p.x, p.y) for p in self.vertices])
            arr = np.stack([v, np.roll(v, -1, axis=0)], axis=1)  # (n, 2, 2)
            self._cache["edges"] = arr
        return arr

    @property
    def area(self) -> float:
        a = self._cache.get("area")
        if a is None:
            a = _ring_signed_area(self.vertices)
            self._cache["area"] = a
        return a

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        b = self._cache.get("bbox")
        if b is None:
            xs = [p.x for p in self.vertices]
            ys = [p.y for p in self.vertices]
            b = (min(xs), min(ys), max(xs), max(ys))
            self._cache["bbox"] = b
        return b

    @property
    def diameter(self) -> float:
        x0, y0, x1, y1 = self.bbox
        return math.hypot(x1 - x0, y1 - y0)

    @property
    def centroid(self) -> Point:
        c = self._cache.get("centroid")
        if c is None:
            cx = cy = 0.0
            for i in range(self.n):
                a, b = self.vertices[i], self.vertices[(i + 1) % self.n]
                w = a.x * b.y - b.x * a.y
                cx += (a.x + b.x) * w
                cy += (a.y + b.y) * w
            cx /= 6.0 * self.area
            cy /= 6.0 * self.area
            c = Point(cx, cy)
            self._cache["centroid"] = c
        return c

    def reflex_vertices(self) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(self.reflex_flags) if f)

    def is_convex(self) -> bool:
        return not any(self.reflex_flags)

    def edge(self, i: int) -> tuple[Point, Point]:
        return self.vertices[i], self.vertices[(i + 1) % self.n]

    # -- predicates ---------------------------------------------------------

    def contains(self, p: Point, tol: float | None = None) -> bool:
        """True iff ``p`` is inside or within ``tol`` of the boundary."""
        return bool(_contains_kernel(p.x, p.y, self._edges_array(),
                                     EPS if tol is None else tol))

    def contains_many(self, pts: np.ndarray, tol: float | None = None) -> np.ndarray:
        """Vectorized containment for an (m, 2) array of points."""
        pts = np.ascontiguousarray(pts, dtype=np.float64)
        return _contains_many_kernel(pts, self._edges_array(),
                                     EPS if tol is None else tol)

    def distance_to_boundary(self, p: Point) -> float:
        """Unsigned distance from p to the nearest boundary point."""
        e = self._edges_array()
        ax, ay = e[:, 0, 0], e[:, 0, 1]
        ex, ey = e[:, 1, 0] - ax, e[:, 1, 1] - ay
        seg2 = ex * ex + ey * ey
        t = np.clip(((p.x - ax) * ex + (p.y - ay) * ey) / seg2, 0.0, 1.0)
        dx = p.x - (ax + t * ex)
        dy = p.y - (ay + t * ey)
        return float(np.sqrt(dx * dx + dy * dy).min())

    def strictly_contains(self, p: Point, margin: float | None = None) -> bool:
        """Inside and at least ``margin`` (default EPS) away from the boundary."""
        m = EPS if margin is None else margin
        return self.contains(p) and self.distance_to_boundary(p) > m

    def segment_inside(self, a: Point, b: Point, tol: float | None = None) -> bool:
        """True iff segment ab stays inside the closed polygon (grazing allowed).

        All boundary touch points split the segment; every open sub-segment
        must have its midpoint inside.
        """
        return bool(_segment_inside_kernel(a.x, a.y, b.x, b.y, self._edges_array(),
                                           EPS if tol is None else tol))

    def __repr__(self) -> str:
        return f"SimplePolygon({[(p.x, p.y) for p in self.vertices]})"

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplePolygon) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)


def contains(P: SimplePolygon, p: Point) -> bool:
    return P.contains(p)


def segment_visible(P: SimplePolygon, a: Point, b: Point) -> bool:
    """Mutual visibility: the line of sight ab is contained in closed P."""
    return P.segment_inside(a, b)


# -- visibility polygon -----------------------------------------------------

def _ray_nearest_hit(P: SimplePolygon, ox: float, oy: float,
                     dx: float, dy: float, t_min: float) -> tuple[float, int]:
    """Nearest boundary intersection of ray (o, d) with t > t_min.

    Returns (t, edge_index); t = inf when nothing is hit.
    """
    e = P._edges_array()
    ax, ay = e[:, 0, 0], e[:, 0, 1]
    bx, by = e[:, 1, 0], e[:, 1, 1]
    rx, ry = bx - ax, by - ay
    denom = dx * ry - dy * rx
    with np.errstate(divide="ignore", invalid="ignore"):
        t = ((ax - ox) * ry - (ay - oy) * rx) / denom
        s = ((ax - ox) * dy - (ay - oy) * dx) / denom
    ok = (np.abs(denom) > _PAR_TOL) & (s >= -_PAR_TOL) & (s <= 1 + _PAR_TOL) & (t > t_min)
    if not ok.any():
        return math.inf, -1
    t = np.where(ok, t, np.inf)
    idx = int(np.argmin(t))
    return float(t[idx]), idx


def _angle_in_ccw_cone(theta: float, lo: float, hi: float) -> bool:
    """Is angle theta strictly inside the CCW cone from lo to hi?"""
    span = (hi - lo) % (2 * math.pi)
    off = (theta - lo) % (2 * math.pi)
    return 1e-12 < off < span - 1e-12


def _clean_ring(pts: list[tuple[float, float]], scale: float) -> list[tuple[float, float]]:
    """Drop consecutive duplicates and collinear middle points."""
    tol = scale * 1e-9
    out: list[tuple[float, float]] = []
    for p in pts:
        if not out or math.hypot(p[0] - out[-1][0], p[1] - out[-1][1]) > tol:
            out.append(p)
    while len(out) > 1 and math.hypot(out[0][0] - out[-1][0], out[0][1] - out[-1][1]) <= tol:
        out.pop()
    # collinear removal, wrapping
    changed = True
    while changed and len(out) > 3:
        changed = False
        for i in range(len(out)):
            a = out[i - 1]
            b = out[i]
            c = out[(i + 1) % len(out)]
            if abs(cross(a[0], a[1], b[0], b[1], c[0], c[1])) <= scale * tol:
                out.pop(i)
                changed = True
                break
    return out


def visibility_polygon(P: SimplePolygon, p: Point) -> SimplePolygon:
    """Star-shaped region of all points of P visible from p.

    Exact angular sweep: all visibility transitions happen at vertex angles,
    so the visible edge is constant on each arc between consecutive vertex
    angles and its extent is recovered by ray/line intersection.  p may lie
    on the boundary (in particular at a reflex vertex).
    """
    if not P.contains(p):
        raise DegenerateInput("viewpoint outside polygon")
    scale = P.diameter
    t_min = scale * 1e-12

    # classify the viewpoint: interior, at a vertex, or on an edge
    at_vertex = None
    for i, v in enumerate(P.vertices):
        if p.dist(v) <= EPS:
            at_vertex = i
            break
    on_edge = None
    if at_vertex is None:
        for i in range(P.n):
            a, b = P.edge(i)
            if _point_on_segment(p, a, b, EPS):
                on_edge = i
                break

    # interior-direction cone for boundary viewpoints
    cone = None
    if at_vertex is not None:
        nxt = P.vertices[(at_vertex + 1) % P.n]
        prv = P.vertices[at_vertex - 1]
        lo = math.atan2(nxt.y - p.y, nxt.x - p.x)
        hi = math.atan2(prv.y - p.y, prv.x - p.x)
        cone = (lo, hi)
    elif on_edge is not None:
        a, b = P.edge(on_edge)
        lo = math.atan2(b.y - a.y, b.x - a.x)
        hi = math.atan2(a.y - b.y, a.x - b.x)
        cone = (lo, hi)

    angles = sorted({math.atan2(v.y - p.y, v.x - p.x)
                     for v in P.vertices if p.dist(v) > t_min})
    if len(angles) < 2:
        raise DegenerateInput("degenerate viewpoint")

    m = len(angles)
    arcs: list[tuple[int, float, list[tuple[float, float]] | None]] = []
    for k in range(m):
        a0 = angles[k]
        a1 = angles[(k + 1) % m]
        span = (a1 - a0) % (2 * math.pi)
        if span <= 1e-12:
            continue
        mid = a0 + span / 2.0
        pts: list[tuple[float, float]] | None = None
        if cone is None or _angle_in_ccw_cone(mid, cone[0], cone[1]):
            t, ei = _ray_nearest_hit(P, p.x, p.y, dx=math.cos(mid), dy=math.sin(mid),
                                     t_min=t_min)
            if math.isfinite(t):
                a, b = P.edge(ei)
                rx, ry = b.x - a.x, b.y - a.y
                pts = []
                for ang in (a0, a1):
                    dx_, dy_ = math.cos(ang), math.sin(ang)
                    denom = dx_ * ry - dy_ * rx
                    if abs(denom) <= _PAR_TOL:
                        pts = None
                        break
                    tt = ((a.x - p.x) * ry - (a.y - p.y) * rx) / denom
                    pts.append((p.x + tt * dx_, p.y + tt * dy_))
        arcs.append((k, span, pts))

    used = [i for i, (_, _, pts) in enumerate(arcs) if pts is not None]
    if not used:
        raise DegenerateInput("empty visibility region")
    start = 0
    if cone is not None and len(used) < len(arcs):
        # rotate so the ring starts right after the widest skipped run; the
        # viewpoint itself closes the ring across that angular gap
        best_gap, gap_width = None, -1.0
        na = len(arcs)
        for i in used:
            j = (i - 1) % na
            width = 0.0
            while arcs[j][2] is None:
                width += arcs[j][1]
                j = (j - 1) % na
            if width > gap_width:
                gap_width, best_gap = width, i
        start = used.index(best_gap)
    ring: list[tuple[float, float]] = []
    for i in used[start:] + used[:start]:
        ring.extend(arcs[i][2])
    if cone is not None:
        ring.append((p.x, p.y))

    out = _clean_ring(ring, scale)
    if len(out) < 3:
        raise DegenerateInput("empty visibility region")
    return SimplePolygon(out)


# -- geodesics --------------------------------------------------------------

@dataclass(frozen=True)
class PolyPath:
    """Piecewise-linear path; every segment lies inside its source polygon."""

    waypoints: tuple[Point, ...]
    total_length: float

    @staticmethod
    def through(points: Sequence[Point]) -> "PolyPath":
        length = sum(points[i].dist(points[i + 1]) for i in range(len(points) - 1))
        return PolyPath(tuple(points), length)

    def point_at_arclength(self, s: float) -> Point:
        if len(self.waypoints) == 1 or s <= 0:
            return self.waypoints[0]
        remaining = s
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            seg = a.dist(b)
            if remaining <= seg:
                if seg == 0:
                    return a
                f = remaining / seg
                return Point(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y))
            remaining -= seg
        return self.waypoints[-1]


def shortest_path(P: SimplePolygon, a: Point, b: Point) -> PolyPath:
    """Geodesic between two interior points via the reflex visibility graph."""
    if not P.contains(a) or not P.contains(b):
        raise DegenerateInput("geodesic endpoints must lie inside the polygon")
    if a.dist(b) <= EPS:
        return PolyPath((a,), 0.0)
    if P.segment_inside(a, b):
        return PolyPath.through([a, b])
    nodes: list[Point] = [a, b] + [P.vertices[i] for i in P.reflex_vertices()]
    m = len(nodes)
    adj: list[list[tuple[int, float]]] = [[] for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if P.segment_inside(nodes[i], nodes[j]):
                d = nodes[i].dist(nodes[j])
                adj[i].append((j, d))
                adj[j].append((i, d))
    dist = [math.inf] * m
    prev = [-1] * m
    dist[0] = 0.0
    pq = [(0.0, 0)]
    while pq:
        d, u = heapq.heappop(pq)
        if d > dist[u] + 1e-15:
            continue
        if u == 1:
            break
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v] - 1e-15:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(pq, (nd, v))
    if not math.isfinite(dist[1]):
        raise DegenerateInput("no geodesic found (disconnected visibility graph)")
    path = []
    u = 1
    while u != -1:
        path.append(nodes[u])
        u = prev[u]
    path.reverse()
    return PolyPath.through(path)
