"""Star regions, road maps, dynamic zones, and guard-speed bounds.

Model notes (kept in one place because everything below leans on them):

* The star region of a reflex vertex O is the set of points whose line of
  sight to O stays in the polygon and which lie in the closed wedge spanned
  by the extensions of O's two incident edges.  A guard anywhere in that
  wedge is never occluded by O: the continuation of its sight line past O
  lands in the exterior notch.

* A road map is a polyline visiting "stations", each placed in one star
  region or in an intersection of several.  Between trips the guard idles at
  a rest anchor.  Every reflex corner c gets one dynamic zone: a trigger
  region whose occupancy maps the guard linearly from the rest anchor onto
  the station covering c.  Anchoring all zones of a corridor at the same
  rest point is what makes adjacent zone boundaries consistent.

* Zone radii scale as r_i = (ve/vp) * d_i where d_i is the arc the guard
  must cover.  Radii are capped by reflex-vertex separations: each radius by
  the distance from its corner to the rest corner (or nearest other reflex
  vertex when the rest anchor is not a corner), and sums of radii anchored
  at the same rest by the corners' mutual distance.  The minimum feasible
  guard speed is found by bisection on these linear constraints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import shapely.geometry as sg

from .geometry import (
    EPS,
    DegenerateInput,
    Point,
    PolyPath,
    Ray,
    SimplePolygon,
    make_ray,
    segment_visible,
    visibility_polygon,
)


class NotReflex(ValueError):
    pass


class SpeedTooLow(ValueError):
    """Requested guard speed cannot satisfy the zone separation constraints."""


class Infeasible(ValueError):
    """Constraint set admits no positive radii (degenerate geometry)."""


class UnsupportedStarTopology(ValueError):
    """More than three pairwise-disjoint star regions in one piece."""


# -- star regions -------------------------------------------------------------


@dataclass(frozen=True)
class StarRegion:
    owner_vertex: int
    apex: Point
    region: SimplePolygon

    def contains(self, p: Point, tol: float | None = None) -> bool:
        return self.region.contains(p, tol)


def _clip_halfplane(ring: list[tuple[float, float]], o: Point, u: tuple[float, float],
                    keep_positive: bool) -> list[tuple[float, float]]:
    """Sutherland-Hodgman clip against cross(u, q - o) >= 0 (or <= 0)."""
    def val(q):
        v = u[0] * (q[1] - o.y) - u[1] * (q[0] - o.x)
        return v if keep_positive else -v

    out: list[tuple[float, float]] = []
    m = len(ring)
    for i in range(m):
        a, b = ring[i], ring[(i + 1) % m]
        va, vb = val(a), val(b)
        if va >= -1e-12:
            out.append(a)
        if (va > 1e-12 and vb < -1e-12) or (va < -1e-12 and vb > 1e-12):
            t = va / (va - vb)
            out.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
    return out


def star_region(P: SimplePolygon, reflex_vertex: int) -> StarRegion:
    """Visibility polygon of the reflex vertex clipped to its edge-extension wedge."""
    if not P.reflex_flags[reflex_vertex]:
        raise NotReflex(f"vertex {reflex_vertex} is not reflex")
    O = P.vertices[reflex_vertex]
    prev_v = P.vertices[reflex_vertex - 1]
    next_v = P.vertices[(reflex_vertex + 1) % P.n]
    u1 = _unit(O.x - prev_v.x, O.y - prev_v.y)   # extension of incoming edge
    u2 = _unit(O.x - next_v.x, O.y - next_v.y)   # extension of outgoing edge
    vis = visibility_polygon(P, O)
    ring = [(v.x, v.y) for v in vis.vertices]
    ring = _clip_halfplane(ring, O, u1, keep_positive=True)
    ring = _clip_halfplane(ring, O, u2, keep_positive=False)
    from .geometry import _clean_ring
    ring = _clean_ring(ring, P.diameter)
    if len(ring) < 3:
        raise DegenerateInput(f"star region of vertex {reflex_vertex} is degenerate")
    return StarRegion(reflex_vertex, O, SimplePolygon(ring))


def _unit(x: float, y: float) -> tuple[float, float]:
    n = math.hypot(x, y)
    if n <= 0:
        raise DegenerateInput("zero direction")
    return (x / n, y / n)


def _to_shapely(poly: SimplePolygon) -> sg.Polygon:
    return sg.Polygon([(v.x, v.y) for v in poly.vertices])


def _from_shapely(geom, scale: float) -> SimplePolygon | None:
    from .geometry import _clean_ring
    if geom.is_empty:
        return None
    if geom.geom_type == "GeometryCollection":
        polys = [g for g in geom.geoms if g.geom_type in ("Polygon", "MultiPolygon")]
        if not polys:
            return None
        geom = max(polys, key=lambda g: g.area)
    if geom.geom_type == "MultiPolygon":
        geom = max(geom.geoms, key=lambda g: g.area)
    if geom.geom_type != "Polygon" or geom.area <= (1e-12 * scale) ** 2:
        return None
    ring = list(geom.exterior.coords[:-1])
    if sg.LinearRing(geom.exterior.coords).is_ccw is False:
        ring.reverse()
    ring = _clean_ring(ring, scale)
    if len(ring) < 3:
        return None
    return SimplePolygon(ring)


def star_intersection(regions: list[StarRegion]) -> SimplePolygon | None:
    """Common intersection of star regions (largest component), or None."""
    if not regions:
        raise DegenerateInput("star_intersection needs at least one region")
    geom = _to_shapely(regions[0].region)
    scale = regions[0].region.diameter
    for r in regions[1:]:
        geom = geom.intersection(_to_shapely(r.region))
        if geom.is_empty:
            return None
    return _from_shapely(geom, scale)


def regions_disjoint(a: StarRegion, b: StarRegion, tol: float | None = None) -> bool:
    """Disjoint means no common point (separated by more than tol)."""
    ga, gb = _to_shapely(a.region), _to_shapely(b.region)
    t = tol if tol is not None else 1e-9 * max(a.region.diameter, b.region.diameter)
    return ga.distance(gb) > t


def interior_angle(P: SimplePolygon, i: int) -> float:
    v = P.vertices[i]
    a = P.vertices[i - 1]
    b = P.vertices[(i + 1) % P.n]
    ang = (math.atan2(a.y - v.y, a.x - v.x) - math.atan2(b.y - v.y, b.x - v.x))
    return ang % (2 * math.pi)


@dataclass(frozen=True)
class StarDiagnostics:
    """Constructive checks of the edge-count lemmas; violations are reported."""

    non_intersecting_edges: dict[int, int]   # reflex vertex -> edge count
    disjoint_star_count: int                 # n_d
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


_MIN_EDGES_BY_ND = {2: 6, 3: 7, 4: 9, 5: 10}


def _segment_meets_wedge(a: Point, b: Point, O: Point, u1, u2) -> bool:
    """Does segment ab meet the closed cone {cross(u1,.)>=0, cross(u2,.)<=0}?"""
    def c1(t):
        x = a.x + t * (b.x - a.x) - O.x
        y = a.y + t * (b.y - a.y) - O.y
        return u1[0] * y - u1[1] * x

    def c2(t):
        x = a.x + t * (b.x - a.x) - O.x
        y = a.y + t * (b.y - a.y) - O.y
        return u2[0] * y - u2[1] * x

    lo, hi = 0.0, 1.0
    for f, keep_nonneg in ((c1, True), (c2, False)):
        va, vb = f(lo), f(hi)
        if not keep_nonneg:
            va, vb = -va, -vb
        if va < 0 and vb < 0:
            return False
        if va < 0 or vb < 0:
            t = va / (va - vb)
            t = lo + t * (hi - lo)
            if va < 0:
                lo = t
            else:
                hi = t
    return lo <= hi + 1e-12


def min_edges_check(P: SimplePolygon) -> StarDiagnostics:
    """Check n >= r+3 per reflex vertex and the disjoint-star edge bounds.

    Edge counting follows the wedge construction: extending a reflex
    vertex's incident edges splits the plane into quadrants, and an edge
    "intersects the star region" iff it meets the closed quadrant across the
    vertex.  Disjointness of star regions uses the actual (visibility
    clipped) regions.
    """
    reflex = P.reflex_vertices()
    regions = {i: star_region(P, i) for i in reflex}
    violations: list[str] = []
    non_intersecting: dict[int, int] = {}
    for i in reflex:
        O = P.vertices[i]
        prev_v = P.vertices[i - 1]
        next_v = P.vertices[(i + 1) % P.n]
        u1 = _unit(O.x - prev_v.x, O.y - prev_v.y)
        u2 = _unit(O.x - next_v.x, O.y - next_v.y)
        count = 0
        for e in range(P.n):
            a, b = P.edge(e)
            if not _segment_meets_wedge(a, b, O, u1, u2):
                count += 1
        non_intersecting[i] = count
        if count >= 2 and P.n < count + 3:
            violations.append(
                f"vertex {i}: {count} non-intersecting edges but n={P.n} < {count + 3}")
        if count == 1 and P.n < 5:
            violations.append(f"vertex {i}: one non-intersecting edge but n={P.n} < 5")

    n_d = 0
    order = list(reflex)
    for size in range(len(order), 0, -1):
        from itertools import combinations
        found = False
        for combo in combinations(order, size):
            if all(regions_disjoint(regions[a], regions[b])
                   for a, b in combinations(combo, 2)):
                n_d = size
                found = True
                break
        if found:
            break
    bound = _MIN_EDGES_BY_ND.get(n_d)
    if bound is not None and P.n < bound:
        violations.append(f"{n_d} disjoint star regions but n={P.n} < {bound}")

    # pentagon angle check: one reflex vertex, two edges clear of the star
    if P.n == 5 and len(reflex) == 1:
        i = reflex[0]
        O = P.vertices[i]
        u1 = _unit(O.x - P.vertices[i - 1].x, O.y - P.vertices[i - 1].y)
        u2 = _unit(O.x - P.vertices[(i + 1) % P.n].x, O.y - P.vertices[(i + 1) % P.n].y)
        clear = [e for e in range(P.n)
                 if not _segment_meets_wedge(P.edge(e)[0], P.edge(e)[1], O, u1, u2)]
        if len(clear) == 2:
            for e in clear:
                s = interior_angle(P, e) + interior_angle(P, (e + 1) % P.n)
                if s >= math.pi:
                    violations.append(
                        f"pentagon angle pair at edge {e} sums to {s:.6f} >= pi")

    return StarDiagnostics(non_intersecting, n_d, tuple(violations))


# -- road maps ----------------------------------------------------------------


@dataclass(frozen=True)
class Station:
    arc: float                       # arc-length position along the path
    point: Point
    covers: tuple[int, ...]          # reflex vertex indices served from here
    at_corner: int | None = None     # set when the station is a reflex apex


@dataclass(frozen=True)
class ZoneSegment:
    """Directed guard run for one corner: rest anchor -> cover station."""

    corner: int
    a_arc: float
    b_arc: float

    @property
    def length(self) -> float:
        return abs(self.b_arc - self.a_arc)


@dataclass(frozen=True)
class RoadMap:
    path: PolyPath
    stations: tuple[Station, ...]
    segments: tuple[ZoneSegment, ...]
    rest_arc: float

    @property
    def length(self) -> float:
        return self.path.total_length

    @property
    def is_static(self) -> bool:
        return self.length <= 0.0 or not self.segments

    def anchor(self) -> Point:
        return self.path.point_at_arclength(self.rest_arc)

    def connected_regions(self) -> tuple[tuple[int, ...], ...]:
        return tuple(s.covers for s in self.stations)


def _region_anchor(region: SimplePolygon) -> Point:
    """Deterministic interior point: centroid, or the closest interior fallback."""
    c = region.centroid
    if region.strictly_contains(c, margin=1e-9 * region.diameter):
        return c
    best, best_d = None, math.inf
    for k in range(1, 6):
        f = k / 6.0
        for v in region.vertices:
            q = Point(v.x + f * (c.x - v.x), v.y + f * (c.y - v.y))
            if region.contains(q):
                d = q.dist(c)
                if d < best_d:
                    best, best_d = q, d
    if best is None:
        best = region.vertices[0]
    return best


def _boundary_samples(region: SimplePolygon, step: float) -> np.ndarray:
    pts: list[tuple[float, float]] = []
    for i in range(region.n):
        a, b = region.edge(i)
        seg = a.dist(b)
        count = max(1, int(math.ceil(seg / step)))
        for k in range(count):
            t = k / count
            pts.append((a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
    return np.array(pts)


def _geodesic_samples_to_samples(P: SimplePolygon, SA: np.ndarray, SB: np.ndarray
                                 ) -> PolyPath:
    """Shortest path between two sampled point sets inside P."""
    reflex = [P.vertices[i] for i in P.reflex_vertices()]
    best_len = math.inf
    best_path: list[Point] | None = None

    # route through reflex vertices (Dijkstra over a tiny graph)
    if reflex:
        import heapq
        m = len(reflex)
        entry_a = []
        entry_b = []
        for w in reflex:
            da, ia = _closest_visible(P, w, SA)
            db, ib = _closest_visible(P, w, SB)
            entry_a.append((da, ia))
            entry_b.append((db, ib))
        wdist = [[math.inf] * m for _ in range(m)]
        for i in range(m):
            for j in range(i + 1, m):
                if segment_visible(P, reflex[i], reflex[j]):
                    d = reflex[i].dist(reflex[j])
                    wdist[i][j] = wdist[j][i] = d
        dist = [entry_a[i][0] for i in range(m)]
        prev: list[int | None] = [None] * m
        seen = [False] * m
        pq = [(dist[i], i) for i in range(m) if math.isfinite(dist[i])]
        heapq.heapify(pq)
        while pq:
            d, u = heapq.heappop(pq)
            if seen[u]:
                continue
            seen[u] = True
            for v in range(m):
                nd = d + wdist[u][v]
                if nd < dist[v] - 1e-15:
                    dist[v] = nd
                    prev[v] = u
                    heapq.heappush(pq, (nd, v))
        for i in range(m):
            if not math.isfinite(dist[i]) or not math.isfinite(entry_b[i][0]):
                continue
            total = dist[i] + entry_b[i][0]
            if total < best_len:
                chain = [i]
                while prev[chain[-1]] is not None:
                    chain.append(prev[chain[-1]])
                chain.reverse()
                first = chain[0]
                pts = [_pt(SA[entry_a[first][1]])]
                pts += [reflex[k] for k in chain]
                pts.append(_pt(SB[entry_b[i][1]]))
                best_len = total
                best_path = pts

    # direct visible pair, scanned in ascending euclidean order
    diff = SA[:, None, :] - SB[None, :, :]
    d2 = (diff ** 2).sum(axis=2)
    flat = np.argsort(d2, axis=None)
    for idx in flat[:4000]:
        ia, ib = divmod(int(idx), SB.shape[0])
        d = math.sqrt(d2[ia, ib])
        if d >= best_len:
            break
        if segment_visible(P, _pt(SA[ia]), _pt(SB[ib])):
            best_len = d
            best_path = [_pt(SA[ia]), _pt(SB[ib])]
            break
    if best_path is None:
        raise DegenerateInput("regions are not connectable inside the polygon")
    return PolyPath.through(_dedupe(best_path))


def _pt(row) -> Point:
    return Point(float(row[0]), float(row[1]))


def _dedupe(pts: list[Point]) -> list[Point]:
    out = [pts[0]]
    for p in pts[1:]:
        if p.dist(out[-1]) > 1e-12:
            out.append(p)
    return out


def _closest_visible(P: SimplePolygon, w: Point, S: np.ndarray) -> tuple[float, int]:
    d = np.hypot(S[:, 0] - w.x, S[:, 1] - w.y)
    order = np.argsort(d)
    for idx in order[:2000]:
        if segment_visible(P, w, _pt(S[int(idx)])):
            return float(d[int(idx)]), int(idx)
    return math.inf, -1


def _sample_step(P: SimplePolygon) -> float:
    return max(1e-3 * P.diameter, 1e-9)


def build_road_map(P: SimplePolygon, regions: list[StarRegion]) -> RoadMap:
    """Connect the star regions with the shortest usable patrol path.

    Station layout: one station if every region shares a point; two stations
    when the regions split into two internally-intersecting groups; the
    middle-corner construction for three pairwise-disjoint regions.
    """
    if not regions:
        raise DegenerateInput("build_road_map needs at least one star region")
    regions = sorted(regions, key=lambda r: r.owner_vertex)

    common = star_intersection(regions)
    if common is not None:
        anchor = _region_anchor(common)
        station = Station(0.0, anchor, tuple(r.owner_vertex for r in regions))
        return RoadMap(PolyPath((anchor,), 0.0), (station,), (), 0.0)

    if len(regions) >= 2:
        two = _two_station_road_map(P, regions)
        if two is not None:
            return two

    if len(regions) == 3:
        return _three_station_road_map(P, regions)

    raise UnsupportedStarTopology(
        f"{len(regions)} star regions with no coverable station layout")


def _group_region(regions: list[StarRegion], idx: tuple[int, ...]
                  ) -> SimplePolygon | None:
    subset = [regions[i] for i in idx]
    if len(subset) == 1:
        return subset[0].region
    return star_intersection(subset)


def _two_station_road_map(P: SimplePolygon, regions: list[StarRegion]
                          ) -> RoadMap | None:
    from itertools import combinations
    m = len(regions)
    step = _sample_step(P)
    best: tuple[float, PolyPath, tuple[int, ...], tuple[int, ...]] | None = None
    indices = tuple(range(m))
    for size_a in range(1, m // 2 + 1):
        for combo in combinations(indices, size_a):
            group_a = combo
            group_b = tuple(i for i in indices if i not in combo)
            ra = _group_region(regions, group_a)
            rb = _group_region(regions, group_b)
            if ra is None or rb is None:
                continue
            SA = _boundary_samples(ra, step)
            SB = _boundary_samples(rb, step)
            path = _geodesic_samples_to_samples(P, SA, SB)
            if best is None or path.total_length < best[0] - 1e-12:
                best = (path.total_length, path, group_a, group_b)
    if best is None:
        return None
    _, path, group_a, group_b = best
    length = path.total_length
    corners_a = tuple(regions[i].owner_vertex for i in group_a)
    corners_b = tuple(regions[i].owner_vertex for i in group_b)
    st_a = Station(0.0, path.waypoints[0], corners_a)
    st_b = Station(length, path.waypoints[-1], corners_b)
    caps_a = min(_corner_cap(P, c) for c in corners_a)
    caps_b = min(_corner_cap(P, c) for c in corners_b)
    rest = length * caps_a / (caps_a + caps_b)
    segs = tuple(ZoneSegment(c, rest, 0.0) for c in corners_a) + \
        tuple(ZoneSegment(c, rest, length) for c in corners_b)
    return RoadMap(path, (st_a, st_b), segs, rest)


def _three_station_road_map(P: SimplePolygon, regions: list[StarRegion]) -> RoadMap:
    """Pairwise-disjoint triple: the guard rests at the middle corner's apex
    and runs one leg to each of the other star regions."""
    step = _sample_step(P)
    best = None
    for mid in range(3):
        apex = regions[mid].apex
        others = [k for k in range(3) if k != mid]
        legs = []
        total = 0.0
        ok = True
        for k in others:
            SA = np.array([[apex.x, apex.y]])
            SB = _boundary_samples(regions[k].region, step)
            try:
                leg = _geodesic_samples_to_samples(P, SA, SB)
            except DegenerateInput:
                ok = False
                break
            legs.append(leg)
            total += leg.total_length
        if ok and (best is None or total < best[0] - 1e-12):
            best = (total, mid, others, legs)
    if best is None:
        raise DegenerateInput("no middle-corner road map found")
    _, mid, others, legs = best
    leg1, leg2 = legs
    # single polyline: far station A .. apex .. far station B
    pts = list(reversed(leg1.waypoints)) + list(leg2.waypoints)[1:]
    path = PolyPath.through(_dedupe(pts))
    d1 = leg1.total_length
    d2 = leg2.total_length
    corner_mid = regions[mid].owner_vertex
    corner_a = regions[others[0]].owner_vertex
    corner_b = regions[others[1]].owner_vertex
    stations = (
        Station(0.0, path.waypoints[0], (corner_a,)),
        Station(d1, regions[mid].apex, (corner_mid,), at_corner=corner_mid),
        Station(d1 + d2, path.waypoints[-1], (corner_b,)),
    )
    segs = (ZoneSegment(corner_a, d1, 0.0), ZoneSegment(corner_b, d1, d1 + d2))
    return RoadMap(path, stations, segs, d1)


def _corner_cap(P: SimplePolygon, corner: int, rest_corner: int | None = None) -> float:
    """Largest admissible zone radius for a corner from reflex separations."""
    O = P.vertices[corner]
    if rest_corner is not None:
        return O.dist(P.vertices[rest_corner])
    others = [P.vertices[j] for j in P.reflex_vertices() if j != corner]
    if not others:
        return P.diameter
    return min(O.dist(v) for v in others)


def reflex_distance_matrix(P: SimplePolygon) -> dict[tuple[int, int], float]:
    """Straight-line distances o_ij between reflex vertices."""
    reflex = P.reflex_vertices()
    out: dict[tuple[int, int], float] = {}
    for a in reflex:
        for b in reflex:
            if a < b:
                out[(a, b)] = P.vertices[a].dist(P.vertices[b])
    return out


def o_lookup(o: dict[tuple[int, int], float], i: int, j: int) -> float:
    return o[(i, j) if i < j else (j, i)]


@dataclass(frozen=True)
class ZoneConstraints:
    """Linear caps on zone radii: r_i <= singleton[i]; r_i + r_j <= pairs[(i,j)]."""

    segments: tuple[ZoneSegment, ...]
    singleton: tuple[float, ...]
    pairs: dict[tuple[int, int], float]


def zone_constraints(P: SimplePolygon, road_map: RoadMap,
                     o: dict[tuple[int, int], float] | None = None) -> ZoneConstraints:
    if o is None:
        o = reflex_distance_matrix(P)
    rest_corner = None
    for st in road_map.stations:
        if st.at_corner is not None and abs(st.arc - road_map.rest_arc) <= 1e-12:
            rest_corner = st.at_corner
    singles = []
    for seg in road_map.segments:
        if rest_corner is not None:
            singles.append(o_lookup(o, seg.corner, rest_corner))
        else:
            singles.append(_corner_cap(P, seg.corner))
    pairs: dict[tuple[int, int], float] = {}
    segs = road_map.segments
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            if segs[i].corner == segs[j].corner:
                continue
            if abs(segs[i].a_arc - segs[j].a_arc) <= 1e-12:  # shared rest anchor
                pairs[(i, j)] = o_lookup(o, segs[i].corner, segs[j].corner)
    return ZoneConstraints(segs, tuple(singles), pairs)


# -- min-max guard speed -------------------------------------------------------


@dataclass(frozen=True)
class SpeedBound:
    v_star: float
    radii: tuple[float, ...]
    active_constraints: tuple[str, ...]


def min_max_speed(d: list[float], singleton: list[float],
                  pairs: dict[tuple[int, int], float], ve: float,
                  rel_tol: float = 1e-12) -> SpeedBound:
    """Minimize max_i(d_i * ve / r_i) subject to the radius caps.

    Feasibility of a candidate speed v is a linear check on the minimal radii
    r_i(v) = d_i * ve / v, so the optimum is found by bisection.
    """
    if ve < 0:
        raise ValueError("evader speed bound must be nonnegative")
    m = len(d)
    if m == 0 or ve == 0 or all(x <= 0 for x in d):
        return SpeedBound(0.0, tuple(0.0 for _ in d), ())
    if any(c <= 0 for c in singleton) or any(c <= 0 for c in pairs.values()):
        raise Infeasible("nonpositive radius cap")

    def radii(v: float) -> list[float]:
        return [di * ve / v for di in d]

    def feasible(v: float) -> bool:
        r = radii(v)
        if any(r[i] > singleton[i] for i in range(m)):
            return False
        return all(r[i] + r[j] <= cap for (i, j), cap in pairs.items())

    lo = max(di * ve / si for di, si in zip(d, singleton) if di > 0)
    if feasible(lo):
        v_star = lo
    else:
        hi = 2 * lo
        guard = 0
        while not feasible(hi):
            hi *= 2
            guard += 1
            if guard > 200:
                raise Infeasible("no feasible guard speed found")
        for _ in range(200):
            midv = 0.5 * (lo + hi)
            if feasible(midv):
                hi = midv
            else:
                lo = midv
            if hi - lo <= rel_tol * hi:
                break
        v_star = hi
    r = radii(v_star)
    tol = 1e-9 * max(max(singleton), max(pairs.values()) if pairs else 0.0)
    active = []
    for i in range(m):
        if abs(r[i] - singleton[i]) <= tol:
            active.append(f"r{i} <= {singleton[i]:.12g}")
    for (i, j), cap in pairs.items():
        if abs(r[i] + r[j] - cap) <= tol:
            active.append(f"r{i} + r{j} <= {cap:.12g}")
    return SpeedBound(v_star, tuple(r), tuple(active))


def speed_bound(P: SimplePolygon, road_map: RoadMap,
                o: dict[tuple[int, int], float] | None = None,
                ve: float = 1.0) -> SpeedBound:
    """Minimum guard speed for a road map; zero for a static road map."""
    if road_map.is_static:
        return SpeedBound(0.0, (), ())
    cons = zone_constraints(P, road_map, o)
    d = [seg.length for seg in cons.segments]
    return min_max_speed(d, list(cons.singleton), cons.pairs, ve)


# -- dynamic zones --------------------------------------------------------------


@dataclass(frozen=True)
class DynamicZone:
    """Trigger region near one reflex corner, mapped onto a guard run.

    The trigger ray starts at the corner and points away from the rest
    anchor; its strip (width = radius) lies on the side still visible from
    the anchor, capped behind the corner by a disc sector.  ``progress`` is
    the continuous signed distance that drives the guard: radius -> rest
    anchor, zero (on the ray) -> cover station, negative (occluded side) ->
    stay at the cover station.
    """

    corner: int
    apex: Point
    trigger_ray: Ray
    radius: float
    segment: ZoneSegment
    shadow_sign: float            # +1: occluded wedge is CCW from the ray
    shadow_span: float            # angle from the ray to the occluding edge

    def signed_clearance(self, q: Point) -> float:
        """Distance to the trigger ray, negated inside the occluded wedge."""
        ux, uy = self.trigger_ray.direction
        dx, dy = q.x - self.apex.x, q.y - self.apex.y
        proj = dx * ux + dy * uy
        lat = ux * dy - uy * dx
        dist_ray = abs(lat) if proj >= 0 else math.hypot(dx, dy)
        phi = math.atan2(lat, proj) * self.shadow_sign
        if 0.0 <= phi < self.shadow_span:
            return -dist_ray
        return dist_ray

    def guard_fraction(self, q: Point) -> float:
        """0 at the outer boundary, 1 on the trigger ray / occluded side."""
        return min(1.0, max(0.0, 1.0 - self.signed_clearance(q) / self.radius))

    def contains(self, q: Point, P: SimplePolygon | None = None) -> bool:
        s = self.signed_clearance(q)
        if not (-1e-12 <= s < self.radius):
            return False
        return P.contains(q) if P is not None else True

    def target_arc(self, q: Point) -> float:
        t = self.guard_fraction(q)
        return self.segment.a_arc + t * (self.segment.b_arc - self.segment.a_arc)

    def boundary_polygon(self, P: SimplePolygon, arc_steps: int = 64
                         ) -> SimplePolygon | None:
        """Explicit strip + quarter-sector region clipped to P.

        Used for rendering and sampled disjointness tests; membership logic
        itself stays a predicate.
        """
        ux, uy = self.trigger_ray.direction
        ax, ay = self.apex.x, self.apex.y
        r = self.radius
        span = 2.0 * P.diameter
        # approach-side normal: opposite the occluded side of the ray
        nx, ny = -self.shadow_sign * (-uy), -self.shadow_sign * ux
        ring = [
            (ax + span * ux, ay + span * uy),
            (ax + span * ux + r * nx, ay + span * uy + r * ny),
        ]
        base = math.atan2(ny, nx)
        # quarter arc from the approach normal around the back to -u
        for k in range(arc_steps + 1):
            ang = base - self.shadow_sign * (math.pi / 2) * k / arc_steps
            ring.append((ax + r * math.cos(ang), ay + r * math.sin(ang)))
        ring.append((ax, ay))
        strip = sg.Polygon(ring).buffer(0)
        clipped = strip.intersection(_to_shapely(P))
        return _from_shapely(clipped, P.diameter)


def build_dynamic_zones(P: SimplePolygon, road_map: RoadMap,
                        ve: float, vp: float,
                        o: dict[tuple[int, int], float] | None = None,
                        clamp: bool = False) -> list[DynamicZone]:
    """One zone per road-map segment with r_i = (ve/vp) * d_i.

    Raises SpeedTooLow when the radii violate the separation caps; with
    ``clamp=True`` the radii are uniformly scaled down instead (used to
    simulate under-speed guards honestly).
    """
    if ve <= 0 or vp <= 0:
        raise ValueError("speeds must be positive")
    if road_map.is_static:
        return []
    cons = zone_constraints(P, road_map, o)
    radii = [seg.length * ve / vp for seg in cons.segments]
    factor = 1.0
    for r, cap in zip(radii, cons.singleton):
        if r > cap:
            factor = min(factor, cap / r)
    for (i, j), cap in cons.pairs.items():
        s = radii[i] + radii[j]
        if s > cap:
            factor = min(factor, cap / s)
    if factor < 1.0 - 1e-12 and not clamp:
        raise SpeedTooLow(
            f"guard speed {vp} is below the feasible bound for this road map")
    radii = [r * factor for r in radii]

    zones = []
    for seg, r in zip(cons.segments, radii):
        apex = P.vertices[seg.corner]
        anchor = _zone_viewpoint(P, road_map, seg, apex)
        u = _unit(apex.x - anchor.x, apex.y - anchor.y)
        ray = Ray(apex, u)
        sign, span = _shadow_geometry(P, seg.corner, u)
        zones.append(DynamicZone(seg.corner, apex, ray, r, seg, sign, span))

    _validate_zones(P, zones)
    return zones


def _zone_viewpoint(P: SimplePolygon, road_map: RoadMap, seg: ZoneSegment,
                    apex: Point) -> Point:
    """Rest-anchor viewpoint for the trigger ray; walks toward the cover
    station until the apex is visible (bent road maps)."""
    steps = 16
    for k in range(steps):
        arc = seg.a_arc + (seg.b_arc - seg.a_arc) * k / steps
        q = road_map.path.point_at_arclength(arc)
        if q.dist(apex) > 1e-9 and segment_visible(P, q, apex):
            return q
    raise DegenerateInput("no road-map point sees the zone corner")


def _shadow_geometry(P: SimplePolygon, corner: int,
                     u: tuple[float, float]) -> tuple[float, float]:
    """(side, span) of the occluded wedge: the incident edge angularly
    nearest to the trigger ray bounds it."""
    apex = P.vertices[corner]
    prev_v = P.vertices[corner - 1]
    next_v = P.vertices[(corner + 1) % P.n]
    base = math.atan2(u[1], u[0])
    best_sign = 0.0
    best_gap = math.inf
    for w in (prev_v, next_v):
        d = math.atan2(w.y - apex.y, w.x - apex.x) - base
        d = (d + math.pi) % (2 * math.pi) - math.pi
        if 1e-12 < abs(d) < best_gap:
            best_gap = abs(d)
            best_sign = 1.0 if d > 0 else -1.0
    if best_sign == 0.0:
        raise DegenerateInput("degenerate corner: trigger ray along an edge")
    return best_sign, best_gap


def _validate_zones(P: SimplePolygon, zones: list[DynamicZone]) -> None:
    reflex = P.reflex_vertices()
    margin = 1e-9 * P.diameter
    for z in zones:
        for j in reflex:
            if j == z.corner:
                continue
            if z.signed_clearance(P.vertices[j]) < z.radius - margin and \
                    z.contains(P.vertices[j]):
                raise SpeedTooLow(
                    f"zone at corner {z.corner} would contain reflex vertex {j}")
    rng = np.random.default_rng(0)
    x0, y0, x1, y1 = P.bbox
    pts = rng.uniform([x0, y0], [x1, y1], size=(2000, 2))
    inside = P.contains_many(pts)
    pts = pts[inside]
    for a in range(len(zones)):
        for b in range(a + 1, len(zones)):
            za, zb = zones[a], zones[b]
            both = 0
            for q in pts:
                p = Point(float(q[0]), float(q[1]))
                if za.signed_clearance(p) < za.radius - margin and \
                        zb.signed_clearance(p) < zb.radius - margin and \
                        za.signed_clearance(p) > margin and \
                        zb.signed_clearance(p) > margin:
                    both += 1
            if both > 0:
                raise SpeedTooLow(
                    f"zones at corners {za.corner} and {zb.corner} overlap "
                    f"({both} sampled interior points)")
