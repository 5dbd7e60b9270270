"""Orthogonal polygons: convex quadrilateralization, quad grouping, n/4 budget.

The built-in quadrilateralizer is an exhaustive backtracking search over
convex vertex-index quads (memoized over ring chains); orthogonal polygons
always admit one.  Input files may also supply a precomputed quad list,
which is validated with the same checks the search uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .deploy import (
    CoverageGapError,
    DeploymentPlan,
    GuardAssignment,
    _static_assignment,
    deploy_piece,
)
from .geometry import DegeneratePolygon, Point, SimplePolygon, orient


class NotOrthogonal(ValueError):
    pass


class QuadrilateralizationFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class Quadrilateralization:
    polygon: SimplePolygon
    quads: tuple[tuple[int, int, int, int], ...]
    diagonals: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class QuadDualTree:
    node_count: int
    edges: tuple[tuple[int, int, tuple[int, int]], ...]

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for a, b, _ in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


@dataclass(frozen=True)
class QuadGroup:
    quad_ids: tuple[int, ...]
    merged: SimplePolygon

    @property
    def q(self) -> int:
        return len(self.quad_ids)


def validate_orthogonal(P: SimplePolygon) -> None:
    if P.n % 2 != 0:
        raise NotOrthogonal(f"orthogonal polygons have even n, got {P.n}")
    for i in range(P.n):
        a, b = P.edge(i)
        if abs(a.x - b.x) > EPS_AXIS and abs(a.y - b.y) > EPS_AXIS:
            raise NotOrthogonal(f"edge {i} is not axis-parallel")


EPS_AXIS = 1e-9


def _quad_convex(P: SimplePolygon, quad: tuple[int, int, int, int]) -> bool:
    """Weak convexity: no reflex corner, positive area (flat corners allowed;
    collinear notch vertices make them unavoidable in proper tilings)."""
    pts = [P.vertices[i] for i in quad]
    tol = (P.diameter ** 2) * 1e-12
    area2 = 0.0
    for k in range(4):
        if orient(pts[k], pts[(k + 1) % 4], pts[(k + 2) % 4]) < -tol:
            return False
        a, b = pts[k], pts[(k + 1) % 4]
        area2 += a.x * b.y - b.x * a.y
    return area2 > tol


def _normalize_quad(n: int, quad) -> tuple[int, int, int, int]:
    ids = sorted(int(i) % n for i in quad)
    if len(set(ids)) != 4:
        raise QuadrilateralizationFailed(f"quad {quad} has repeated vertices")
    return tuple(ids)  # ascending index order is the ring cyclic order


class _QuadSearch:
    def __init__(self, P: SimplePolygon):
        self.P = P
        self.n = P.n
        self._chord_ok: dict[tuple[int, int], bool] = {}
        self._memo: dict[tuple[int, int], tuple[int, int] | None] = {}

    def chord_ok(self, u: int, v: int) -> bool:
        if (v - u) % self.n == 1 or (u - v) % self.n == 1:
            return True  # ring edge
        key = (min(u, v), max(u, v))
        got = self._chord_ok.get(key)
        if got is None:
            a, b = self.P.vertices[u], self.P.vertices[v]
            mid = Point(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
            got = self.P.segment_inside(a, b) and self.P.strictly_contains(mid)
            self._chord_ok[key] = got
        return got

    def solve(self, i: int, j: int) -> bool:
        """Chain i..j (ring order) closed by chord (j, i)."""
        if (j - i) % self.n == 1:
            return True
        key = (i, j)
        if key in self._memo:
            return self._memo[key] is not None
        self._memo[key] = None
        for k in range(i + 1, j - 1):
            if not self.chord_ok(i, k):
                continue
            for l in range(k + 1, j):
                quad = (i, k, l, j)
                if not (self.chord_ok(k, l) and self.chord_ok(l, j)):
                    continue
                if not _quad_convex(self.P, quad):
                    continue
                if self.solve(i, k) and self.solve(k, l) and self.solve(l, j):
                    self._memo[key] = (k, l)
                    return True
        return False

    def collect(self, i: int, j: int, out: list[tuple[int, int, int, int]]) -> None:
        if (j - i) % self.n == 1:
            return
        k, l = self._memo[(i, j)]
        out.append((i, k, l, j))
        self.collect(i, k, out)
        self.collect(k, l, out)
        self.collect(l, j, out)


def quadrilateralize(P: SimplePolygon,
                     quads: list | None = None) -> Quadrilateralization:
    """Convex vertex-quad tiling of an orthogonal polygon.

    A supplied quad list (vertex-index 4-tuples) is validated instead of
    searched; that path is the trust boundary for external inputs.
    """
    validate_orthogonal(P)
    if quads is not None:
        norm = tuple(_normalize_quad(P.n, q) for q in quads)
        _validate_quads(P, norm)
        return Quadrilateralization(P, norm, _collect_diagonals(P, norm))
    if P.n == 4:
        return Quadrilateralization(P, ((0, 1, 2, 3),), ())
    search = _QuadSearch(P)
    if not search.solve(0, P.n - 1):
        raise QuadrilateralizationFailed(
            "backtracking search found no convex vertex-quad tiling")
    out: list[tuple[int, int, int, int]] = []
    search.collect(0, P.n - 1, out)
    norm = tuple(sorted(_normalize_quad(P.n, q) for q in out))
    _validate_quads(P, norm)
    return Quadrilateralization(P, norm, _collect_diagonals(P, norm))


def _quad_sides(quad: tuple[int, int, int, int]):
    return [(quad[k], quad[(k + 1) % 4]) for k in range(4)]


def _collect_diagonals(P: SimplePolygon, quads) -> tuple[tuple[int, int], ...]:
    n = P.n
    diags = set()
    for q in quads:
        for u, v in _quad_sides(q):
            if (v - u) % n != 1 and (u - v) % n != 1:
                diags.add((min(u, v), max(u, v)))
    return tuple(sorted(diags))


def _validate_quads(P: SimplePolygon, quads) -> None:
    n = P.n
    if len(quads) != n // 2 - 1:
        raise QuadrilateralizationFailed(
            f"{len(quads)} quads for an n={n} polygon (expected {n // 2 - 1})")
    total = 0.0
    edge_use: dict[tuple[int, int], int] = {}
    checker = _QuadSearch(P)
    for q in quads:
        if not _quad_convex(P, q):
            raise QuadrilateralizationFailed(f"quad {q} is not convex")
        pts = [P.vertices[i] for i in q]
        area = 0.0
        for k in range(4):
            a, b = pts[k], pts[(k + 1) % 4]
            area += a.x * b.y - b.x * a.y
        total += 0.5 * area
        for u, v in _quad_sides(q):
            if not checker.chord_ok(u, v):
                raise QuadrilateralizationFailed(
                    f"quad side ({u},{v}) is neither an edge nor an interior chord")
            key = (min(u, v), max(u, v))
            edge_use[key] = edge_use.get(key, 0) + 1
    if abs(total - P.area) > 1e-9 * P.area:
        raise QuadrilateralizationFailed("quad areas do not tile the polygon")
    for i in range(n):
        key = (min(i, (i + 1) % n), max(i, (i + 1) % n))
        if edge_use.get(key, 0) != 1:
            raise QuadrilateralizationFailed(f"polygon edge {key} used != once")
    for key, count in edge_use.items():
        if (key[1] - key[0]) % n != 1 and (key[0] - key[1]) % n != 1:
            if count != 2:
                raise QuadrilateralizationFailed(f"chord {key} used {count} times")


def quad_dual_tree(Q: Quadrilateralization) -> QuadDualTree:
    by_side: dict[tuple[int, int], list[int]] = {}
    for idx, q in enumerate(Q.quads):
        for u, v in _quad_sides(q):
            key = (min(u, v), max(u, v))
            by_side.setdefault(key, []).append(idx)
    edges = []
    for key in Q.diagonals:
        owners = by_side.get(key, [])
        if len(owners) != 2:
            raise QuadrilateralizationFailed(f"chord {key} not shared by two quads")
        edges.append((owners[0], owners[1], key))
    tree = QuadDualTree(len(Q.quads), tuple(edges))
    adj = tree.adjacency()
    if len(edges) != len(Q.quads) - 1:
        raise QuadrilateralizationFailed("dual graph is not a tree")
    if any(len(row) > 4 for row in adj):
        raise QuadrilateralizationFailed("dual tree node with degree > 4")
    return tree


def _merge_quads(P: SimplePolygon, quads) -> SimplePolygon:
    """Stitch a connected quad set into one polygon (straight runs merged)."""
    directed: dict[tuple[int, int], tuple[int, int]] = {}
    counts: dict[tuple[int, int], int] = {}
    for q in quads:
        for u, v in _quad_sides(q):
            key = (min(u, v), max(u, v))
            counts[key] = counts.get(key, 0) + 1
    nxt: dict[int, int] = {}
    for q in quads:
        for u, v in _quad_sides(q):
            key = (min(u, v), max(u, v))
            if counts[key] == 1:
                nxt[u] = v
    start = min(nxt)
    ring_ids = [start]
    cur = nxt[start]
    while cur != start:
        ring_ids.append(cur)
        cur = nxt[cur]
        if len(ring_ids) > 4 * len(quads):
            raise QuadrilateralizationFailed("quad group boundary does not close")
    pts = [P.vertices[i] for i in ring_ids]
    # merge collinear runs introduced by chords meeting edges head-on
    from .geometry import _clean_ring
    ring = _clean_ring([(p.x, p.y) for p in pts], P.diameter)
    return SimplePolygon(ring)


def quad_group(Q: Quadrilateralization) -> tuple[list[QuadGroup], int | None]:
    """Cut the dual tree into groups of 2..4 quads plus at most one leftover.

    Path-shaped trees are grouped three-at-a-time (the line-graph rule);
    otherwise repeated minimum-separation cuts are applied.
    Returns (groups, leftover_quad_index_or_None).
    """
    tree = quad_dual_tree(Q)
    n_nodes = tree.node_count
    if n_nodes == 1:
        return [], 0
    adj = tree.adjacency()
    degrees = [len(row) for row in adj]
    groups: list[list[int]] = []
    leftover: int | None = None

    if max(degrees) <= 2:
        # path: walk from the smallest-index endpoint, take threes
        ends = [i for i in range(n_nodes) if degrees[i] <= 1]
        order = [min(ends)]
        seen = {order[0]}
        while len(order) < n_nodes:
            for nb in sorted(adj[order[-1]]):
                if nb not in seen:
                    order.append(nb)
                    seen.add(nb)
                    break
        k = 0
        while n_nodes - k >= 2:
            take = 3 if n_nodes - k >= 3 else 2
            if n_nodes - k == 4:
                take = 2  # 2+2 instead of 3+1
            groups.append(order[k:k + take])
            k += take
        if k < n_nodes:
            leftover = order[k]
    else:
        remaining = set(range(n_nodes))
        while len(remaining) >= 5:
            best: tuple[int, tuple[int, ...]] | None = None
            for a, b, _ in tree.edges:
                if a not in remaining or b not in remaining:
                    continue
                side = _component(adj, remaining, a, without=b)
                for nodes in (side, tuple(sorted(remaining - set(side)))):
                    if 2 <= len(nodes) <= 4:
                        cand = (len(nodes), nodes)
                        if best is None or cand < best:
                            best = cand
            if best is None:
                raise QuadrilateralizationFailed(
                    "no 2..4-quad separation in the dual tree")
            groups.append(list(best[1]))
            remaining -= set(best[1])
        if len(remaining) >= 2:
            groups.append(sorted(remaining))
        elif remaining:
            leftover = min(remaining)
    return ([QuadGroup(tuple(g), _merge_quads(Q.polygon, [Q.quads[i] for i in g]))
             for g in groups], leftover)


def _component(adj, remaining, start, without):
    out = []
    stack = [start]
    seen = {start, without}
    while stack:
        u = stack.pop()
        out.append(u)
        for v in adj[u]:
            if v in remaining and v not in seen:
                seen.add(v)
                stack.append(v)
    return tuple(sorted(out))


def deploy_orthogonal(P: SimplePolygon, ve: float = 1.0,
                      quads: list | None = None) -> DeploymentPlan:
    """Quadrilateralize, group, deploy one guard per group, check n/4 budget."""
    Q = quadrilateralize(P, quads)
    groups, leftover = quad_group(Q)
    assignments: list[GuardAssignment] = []
    pid = 0
    for g in groups:
        reflex_count = len(g.merged.reflex_vertices())
        if reflex_count > 3:
            raise CoverageGapError(
                f"quad group {g.quad_ids} merged with {reflex_count} reflex vertices")
        assignments.append(deploy_piece(pid, g.merged, ve))
        pid += 1
    if leftover is not None:
        quad_poly = SimplePolygon([Q.polygon.vertices[i] for i in Q.quads[leftover]])
        static = _static_assignment(pid, quad_poly)
        if static is None:
            raise CoverageGapError("leftover quad is not star-shaped")
        assignments.append(static)
    sizes = tuple(g.q for g in groups)
    k_prime = 1 if leftover is not None else 0
    r = sum(sizes) + k_prime
    assert r == len(Q.quads), "group accounting must match Eq. (8)"
    total = len(assignments)
    bound = P.n // 4
    global_v = max((a.v_star for a in assignments), default=0.0)
    return DeploymentPlan(
        polygon=P,
        assignments=tuple(assignments),
        ve=ve,
        global_v_star=global_v,
        guard_total=total,
        bound=bound,
        bound_kind="n/4",
        satisfies_bound=total < bound,
        quad_group_sizes=sizes,
        quad_leftover=k_prime,
    )
