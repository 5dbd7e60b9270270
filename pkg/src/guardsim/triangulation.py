"""Polygon triangulation, its dual tree, and the balanced-diagonal search.

The balanced diagonal realizes the partitioning step: for any polygon with
n >= 10 vertices some triangulation diagonal leaves exactly k in {5, 6, 7, 8}
polygon edges on one side.  Cutting there yields a (k+1)-edge piece, i.e. a
hexagon through nonagon.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import DegeneratePolygon, Point, SimplePolygon, orient


class TooSmall(ValueError):
    """Polygon has fewer than 10 vertices; caller keeps it whole."""


class BalancedDiagonalNotFound(RuntimeError):
    """Diagnostic: no diagonal of this triangulation satisfies the edge-count rule."""


@dataclass(frozen=True)
class Triangulation:
    polygon: SimplePolygon
    triangles: tuple[tuple[int, int, int], ...]
    diagonals: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class DualTree:
    """Adjacency of triangles across shared diagonals."""

    node_count: int
    edges: tuple[tuple[int, int, tuple[int, int]], ...]  # (tri_a, tri_b, diagonal)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for a, b, _ in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


def _point_in_triangle(p: Point, a: Point, b: Point, c: Point) -> bool:
    d1 = orient(a, b, p)
    d2 = orient(b, c, p)
    d3 = orient(c, a, p)
    neg = (d1 < 0) or (d2 < 0) or (d3 < 0)
    pos = (d1 > 0) or (d2 > 0) or (d3 > 0)
    return not (neg and pos)


def triangulate(P: SimplePolygon, start: int = 0) -> Triangulation:
    """Ear-clipping triangulation; ``start`` rotates the scan for alternates."""
    if not isinstance(P, SimplePolygon):
        raise DegeneratePolygon("triangulate expects a SimplePolygon")
    n = P.n
    verts = P.vertices
    if n == 3:
        return Triangulation(P, ((0, 1, 2),), ())
    remaining = list(range(n))
    triangles: list[tuple[int, int, int]] = []
    diagonals: list[tuple[int, int]] = []
    cursor = start % n
    guard = 0
    while len(remaining) > 3:
        m = len(remaining)
        clipped = False
        for off in range(m):
            i = (cursor + off) % m
            prev_i = remaining[i - 1]
            ear_i = remaining[i]
            next_i = remaining[(i + 1) % m]
            a, b, c = verts[prev_i], verts[ear_i], verts[next_i]
            if orient(a, b, c) <= 0:
                continue
            blocked = False
            for j in remaining:
                if j in (prev_i, ear_i, next_i):
                    continue
                if _point_in_triangle(verts[j], a, b, c):
                    blocked = True
                    break
            if blocked:
                continue
            triangles.append((prev_i, ear_i, next_i))
            if abs(prev_i - next_i) not in (1, n - 1):
                diagonals.append((min(prev_i, next_i), max(prev_i, next_i)))
            remaining.pop(i)
            cursor = i % len(remaining)
            clipped = True
            break
        if not clipped:
            raise DegeneratePolygon("ear clipping failed; polygon may be degenerate")
        guard += 1
        if guard > n * n:
            raise DegeneratePolygon("ear clipping did not terminate")
    triangles.append(tuple(remaining))  # type: ignore[arg-type]
    return Triangulation(P, tuple(triangles), tuple(diagonals))


def dual_tree(T: Triangulation) -> DualTree:
    by_diag: dict[tuple[int, int], list[int]] = {}
    for t_idx, tri in enumerate(T.triangles):
        for k in range(3):
            u, v = tri[k], tri[(k + 1) % 3]
            key = (min(u, v), max(u, v))
            by_diag.setdefault(key, []).append(t_idx)
    edges = []
    for diag in T.diagonals:
        tris = by_diag.get(diag, [])
        if len(tris) != 2:
            raise DegeneratePolygon(f"diagonal {diag} not shared by two triangles")
        edges.append((tris[0], tris[1], diag))
    return DualTree(len(T.triangles), tuple(edges))


def _polygon_edge_count_per_triangle(T: Triangulation) -> list[int]:
    n = T.polygon.n
    counts = []
    for tri in T.triangles:
        c = 0
        for k in range(3):
            u, v = tri[k], tri[(k + 1) % 3]
            if (abs(u - v) == 1) or (abs(u - v) == n - 1):
                c += 1
        counts.append(c)
    return counts


def side_vertices(n: int, a: int, b: int) -> tuple[list[int], list[int]]:
    """Vertex index chains on either side of diagonal (a, b), inclusive."""
    lo, hi = min(a, b), max(a, b)
    side1 = list(range(lo, hi + 1))
    side2 = list(range(hi, n)) + list(range(0, lo + 1))
    return side1, side2


def diagonal_side_counts(n: int, diag: tuple[int, int]) -> tuple[int, int]:
    """Original-edge counts on the two sides of a diagonal of an n-gon."""
    a, b = diag
    k1 = (b - a) % n
    return k1, n - k1


def balanced_diagonal_candidates(
        T: Triangulation,
        piece_penalty: dict[tuple[int, int], int] | None = None
) -> list[tuple[tuple[int, int], int]]:
    """All diagonals with k in {5..8} polygon edges on one side, best first.

    Preference order: low inherited-diagonal penalty, smaller-side matches
    before larger-side matches, ties by smallest diagonal index pair.
    """
    n = T.polygon.n
    if n < 10:
        raise TooSmall(f"balanced diagonal needs n >= 10, got {n}")
    ranked: list[tuple[int, int, tuple[int, int], int]] = []
    for diag in sorted(T.diagonals):
        k1, k2 = diagonal_side_counts(n, diag)
        small, large = min(k1, k2), max(k1, k2)
        pen = piece_penalty.get(diag, 0) if piece_penalty else 0
        if 5 <= small <= 8:
            ranked.append((pen, 0, diag, small))
        elif 5 <= large <= 8:
            ranked.append((pen, 1, diag, large))
    ranked.sort(key=lambda c: (c[0], c[1], c[2]))
    return [(diag, k) for _, _, diag, k in ranked]


def balanced_diagonal(T: Triangulation,
                      piece_penalty: dict[tuple[int, int], int] | None = None
                      ) -> tuple[tuple[int, int], int]:
    """Best diagonal with exactly k in {5..8} polygon edges on one side."""
    cands = balanced_diagonal_candidates(T, piece_penalty)
    if not cands:
        raise BalancedDiagonalNotFound(
            f"no diagonal with 5..8 polygon edges on one side (n={T.polygon.n})")
    return cands[0]
