"""Recursive minimal partitioning and the mobile-guard budget arithmetic.

A polygon with n >= 10 vertices is cut along balanced diagonals until the
remaining piece has at most 9 edges.  Every cut-off piece has 6..9 edges; the
terminal piece is a partition if it has >= 6 edges and otherwise the single
remainder (3..5 edges).

Edge accounting: with ``pieces`` = partitions plus remainder (if any), each
cut diagonal is shared by exactly two pieces, so
``n + 2*(pieces - 1) - k' == sum(k_i + k_hat_i)`` holds exactly, where k_i
counts a partition's edges that are edges of the input polygon and k_hat_i
its inherited cut diagonals.
"""
from __future__ import annotations

from dataclasses import dataclass

from .geometry import DegeneratePolygon, Point, SimplePolygon
from .triangulation import (
    BalancedDiagonalNotFound,
    TooSmall,
    balanced_diagonal_candidates,
    diagonal_side_counts,
    triangulate,
)

KIND_BY_EDGES = {6: "hexagon", 7: "septagon", 8: "octagon", 9: "nonagon"}


class NotANonagon(ValueError):
    pass


class NonagonSplitFailed(RuntimeError):
    """Diagnostic: no interior diagonal splits this 9-gon into 5-gon + 6-gon."""


@dataclass(frozen=True)
class Partition:
    polygon: SimplePolygon
    vertex_ids: tuple[int, ...]          # indices into the source polygon
    original_edge_count: int             # k_i
    diagonal_edge_count: int             # k_hat_i
    kind: str

    @property
    def edge_count(self) -> int:
        return self.polygon.n


@dataclass(frozen=True)
class PartitionSet:
    polygon: SimplePolygon
    partitions: tuple[Partition, ...]    # 6..9-edge pieces
    remainder: Partition | None          # 3..5-edge piece, at most one
    cut_diagonals: tuple[tuple[int, int], ...]

    @property
    def r(self) -> int:
        return len(self.partitions)

    @property
    def k_prime(self) -> int:
        return self.remainder.edge_count if self.remainder else 0

    def all_pieces(self) -> tuple[Partition, ...]:
        return self.partitions + ((self.remainder,) if self.remainder else ())

    def edge_identity_residual(self) -> int:
        """Zero iff the cut-diagonal edge accounting is consistent."""
        pieces = self.r + (1 if self.remainder else 0)
        lhs = self.polygon.n + 2 * (pieces - 1) - self.k_prime
        rhs = sum(p.original_edge_count + p.diagonal_edge_count
                  for p in self.partitions)
        return lhs - rhs

    def adjacency(self) -> tuple[tuple[int, int], ...]:
        """Pairs of piece indices sharing a cut diagonal (piece tree)."""
        pieces = self.all_pieces()
        out = []
        for d in self.cut_diagonals:
            key = frozenset(d)
            touching = [i for i, p in enumerate(pieces)
                        if key <= set(_ring_edges_keys(p.vertex_ids))]
            if len(touching) == 2:
                out.append((touching[0], touching[1]))
        return tuple(out)


def _ring_edges_keys(ids: tuple[int, ...]) -> list[frozenset]:
    return [frozenset((ids[i], ids[(i + 1) % len(ids)])) for i in range(len(ids))]


def _edge_counts(ids: tuple[int, ...], n: int,
                 diagonal_edges: set[frozenset]) -> tuple[int, int]:
    k = k_hat = 0
    m = len(ids)
    for i in range(m):
        u, v = ids[i], ids[(i + 1) % m]
        if (u + 1) % n == v or (v + 1) % n == u:
            k += 1
        elif frozenset((u, v)) in diagonal_edges:
            k_hat += 1
        else:
            raise DegeneratePolygon(
                f"edge ({u},{v}) is neither original nor a recorded diagonal")
    return k, k_hat


def _make_piece(P: SimplePolygon, ids: tuple[int, ...],
                diagonal_edges: set[frozenset]) -> Partition:
    poly = SimplePolygon([P.vertices[i] for i in ids])
    k, k_hat = _edge_counts(ids, P.n, diagonal_edges)
    m = len(ids)
    kind = KIND_BY_EDGES.get(m, "remainder" if m <= 5 else "oversize")
    return Partition(poly, ids, k, k_hat, kind)


def minimal_partition(P: SimplePolygon) -> PartitionSet:
    """Cut P into 6..9-edge partitions plus at most one 3..5-edge remainder."""
    if not isinstance(P, SimplePolygon):
        raise DegeneratePolygon("minimal_partition expects a SimplePolygon")
    n = P.n
    current: tuple[int, ...] = tuple(range(n))
    diagonal_edges: set[frozenset] = set()
    cut_diagonals: list[tuple[int, int]] = []
    partitions: list[Partition] = []
    remainder: Partition | None = None

    while len(current) >= 10:
        diag, k, piece_ids, rest_ids = _find_cut(P, current, diagonal_edges)
        diagonal_edges.add(frozenset(diag))
        cut_diagonals.append(diag)
        partitions.append(_make_piece(P, piece_ids, diagonal_edges))
        current = rest_ids

    if len(current) >= 6:
        partitions.append(_make_piece(P, current, diagonal_edges))
    else:
        remainder = _make_piece(P, current, diagonal_edges)

    ps = PartitionSet(P, tuple(partitions), remainder, tuple(cut_diagonals))
    if ps.edge_identity_residual() != 0:
        raise DegeneratePolygon("partition edge accounting is inconsistent")
    for p in ps.partitions:
        if not (6 <= p.edge_count <= 9):
            raise DegeneratePolygon(f"partition with {p.edge_count} edges")
    if ps.remainder and not (3 <= ps.remainder.edge_count <= 5):
        raise DegeneratePolygon("remainder outside 3..5 edges")
    return ps


def _chain(m: int, i: int, j: int) -> list[int]:
    """Forward local-index chain i..j inclusive on an m-ring."""
    out = [i % m]
    t = i % m
    while t != j % m:
        t = (t + 1) % m
        out.append(t)
    return out


def _sides_for(m: int, diag: tuple[int, int], k: int) -> tuple[list[int], list[int]]:
    """(piece_chain, rest_chain) so the piece side carries k ring edges."""
    a, b = diag
    k_forward = (b - a) % m
    if k == k_forward:
        return _chain(m, a, b), _chain(m, b, a)
    return _chain(m, b, a), _chain(m, a, b)


def _find_cut(P: SimplePolygon, current: tuple[int, ...],
              diagonal_edges: set[frozenset]):
    """Pick the cut diagonal on the current sub-polygon.

    Candidates are ranked to keep inherited diagonals per piece at most one
    (so k_hat <= 2); candidates whose sides fail polygon validation (e.g. a
    diagonal collinear with a boundary edge) are skipped.
    """
    sub = SimplePolygon([P.vertices[i] for i in current])
    m = len(current)
    last_error: Exception | None = None
    for start in range(m):
        T = triangulate(sub, start=start)
        penalty: dict[tuple[int, int], int] = {}
        for d in T.diagonals:
            k1, k2 = diagonal_side_counts(m, d)
            small, large = min(k1, k2), max(k1, k2)
            k = small if 5 <= small <= 8 else (large if 5 <= large <= 8 else None)
            if k is None:
                continue
            side, _ = _sides_for(m, d, k)
            inherited = _inherited_diagonals(current, side, diagonal_edges)
            penalty[d] = max(0, inherited - 1)
        for diag, k in balanced_diagonal_candidates(T, piece_penalty=penalty):
            side, rest = _sides_for(m, diag, k)
            piece_ids = tuple(current[i] for i in side)
            rest_ids = tuple(current[i] for i in rest)
            try:
                SimplePolygon([P.vertices[i] for i in piece_ids])
                SimplePolygon([P.vertices[i] for i in rest_ids])
            except DegeneratePolygon as exc:
                last_error = exc
                continue
            odiag = (min(piece_ids[0], piece_ids[-1]),
                     max(piece_ids[0], piece_ids[-1]))
            return odiag, k, piece_ids, rest_ids
    raise BalancedDiagonalNotFound(
        f"no usable balanced diagonal for sub-polygon of {m} edges") from last_error


def _inherited_diagonals(current: tuple[int, ...], side: list[int],
                         diagonal_edges: set[frozenset]) -> int:
    count = 0
    for i in range(len(side) - 1):
        u, v = current[side[i]], current[side[i + 1]]
        if frozenset((u, v)) in diagonal_edges:
            count += 1
    return count


def guard_budget(ps: PartitionSet,
                 per_partition_guards: list[int]) -> tuple[int, int, bool]:
    """Total guards (+1 for a remainder), the floor(n/3) bound, and the verdict."""
    if len(per_partition_guards) != ps.r:
        raise ValueError("one guard count per non-remainder partition required")
    if any(g < 1 for g in per_partition_guards):
        raise ValueError("every partition needs at least one guard")
    total = sum(per_partition_guards) + (1 if ps.remainder else 0)
    bound = ps.polygon.n // 3
    return total, bound, total < bound


def nonagon_split(P: SimplePolygon) -> tuple[SimplePolygon, SimplePolygon]:
    """Split a 9-gon into a pentagon and a hexagon along one interior diagonal."""
    if P.n != 9:
        raise NotANonagon(f"expected 9 edges, got {P.n}")
    for shift in range(9):
        i, j = shift, (shift + 4) % 9
        a, b = P.vertices[i], P.vertices[j]
        if not P.segment_inside(a, b):
            continue
        mid = Point(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
        if not P.strictly_contains(mid):
            continue
        lo, hi = min(i, j), max(i, j)
        side1 = [P.vertices[t] for t in range(lo, hi + 1)]
        side2 = [P.vertices[t % 9] for t in range(hi, hi + 9 - (hi - lo) + 1)]
        try:
            poly1, poly2 = SimplePolygon(side1), SimplePolygon(side2)
        except DegeneratePolygon:
            continue
        pent, hexa = (poly1, poly2) if poly1.n == 5 else (poly2, poly1)
        return pent, hexa
    raise NonagonSplitFailed("no interior diagonal yields a pentagon + hexagon")
