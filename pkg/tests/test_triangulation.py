import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from guardsim import fixtures
from guardsim.geometry import Point, SimplePolygon
from guardsim.triangulation import (
    TooSmall,
    balanced_diagonal,
    diagonal_side_counts,
    dual_tree,
    triangulate,
)


def triangle_area(P, tri):
    a, b, c = (P.vertices[i] for i in tri)
    return 0.5 * abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x))


def assert_valid_triangulation(P, T):
    assert len(T.triangles) == P.n - 2
    assert len(T.diagonals) == P.n - 3
    total = sum(triangle_area(P, t) for t in T.triangles)
    assert total == pytest.approx(P.area, rel=1e-9)
    for a, b in T.diagonals:
        va, vb = P.vertices[a], P.vertices[b]
        mid = Point(0.5 * (va.x + vb.x), 0.5 * (va.y + vb.y))
        assert P.contains(mid)
        assert P.segment_inside(va, vb)


class TestTriangulate:
    def test_triangle_is_itself(self):
        P = SimplePolygon([(0, 0), (2, 0), (1, 2)])
        T = triangulate(P)
        assert T.triangles == ((0, 1, 2),)
        assert T.diagonals == ()

    def test_convex_quadrilateral(self):
        P = SimplePolygon([(0, 0), (2, 0), (2, 2), (0, 2)])
        T = triangulate(P)
        assert len(T.triangles) == 2
        assert len(T.diagonals) == 1

    def test_l_hexagon(self, l_hexagon):
        T = triangulate(l_hexagon)
        assert len(T.triangles) == 4
        assert len(T.diagonals) == 3
        assert_valid_triangulation(l_hexagon, T)

    def test_whole_corpus(self, corpus):
        for name, P in corpus.items():
            T = triangulate(P)
            assert_valid_triangulation(P, T)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(3, 20), st.integers(0, 100))
    def test_random_convex(self, n, seed):
        P = fixtures.convex_ngon(n, seed=seed)
        assert_valid_triangulation(P, triangulate(P))


class TestDualTree:
    def test_quadrilateral_tree(self):
        P = SimplePolygon([(0, 0), (2, 0), (2, 2), (0, 2)])
        D = dual_tree(triangulate(P))
        assert D.node_count == 2
        assert len(D.edges) == 1

    def test_tree_structure_whole_corpus(self, corpus):
        # connected + acyclic via union-find, node/edge counts, degree <= 3
        for name, P in corpus.items():
            T = triangulate(P)
            D = dual_tree(T)
            assert D.node_count == P.n - 2
            assert len(D.edges) == P.n - 3
            parent = list(range(D.node_count))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for a, b, _ in D.edges:
                ra, rb = find(a), find(b)
                assert ra != rb, f"cycle in dual tree of {name}"
                parent[ra] = rb
            roots = {find(i) for i in range(D.node_count)}
            assert len(roots) == 1, f"dual tree of {name} disconnected"
            for row in D.adjacency():
                assert len(row) <= 3


class TestBalancedDiagonal:
    def test_too_small(self):
        P = fixtures.convex_ngon(9, seed=0)
        with pytest.raises(TooSmall):
            balanced_diagonal(triangulate(P))

    def test_convex_10gon(self):
        P = fixtures.convex_ngon(10, seed=0)
        diag, k = balanced_diagonal(triangulate(P))
        assert 5 <= k <= 8
        k1, k2 = diagonal_side_counts(P.n, diag)
        assert k in (k1, k2)

    def test_convex_12gon_both_sides_revalidate(self):
        P = fixtures.convex_ngon(12, seed=3)
        diag, k = balanced_diagonal(triangulate(P))
        a, b = diag
        lo, hi = min(a, b), max(a, b)
        side1 = [P.vertices[i] for i in range(lo, hi + 1)]
        side2 = [P.vertices[i % P.n] for i in range(hi, hi + P.n - (hi - lo) + 1)]
        P1, P2 = SimplePolygon(side1), SimplePolygon(side2)
        assert P1.area + P2.area == pytest.approx(P.area, rel=1e-9)
        assert (P1.n - 1) + (P2.n - 1) == P.n

    def test_exists_on_entire_corpus(self, corpus):
        for name, P in corpus.items():
            if P.n < 10:
                continue
            diag, k = balanced_diagonal(triangulate(P))
            assert 5 <= k <= 8, name
