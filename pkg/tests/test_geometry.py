import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from guardsim.geometry import (
    DegenerateInput,
    DegeneratePolygon,
    Point,
    SimplePolygon,
    segment_visible,
    shortest_path,
    visibility_polygon,
)
from guardsim import fixtures

from conftest import _near_boundary, ray_crossing_oracle, sample_interior

UNIT_SQUARE = SimplePolygon([(0, 0), (1, 0), (1, 1), (0, 1)])


class TestPolygonValidation:
    def test_rejects_too_few_vertices(self):
        with pytest.raises(DegeneratePolygon):
            SimplePolygon([(0, 0), (1, 0)])

    def test_rejects_clockwise(self):
        with pytest.raises(DegeneratePolygon):
            SimplePolygon([(0, 0), (0, 1), (1, 1), (1, 0)])

    def test_from_coords_fixes_orientation(self):
        P = SimplePolygon.from_coords([(0, 0), (0, 1), (1, 1), (1, 0)])
        assert P.area > 0

    def test_rejects_repeated_vertex(self):
        with pytest.raises(DegeneratePolygon):
            SimplePolygon([(0, 0), (1, 0), (1, 0), (1, 1)])

    def test_rejects_collinear_run(self):
        with pytest.raises(DegeneratePolygon):
            SimplePolygon([(0, 0), (1, 0), (2, 0), (2, 2), (0, 2)])

    def test_rejects_self_intersection(self):
        with pytest.raises(DegeneratePolygon):
            SimplePolygon([(0, 0), (2, 2), (2, 0), (0, 2)])

    def test_reflex_classification(self, l_hexagon):
        assert l_hexagon.reflex_vertices() == (3,)
        assert not l_hexagon.reflex_flags[0]

    def test_nonfinite_point_rejected(self):
        with pytest.raises(DegenerateInput):
            Point(float("nan"), 0.0)


class TestContains:
    def test_unit_square_centroid(self):
        assert UNIT_SQUARE.contains(Point(0.5, 0.5))

    def test_unit_square_outside(self):
        assert not UNIT_SQUARE.contains(Point(2, 0))

    def test_l_hexagon_notch(self, l_hexagon):
        assert not l_hexagon.contains(Point(3, 3))

    def test_boundary_counts_inside(self, l_hexagon):
        assert l_hexagon.contains(Point(2, 2))
        assert l_hexagon.contains(Point(0, 0))
        assert l_hexagon.contains(Point(4, 1))

    def test_agrees_with_ray_crossing_oracle(self, corpus):
        for name, P in corpus.items():
            x0, y0, x1, y1 = P.bbox
            rng = np.random.default_rng(7)
            pts = rng.uniform([x0 - 1, y0 - 1], [x1 + 1, y1 + 1], size=(10_000, 2))
            band = _near_boundary(P, pts, 1e-7)
            got = P.contains_many(pts)[~band]
            want = ray_crossing_oracle(P, pts)[~band]
            assert (got == want).all(), name


class TestSegmentVisible:
    def test_l_hexagon_bottom_arm(self, l_hexagon):
        assert segment_visible(l_hexagon, Point(1, 1), Point(3, 1))

    def test_grazing_through_reflex_corner_is_visible(self, l_hexagon):
        # the segment lies on x + y = 4 and touches the corner (2, 2) exactly;
        # grazing counts as visible by convention
        assert segment_visible(l_hexagon, Point(1, 3), Point(3, 1))

    def test_crossing_the_notch_is_blocked(self, l_hexagon):
        assert not segment_visible(l_hexagon, Point(1, 3.5), Point(3.5, 1))

    def test_convex_any_pair(self):
        P = fixtures.convex_ngon(9, seed=1)
        pts = sample_interior(P, 40, seed=3)
        for i in range(0, 40, 2):
            a = Point(*pts[i])
            b = Point(*pts[i + 1])
            assert segment_visible(P, a, b)

    def test_symmetry_sampled(self, corpus):
        for name, P in corpus.items():
            pts = sample_interior(P, 40, seed=11)
            for i in range(0, 40, 2):
                a, b = Point(*pts[i]), Point(*pts[i + 1])
                assert segment_visible(P, a, b) == segment_visible(P, b, a), name

    def test_endpoint_outside_is_false(self, l_hexagon):
        assert not segment_visible(l_hexagon, Point(1, 1), Point(3, 3))


class TestVisibilityPolygon:
    def test_convex_returns_whole_polygon(self):
        P = fixtures.convex_ngon(5, seed=2)
        V = visibility_polygon(P, P.centroid)
        assert V.area == pytest.approx(P.area, rel=1e-9)

    def test_l_hexagon_star_point_sees_all(self, l_hexagon):
        V = visibility_polygon(l_hexagon, Point(1, 1))
        assert V.area == pytest.approx(12.0, rel=1e-9)

    def test_l_hexagon_occluded_viewpoint(self, l_hexagon):
        V = visibility_polygon(l_hexagon, Point(3, 1))
        assert V.area == pytest.approx(10.0, rel=1e-9)
        assert V.area < l_hexagon.area

    def test_viewpoint_outside_raises(self, l_hexagon):
        with pytest.raises(DegenerateInput):
            visibility_polygon(l_hexagon, Point(3, 3))

    def test_result_inside_polygon(self, corpus):
        for name, P in corpus.items():
            p = Point(*sample_interior(P, 1, seed=5)[0])
            V = visibility_polygon(P, p)
            assert V.area <= P.area * (1 + 1e-9), name
            assert V.contains(p), name
            inner = sample_interior(V, 50, seed=6)
            assert P.contains_many(inner).all(), name

    def test_matches_segment_visibility(self, corpus):
        # q in V(p) <=> segment p-q visible, away from an eps boundary band
        for name, P in corpus.items():
            origins = sample_interior(P, 5, seed=21, margin=1e-6)
            targets = sample_interior(P, 200, seed=22, margin=1e-6)
            for o in origins:
                p = Point(*o)
                V = visibility_polygon(P, p)
                near = _near_boundary(V, targets, 1e-6)
                in_v = V.contains_many(targets)
                for k, q in enumerate(targets):
                    if near[k]:
                        continue
                    assert in_v[k] == segment_visible(P, p, Point(*q)), (name, o, q)


class TestShortestPath:
    def test_convex_is_straight(self):
        P = fixtures.convex_ngon(8, seed=4)
        pts = sample_interior(P, 2, seed=9)
        path = shortest_path(P, Point(*pts[0]), Point(*pts[1]))
        assert len(path.waypoints) == 2
        assert path.total_length == pytest.approx(
            math.dist(pts[0], pts[1]), rel=1e-12)

    def test_l_hexagon_around_corner(self, l_hexagon):
        path = shortest_path(l_hexagon, Point(3, 1), Point(1, 3))
        assert path.total_length == pytest.approx(2 * math.sqrt(2), rel=1e-12)
        for a, b in zip(path.waypoints, path.waypoints[1:]):
            assert segment_visible(l_hexagon, a, b)

    def test_l_hexagon_genuinely_bent(self, l_hexagon):
        path = shortest_path(l_hexagon, Point(3.5, 1), Point(1, 3.5))
        assert len(path.waypoints) == 3
        w = path.waypoints[1]
        assert (w.x, w.y) == (2, 2)

    def test_identity(self, l_hexagon):
        path = shortest_path(l_hexagon, Point(1, 1), Point(1, 1))
        assert path.total_length == 0.0
        assert len(path.waypoints) == 1

    def test_not_longer_than_sampled_paths(self, corpus):
        rng = np.random.default_rng(13)
        for name, P in corpus.items():
            pts = sample_interior(P, 8, seed=17)
            a, b = Point(*pts[0]), Point(*pts[1])
            geo = shortest_path(P, a, b).total_length
            # candidate piecewise-linear paths via random interior waypoints
            for _ in range(20):
                k = rng.integers(1, 3)
                mid = sample_interior(P, int(k), seed=int(rng.integers(1 << 30)))
                chain = [a] + [Point(*m) for m in mid] + [b]
                if all(segment_visible(P, u, v) for u, v in zip(chain, chain[1:])):
                    length = sum(u.dist(v) for u, v in zip(chain, chain[1:]))
                    assert geo <= length + 1e-9, name

    def test_intermediate_waypoints_are_reflex_vertices(self, corpus):
        for name, P in corpus.items():
            reflex = {P.vertices[i].as_tuple() for i in P.reflex_vertices()}
            pts = sample_interior(P, 6, seed=29)
            for i in range(0, 6, 2):
                path = shortest_path(P, Point(*pts[i]), Point(*pts[i + 1]))
                for w in path.waypoints[1:-1]:
                    assert w.as_tuple() in reflex, name


@st.composite
def convex_polygons(draw):
    n = draw(st.integers(min_value=3, max_value=12))
    seed = draw(st.integers(min_value=0, max_value=1000))
    return fixtures.convex_ngon(n, seed=seed)


class TestProperties:
    @settings(max_examples=30, deadline=None)
    @given(convex_polygons(), st.integers(0, 100))
    def test_convex_interior_pairs_visible(self, P, seed):
        pts = sample_interior(P, 2, seed=seed)
        assert segment_visible(P, Point(*pts[0]), Point(*pts[1]))

    @settings(max_examples=30, deadline=None)
    @given(convex_polygons())
    def test_convex_has_no_reflex(self, P):
        assert P.is_convex()

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 50), st.integers(3, 10))
    def test_visibility_polygon_of_convex_is_identity(self, seed, n):
        P = fixtures.convex_ngon(n, seed=seed)
        p = Point(*sample_interior(P, 1, seed=seed)[0])
        V = visibility_polygon(P, p)
        assert V.area == pytest.approx(P.area, rel=1e-9)
