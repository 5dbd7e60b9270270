import numpy as np
import pytest

from guardsim import fixtures
from guardsim.deploy import (
    CoverageGapError,
    covers_whole,
    deploy_from_partition_set,
    deploy_nonagon,
    deploy_partition,
    deploy_polygon,
    polygon_kernel,
)
from guardsim.geometry import Point, SimplePolygon, visibility_polygon
from guardsim.partition import Partition, PartitionSet, minimal_partition
from guardsim.starzones import build_road_map, speed_bound, star_region

from conftest import sample_interior


class TestKernel:
    def test_convex_kernel_is_polygon(self):
        P = fixtures.convex_ngon(6, seed=5)
        K = polygon_kernel(P)
        assert K is not None
        assert K.area == pytest.approx(P.area, rel=1e-9)

    def test_l_hexagon_kernel_is_star_square(self, l_hexagon):
        K = polygon_kernel(l_hexagon)
        assert K is not None
        assert K.area == pytest.approx(4.0, rel=1e-9)

    def test_crown_kernel_empty(self, crown_hexagon):
        assert polygon_kernel(crown_hexagon) is None


class TestDeployPartition:
    def test_convex_hexagon_static(self):
        P = fixtures.convex_ngon(6, seed=3)
        got = deploy_partition(P)
        assert len(got) == 1
        assert got[0].mode == "static"
        assert covers_whole(P, got[0].position)

    def test_l_hexagon_static_inside_star(self, l_hexagon):
        got = deploy_partition(l_hexagon)
        assert len(got) == 1
        a = got[0]
        assert a.mode == "static"
        assert 0 <= a.position.x <= 2 and 0 <= a.position.y <= 2
        assert covers_whole(l_hexagon, a.position)

    def test_crown_mobile_with_speed(self, crown_hexagon):
        got = deploy_partition(crown_hexagon, ve=1.0)
        assert len(got) == 1
        a = got[0]
        assert a.mode == "mobile"
        regs = [star_region(crown_hexagon, i) for i in (3, 4)]
        rm = build_road_map(crown_hexagon, regs)
        expect = speed_bound(crown_hexagon, rm, ve=1.0).v_star
        assert a.v_star == pytest.approx(expect, rel=1e-12)
        assert a.zones

    def test_static_guards_see_their_whole_piece(self, corpus):
        for name, P in corpus.items():
            plan = deploy_polygon(P)
            for a in plan.assignments:
                if a.mode == "static":
                    vis = visibility_polygon(a.polygon, a.position)
                    assert vis.area == pytest.approx(a.polygon.area, rel=1e-9), name


class TestDeployNonagon:
    def test_convex_nonagon_two_guards(self):
        P = fixtures.convex_ngon(9, seed=7)
        got = deploy_nonagon(P)
        assert len(got) == 2
        assert {a.mode for a in got} == {"static"}

    def test_notched_nonagon(self):
        P = fixtures.nonagon_with_notch()
        got = deploy_nonagon(P)
        assert len(got) == 2
        for a in got:
            if a.mode == "static":
                assert covers_whole(a.polygon, a.position)

    def test_budget_stays_under_three(self):
        P = fixtures.convex_ngon(9, seed=7)
        assert len(deploy_nonagon(P)) < 9 // 3


class TestDeployPolygon:
    def test_convex_12gon_all_static(self):
        plan = deploy_polygon(fixtures.convex_ngon(12, seed=12))
        assert all(a.mode == "static" for a in plan.assignments)
        assert plan.guard_total < 4

    def test_twenty_gon_under_bound(self):
        plan = deploy_polygon(fixtures.twenty_gon())
        assert plan.bound == 6
        assert plan.guard_total < 6
        assert plan.satisfies_bound

    def test_hexagon_single_guard(self, l_hexagon):
        plan = deploy_polygon(l_hexagon)
        assert plan.guard_total == 1
        assert plan.bound == 2

    def test_global_v_star_is_max(self, corpus):
        for name, P in corpus.items():
            plan = deploy_polygon(P)
            expect = max((a.v_star for a in plan.assignments), default=0.0)
            assert plan.global_v_star == expect, name

    def test_every_point_has_responsible_guard(self, corpus):
        for name in ("twenty_gon", "crown_hexagon", "snake_corridor", "convex_17"):
            P = corpus[name]
            plan = deploy_polygon(P)
            pts = sample_interior(P, 2000, seed=4)
            covered = np.zeros(len(pts), dtype=bool)
            for a in plan.assignments:
                covered |= a.polygon.contains_many(pts)
            assert covered.all(), name

    def test_deterministic(self, corpus):
        for name in ("twenty_gon", "crown_hexagon", "convex_15"):
            P = corpus[name]
            p1 = deploy_polygon(P)
            p2 = deploy_polygon(P)
            for a, b in zip(p1.assignments, p2.assignments):
                assert a.mode == b.mode
                assert a.initial_position() == b.initial_position()

    def test_budget_flag_honest_on_whole_corpus(self, corpus):
        for name, P in corpus.items():
            plan = deploy_polygon(P)
            assert plan.satisfies_bound == (plan.guard_total < P.n // 3), name


class TestRemainderPath:
    def make_remainder_set(self):
        # cut a convex 10-gon along (0, 8): a nonagon piece plus a triangle
        # remainder; exercises the +1 static remainder guard
        P = fixtures.convex_ngon(10, seed=4)
        piece_ids = tuple(range(0, 9))
        rem_ids = (8, 9, 0)
        piece = SimplePolygon([P.vertices[i] for i in piece_ids])
        rem = SimplePolygon([P.vertices[i] for i in rem_ids])
        return PartitionSet(
            P,
            (Partition(piece, piece_ids, 8, 1, "nonagon"),),
            Partition(rem, rem_ids, 2, 1, "remainder"),
            ((0, 8),),
        )

    def test_remainder_gets_static_guard(self):
        ps = self.make_remainder_set()
        plan = deploy_from_partition_set(ps)
        assert ps.edge_identity_residual() == 0
        assert plan.guard_total == len(plan.assignments)
        rem_guard = plan.assignments[-1]
        assert rem_guard.mode == "static"
        assert covers_whole(rem_guard.polygon, rem_guard.position)
        # nonagon piece contributes two guards, remainder one
        assert plan.guard_total == 3
        assert plan.bound == 3
        assert not plan.satisfies_bound  # r < 3 with remainder: bound not claimed
