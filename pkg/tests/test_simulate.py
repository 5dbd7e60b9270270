import math

import numpy as np
import pytest

from guardsim import fixtures
from guardsim.deploy import deploy_polygon
from guardsim.geometry import Point
from guardsim.simulate import (
    ConfigInvalid,
    SimConfig,
    Simulation,
    guard_target,
    interior_start,
    run,
)
from guardsim.starzones import build_dynamic_zones, build_road_map, speed_bound, star_region


@pytest.fixture(scope="module")
def crown_plan():
    P = fixtures.crown_hexagon()
    return P, deploy_polygon(P, ve=1.0)


class TestGuardTarget:
    def test_boundary_correspondence(self):
        P = fixtures.crown_hexagon()
        regs = [star_region(P, i) for i in (3, 4)]
        rm = build_road_map(P, regs)
        zones = build_dynamic_zones(P, rm, ve=1.0, vp=1.0)
        z = zones[0]
        # on the outer boundary: clearance = radius -> rest anchor end
        apex = z.apex
        ux, uy = z.trigger_ray.direction
        nx, ny = -z.shadow_sign * (-uy), -z.shadow_sign * ux
        outer = Point(apex.x + 0.3 * ux + z.radius * nx,
                      apex.y + 0.3 * uy + z.radius * ny)
        assert z.guard_fraction(outer) == pytest.approx(0.0, abs=1e-12)
        assert z.target_arc(outer) == pytest.approx(z.segment.a_arc)
        # on the trigger ray: clearance = 0 -> cover station end
        on_ray = Point(apex.x + 0.3 * ux, apex.y + 0.3 * uy)
        assert z.guard_fraction(on_ray) == pytest.approx(1.0)
        assert z.target_arc(on_ray) == pytest.approx(z.segment.b_arc)
        # halfway
        mid = Point(apex.x + 0.3 * ux + 0.5 * z.radius * nx,
                    apex.y + 0.3 * uy + 0.5 * z.radius * ny)
        assert z.guard_fraction(mid) == pytest.approx(0.5)

    def test_guard_target_function(self):
        P = fixtures.crown_hexagon()
        regs = [star_region(P, i) for i in (3, 4)]
        rm = build_road_map(P, regs)
        zones = build_dynamic_zones(P, rm, ve=1.0, vp=1.0)
        z = zones[0]
        apex = z.apex
        ux, uy = z.trigger_ray.direction
        on_ray = Point(apex.x + 0.2 * ux, apex.y + 0.2 * uy)
        assert guard_target(zones, on_ray) == pytest.approx(z.segment.b_arc)


class TestStep:
    def test_stationary_evader_stays_visible(self, crown_plan):
        P, plan = crown_plan
        cfg = SimConfig(ve=0.0, vp=plan.global_v_star, steps=200, seed=3,
                        policy="random_walk")
        tr = run(P, plan, cfg)
        assert tr.breach_steps == ()
        first = tr.records[0].intruder
        assert all(r.intruder == first for r in tr.records)

    def test_crown_full_speed_greedy_no_breach(self, crown_plan):
        P, plan = crown_plan
        cfg = SimConfig(ve=1.0, vp=plan.global_v_star, steps=10_000, seed=42,
                        policy="greedy_escape")
        tr = run(P, plan, cfg)
        assert tr.breach_steps == ()

    def test_crown_under_speed_witness_breaches(self, crown_plan):
        P, plan = crown_plan
        cfg = SimConfig(ve=1.0, vp=0.5 * plan.global_v_star, steps=3000, seed=1,
                        policy="scripted", start=(3.0, 0.5),
                        waypoints=((5.8, 3.4),))
        tr = run(P, plan, cfg)
        assert len(tr.breach_steps) >= 1

    def test_speed_contract(self, crown_plan):
        P, plan = crown_plan
        cfg = SimConfig(ve=1.0, vp=plan.global_v_star, steps=500, seed=7,
                        policy="greedy_escape")
        sim = Simulation(P, plan, cfg)
        prev = sim.state()
        for _ in range(500):
            cur = sim.step()
            di = math.dist(prev.intruder, cur.intruder)
            assert di <= cfg.ve * sim.dt + 1e-9
            for g0, g1 in zip(prev.guards, cur.guards):
                assert math.dist(g0, g1) <= cfg.vp * sim.dt + 1e-9
            prev = cur

    def test_containment_and_road_map_adherence(self, crown_plan):
        P, plan = crown_plan
        cfg = SimConfig(ve=1.0, vp=plan.global_v_star, steps=800, seed=11,
                        policy="random_walk")
        sim = Simulation(P, plan, cfg)
        mobile = plan.mobile_assignments()[0]
        path = mobile.road_map.path
        for _ in range(800):
            st = sim.step()
            assert P.contains(Point(*st.intruder), tol=1e-7)
            for g in st.guards:
                assert P.contains(Point(*g), tol=1e-7)
            gp = Point(*st.guards[0])
            ds = [_dist_to_segment(gp, a, b)
                  for a, b in zip(path.waypoints, path.waypoints[1:])]
            assert min(ds) <= 1e-9

    def test_zero_speed_guard_is_static(self, crown_plan):
        P, plan = crown_plan
        cfg = SimConfig(ve=0.5, vp=0.0, steps=50, seed=5, policy="random_walk")
        tr = run(P, plan, cfg)
        g0 = tr.records[0].guards
        assert all(r.guards == g0 for r in tr.records)


def _dist_to_segment(p, a, b):
    ax, ay, bx, by = a.x, a.y, b.x, b.y
    ex, ey = bx - ax, by - ay
    seg2 = ex * ex + ey * ey
    if seg2 == 0:
        return math.hypot(p.x - ax, p.y - ay)
    t = max(0.0, min(1.0, ((p.x - ax) * ex + (p.y - ay) * ey) / seg2))
    return math.hypot(p.x - (ax + t * ex), p.y - (ay + t * ey))


class TestRun:
    def test_zero_steps_single_record(self, crown_plan):
        P, plan = crown_plan
        cfg = SimConfig(ve=1.0, vp=1.0, steps=0, seed=0, policy="random_walk")
        tr = run(P, plan, cfg)
        assert len(tr.records) == 1
        assert tr.breach_steps == ()

    def test_deterministic_digest(self, crown_plan):
        P, plan = crown_plan
        cfg = SimConfig(ve=1.0, vp=plan.global_v_star, steps=2000, seed=42,
                        policy="random_walk")
        assert run(P, plan, cfg).digest() == run(P, plan, cfg).digest()

    def test_different_seed_different_trace(self, crown_plan):
        P, plan = crown_plan
        a = run(P, plan, SimConfig(ve=1.0, vp=1.0, steps=500, seed=1,
                                   policy="random_walk"))
        b = run(P, plan, SimConfig(ve=1.0, vp=1.0, steps=500, seed=2,
                                   policy="random_walk"))
        assert a.digest() != b.digest()

    def test_record_count(self, crown_plan):
        P, plan = crown_plan
        cfg = SimConfig(ve=1.0, vp=1.0, steps=137, seed=0, policy="greedy_escape")
        tr = run(P, plan, cfg)
        assert len(tr.records) == 138

    def test_breach_steps_consistent(self, crown_plan):
        P, plan = crown_plan
        cfg = SimConfig(ve=1.0, vp=0.4 * plan.global_v_star, steps=2000, seed=9,
                        policy="greedy_escape")
        tr = run(P, plan, cfg)
        recomputed = tuple(k for k, r in enumerate(tr.records)
                           if not r.visible and k > 0)
        assert tr.breach_steps == recomputed


class TestConfigValidation:
    def test_bad_dt(self, crown_plan):
        P, plan = crown_plan
        with pytest.raises(ConfigInvalid):
            Simulation(P, plan, SimConfig(ve=1, vp=1, steps=1, dt=0))

    def test_bad_policy(self, crown_plan):
        P, plan = crown_plan
        with pytest.raises(ConfigInvalid):
            Simulation(P, plan, SimConfig(ve=1, vp=1, steps=1, policy="chase"))

    def test_start_outside(self, crown_plan):
        P, plan = crown_plan
        with pytest.raises(ConfigInvalid):
            Simulation(P, plan, SimConfig(ve=1, vp=1, steps=1, start=(99, 99)))

    def test_scripted_needs_waypoints(self, crown_plan):
        P, plan = crown_plan
        with pytest.raises(ConfigInvalid):
            Simulation(P, plan, SimConfig(ve=1, vp=1, steps=1, policy="scripted"))

    def test_dt_clamped_to_zone_scale(self, crown_plan):
        P, plan = crown_plan
        cfg = SimConfig(ve=1.0, vp=plan.global_v_star, steps=1, dt=10.0)
        sim = Simulation(P, plan, cfg)
        min_r = min(z.radius for a in plan.mobile_assignments()
                    for z in build_dynamic_zones(a.polygon, a.road_map,
                                                 cfg.ve, cfg.vp, clamp=True))
        assert sim.dt <= min_r / (4 * cfg.ve) + 1e-12


class TestWholeCoreusTracking:
    def test_every_fixture_zero_breach_random_walk(self, corpus):
        for name, P in corpus.items():
            plan = deploy_polygon(P, ve=1.0)
            vp = plan.global_v_star if plan.global_v_star > 0 else 1.0
            cfg = SimConfig(ve=1.0, vp=vp, steps=1500, seed=42,
                            policy="random_walk")
            tr = run(P, plan, cfg)
            assert tr.breach_steps == (), name
