"""Discrete-time execution of the event-triggered guard strategy.

The intruder moves under a policy (scripted waypoints, seeded random walk,
or corner-seeking greedy escape), clamped to its speed bound and reflected
off the boundary.  Each mobile guard maps the intruder's zone clearance onto
an arc position along its road map and moves toward it at its own speed
bound.  A step is a breach when no responsible guard has line of sight.

The step size is capped at (min zone radius) / (4 * ve) so the discretization
cannot let the intruder jump a trigger zone within one step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .canonical import canon_dumps, digest_hex
from .deploy import DeploymentPlan, GuardAssignment
from .geometry import EPS, Point, SimplePolygon, _contains_kernel
from .starzones import DynamicZone, build_dynamic_zones

POLICIES = ("scripted", "random_walk", "greedy_escape", "steered")


class ConfigInvalid(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    ve: float
    vp: float
    steps: int
    dt: float = 0.05
    seed: int = 0
    policy: str = "random_walk"
    start: tuple[float, float] | None = None
    waypoints: tuple[tuple[float, float], ...] = ()
    steer: tuple[tuple[float, float, float], ...] = ()  # (hx, hy, magnitude) per step

    def payload(self) -> dict:
        return {
            "ve": float(self.ve), "vp": float(self.vp), "steps": int(self.steps),
            "dt": float(self.dt), "seed": int(self.seed), "policy": self.policy,
            "start": list(self.start) if self.start else None,
            "waypoints": [list(w) for w in self.waypoints],
            "steer": [list(s) for s in self.steer],
        }

    def digest(self) -> str:
        return digest_hex(self.payload())


@dataclass(frozen=True)
class SimState:
    t: float
    intruder: tuple[float, float]
    guards: tuple[tuple[float, float], ...]
    active_zone: tuple[int | None, ...]
    visible: bool

    def payload(self) -> dict:
        return {
            "t": self.t,
            "intruder": list(self.intruder),
            "guards": [list(g) for g in self.guards],
            "active_zone": [z if z is not None else -1 for z in self.active_zone],
            "visible": self.visible,
        }


@dataclass(frozen=True)
class SimTrace:
    config_digest: str
    records: tuple[SimState, ...]
    breach_steps: tuple[int, ...]

    def digest(self) -> str:
        return digest_hex({
            "config": self.config_digest,
            "records": [r.payload() for r in self.records],
            "breaches": list(self.breach_steps),
        })


def interior_start(P: SimplePolygon) -> Point:
    c = P.centroid
    if P.strictly_contains(c, margin=1e-6 * P.diameter):
        return c
    for f in (0.5, 0.25, 0.75):
        for v in P.vertices:
            q = Point(v.x + f * (c.x - v.x), v.y + f * (c.y - v.y))
            if P.strictly_contains(q, margin=1e-6 * P.diameter):
                return q
    raise ConfigInvalid("no interior start point found")


class _MobileGuard:
    __slots__ = ("assignment", "zones", "arc", "path")

    def __init__(self, assignment: GuardAssignment, ve: float, vp: float):
        self.assignment = assignment
        rm = assignment.road_map
        self.path = rm.path
        if vp > 0 and ve > 0:
            # under-speed guards get proportionally clamped zones: they do
            # their best and breaches surface honestly in the trace
            self.zones = build_dynamic_zones(
                assignment.polygon, rm, ve=ve, vp=vp, clamp=True)
        else:
            self.zones = []
        self.arc = rm.rest_arc

    def target_arc(self, evader: Point) -> tuple[float, int | None]:
        active: DynamicZone | None = None
        shadow: DynamicZone | None = None
        for z in self.zones:
            s = z.signed_clearance(evader)
            if -1e-12 <= s < z.radius:
                active = z
                break
            if s < 0 and (shadow is None or z.corner < shadow.corner):
                shadow = z
        if active is not None:
            return active.target_arc(evader), active.corner
        if shadow is not None:
            return shadow.segment.b_arc, None
        return self.arc, None

    def advance(self, evader: Point, vp: float, dt: float) -> tuple[Point, int | None]:
        target, zone_id = self.target_arc(evader)
        delta = target - self.arc
        limit = vp * dt
        if delta > limit:
            delta = limit
        elif delta < -limit:
            delta = -limit
        self.arc += delta
        return self.path.point_at_arclength(self.arc), zone_id


class Simulation:
    """Single deterministic session; strict step order, no hidden state."""

    def __init__(self, P: SimplePolygon, plan: DeploymentPlan, config: SimConfig):
        _validate_config(P, config)
        self.P = P
        self.plan = plan
        self.config = config
        self.dt = _effective_dt(plan, config)
        self.rng = np.random.default_rng(config.seed)
        start = Point(*config.start) if config.start else interior_start(P)
        self.intruder = start
        self.heading = 0.0
        self.waypoint_idx = 0
        self.step_count = 0
        self.t = 0.0
        self.guards: list[_MobileGuard | None] = []
        self.positions: list[Point] = []
        for a in plan.assignments:
            if a.mode == "mobile":
                g = _MobileGuard(a, config.ve, config.vp)
                # initial deployment honors the intruder's starting zone
                g.arc = g.target_arc(self.intruder)[0]
                self.guards.append(g)
                self.positions.append(g.path.point_at_arclength(g.arc))
            else:
                self.guards.append(None)
                self.positions.append(a.position)
        self._resp_cache: list[int] = self._responsible()
        self._prev_resp: list[int] = list(self._resp_cache)
        step = config.ve * self.dt
        self._cand_angles = np.arange(32) * (2 * math.pi / 32)
        self._cand_dx = step * np.cos(self._cand_angles)
        self._cand_dy = step * np.sin(self._cand_angles)
        self._cand_buffer = np.empty((32, 2))
        self._last_zone: list[int | None] = [self._zone_of(i)
                                             for i in range(len(self.guards))]

    # -- responsibility -----------------------------------------------------

    def _responsible(self) -> list[int]:
        out = [i for i, a in enumerate(self.plan.assignments)
               if a.polygon.contains(self.intruder)]
        if not out:
            # numerically on the seam between pieces: widen the band
            out = [i for i, a in enumerate(self.plan.assignments)
                   if a.polygon.contains(self.intruder, tol=1e-6)]
        if not out:
            raise ConfigInvalid("intruder left every partition (geometry bug)")
        return out

    def _update_responsibility(self) -> list[int]:
        cached = self._resp_cache
        if len(cached) == 1 and \
                self.plan.assignments[cached[0]].polygon.contains(self.intruder):
            return cached
        return self._responsible()

    # -- intruder policies ---------------------------------------------------

    def _policy_velocity(self) -> tuple[float, float]:
        cfg = self.config
        if cfg.ve <= 0:
            return (0.0, 0.0)
        if cfg.policy == "scripted":
            while self.waypoint_idx < len(cfg.waypoints):
                wx, wy = cfg.waypoints[self.waypoint_idx]
                dx, dy = wx - self.intruder.x, wy - self.intruder.y
                d = math.hypot(dx, dy)
                if d > 1e-9:
                    f = min(1.0, cfg.ve * self.dt / d)
                    return (dx / d * cfg.ve, dy / d * cfg.ve) if f < 1.0 else \
                        (dx / self.dt, dy / self.dt)
                self.waypoint_idx += 1
            return (0.0, 0.0)
        if cfg.policy == "random_walk":
            self.heading += float(self.rng.normal(0.0, 0.6))
            return (cfg.ve * math.cos(self.heading), cfg.ve * math.sin(self.heading))
        if cfg.policy == "steered":
            if self.step_count >= len(cfg.steer):
                return (0.0, 0.0)
            # rows are pre-normalized unit headings (the live service and the
            # CLI normalize once at the source, so replays are bit-identical)
            hx, hy, mag = cfg.steer[self.step_count]
            if mag <= 0:
                return (0.0, 0.0)
            mag = min(1.0, mag)
            return (cfg.ve * mag * hx, cfg.ve * mag * hy)
        return self._greedy_velocity()

    def _greedy_velocity(self) -> tuple[float, float]:
        cfg = self.config
        resp = self._resp_cache
        piece = self.plan.assignments[resp[0]].polygon
        guard_pos = self.positions[resp[0]]
        targets = []
        edges = self.P._edges_array()
        for idx in piece.reflex_vertices():
            corner = piece.vertices[idx]
            gx, gy = corner.x - guard_pos.x, corner.y - guard_pos.y
            norm = math.hypot(gx, gy)
            if norm <= 1e-9:
                continue
            delta = 0.2 * piece.diameter
            for _ in range(5):
                qx = corner.x + delta * gx / norm
                qy = corner.y + delta * gy / norm
                if _contains_kernel(qx, qy, edges, EPS):
                    targets.append((qx, qy))
                    break
                delta *= 0.5
        cand = self._cand_buffer
        cand[:, 0] = self.intruder.x + self._cand_dx
        cand[:, 1] = self.intruder.y + self._cand_dy
        legal = self.P.contains_many(cand)
        if not legal.any():
            return (0.0, 0.0)
        gdist = np.hypot(cand[:, 0] - guard_pos.x, cand[:, 1] - guard_pos.y)
        if targets:
            tarr = np.array(targets)
            score = np.hypot(cand[:, 0, None] - tarr[None, :, 0],
                             cand[:, 1, None] - tarr[None, :, 1]).min(axis=1)
        else:
            score = -gdist
        score = np.where(legal, score, np.inf)
        order = np.lexsort((np.arange(32), -gdist, score))
        k = int(order[0])
        ang = self._cand_angles[k]
        return (cfg.ve * math.cos(ang), cfg.ve * math.sin(ang))

    # -- motion -------------------------------------------------------------

    def _move_intruder(self, vel: tuple[float, float]) -> None:
        vx, vy = vel
        speed = math.hypot(vx, vy)
        if speed > self.config.ve + 1e-12 and speed > 0:
            vx *= self.config.ve / speed
            vy *= self.config.ve / speed
        prop = Point(self.intruder.x + vx * self.dt, self.intruder.y + vy * self.dt)
        if self.P.segment_inside(self.intruder, prop):
            self.intruder = prop
            return
        lo, hi = 0.0, 1.0
        for _ in range(20):
            mid = 0.5 * (lo + hi)
            q = Point(self.intruder.x + vx * self.dt * mid,
                      self.intruder.y + vy * self.dt * mid)
            if self.P.segment_inside(self.intruder, q):
                lo = mid
            else:
                hi = mid
        stop = Point(self.intruder.x + vx * self.dt * lo,
                     self.intruder.y + vy * self.dt * lo)
        nx, ny = self._boundary_normal(stop)
        rem = 1.0 - lo
        dot = vx * nx + vy * ny
        rx = (vx - 2 * dot * nx) * self.dt * rem
        ry = (vy - 2 * dot * ny) * self.dt * rem
        bounced = Point(stop.x + rx, stop.y + ry)
        if self.P.segment_inside(stop, bounced):
            self.intruder = bounced
        else:
            self.intruder = stop

    def _boundary_normal(self, p: Point) -> tuple[float, float]:
        e = self.P._edges_array()
        ax, ay = e[:, 0, 0], e[:, 0, 1]
        ex, ey = e[:, 1, 0] - ax, e[:, 1, 1] - ay
        seg2 = ex * ex + ey * ey
        t = np.clip(((p.x - ax) * ex + (p.y - ay) * ey) / seg2, 0.0, 1.0)
        dx = p.x - (ax + t * ex)
        dy = p.y - (ay + t * ey)
        i = int(np.argmin(dx * dx + dy * dy))
        L = math.sqrt(seg2[i])
        return (ey[i] / L, -ex[i] / L)  # inward normal of a CCW edge

    # -- stepping -----------------------------------------------------------

    def state(self) -> SimState:
        visible = self._visible()
        return SimState(
            t=self.t,
            intruder=(self.intruder.x, self.intruder.y),
            guards=tuple((p.x, p.y) for p in self.positions),
            active_zone=tuple(self._last_zone),
            visible=visible,
        )

    def _zone_of(self, i: int) -> int | None:
        g = self.guards[i]
        if g is None:
            return None
        for z in g.zones:
            s = z.signed_clearance(self.intruder)
            if -1e-12 <= s < z.radius:
                return z.corner
        return None

    def _visible(self) -> bool:
        seen = set(self._resp_cache) | set(self._prev_resp)
        for i in sorted(seen):
            if self.P.segment_inside(self.positions[i], self.intruder):
                return True
        return False

    def step(self) -> SimState:
        return self.advance(self._policy_velocity())

    def advance(self, vel: tuple[float, float]) -> SimState:
        """One step with an explicit intruder velocity (shared by policies
        and the live service, so replays are bit-identical)."""
        self._move_intruder(vel)
        self._prev_resp = self._resp_cache
        self._resp_cache = self._update_responsibility()
        for i, g in enumerate(self.guards):
            if g is not None:
                pos, zone_id = g.advance(self.intruder, self.config.vp, self.dt)
                self.positions[i] = pos
                self._last_zone[i] = zone_id
        self.t += self.dt
        self.step_count += 1
        return self.state()


def _validate_config(P: SimplePolygon, config: SimConfig) -> None:
    if config.dt <= 0:
        raise ConfigInvalid("dt must be positive")
    if config.ve < 0 or config.vp < 0:
        raise ConfigInvalid("speed bounds must be nonnegative")
    if config.steps < 0:
        raise ConfigInvalid("steps must be nonnegative")
    if config.policy not in POLICIES:
        raise ConfigInvalid(f"unknown policy {config.policy!r}")
    if config.policy == "scripted" and not config.waypoints:
        raise ConfigInvalid("scripted policy needs waypoints")
    if config.start is not None and not P.contains(Point(*config.start)):
        raise ConfigInvalid("intruder start point lies outside the polygon")
    for w in config.waypoints:
        if not P.contains(Point(*w)):
            raise ConfigInvalid(f"scripted waypoint {w} lies outside the polygon")


def _effective_dt(plan: DeploymentPlan, config: SimConfig) -> float:
    dt = config.dt
    if config.ve > 0 and config.vp > 0:
        radii = []
        for a in plan.mobile_assignments():
            for seg in a.road_map.segments:
                radii.append(seg.length * config.ve / config.vp)
        if radii:
            dt = min(dt, min(radii) / (4.0 * config.ve))
    return dt


def guard_target(zones: list[DynamicZone], evader: Point) -> float:
    """Arc-position demanded by the zone set for one guard (paper mapping)."""
    for z in zones:
        s = z.signed_clearance(evader)
        if -1e-12 <= s < z.radius:
            return z.target_arc(evader)
    for z in zones:
        if z.signed_clearance(evader) < 0:
            return z.segment.b_arc
    raise ValueError("evader is in no zone; hold the current position")


def run(P: SimplePolygon, plan: DeploymentPlan, config: SimConfig) -> SimTrace:
    """Execute ``config.steps`` steps; same inputs produce an identical trace."""
    sim = Simulation(P, plan, config)
    records = [sim.state()]
    breaches = []
    for k in range(config.steps):
        st = sim.step()
        records.append(st)
        if not st.visible:
            breaches.append(k + 1)
    return SimTrace(config.digest(), tuple(records), tuple(breaches))
