"""File schemas: polygon inputs, deployment plans, and simulation traces.

All serialization is canonical (sorted keys, 17-significant-digit floats),
so identical content produces identical bytes and digests.  Plans and traces
embed their digests; parsers verify them.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .canonical import canon_dumps, digest_hex
from .deploy import DeploymentPlan, GuardAssignment
from .geometry import DegeneratePolygon, Point, PolyPath, Ray, SimplePolygon
from .partition import Partition, PartitionSet
from .simulate import SimConfig, SimState, SimTrace
from .starzones import DynamicZone, RoadMap, Station, ZoneSegment

SCHEMA_VERSION = 1


class FormatError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# -- polygon files ------------------------------------------------------------


@dataclass(frozen=True)
class PolygonFile:
    name: str
    polygon: SimplePolygon
    orthogonal: bool
    quads: tuple[tuple[int, int, int, int], ...] | None

    def payload(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "vertices": [[v.x, v.y] for v in self.polygon.vertices],
        }
        if self.orthogonal:
            out["orthogonal"] = True
        if self.quads is not None:
            out["quads"] = [list(q) for q in self.quads]
        return out

    def dumps(self) -> str:
        return canon_dumps(self.payload())


def polygon_file_from_polygon(name: str, P: SimplePolygon,
                              orthogonal: bool = False,
                              quads=None) -> PolygonFile:
    return PolygonFile(name, P, orthogonal,
                       tuple(tuple(q) for q in quads) if quads else None)


def parse_polygon_file(text: str) -> PolygonFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError("bad-json", f"polygon file is not JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError("bad-json", "polygon file must be a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise FormatError("bad-schema",
                          f"unsupported schema_version {data.get('schema_version')}")
    verts = data.get("vertices")
    if not isinstance(verts, list) or len(verts) < 3:
        raise FormatError("bad-vertices", "need a list of at least 3 vertices")
    try:
        P = SimplePolygon.from_coords(verts)
    except (DegeneratePolygon, Exception) as exc:
        raise FormatError("not-simple", f"not a simple polygon: {exc}") from exc
    orthogonal = bool(data.get("orthogonal", False))
    quads = data.get("quads")
    if quads is not None and not orthogonal:
        raise FormatError("bad-quads", "quads are only valid for orthogonal inputs")
    if quads is not None:
        quads = tuple(tuple(int(i) for i in q) for q in quads)
    return PolygonFile(str(data.get("name", "polygon")), P, orthogonal, quads)


# -- partition files ----------------------------------------------------------


def partition_set_payload(ps: PartitionSet) -> dict:
    def piece(p: Partition) -> dict:
        return {
            "vertex_ids": list(p.vertex_ids),
            "vertices": [[v.x, v.y] for v in p.polygon.vertices],
            "original_edges": p.original_edge_count,
            "diagonal_edges": p.diagonal_edge_count,
            "kind": p.kind,
        }

    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "partition_set",
        "n": ps.polygon.n,
        "r": ps.r,
        "k_prime": ps.k_prime,
        "cut_diagonals": [list(d) for d in ps.cut_diagonals],
        "partitions": [piece(p) for p in ps.partitions],
        "remainder": piece(ps.remainder) if ps.remainder else None,
    }


# -- plan files ---------------------------------------------------------------


def _road_map_payload(rm: RoadMap) -> dict:
    return {
        "waypoints": [[p.x, p.y] for p in rm.path.waypoints],
        "length": rm.path.total_length,
        "rest_arc": rm.rest_arc,
        "stations": [
            {"arc": s.arc, "point": [s.point.x, s.point.y],
             "covers": list(s.covers),
             "at_corner": s.at_corner if s.at_corner is not None else -1}
            for s in rm.stations],
        "segments": [
            {"corner": z.corner, "a_arc": z.a_arc, "b_arc": z.b_arc}
            for z in rm.segments],
    }


def _road_map_from(data: dict) -> RoadMap:
    path = PolyPath.through([Point(float(x), float(y)) for x, y in data["waypoints"]])
    stations = tuple(
        Station(float(s["arc"]), Point(*s["point"]), tuple(s["covers"]),
                None if s["at_corner"] < 0 else int(s["at_corner"]))
        for s in data["stations"])
    segments = tuple(
        ZoneSegment(int(z["corner"]), float(z["a_arc"]), float(z["b_arc"]))
        for z in data["segments"])
    return RoadMap(path, stations, segments, float(data["rest_arc"]))


def _zone_payload(z: DynamicZone, piece: SimplePolygon) -> dict:
    poly = z.boundary_polygon(piece)
    return {
        "corner": z.corner,
        "apex": [z.apex.x, z.apex.y],
        "direction": [z.trigger_ray.direction[0], z.trigger_ray.direction[1]],
        "radius": z.radius,
        "shadow_sign": z.shadow_sign,
        "shadow_span": z.shadow_span,
        "segment": {"corner": z.segment.corner, "a_arc": z.segment.a_arc,
                    "b_arc": z.segment.b_arc},
        "outline": [[v.x, v.y] for v in poly.vertices] if poly else [],
    }


def _zone_from(data: dict) -> DynamicZone:
    seg = ZoneSegment(int(data["segment"]["corner"]),
                      float(data["segment"]["a_arc"]),
                      float(data["segment"]["b_arc"]))
    return DynamicZone(
        corner=int(data["corner"]),
        apex=Point(*data["apex"]),
        trigger_ray=Ray(Point(*data["apex"]),
                        (float(data["direction"][0]), float(data["direction"][1]))),
        radius=float(data["radius"]),
        segment=seg,
        shadow_sign=float(data["shadow_sign"]),
        shadow_span=float(data["shadow_span"]),
    )


def plan_payload(plan: DeploymentPlan) -> dict:
    def assignment(a: GuardAssignment) -> dict:
        out = {
            "partition_id": a.partition_id,
            "polygon": [[v.x, v.y] for v in a.polygon.vertices],
            "mode": a.mode,
            "v_star": a.v_star,
        }
        if a.mode == "static":
            out["position"] = [a.position.x, a.position.y]
        else:
            out["road_map"] = _road_map_payload(a.road_map)
            out["zones"] = [_zone_payload(z, a.polygon) for z in a.zones]
        return out

    body = {
        "schema_version": SCHEMA_VERSION,
        "kind": "plan",
        "polygon": [[v.x, v.y] for v in plan.polygon.vertices],
        "ve": plan.ve,
        "global_v_star": plan.global_v_star,
        "guard_total": plan.guard_total,
        "bound": plan.bound,
        "bound_kind": plan.bound_kind,
        "satisfies_bound": plan.satisfies_bound,
        "assignments": [assignment(a) for a in plan.assignments],
        "partition_set": (partition_set_payload(plan.partition_set)
                          if plan.partition_set else None),
        "quad_group_sizes": list(plan.quad_group_sizes),
        "quad_leftover": plan.quad_leftover,
    }
    body["digest"] = digest_hex(body)
    return body


def dumps_plan(plan: DeploymentPlan) -> str:
    return canon_dumps(plan_payload(plan))


def parse_plan(text: str) -> DeploymentPlan:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError("bad-json", f"plan file is not JSON: {exc}") from exc
    if data.get("kind") != "plan":
        raise FormatError("bad-kind", "not a plan file")
    claimed = data.pop("digest", None)
    actual = digest_hex(data)
    if claimed != actual:
        raise FormatError("bad-digest", f"plan digest mismatch: {claimed} != {actual}")
    P = SimplePolygon.from_coords(data["polygon"])
    assignments = []
    for a in data["assignments"]:
        piece = SimplePolygon.from_coords(a["polygon"])
        if a["mode"] == "static":
            assignments.append(GuardAssignment(
                int(a["partition_id"]), piece, "static",
                position=Point(*a["position"]), v_star=float(a["v_star"])))
        else:
            rm = _road_map_from(a["road_map"])
            zones = tuple(_zone_from(z) for z in a["zones"])
            assignments.append(GuardAssignment(
                int(a["partition_id"]), piece, "mobile",
                road_map=rm, zones=zones, v_star=float(a["v_star"])))
    ps = None
    if data.get("partition_set"):
        ps = _partition_set_from(P, data["partition_set"])
    return DeploymentPlan(
        polygon=P,
        assignments=tuple(assignments),
        ve=float(data["ve"]),
        global_v_star=float(data["global_v_star"]),
        guard_total=int(data["guard_total"]),
        bound=int(data["bound"]),
        bound_kind=str(data["bound_kind"]),
        satisfies_bound=bool(data["satisfies_bound"]),
        partition_set=ps,
        quad_group_sizes=tuple(data.get("quad_group_sizes", [])),
        quad_leftover=int(data.get("quad_leftover", 0)),
    )


def _partition_set_from(P: SimplePolygon, data: dict) -> PartitionSet:
    def piece(d: dict) -> Partition:
        return Partition(
            SimplePolygon.from_coords(d["vertices"]),
            tuple(int(i) for i in d["vertex_ids"]),
            int(d["original_edges"]), int(d["diagonal_edges"]), str(d["kind"]))

    return PartitionSet(
        P,
        tuple(piece(p) for p in data["partitions"]),
        piece(data["remainder"]) if data.get("remainder") else None,
        tuple((int(a), int(b)) for a, b in data["cut_diagonals"]),
    )


# -- trace files (JSON lines) ---------------------------------------------------


def dumps_trace(trace: SimTrace, config: SimConfig, plan_digest: str) -> str:
    lines = [canon_dumps({
        "schema_version": SCHEMA_VERSION,
        "kind": "trace",
        "config": config.payload(),
        "config_digest": trace.config_digest,
        "plan_digest": plan_digest,
    })]
    for r in trace.records:
        lines.append(canon_dumps(r.payload()))
    lines.append(canon_dumps({
        "kind": "trace_end",
        "breach_steps": list(trace.breach_steps),
        "digest": trace.digest(),
    }))
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> tuple[SimTrace, SimConfig, str]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise FormatError("bad-trace", "trace file too short")
    head = json.loads(lines[0])
    if head.get("kind") != "trace":
        raise FormatError("bad-kind", "not a trace file")
    tail = json.loads(lines[-1])
    if tail.get("kind") != "trace_end":
        raise FormatError("bad-trace", "missing trace_end record")
    cfg_data = head["config"]
    config = SimConfig(
        ve=float(cfg_data["ve"]), vp=float(cfg_data["vp"]),
        steps=int(cfg_data["steps"]), dt=float(cfg_data["dt"]),
        seed=int(cfg_data["seed"]), policy=str(cfg_data["policy"]),
        start=tuple(cfg_data["start"]) if cfg_data.get("start") else None,
        waypoints=tuple(tuple(w) for w in cfg_data.get("waypoints", [])),
        steer=tuple(tuple(s) for s in cfg_data.get("steer", [])),
    )
    records = []
    for ln in lines[1:-1]:
        d = json.loads(ln)
        records.append(SimState(
            t=float(d["t"]),
            intruder=tuple(d["intruder"]),
            guards=tuple(tuple(g) for g in d["guards"]),
            active_zone=tuple(None if z < 0 else int(z) for z in d["active_zone"]),
            visible=bool(d["visible"]),
        ))
    trace = SimTrace(head["config_digest"], tuple(records),
                     tuple(int(b) for b in tail["breach_steps"]))
    if trace.digest() != tail["digest"]:
        raise FormatError("bad-digest", "trace digest mismatch")
    return trace, config, str(head["plan_digest"])
