"""Command-line interface: partition | deploy | simulate | render | serve.

Exit codes: 0 success (and zero breaches for simulate), 2 validation or I/O
failure, 3 simulate completed with breaches.  Errors print one line to
stderr with an ``E:<code>`` prefix so shell tests can match them.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .canonical import canon_dumps
from .deploy import CoverageGapError, DeploymentPlan, deploy_polygon
from .formats import (
    FormatError,
    dumps_plan,
    dumps_trace,
    parse_plan,
    parse_polygon_file,
    parse_trace,
    partition_set_payload,
    plan_payload,
)
from .geometry import DegeneratePolygon
from .orthogonal import NotOrthogonal, QuadrilateralizationFailed, deploy_orthogonal
from .partition import minimal_partition
from .render import render_plan
from .simulate import ConfigInvalid, SimConfig, run


def _fail(code: str, message: str) -> int:
    print(f"E:{code} {message}", file=sys.stderr)
    return 2


def cmd_partition(args) -> int:
    try:
        pf = parse_polygon_file(Path(args.input).read_text())
    except OSError as exc:
        return _fail("io", str(exc))
    except FormatError as exc:
        return _fail(exc.code, str(exc))
    try:
        ps = minimal_partition(pf.polygon)
    except DegeneratePolygon as exc:
        return _fail("degenerate", str(exc))
    payload = partition_set_payload(ps)
    payload["name"] = pf.name
    Path(args.output).write_text(canon_dumps(payload) + "\n")
    return 0


def cmd_deploy(args) -> int:
    try:
        pf = parse_polygon_file(Path(args.input).read_text())
    except OSError as exc:
        return _fail("io", str(exc))
    except FormatError as exc:
        return _fail(exc.code, str(exc))
    try:
        if pf.orthogonal:
            plan = deploy_orthogonal(pf.polygon, ve=args.ve,
                                     quads=list(pf.quads) if pf.quads else None)
        else:
            plan = deploy_polygon(pf.polygon, ve=args.ve)
    except (DegeneratePolygon, NotOrthogonal, QuadrilateralizationFailed,
            CoverageGapError) as exc:
        return _fail("deploy", str(exc))
    Path(args.output).write_text(dumps_plan(plan) + "\n")
    return 0


def _parse_pair(text: str) -> tuple[float, float]:
    x, y = text.split(",")
    return (float(x), float(y))


def cmd_simulate(args) -> int:
    try:
        plan = parse_plan(Path(args.plan).read_text())
    except OSError as exc:
        return _fail("io", str(exc))
    except FormatError as exc:
        return _fail(exc.code, str(exc))
    waypoints = tuple(_parse_pair(w) for w in (args.waypoint or []))
    steer = ()
    if args.steer_file:
        import json
        import math
        rows = [ln for ln in Path(args.steer_file).read_text().splitlines()
                if ln.strip()]
        normed = []
        for ln in rows:
            hx, hy, mag = json.loads(ln)
            norm = math.hypot(hx, hy)
            if norm > 0 and abs(norm - 1.0) > 1e-12:
                hx, hy = hx / norm, hy / norm
            normed.append((float(hx), float(hy), float(mag)))
        steer = tuple(normed)
    vp = args.vp if args.vp is not None else plan.global_v_star
    config = SimConfig(
        ve=plan.ve, vp=vp, steps=args.steps, dt=args.dt, seed=args.seed,
        policy=args.policy,
        start=_parse_pair(args.start) if args.start else None,
        waypoints=waypoints, steer=steer)
    try:
        trace = run(plan.polygon, plan, config)
    except ConfigInvalid as exc:
        return _fail("config", str(exc))
    plan_digest = plan_payload(plan)["digest"]
    Path(args.output).write_text(dumps_trace(trace, config, plan_digest))
    return 3 if trace.breach_steps else 0


def cmd_render(args) -> int:
    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        return _fail("io", str(exc))
    trace = None
    plan = None
    try:
        if "\n" in text.strip() and '"kind":"trace"' in text.splitlines()[0]:
            trace, _, _ = parse_trace(text)
            if not args.plan:
                return _fail("render", "rendering a trace needs --plan")
            plan = parse_plan(Path(args.plan).read_text())
        else:
            plan = parse_plan(text)
    except FormatError as exc:
        return _fail(exc.code, str(exc))
    Path(args.output).write_text(render_plan(plan, trace))
    return 0


def cmd_serve(args) -> int:
    try:
        plan = parse_plan(Path(args.plan).read_text())
    except OSError as exc:
        return _fail("io", str(exc))
    except FormatError as exc:
        return _fail(exc.code, str(exc))
    from .service import make_app
    import uvicorn
    app = make_app(plan, vp=args.vp)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as exc:
        return _fail("port", str(exc))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="guardsim")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", help="minimal partition of a polygon file")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("deploy", help="full deployment plan")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--ve", type=float, default=1.0,
                   help="intruder speed bound (default 1.0)")
    p.set_defaults(func=cmd_deploy)

    p = sub.add_parser("simulate", help="run the tracking simulation")
    p.add_argument("plan")
    p.add_argument("output")
    p.add_argument("--policy", default="random_walk",
                   choices=["scripted", "random_walk", "greedy_escape", "steered"])
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vp", type=float, default=None,
                   help="guard speed bound (default: plan v*)")
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--start", default=None, help="x,y intruder start")
    p.add_argument("--waypoint", action="append",
                   help="x,y scripted waypoint (repeatable)")
    p.add_argument("--steer-file", default=None,
                   help="JSON-lines [hx,hy,mag] per step for --policy steered")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("render", help="SVG rendering of a plan or trace")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--plan", default=None, help="plan file when rendering a trace")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("serve", help="live session service for the browser UI")
    p.add_argument("plan")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--vp", type=float, default=None)
    p.set_defaults(func=cmd_serve)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
