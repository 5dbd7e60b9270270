"""Live session service: one websocket per session, 20 state messages/second.

Protocol (JSON text messages):
  server -> client:  {"kind": "hello", polygon, plan, config}
                     {"kind": "state", step, state}
                     {"kind": "error", message}
  client -> server:  {"kind": "steer", "heading": [x, y], "magnitude": m}
                     {"kind": "reset"}

Steering is sampled-and-held between ticks; magnitude clamps to [0, 1]
(times the intruder speed bound).  Sessions are fully isolated; the step
dynamics are the simulate module's, so a recorded steer stream replayed
offline reproduces the same states bit for bit.
"""
from __future__ import annotations

import asyncio
import json
import math

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .deploy import DeploymentPlan
from .formats import plan_payload
from .simulate import SimConfig, Simulation

TICK_HZ = 20


class Session:
    def __init__(self, plan: DeploymentPlan, vp: float | None):
        self.plan = plan
        self.vp = plan.global_v_star if vp is None else vp
        self.reset()

    def reset(self) -> None:
        self.config = SimConfig(
            ve=self.plan.ve, vp=self.vp, steps=0, dt=1.0 / TICK_HZ,
            seed=0, policy="steered")
        self.sim = Simulation(self.plan.polygon, self.plan, self.config)
        self.step_idx = 0
        self.held = (0.0, 0.0, 0.0)
        self.steer_log: list[tuple[float, float, float]] = []

    def apply_steer(self, heading, magnitude) -> None:
        hx, hy = float(heading[0]), float(heading[1])
        mag = max(0.0, min(1.0, float(magnitude)))
        norm = math.hypot(hx, hy)
        if norm > 0:
            hx, hy = hx / norm, hy / norm
        else:
            mag = 0.0
        self.held = (hx, hy, mag)

    def tick(self) -> dict:
        hx, hy, mag = self.held
        ve = self.config.ve
        state = self.sim.advance((ve * mag * hx, ve * mag * hy))
        self.steer_log.append(self.held)
        self.step_idx += 1
        return state.payload()


def make_app(plan: DeploymentPlan, vp: float | None = None) -> FastAPI:
    app = FastAPI()
    payload = plan_payload(plan)

    @app.get("/healthz")
    def healthz():
        return {"ok": True}

    @app.get("/steer-log/{session_id}")
    def steer_log(session_id: int):
        log = app.state.steer_logs.get(session_id, [])
        return {"steer": [list(s) for s in log]}

    app.state.steer_logs = {}
    app.state.next_session = 0

    @app.websocket("/session")
    async def session_ws(ws: WebSocket):
        await ws.accept()
        session = Session(plan, vp)
        session_id = app.state.next_session
        app.state.next_session += 1
        hello = {
            "kind": "hello",
            "session_id": session_id,
            "polygon": [[v.x, v.y] for v in plan.polygon.vertices],
            "plan": payload,
            "config": session.config.payload(),
        }
        await ws.send_text(json.dumps(hello))
        tick = 1.0 / TICK_HZ
        try:
            while True:
                deadline = asyncio.get_event_loop().time() + tick
                while True:
                    timeout = deadline - asyncio.get_event_loop().time()
                    if timeout <= 0:
                        break
                    try:
                        raw = await asyncio.wait_for(ws.receive_text(),
                                                     timeout=timeout)
                    except asyncio.TimeoutError:
                        break
                    try:
                        msg = json.loads(raw)
                        kind = msg.get("kind")
                        if kind == "steer":
                            session.apply_steer(msg["heading"], msg["magnitude"])
                        elif kind == "reset":
                            session.reset()
                        else:
                            await ws.send_text(json.dumps(
                                {"kind": "error",
                                 "message": f"unknown kind {kind!r}"}))
                    except (KeyError, ValueError, TypeError) as exc:
                        await ws.send_text(json.dumps(
                            {"kind": "error", "message": f"bad message: {exc}"}))
                state = session.tick()
                app.state.steer_logs[session_id] = list(session.steer_log)
                await ws.send_text(json.dumps({
                    "kind": "state",
                    "step": session.step_idx,
                    "state": state,
                }))
        except WebSocketDisconnect:
            pass

    return app
