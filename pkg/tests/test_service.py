import json
import math

import pytest
from fastapi.testclient import TestClient

from guardsim import fixtures
from guardsim.deploy import deploy_polygon
from guardsim.service import make_app
from guardsim.simulate import SimConfig, Simulation


@pytest.fixture(scope="module")
def crown_app():
    P = fixtures.crown_hexagon()
    plan = deploy_polygon(P, ve=1.0)
    return P, plan, make_app(plan)


def recv_kind(ws, kind, limit=50):
    for _ in range(limit):
        msg = json.loads(ws.receive_text())
        if msg["kind"] == kind:
            return msg
    raise AssertionError(f"no {kind} message within {limit} messages")


class TestSession:
    def test_hello_handshake(self, crown_app):
        P, plan, app = crown_app
        with TestClient(app) as client:
            with client.websocket_connect("/session") as ws:
                hello = json.loads(ws.receive_text())
                assert hello["kind"] == "hello"
                assert len(hello["polygon"]) == P.n
                assert hello["plan"]["guard_total"] == plan.guard_total
                assert hello["config"]["policy"] == "steered"

    def test_states_stream_without_steering(self, crown_app):
        P, plan, app = crown_app
        with TestClient(app) as client:
            with client.websocket_connect("/session") as ws:
                json.loads(ws.receive_text())
                first = recv_kind(ws, "state")
                second = recv_kind(ws, "state")
                assert second["step"] == first["step"] + 1
                # stationary intruder stays visible
                assert first["state"]["visible"] is True
                assert first["state"]["intruder"] == second["state"]["intruder"]

    def test_unknown_kind_gets_error_and_connection_survives(self, crown_app):
        _, _, app = crown_app
        with TestClient(app) as client:
            with client.websocket_connect("/session") as ws:
                json.loads(ws.receive_text())
                ws.send_text(json.dumps({"kind": "dance"}))
                err = recv_kind(ws, "error")
                assert "unknown kind" in err["message"]
                assert recv_kind(ws, "state")

    def test_steer_moves_intruder_with_clamp(self, crown_app):
        P, plan, app = crown_app
        with TestClient(app) as client:
            with client.websocket_connect("/session") as ws:
                hello = json.loads(ws.receive_text())
                dt = hello["config"]["dt"]
                ve = hello["config"]["ve"]
                ws.send_text(json.dumps(
                    {"kind": "steer", "heading": [1, 0], "magnitude": 5.0}))
                before = recv_kind(ws, "state")
                after = recv_kind(ws, "state")
                dx = after["state"]["intruder"][0] - before["state"]["intruder"][0]
                dy = after["state"]["intruder"][1] - before["state"]["intruder"][1]
                # magnitude clamps to 1.0 x ve
                assert math.hypot(dx, dy) <= ve * dt + 1e-9

    def test_two_sessions_isolated(self, crown_app):
        _, _, app = crown_app
        with TestClient(app) as client:
            with client.websocket_connect("/session") as w1, \
                    client.websocket_connect("/session") as w2:
                h1 = json.loads(w1.receive_text())
                h2 = json.loads(w2.receive_text())
                assert h1["session_id"] != h2["session_id"]
                w1.send_text(json.dumps(
                    {"kind": "steer", "heading": [0, 1], "magnitude": 1.0}))
                s1 = [recv_kind(w1, "state") for _ in range(4)][-1]
                s2 = [recv_kind(w2, "state") for _ in range(4)][-1]
                assert s1["state"]["intruder"] != s2["state"]["intruder"]

    def test_reset_restarts(self, crown_app):
        _, _, app = crown_app
        with TestClient(app) as client:
            with client.websocket_connect("/session") as ws:
                json.loads(ws.receive_text())
                ws.send_text(json.dumps(
                    {"kind": "steer", "heading": [1, 0], "magnitude": 1.0}))
                start = recv_kind(ws, "state")["state"]["intruder"]
                for _ in range(3):
                    recv_kind(ws, "state")
                ws.send_text(json.dumps({"kind": "reset"}))
                ws.send_text(json.dumps(
                    {"kind": "steer", "heading": [0, 0], "magnitude": 0.0}))
                later = [recv_kind(ws, "state") for _ in range(3)][-1]
                # back near the initial position after reset with no steering
                assert math.dist(later["state"]["intruder"], start) < 0.2


class TestRecordReplay:
    def test_steer_stream_replays_bit_identical(self, crown_app):
        P, plan, app = crown_app
        states = []
        with TestClient(app) as client:
            with client.websocket_connect("/session") as ws:
                hello = json.loads(ws.receive_text())
                sid = hello["session_id"]
                ws.send_text(json.dumps(
                    {"kind": "steer", "heading": [0.6, -0.8], "magnitude": 1.0}))
                for k in range(12):
                    states.append(recv_kind(ws, "state"))
                    if k == 5:
                        ws.send_text(json.dumps(
                            {"kind": "steer", "heading": [-1, 0.2],
                             "magnitude": 0.5}))
            log = client.get(f"/steer-log/{sid}").json()["steer"]
        steer = tuple(tuple(s) for s in log)
        cfg = SimConfig(ve=plan.ve, vp=plan.global_v_star, steps=len(steer),
                        dt=1.0 / 20, seed=0, policy="steered", steer=steer)
        sim = Simulation(P, plan, cfg)
        offline = [sim.step() for _ in range(len(steer))]
        for got, want in zip(states, offline):
            assert got["state"]["intruder"] == list(want.intruder)
            assert got["state"]["guards"] == [list(g) for g in want.guards]
            assert got["state"]["visible"] == want.visible
