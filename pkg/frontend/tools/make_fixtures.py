#!/usr/bin/env python3
"""Record real session-service message streams into JSON fixtures.

Each fixture is the exact ordered list of server messages a cockpit
would receive over the socket, captured through the in-process ASGI
test client. The replay tests feed these through the UI dispatch path
and assert the screen matches the stream tick for tick.
"""

import json
import math
from pathlib import Path

from starlette.testclient import TestClient

from shared_dof.server import PROTOCOL, create_app

OUT_DIR = Path(__file__).resolve().parent.parent / "test" / "fixtures"


def _linear_angle_deg(a, b):
    na = math.sqrt(sum(v * v for v in a))
    nb = math.sqrt(sum(v * v for v in b))
    if na < 1e-9 or nb < 1e-9:
        return 0.0
    dot = sum(x * y for x, y in zip(a, b)) / (na * nb)
    return math.degrees(math.acos(max(-1.0, min(1.0, dot))))


def greedy_drive(state_msg, descriptor):
    """Steer like an operator who trusts the AI: ride axis 0 along the
    adopted mapping and accept whenever the exposed suggestion points
    somewhere materially different from what is currently mapped."""
    if state_msg is None:
        return {"axis0": 1.0, "axis1": 0.0}
    record = state_msg["record"]
    cues = state_msg["cues"]
    accept = False
    suggested = next((a for a in cues["arrows"] if a["kind"] == "suggested"), None)
    if suggested is not None:
        if record["mapping_source"]["kind"] != "suggestion":
            accept = True
        else:
            current = next(a for a in cues["arrows"] if a["kind"] == "current")
            angle = _linear_angle_deg(suggested["twist"]["linear"],
                                      current["twist"]["linear"])
            grip_flip = (abs(suggested["twist"]["aperture_rate"]) > 0.5) != (
                abs(current["twist"]["aperture_rate"]) > 0.5)
            accept = angle > 10.0 or grip_flip
    return {"axis0": 1.0, "axis1": 0.0, "accept": accept}


def zero_drive(state_msg, descriptor):
    return {"axis0": 0.0, "axis1": 0.0}


def classic_script(presses):
    def drive(state_msg, descriptor):
        tick = -1 if state_msg is None else state_msg["record"]["tick"]
        msg = {"axis0": 1.0, "axis1": 0.25}
        if tick + 1 in presses:  # lands on the next stepped tick
            msg["mode_switch"] = True
        return msg

    return drive


def capture(client, name, scenario, config, drive, max_ticks, require_done):
    messages = []
    inputs = []
    with client.websocket_connect("/session", subprotocols=[PROTOCOL]) as ws:
        ws.send_json({"type": "hello", "version": PROTOCOL})
        assert ws.receive_json()["type"] == "hello"
        ws.send_json({"type": "create_session", "scenario": scenario,
                      "config": config, "paused": True})
        created = ws.receive_json()
        assert created["type"] == "SessionCreated", created
        messages.append(created)
        descriptor = created["descriptor"]

        state_msg = None
        done = False
        for _ in range(max_ticks):
            payload = drive(state_msg, descriptor)
            ws.send_json({"type": "input", **payload})
            inputs.append(payload)
            ws.send_json({"type": "step", "count": 1})
            ws.send_json({"type": "ping"})
            while True:
                msg = ws.receive_json()
                if msg["type"] == "pong":
                    break
                messages.append(msg)
                if msg["type"] == "state":
                    state_msg = msg
                elif msg["type"] == "done":
                    done = True
            if done:
                break
        if require_done and not done:
            raise RuntimeError(f"{name}: session never finished "
                               f"({max_ticks} ticks)")

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    out = OUT_DIR / f"{name}.json"
    out.write_text(json.dumps({"name": name, "protocol": PROTOCOL,
                               "scenario": scenario, "config": config,
                               "messages": messages, "inputs": inputs},
                              separators=(",", ":")))
    states = sum(1 for m in messages if m["type"] == "state")
    events = sum(1 for m in messages if m["type"] == "event")
    print(f"{out.name}: {states} states, {events} events, done={done}")


def main():
    client = TestClient(create_app())
    capture(client, "continuous_canonical", "canonical",
            {"variant": "admc_continuous", "seed": 1}, greedy_drive,
            max_ticks=600, require_done=True)
    capture(client, "classic_canonical", "canonical",
            {"variant": "classic", "seed": 1}, classic_script({12, 40}),
            max_ticks=80, require_done=False)
    capture(client, "idle_canonical", "canonical",
            {"variant": "admc_idle", "seed": 3}, zero_drive,
            max_ticks=120, require_done=False)
    capture(client, "continuous_deadlock", "deadlock",
            {"variant": "admc_continuous", "seed": 1, "vibro_mode": "dual"},
            zero_drive, max_ticks=60, require_done=False)


if __name__ == "__main__":
    main()
