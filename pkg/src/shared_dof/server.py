"""WebSocket session service.

One socket drives one session at a time over the ``shared-dof.v1``
subprotocol (JSON text messages).  Input frames are coalesced between
ticks: the newest axes win and button flags accumulate, so a slow or
bursty client cannot lose a press.  The simulation itself stays
deterministic; wall-clock pacing only decides when ticks happen, never
what they compute.  A paused session can be advanced an exact number of
ticks with ``step``, which is what the tests use.

See docs/protocol.md for the full message reference.
"""

from __future__ import annotations

import asyncio
import json
import math
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .control import (
    ControllerConfig,
    InputFrame,
    advance,
    exposed_suggestion,
    initial_state,
)
from .cues import arrow_cues, dof_indicator, encode_direction, ghost_cue
from .errors import InvalidDirectionError, SharedDofError
from .runner import make_record
from .scene import (
    Phase,
    Scenario,
    builtin_scenario,
    list_builtin_scenarios,
    load_scenario,
    scenario_from_dict,
)
from .telemetry import RunningMetrics

PROTOCOL = "shared-dof.v1"

MIN_TICK_RATE = 0.1
MAX_TICK_RATE = 10_000.0
MAX_STEP = 100_000

CONFIG_KEYS = {"variant", "seed", "tick_rate", "idle_timeout_s",
               "threshold_angle_deg", "speed_scale", "vibro_mode"}


class SessionDriver:
    """Synchronous session core behind the socket; no IO in here."""

    def __init__(self, scenario: Scenario, config: ControllerConfig,
                 seed=None, vibro_mode: str = "rabbit"):
        self.scenario = scenario.fresh_world()
        self.config = config
        self.state = initial_state(self.scenario, config, seed=seed)
        self.vibro_mode = vibro_mode
        self.metrics = RunningMetrics(
            variant=config.variant, scenario=self.scenario.name,
            seed=self.state.rng_seed, policy="remote")
        self._axes = (0.0, 0.0)
        self._buttons = {"mode_switch": False, "accept": False,
                         "request": False, "estop": False}
        self._estop_level = False
        self._perspective = False
        self._last_buzz = None  # (octant, z_level) of the last sent cue

    @property
    def done(self) -> bool:
        return self.state.task.phase is Phase.DONE

    def feed_input(self, payload: dict) -> None:
        self._axes = (float(payload.get("axis0", self._axes[0])),
                      float(payload.get("axis1", self._axes[1])))
        for name in ("mode_switch", "accept", "request"):
            if payload.get(name):
                self._buttons[name] = True
        if "estop" in payload:
            self._estop_level = bool(payload["estop"])

    def request_perspective(self) -> None:
        self._perspective = True

    def _drain_frame(self) -> tuple:
        frame = InputFrame(
            axis0=self._axes[0],
            axis1=self._axes[1],
            mode_switch=self._buttons["mode_switch"],
            accept=self._buttons["accept"],
            request=self._buttons["request"],
            estop=self._estop_level,
        )
        for name in self._buttons:
            self._buttons[name] = False
        perspective = self._perspective
        self._perspective = False
        return frame, perspective

    def _cues(self) -> dict:
        state, config = self.state, self.config
        exposed = exposed_suggestion(state, config)
        rank1 = exposed.ranked[0] if exposed else None
        arrows = arrow_cues(state.gripper, state.mapping.columns, rank1)
        cues = {
            "arrows": [a.to_dict() for a in arrows],
            "dof": dof_indicator(state.mapping.columns, config.lambda_rot,
                                 config.lambda_grip).to_dict(),
            "ghost": None,
            "vibro": None,
        }
        if rank1 is None:
            # next exposure should buzz even if it points the same way
            self._last_buzz = None
            return cues
        cues["ghost"] = ghost_cue(state.gripper, rank1,
                                  self.scenario.limits,
                                  config.speed_scale).to_dict()
        # suggestion epochs advance every tick, so dedupe the haptic
        # channel on what it would actually say: buzz only when the
        # encoded heading changes (or exposure starts fresh)
        try:
            pattern = encode_direction(rank1.linear, self.vibro_mode)
        except InvalidDirectionError:
            return cues
        key = (pattern.octant, pattern.z_level)
        if key != self._last_buzz:
            cues["vibro"] = pattern.to_dict()
            self._last_buzz = key
        return cues

    def _scene(self) -> dict:
        # carried objects move with the gripper; clients draw what the
        # world actually holds instead of the descriptor's initial layout
        return {"objects": [
            {"id": obj.id,
             "position": [float(v) for v in obj.position],
             "orientation": [float(v) for v in obj.orientation],
             "attached": bool(obj.attached)}
            for obj in self.scenario.objects]}

    def tick(self) -> list:
        """Advance one tick; return the outbound message payloads."""
        frame, perspective = self._drain_frame()
        twist, events = advance(self.state, frame, self.scenario,
                                self.config, perspective_requested=perspective)
        record = make_record(self.state, twist, events, self.scenario.tick_dt)
        self.metrics.observe(record, self.scenario.tick_dt)
        out = [{"type": "state", "record": record.to_dict(),
                "cues": self._cues(), "scene": self._scene()}]
        for event in events:
            out.append({"type": "event", "event": dict(event)})
        if self.done:
            out.append({"type": "done",
                        "metrics": self.metrics.finish().to_dict()})
        return out

    def descriptor(self) -> dict:
        sc = self.scenario
        return {
            "protocol": PROTOCOL,
            "scenario": sc.name,
            "variant": self.config.variant,
            "tick_dt": sc.tick_dt,
            "seed": self.state.rng_seed,
            "limits": {
                "min": [float(v) for v in sc.limits.min],
                "max": [float(v) for v in sc.limits.max],
            },
            "objects": [obj.to_dict() for obj in sc.objects],
            "zones": [z.to_dict() for z in sc.zones],
            "start_pose": sc.start_pose.to_dict(),
        }


def _error(code: str, detail: str) -> dict:
    return {"type": "error", "code": code, "detail": detail}


def create_app(default_tick_rate: float = 20.0, scenario_paths=(),
               idle_timeout_s: float = 600.0) -> FastAPI:
    """Build the service; extra scenario files register under their name."""
    registry = {}
    for path in scenario_paths:
        sc = load_scenario(Path(path))
        registry[sc.name] = sc

    app = FastAPI(title="shared-dof", docs_url=None, redoc_url=None)
    app.state.default_tick_rate = default_tick_rate
    app.state.idle_timeout_s = idle_timeout_s

    def resolve(spec) -> Scenario:
        if isinstance(spec, dict):
            return scenario_from_dict(spec, source="inline")
        if isinstance(spec, str):
            if spec in registry:
                return registry[spec]
            return builtin_scenario(spec)
        raise SharedDofError("scenario must be a name or an object")

    @app.get("/healthz")
    def healthz():
        return {"ok": True, "protocol": PROTOCOL}

    @app.websocket("/session")
    async def session_socket(ws: WebSocket):
        offered = ws.scope.get("subprotocols") or []
        await ws.accept(subprotocol=PROTOCOL if PROTOCOL in offered else None)
        try:
            await _serve_session(ws, app, resolve)
        except WebSocketDisconnect:
            pass

    return app


async def _serve_session(ws: WebSocket, app: FastAPI, resolve) -> None:
    driver = None
    paused = False
    interval = 1.0 / app.state.default_tick_rate
    loop = asyncio.get_running_loop()
    deadline = None

    async def send(payload: dict) -> None:
        await ws.send_text(json.dumps(payload, separators=(",", ":")))

    async def run_tick() -> None:
        for payload in driver.tick():
            await send(payload)

    async def handle(raw: str) -> bool:
        """Process one inbound message; False closes the socket."""
        nonlocal driver, paused, interval, deadline
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError as exc:
            await send(_error("bad_json", str(exc)))
            return True
        if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
            await send(_error("bad_message", "missing message type"))
            return True
        kind = msg["type"]

        if kind == "hello":
            version = msg.get("version")
            if version != PROTOCOL:
                await send(_error("version",
                                  f"server speaks {PROTOCOL}, client sent "
                                  f"{version!r}"))
                return False
            await send({"type": "hello", "version": PROTOCOL})
        elif kind == "list_scenarios":
            await send({"type": "scenarios",
                        "names": list_builtin_scenarios()})
        elif kind == "create_session":
            try:
                scenario = resolve(msg.get("scenario", "canonical"))
                raw_cfg = msg.get("config") or {}
                if not isinstance(raw_cfg, dict):
                    raise SharedDofError("config must be an object")
                unknown = set(raw_cfg) - CONFIG_KEYS
                if unknown:
                    raise SharedDofError(
                        f"unknown config keys: {sorted(unknown)}")
                kwargs = {}
                if "variant" in raw_cfg:
                    kwargs["variant"] = raw_cfg["variant"]
                if "idle_timeout_s" in raw_cfg:
                    kwargs["idle_timeout_s"] = float(raw_cfg["idle_timeout_s"])
                if "threshold_angle_deg" in raw_cfg:
                    kwargs["threshold_angle"] = math.radians(
                        float(raw_cfg["threshold_angle_deg"]))
                if "speed_scale" in raw_cfg:
                    kwargs["speed_scale"] = float(raw_cfg["speed_scale"])
                config = ControllerConfig(**kwargs)
                rate = float(raw_cfg.get("tick_rate",
                                         app.state.default_tick_rate))
                if not (MIN_TICK_RATE <= rate <= MAX_TICK_RATE):
                    raise SharedDofError(
                        f"tick_rate out of range [{MIN_TICK_RATE}, "
                        f"{MAX_TICK_RATE}]")
                driver = SessionDriver(
                    scenario, config, seed=raw_cfg.get("seed"),
                    vibro_mode=raw_cfg.get("vibro_mode", "rabbit"))
            except (SharedDofError, ValueError, TypeError) as exc:
                await send(_error("bad_session", str(exc)))
                return True
            interval = 1.0 / rate
            paused = bool(msg.get("paused", False))
            deadline = loop.time() + interval
            await send({"type": "SessionCreated",
                        "descriptor": driver.descriptor()})
        elif kind == "input":
            if driver is None or driver.done:
                await send(_error("no_session", "no active session"))
            else:
                driver.feed_input(msg)
        elif kind == "perspective_request":
            if driver is None or driver.done:
                await send(_error("no_session", "no active session"))
            else:
                driver.request_perspective()
        elif kind == "pause":
            paused = True
        elif kind == "resume":
            if driver is None:
                await send(_error("no_session", "no active session"))
            else:
                paused = False
                deadline = loop.time() + interval
        elif kind == "step":
            if driver is None:
                await send(_error("no_session", "no active session"))
            elif not paused:
                await send(_error("not_paused", "step needs a paused session"))
            else:
                count = msg.get("count", 1)
                if not isinstance(count, int) or not 1 <= count <= MAX_STEP:
                    await send(_error("bad_message",
                                      f"count must be 1..{MAX_STEP}"))
                else:
                    for _ in range(count):
                        if driver.done:
                            break
                        await run_tick()
        elif kind == "ping":
            await send({"type": "pong"})
        else:
            await send(_error("bad_message", f"unknown type {kind!r}"))
        return True

    while True:
        ticking = driver is not None and not paused and not driver.done
        if not ticking:
            raw = await ws.receive_text()
            if not await handle(raw):
                await ws.close(code=4000)
                return
            continue
        timeout = deadline - loop.time()
        if timeout > 0:
            try:
                raw = await asyncio.wait_for(ws.receive_text(), timeout)
            except asyncio.TimeoutError:
                raw = None
            if raw is not None:
                if not await handle(raw):
                    await ws.close(code=4000)
                    return
                continue
        # drift-free schedule; skip missed slots after a long stall
        deadline += interval
        now = loop.time()
        if deadline < now:
            deadline = now + interval
        await run_tick()
