"""Tabletop world model and the pick-and-place task machine.

The world is deliberately kinematic: boxes and disk shaped target zones
on a desk, no gravity, no contact forces.  An object grasped by the
gripper is attached rigidly (its pose follows the gripper with the
relative transform frozen at attach time) and released objects simply
stay where they are.  That keeps every run exactly reproducible, which
the benchmark and the replay tests rely on.

The task is a fixed five phase pick-and-place:

    Approach -> Grasp -> Transport -> Release -> Done

Each phase has one subgoal pose, recomputed on phase entry:

* Approach: hover PREGRASP_HEIGHT above the active object, fingers
  open, wrist aligned with the object.
* Grasp: at the object pose, fingers closing toward 0.
* Transport: PREGRASP_HEIGHT above the zone center, wrist and fingers
  held as they were on entry.
* Release: stay in place, open to 1.0.

A zone counts as containing an object when the horizontal distance of
the object center to the zone center is within the zone radius; zones
are flat areas on the desk, so height does not matter.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

import numpy as np

from . import kernels
from .errors import ScenarioError
from .geometry import Pose, WorkspaceLimits, rotation_angle_between

PREGRASP_HEIGHT = 0.08  # m above an object / zone before the final move
GRASP_TOL_POS = 0.02  # m: position tolerance for grasping and placing
GRASP_TOL_ANG = math.radians(15.0)  # rad: wrist misalignment tolerance
APERTURE_GRASPED = 0.3  # fingers hold below this aperture
APERTURE_RELEASED = 0.7  # a held object is let go above this aperture


class Phase(str, Enum):
    APPROACH = "Approach"
    GRASP = "Grasp"
    TRANSPORT = "Transport"
    RELEASE = "Release"
    DONE = "Done"


@dataclass
class SceneObject:
    id: str
    half_extents: np.ndarray
    position: np.ndarray
    orientation: np.ndarray
    graspable: bool
    color_tag: str
    attached: bool = False
    # Relative transform (gripper frame) frozen at attach time.
    attach_offset: np.ndarray | None = None
    attach_rotation: np.ndarray | None = None

    def pose(self) -> Pose:
        return Pose(self.position.copy(), self.orientation.copy(), 1.0)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "half_extents": [float(v) for v in self.half_extents],
            "position": [float(v) for v in self.position],
            "orientation": [float(v) for v in self.orientation],
            "graspable": bool(self.graspable),
            "color_tag": self.color_tag,
            "attached": bool(self.attached),
        }


@dataclass
class TargetZone:
    id: str
    center: np.ndarray
    radius: float
    color_tag: str

    def contains(self, point) -> bool:
        p = np.asarray(point, dtype=np.float64)
        dx = p[0] - self.center[0]
        dy = p[1] - self.center[1]
        return math.sqrt(dx * dx + dy * dy) <= self.radius

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "center": [float(v) for v in self.center],
            "radius": float(self.radius),
            "color_tag": self.color_tag,
        }


@dataclass
class Scenario:
    name: str
    tick_dt: float
    seed: int
    start_pose: Pose
    limits: WorkspaceLimits
    objects: list[SceneObject]
    zones: list[TargetZone]

    def object_by_id(self, object_id: str) -> SceneObject:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        raise ScenarioError(f"no object with id {object_id!r}")

    def zone_by_id(self, zone_id: str) -> TargetZone:
        for zone in self.zones:
            if zone.id == zone_id:
                return zone
        raise ScenarioError(f"no zone with id {zone_id!r}")

    def fresh_world(self) -> "Scenario":
        """Deep copy so a run can mutate object poses freely."""
        return copy.deepcopy(self)


def _need(raw: dict, key: str, where: str):
    if key not in raw:
        raise ScenarioError(f"{where}: missing required field {key!r}")
    return raw[key]


def _vec3(value, where: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: not a number triple ({exc})") from None
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ScenarioError(f"{where}: expected 3 finite numbers")
    return arr


def _quat(value, where: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: not a quaternion ({exc})") from None
    if arr.shape != (4,) or not np.all(np.isfinite(arr)):
        raise ScenarioError(f"{where}: expected 4 finite numbers (w, x, y, z)")
    n = float(np.linalg.norm(arr))
    if abs(n - 1.0) > 1e-6:
        raise ScenarioError(f"{where}: quaternion norm {n:.6f} is not 1")
    return kernels.quat_canonical(arr)


def scenario_from_dict(raw: dict, source: str = "<dict>") -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError(f"{source}: top level must be an object")
    name = str(_need(raw, "name", source))
    tick_dt = float(_need(raw, "tick_dt", source))
    if not math.isfinite(tick_dt) or tick_dt <= 0.0:
        raise ScenarioError(f"{source}: tick_dt must be positive")
    seed = int(_need(raw, "seed", source))

    sp = _need(raw, "start_pose", source)
    start_pose = Pose(
        _vec3(_need(sp, "position", "start_pose"), "start_pose.position"),
        _quat(_need(sp, "orientation", "start_pose"), "start_pose.orientation"),
        float(_need(sp, "aperture", "start_pose")),
    )

    lim = _need(raw, "limits", source)
    try:
        limits = WorkspaceLimits(
            _vec3(_need(lim, "min", "limits"), "limits.min"),
            _vec3(_need(lim, "max", "limits"), "limits.max"),
            float(_need(lim, "max_linear_speed", "limits")),
            float(_need(lim, "max_angular_speed", "limits")),
            float(_need(lim, "max_aperture_rate", "limits")),
        )
    except ValueError as exc:
        raise ScenarioError(f"limits: {exc}") from None

    objects = []
    seen = set()
    for i, entry in enumerate(_need(raw, "objects", source)):
        where = f"objects[{i}]"
        obj_id = str(_need(entry, "id", where))
        if obj_id in seen:
            raise ScenarioError(f"{where}: duplicate id {obj_id!r}")
        seen.add(obj_id)
        objects.append(SceneObject(
            id=obj_id,
            half_extents=_vec3(_need(entry, "half_extents", where),
                               f"{where}.half_extents"),
            position=_vec3(_need(entry, "position", where), f"{where}.position"),
            orientation=_quat(_need(entry, "orientation", where),
                              f"{where}.orientation"),
            graspable=bool(_need(entry, "graspable", where)),
            color_tag=str(_need(entry, "color_tag", where)),
        ))

    zones = []
    for i, entry in enumerate(_need(raw, "zones", source)):
        where = f"zones[{i}]"
        zone_id = str(_need(entry, "id", where))
        if zone_id in seen:
            raise ScenarioError(f"{where}: duplicate id {zone_id!r}")
        seen.add(zone_id)
        radius = float(_need(entry, "radius", where))
        if not math.isfinite(radius) or radius <= 0.0:
            raise ScenarioError(f"{where}: radius must be positive")
        zones.append(TargetZone(
            id=zone_id,
            center=_vec3(_need(entry, "center", where), f"{where}.center"),
            radius=radius,
            color_tag=str(_need(entry, "color_tag", where)),
        ))

    if not any(o.graspable for o in objects):
        raise ScenarioError(f"{source}: needs at least one graspable object")
    if not zones:
        raise ScenarioError(f"{source}: needs at least one target zone")

    box_lo, box_hi = limits.min, limits.max
    if np.any(start_pose.position < box_lo) or np.any(start_pose.position > box_hi):
        raise ScenarioError(f"{source}: start_pose.position outside workspace box")

    return Scenario(name, tick_dt, seed, start_pose, limits, objects, zones)


def load_scenario(path) -> Scenario:
    """Load and validate a scenario JSON file.

    Parse errors keep the json module's line/column information so a
    broken file points at the offending spot.
    """
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {p}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"{p}: invalid JSON at line {exc.lineno} column {exc.colno}:"
            f" {exc.msg}") from None
    return scenario_from_dict(raw, source=str(p))


def list_builtin_scenarios() -> list[str]:
    root = resources.files(__package__) / "scenarios"
    return sorted(entry.name[:-5] for entry in root.iterdir()
                  if entry.name.endswith(".json"))


def builtin_scenario(name: str) -> Scenario:
    """Load a scenario that ships with the package ("canonical", ...)."""
    stem = name[:-5] if name.endswith(".json") else name
    res = resources.files(__package__) / "scenarios" / f"{stem}.json"
    if not res.is_file():
        raise ScenarioError(
            f"unknown builtin scenario {name!r};"
            f" available: {', '.join(list_builtin_scenarios())}")
    raw = json.loads(res.read_text())
    return scenario_from_dict(raw, source=f"builtin:{stem}")


@dataclass
class TaskState:
    phase: Phase
    active_object_id: str
    active_zone_id: str
    subgoal: Pose
    # Bookkeeping for "the object was already let go" inside Release.
    detached: bool = False


def first_graspable(scenario: Scenario) -> SceneObject:
    for obj in scenario.objects:
        if obj.graspable:
            return obj
    raise ScenarioError("scenario has no graspable object")


def approach_subgoal(obj: SceneObject) -> Pose:
    pos = obj.position.copy()
    pos[2] += PREGRASP_HEIGHT
    return Pose(pos, obj.orientation.copy(), 1.0)


def grasp_subgoal(obj: SceneObject) -> Pose:
    return Pose(obj.position.copy(), obj.orientation.copy(), 0.0)


def transport_subgoal(zone: TargetZone, gripper: Pose) -> Pose:
    pos = zone.center.copy()
    pos[2] += PREGRASP_HEIGHT
    return Pose(pos, gripper.orientation.copy(), gripper.aperture)


def release_subgoal(gripper: Pose) -> Pose:
    return Pose(gripper.position.copy(), gripper.orientation.copy(), 1.0)


def initial_task(scenario: Scenario) -> TaskState:
    obj = first_graspable(scenario)
    zone = scenario.zones[0]
    return TaskState(
        phase=Phase.APPROACH,
        active_object_id=obj.id,
        active_zone_id=zone.id,
        subgoal=approach_subgoal(obj),
    )


def grasp_check(gripper: Pose, obj: SceneObject) -> bool:
    """True when the fingers can take hold of the object right now."""
    if float(np.linalg.norm(gripper.position - obj.position)) > GRASP_TOL_POS:
        return False
    if rotation_angle_between(gripper.orientation, obj.orientation) > GRASP_TOL_ANG:
        return False
    return gripper.aperture < APERTURE_GRASPED


def _at_pose(gripper: Pose, target: Pose) -> bool:
    if float(np.linalg.norm(gripper.position - target.position)) > GRASP_TOL_POS:
        return False
    return rotation_angle_between(gripper.orientation,
                                  target.orientation) <= GRASP_TOL_ANG


def attach(obj: SceneObject, gripper: Pose) -> None:
    """Freeze the object pose relative to the gripper."""
    inv = kernels.quat_conjugate(gripper.orientation)
    obj.attach_offset = kernels.quat_rotate(inv, obj.position - gripper.position)
    obj.attach_rotation = kernels.quat_canonical(
        kernels.quat_mul(inv, obj.orientation))
    obj.attached = True


def detach(obj: SceneObject) -> None:
    obj.attached = False
    obj.attach_offset = None
    obj.attach_rotation = None


def carry_attached(scenario: Scenario, gripper: Pose) -> None:
    for obj in scenario.objects:
        if obj.attached:
            obj.position = gripper.position + kernels.quat_rotate(
                gripper.orientation, obj.attach_offset)
            obj.orientation = kernels.quat_canonical(
                kernels.quat_mul(gripper.orientation, obj.attach_rotation))


def step_world(task: TaskState, scenario: Scenario,
               gripper: Pose) -> tuple[TaskState, Scenario, list[dict]]:
    """Advance the world one tick after the gripper has moved.

    Mutates the scenario's object poses in place (attached objects
    follow the gripper) and returns the possibly advanced task state
    plus the world events that occurred this tick.
    """
    events: list[dict] = []
    if task.phase is Phase.DONE:
        return task, scenario, events

    carry_attached(scenario, gripper)
    obj = scenario.object_by_id(task.active_object_id)
    zone = scenario.zone_by_id(task.active_zone_id)

    def enter(phase: Phase, subgoal: Pose):
        events.append({"type": "PhaseChanged",
                       "from": task.phase.value, "to": phase.value})
        task.phase = phase
        task.subgoal = subgoal

    if task.phase is Phase.APPROACH:
        if _at_pose(gripper, task.subgoal) and gripper.aperture >= APERTURE_RELEASED:
            enter(Phase.GRASP, grasp_subgoal(obj))
    elif task.phase is Phase.GRASP:
        if grasp_check(gripper, obj):
            attach(obj, gripper)
            carry_attached(scenario, gripper)
            enter(Phase.TRANSPORT, transport_subgoal(zone, gripper))
    elif task.phase is Phase.TRANSPORT:
        if _at_pose(gripper, task.subgoal):
            enter(Phase.RELEASE, release_subgoal(gripper))
    elif task.phase is Phase.RELEASE:
        if obj.attached and gripper.aperture > APERTURE_RELEASED:
            detach(obj)
            task.detached = True
        if task.detached and zone.contains(obj.position):
            enter(Phase.DONE, task.subgoal)
            events.append({"type": "TaskDone"})
    return task, scenario, events
