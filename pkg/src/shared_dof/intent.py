"""Geometric intent estimation and DoF mapping suggestions.

A wrist camera model stands in for a learned intent predictor: a view
cone anchored at the gripper, looking forward and pitched down at the
workspace, senses candidate targets (objects while approaching and
grasping, zones while transporting and releasing).  Candidates are scored by
proximity and bearing, turned into a probability distribution with a
softmax, and the most probable candidate drives a ranked mapping
suggestion of one or two weighted-orthonormal twists:

* rank 1 points from the gripper toward the phase subgoal of the top
  candidate (pure aperture motion when the gripper is already within
  grasp or release tolerance);
* rank 2 is the strongest alternative: the second-best candidate's
  direction when one is visible, otherwise the anticipated next-phase
  motion, otherwise a plain downward translation.  It is always
  orthonormalized against rank 1.

The cone is deliberately imperfect.  Targets can leave it, and then the
distribution cannot update; change_perspective yaws the gripper in
place through a growing alternating schedule so a re-sense can break
ties or re-acquire a target.  nudge_confidence shifts probability mass
toward candidates the user is actively steering at.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import DegeneratePairError, DegenerateDirectionError, NoIntentError
from .geometry import (
    LAMBDA_GRIP,
    LAMBDA_ROT,
    Pose,
    Twist,
    sensor_axis,
    axis_twist,
    goal_twist,
    orthonormalize_pair,
    weighted_normalize,
    yaw_quat,
)
from .scene import (
    GRASP_TOL_ANG,
    GRASP_TOL_POS,
    Phase,
    Scenario,
    SceneObject,
    TargetZone,
    approach_subgoal,
    grasp_subgoal,
    release_subgoal,
    transport_subgoal,
    TaskState,
)

PERSPECTIVE_STEP = math.radians(15.0)  # base yaw increment per retry


@dataclass
class IntentConfig:
    half_angle: float = math.radians(60.0)  # rad, cone half opening
    sense_range: float = 1.5  # m
    w_dist: float = 0.5  # weight of the proximity term
    w_bearing: float = 0.5  # weight of the bearing term
    temperature: float = 0.2  # softmax temperature
    eta: float = 0.1  # confidence nudge gain per tick
    low_confidence: float = 0.55  # below this the estimate counts as stuck
    stuck_timeout_s: float = 2.0  # how long "stuck" persists before acting

    def __post_init__(self):
        if not 0.0 < self.half_angle < math.pi / 2:
            raise ValueError("half_angle must be in (0, pi/2)")
        if self.temperature <= 0.0:
            raise ValueError("temperature must be positive")
        if self.sense_range <= 0.0:
            raise ValueError("sense_range must be positive")


@dataclass
class ViewModel:
    """Sensing cone: apex at the gripper, axis along the wrist camera."""

    apex: np.ndarray
    axis: np.ndarray
    half_angle: float
    sense_range: float

    @classmethod
    def from_pose(cls, pose: Pose, cfg: IntentConfig) -> "ViewModel":
        return cls(pose.position.copy(), sensor_axis(pose),
                   cfg.half_angle, cfg.sense_range)


@dataclass
class Candidate:
    id: str
    kind: str  # "object" | "zone"
    position: np.ndarray
    distance: float
    bearing_cos: float
    score: float = 0.0


@dataclass
class IntentDistribution:
    """Probabilities over candidate ids, entries sorted by id."""

    entries: tuple = ()  # ((id, probability), ...)
    positions: dict = field(default_factory=dict)  # id -> np.ndarray, for nudging

    def prob_of(self, candidate_id: str) -> float:
        for cid, p in self.entries:
            if cid == candidate_id:
                return p
        return 0.0

    def top(self) -> tuple[str, float]:
        """Most probable candidate; ties go to the smallest id."""
        best_id, best_p = self.entries[0]
        for cid, p in self.entries[1:]:
            if p > best_p + 0.0:
                best_id, best_p = cid, p
        return best_id, best_p

    def to_dict(self) -> dict:
        return {cid: float(p) for cid, p in self.entries}


@dataclass
class MappingSuggestion:
    epoch: int
    ranked: tuple  # 1 or 2 weighted-orthonormal Twists
    confidence: float
    top_candidate_id: str

    def to_dict(self) -> dict:
        return {
            "epoch": self.epoch,
            "ranked": [t.to_dict() for t in self.ranked],
            "confidence": float(self.confidence),
            "top_candidate_id": self.top_candidate_id,
        }


def _phase_candidates(scenario: Scenario, phase: Phase):
    if phase in (Phase.APPROACH, Phase.GRASP):
        return [("object", o.id, o.position) for o in scenario.objects
                if o.graspable and not o.attached]
    if phase in (Phase.TRANSPORT, Phase.RELEASE):
        return [("zone", z.id, z.center) for z in scenario.zones]
    return []


def sense(gripper: Pose, scenario: Scenario, phase: Phase,
          cfg: IntentConfig | None = None) -> list[Candidate]:
    """Candidates inside the view cone, sorted by id.

    Objects while approaching or grasping, zones afterwards.  A target
    sitting exactly on the apex counts as dead ahead.
    """
    cfg = cfg or IntentConfig()
    view = ViewModel.from_pose(gripper, cfg)
    cos_limit = math.cos(view.half_angle)
    found = []
    for kind, cid, pos in sorted(_phase_candidates(scenario, phase),
                                 key=lambda c: c[1]):
        delta = pos - view.apex
        dist = float(np.linalg.norm(delta))
        if dist <= 1e-9:
            found.append(Candidate(cid, kind, pos.copy(), 0.0, 1.0))
            continue
        if dist > view.sense_range:
            continue
        bearing = float(np.dot(delta, view.axis)) / dist
        if bearing < cos_limit:
            continue
        found.append(Candidate(cid, kind, pos.copy(), dist, bearing))
    return found


def score(candidates: list[Candidate], cfg: IntentConfig | None = None) -> IntentDistribution:
    """Proximity/bearing score -> softmax distribution.

    score_i = w_dist * (1 - distance / range) + w_bearing * bearing_cos.
    Scaling every score and the temperature by the same positive factor
    leaves the distribution unchanged.
    """
    cfg = cfg or IntentConfig()
    if not candidates:
        raise NoIntentError("no candidates in view")
    scored = []
    for c in candidates:
        s = (cfg.w_dist * (1.0 - c.distance / cfg.sense_range)
             + cfg.w_bearing * c.bearing_cos)
        scored.append(replace(c, score=s))
    scored.sort(key=lambda c: c.id)
    raw = np.array([c.score for c in scored]) / cfg.temperature
    raw -= raw.max()  # stable softmax
    ex = np.exp(raw)
    probs = ex / ex.sum()
    return IntentDistribution(
        entries=tuple((c.id, float(p)) for c, p in zip(scored, probs)),
        positions={c.id: c.position.copy() for c in scored},
    )


def nudge_confidence(dist: IntentDistribution, user_twist: Twist,
                     gripper: Pose, eta: float | None = None,
                     cfg: IntentConfig | None = None) -> IntentDistribution:
    """Shift probability toward candidates the user is steering at.

    Each entry is reweighted by exp(eta * cos(angle between the user's
    linear direction and the gripper-to-candidate direction)) and the
    distribution renormalized.  A twist without a linear component
    cannot express a preference and leaves the distribution unchanged.
    """
    cfg = cfg or IntentConfig()
    if eta is None:
        eta = cfg.eta
    lin = user_twist.linear
    n = float(np.linalg.norm(lin))
    if n < 1e-12 or not dist.entries:
        return dist
    direction = lin / n
    weights = []
    for cid, p in dist.entries:
        delta = dist.positions[cid] - gripper.position
        d = float(np.linalg.norm(delta))
        cosang = 0.0 if d < 1e-9 else float(np.dot(delta, direction)) / d
        weights.append(p * math.exp(eta * cosang))
    total = sum(weights)
    if total <= 0.0:
        return dist
    return IntentDistribution(
        entries=tuple((cid, w / total)
                      for (cid, _), w in zip(dist.entries, weights)),
        positions=dict(dist.positions),
    )


def _within_grasp_tolerance(gripper: Pose, target: Pose) -> bool:
    if float(np.linalg.norm(gripper.position - target.position)) > GRASP_TOL_POS:
        return False
    from .geometry import rotation_angle_between
    return rotation_angle_between(gripper.orientation,
                                  target.orientation) <= GRASP_TOL_ANG


def _candidate_subgoal(phase: Phase, candidate_id: str, scenario: Scenario,
                       gripper: Pose) -> Pose:
    if phase in (Phase.APPROACH, Phase.GRASP):
        obj = scenario.object_by_id(candidate_id)
        return approach_subgoal(obj) if phase is Phase.APPROACH else grasp_subgoal(obj)
    zone = scenario.zone_by_id(candidate_id)
    if phase is Phase.TRANSPORT:
        return transport_subgoal(zone, gripper)
    return release_subgoal(gripper)


def _next_phase_twist(phase: Phase, candidate_id: str, scenario: Scenario,
                      task: TaskState, subgoal: Pose,
                      lambda_rot: float, lambda_grip: float) -> Twist | None:
    """Anticipated direction of the phase after this one, evaluated at
    the current subgoal.  Giving the second stick axis to the upcoming
    motion lets one adopted mapping carry across a phase boundary."""
    try:
        if phase is Phase.APPROACH:
            obj = scenario.object_by_id(candidate_id)
            return goal_twist(approach_subgoal(obj), grasp_subgoal(obj),
                              lambda_rot, lambda_grip)
        if phase is Phase.GRASP:
            obj = scenario.object_by_id(candidate_id)
            zone = scenario.zone_by_id(task.active_zone_id)
            here = grasp_subgoal(obj)
            return goal_twist(here, transport_subgoal(zone, here),
                              lambda_rot, lambda_grip)
        if phase is Phase.TRANSPORT:
            return goal_twist(Pose(subgoal.position, subgoal.orientation,
                                   subgoal.aperture),
                              release_subgoal(subgoal),
                              lambda_rot, lambda_grip)
    except DegenerateDirectionError:
        return None
    return None


def suggest(gripper: Pose, scenario: Scenario, task: TaskState,
            dist: IntentDistribution, prev_epoch: int,
            cfg: IntentConfig | None = None,
            lambda_rot: float = LAMBDA_ROT,
            lambda_grip: float = LAMBDA_GRIP) -> MappingSuggestion:
    """Build a ranked 1..2 column mapping for the current distribution."""
    cfg = cfg or IntentConfig()
    if not dist.entries:
        raise NoIntentError("empty distribution")
    top_id, confidence = dist.top()
    subgoal = _candidate_subgoal(task.phase, top_id, scenario, gripper)

    closing = task.phase is Phase.GRASP
    if task.phase in (Phase.GRASP, Phase.RELEASE) and \
            _within_grasp_tolerance(gripper, subgoal):
        rank1 = axis_twist(6, -1.0 if closing else 1.0, lambda_rot, lambda_grip)
    else:
        try:
            rank1 = goal_twist(gripper, subgoal, lambda_rot, lambda_grip)
        except DegenerateDirectionError:
            # Sitting exactly on the subgoal: fall back to pure aperture.
            rank1 = axis_twist(6, -1.0 if closing else 1.0,
                               lambda_rot, lambda_grip)

    second: list[Twist] = []
    ordered = sorted(dist.entries, key=lambda e: (-e[1], e[0]))
    if len(ordered) > 1:
        alt_id = ordered[1][0]
        alt_goal = _candidate_subgoal(task.phase, alt_id, scenario, gripper)
        try:
            second.append(goal_twist(gripper, alt_goal, lambda_rot, lambda_grip))
        except DegenerateDirectionError:
            pass
    nxt = _next_phase_twist(task.phase, top_id, scenario, task, subgoal,
                            lambda_rot, lambda_grip)
    if nxt is not None:
        second.append(nxt)
    second.append(axis_twist(2, -1.0, lambda_rot, lambda_grip))  # straight down
    second.append(axis_twist(0, 1.0, lambda_rot, lambda_grip))
    second.append(axis_twist(1, 1.0, lambda_rot, lambda_grip))

    ranked = (rank1,)
    for cand in second:
        try:
            r1, r2 = orthonormalize_pair(rank1, cand, lambda_rot, lambda_grip)
        except DegeneratePairError:
            continue
        ranked = (r1, r2)
        break

    return MappingSuggestion(
        epoch=prev_epoch + 1,
        ranked=ranked,
        confidence=confidence,
        top_candidate_id=top_id,
    )


def perspective_offset(attempt_index: int) -> float:
    """Yaw delta for the n-th consecutive retry: +15, -30, +45, -60 deg."""
    magnitude = PERSPECTIVE_STEP * (attempt_index + 1)
    return magnitude if attempt_index % 2 == 0 else -magnitude


def change_perspective(pose: Pose, attempt_index: int) -> Pose:
    """Yaw the gripper in place (position bit for bit unchanged)."""
    dq = yaw_quat(perspective_offset(attempt_index))
    out = Pose.__new__(Pose)
    out.position = pose.position.copy()
    out.orientation = kernels.quat_canonical(
        kernels.quat_mul(dq, pose.orientation))
    out.aperture = pose.aperture
    return out
