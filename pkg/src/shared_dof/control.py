"""Input mapping variants and the per-tick session step.

A session maps a 2-axis input device onto the 7-DoF end effector
through an active mapping of one or two weighted-orthonormal twist
columns.  Five variants decide how that mapping changes:

* classic: four fixed cardinal mode pairs, cycled manually
  (M1 x/y translation, M2 z translation/roll, M3 pitch/yaw,
  M4 aperture).  Every cycle press is a user switch.
* admc_request: a button press computes and immediately adopts a fresh
  suggestion.
* admc_idle: hands-off for idle_timeout seconds computes a suggestion
  and adopts it automatically (counted as an automatic switch).
* admc_continuous: suggestions are recomputed every tick and always
  exposed; an accept press adopts the pending one.
* admc_threshold: like continuous, but a pending suggestion is exposed
  to the user (and to the cue layer) only while its rank 1 direction
  differs from the active rank 1 by more than threshold_angle.

Mappings never change without one of those rules firing, and adoption
always replaces the whole mapping at once.

Tick order inside advance(): suggestion pipeline, adoption, confidence
nudge, input application and pose integration, world step, deadlock
watching, idle tracking.  advance() is deterministic in (state, input,
world, config); it mutates its arguments in place and returns the
events of the tick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidModeError, NoIntentError, SessionFinishedError
from .geometry import (
    LAMBDA_GRIP,
    LAMBDA_ROT,
    Pose,
    Twist,
    axis_twist,
    integrate,
    weighted_dot,
)
from .intent import (
    IntentConfig,
    IntentDistribution,
    MappingSuggestion,
    change_perspective,
    nudge_confidence,
    perspective_offset,
    score,
    sense,
    suggest,
)
from .scene import Phase, Scenario, TaskState, initial_task, step_world

VARIANTS = (
    "classic",
    "admc_request",
    "admc_idle",
    "admc_continuous",
    "admc_threshold",
)

CLASSIC_MODE_COUNT = 4


@dataclass
class ControllerConfig:
    variant: str = "classic"
    idle_timeout_s: float = 5.0
    threshold_angle: float = math.radians(30.0)
    speed_scale: float = 0.15  # m/s of weighted twist at full deflection
    lambda_rot: float = LAMBDA_ROT
    lambda_grip: float = LAMBDA_GRIP
    intent: IntentConfig = field(default_factory=IntentConfig)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidModeError(
                f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.speed_scale <= 0.0:
            raise ValueError("speed_scale must be positive")

    @property
    def is_admc(self) -> bool:
        return self.variant != "classic"


@dataclass
class InputFrame:
    """One tick of operator input.  Axes clamp to [-1, 1]; buttons are
    edge flags except estop, which is level triggered (held)."""

    axis0: float = 0.0
    axis1: float = 0.0
    mode_switch: bool = False
    accept: bool = False
    request: bool = False
    estop: bool = False
    source: str = "human"  # "human" | "simulated"

    def __post_init__(self):
        for name in ("axis0", "axis1"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                v = 0.0
            setattr(self, name, min(1.0, max(-1.0, v)))

    @classmethod
    def zero(cls, source: str = "human") -> "InputFrame":
        return cls(source=source)

    @property
    def any_button(self) -> bool:
        return self.mode_switch or self.accept or self.request or self.estop

    @property
    def idle(self) -> bool:
        return self.axis0 == 0.0 and self.axis1 == 0.0 and not self.any_button


@dataclass
class ActiveMapping:
    columns: tuple  # 1 or 2 weighted-orthonormal Twists
    source: dict  # {"kind": "classic", "mode": k} | {"kind": "suggestion", "epoch": e}
    since_tick: int = 0

    def to_dict(self) -> dict:
        return {
            "columns": [t.to_dict() for t in self.columns],
            "source": dict(self.source),
            "since_tick": self.since_tick,
        }


def classic_mapping(k: int, lambda_rot: float = LAMBDA_ROT,
                    lambda_grip: float = LAMBDA_GRIP,
                    since_tick: int = 0) -> ActiveMapping:
    """Cardinal mode pairs M1..M4 of the mode cycling baseline."""
    if k not in (1, 2, 3, 4):
        raise InvalidModeError(f"classic mode must be 1..4, got {k}")
    pairs = {
        1: (axis_twist(0, 1.0, lambda_rot, lambda_grip),
            axis_twist(1, 1.0, lambda_rot, lambda_grip)),
        2: (axis_twist(2, 1.0, lambda_rot, lambda_grip),
            axis_twist(3, 1.0, lambda_rot, lambda_grip)),
        3: (axis_twist(4, 1.0, lambda_rot, lambda_grip),
            axis_twist(5, 1.0, lambda_rot, lambda_grip)),
        4: (axis_twist(6, 1.0, lambda_rot, lambda_grip),),
    }
    return ActiveMapping(columns=pairs[k],
                         source={"kind": "classic", "mode": k},
                         since_tick=since_tick)


def apply_input(mapping: ActiveMapping, frame: InputFrame,
                config: ControllerConfig) -> Twist:
    """Blend the stick axes through the mapping columns.

    The result is speed_scale * (axis0 * col0 + axis1 * col1); holding
    estop yields an exact zero twist regardless of the axes.
    """
    if frame.estop:
        return Twist.zero()
    vec = mapping.columns[0].as_vector() * frame.axis0
    if len(mapping.columns) > 1:
        vec = vec + mapping.columns[1].as_vector() * frame.axis1
    return Twist.from_vector(vec * config.speed_scale)


@dataclass
class SessionState:
    tick: int
    gripper: Pose
    task: TaskState
    mapping: ActiveMapping
    classic_mode: int
    pending_suggestion: MappingSuggestion | None
    dist: IntentDistribution | None
    idle_ticks: int
    switch_count_user: int
    switch_count_auto: int
    perspective_attempts: int
    stall_ticks: int
    epoch_counter: int
    rng_seed: int


def initial_state(scenario: Scenario, config: ControllerConfig,
                  seed: int | None = None) -> SessionState:
    """Fresh session: every variant starts in classic mode M1."""
    return SessionState(
        tick=0,
        gripper=scenario.start_pose.copy(),
        task=initial_task(scenario),
        mapping=classic_mapping(1, config.lambda_rot, config.lambda_grip),
        classic_mode=1,
        pending_suggestion=None,
        dist=None,
        idle_ticks=0,
        switch_count_user=0,
        switch_count_auto=0,
        perspective_attempts=0,
        stall_ticks=0,
        epoch_counter=0,
        rng_seed=scenario.seed if seed is None else int(seed),
    )


def _column_angle(a: Twist, b: Twist, config: ControllerConfig) -> float:
    d = weighted_dot(a, b, config.lambda_rot, config.lambda_grip)
    return math.acos(min(1.0, max(-1.0, d)))


def suggestion_exposed(state: SessionState, config: ControllerConfig) -> bool:
    """Whether the pending suggestion may be shown to the user."""
    if state.pending_suggestion is None:
        return False
    if config.variant == "admc_continuous":
        return True
    if config.variant == "admc_threshold":
        angle = _column_angle(state.mapping.columns[0],
                              state.pending_suggestion.ranked[0], config)
        return angle > config.threshold_angle
    return False


def exposed_suggestion(state: SessionState,
                       config: ControllerConfig) -> MappingSuggestion | None:
    return state.pending_suggestion if suggestion_exposed(state, config) else None


def _run_pipeline(state: SessionState, scenario: Scenario,
                  config: ControllerConfig, events: list) -> bool:
    """sense -> score -> suggest; update dist and pending_suggestion.

    Returns True when a suggestion was produced.  An empty view leaves
    the previous distribution and pending suggestion untouched (the
    estimator simply has nothing new to say).
    """
    try:
        candidates = sense(state.gripper, scenario, state.task.phase,
                           config.intent)
        dist = score(candidates, config.intent)
    except NoIntentError:
        return False
    state.dist = dist
    suggestion = suggest(state.gripper, scenario, state.task, dist,
                         state.epoch_counter, config.intent,
                         config.lambda_rot, config.lambda_grip)
    state.epoch_counter = suggestion.epoch
    previous = state.pending_suggestion
    state.pending_suggestion = suggestion
    if suggestion_exposed(state, config) and _materially_new(previous,
                                                             suggestion, config):
        events.append({
            "type": "SuggestionUpdated",
            "epoch": suggestion.epoch,
            "top_candidate_id": suggestion.top_candidate_id,
            "confidence": round(suggestion.confidence, 6),
        })
    return True


def _materially_new(previous: MappingSuggestion | None,
                    current: MappingSuggestion,
                    config: ControllerConfig) -> bool:
    if previous is None:
        return True
    if previous.top_candidate_id != current.top_candidate_id:
        return True
    return _column_angle(previous.ranked[0], current.ranked[0],
                         config) > math.radians(1.0)


def _suggestion_differs(mapping: ActiveMapping, suggestion: MappingSuggestion,
                        config: ControllerConfig) -> bool:
    if mapping.source.get("kind") != "suggestion":
        return True
    if len(mapping.columns) != len(suggestion.ranked):
        return True
    return any(_column_angle(a, b, config) > 1e-6
               for a, b in zip(mapping.columns, suggestion.ranked))


def _adopt(state: SessionState, config: ControllerConfig, by: str,
           events: list) -> None:
    suggestion = state.pending_suggestion
    state.mapping = ActiveMapping(
        columns=tuple(suggestion.ranked),
        source={"kind": "suggestion", "epoch": suggestion.epoch},
        since_tick=state.tick,
    )
    if by == "user":
        state.switch_count_user += 1
    else:
        state.switch_count_auto += 1
    events.append({
        "type": "MappingAdopted",
        "by": by,
        "epoch": suggestion.epoch,
        "top_candidate_id": suggestion.top_candidate_id,
    })
    state.pending_suggestion = None


def trigger_perspective_change(state: SessionState, scenario: Scenario,
                               config: ControllerConfig,
                               events: list) -> None:
    """Yaw in place and re-sense immediately.  Position is untouched."""
    offset = perspective_offset(state.perspective_attempts)
    state.gripper = change_perspective(state.gripper,
                                       state.perspective_attempts)
    state.perspective_attempts += 1
    state.stall_ticks = 0
    events.append({
        "type": "PerspectiveChanged",
        "attempt": state.perspective_attempts,
        "yaw_offset_rad": round(offset, 9),
    })
    _run_pipeline(state, scenario, config, events)


def advance(state: SessionState, frame: InputFrame, scenario: Scenario,
            config: ControllerConfig,
            perspective_requested: bool = False) -> tuple[Twist, list]:
    """One session tick.  Returns (applied twist, events of the tick)."""
    if state.task.phase is Phase.DONE:
        raise SessionFinishedError("task already finished")
    events: list = []
    dt = scenario.tick_dt
    variant = config.variant

    # Explicit look-around request (protocol level, ADMC only).
    if perspective_requested and config.is_admc:
        trigger_perspective_change(state, scenario, config, events)

    # 1. Suggestion pipeline, scheduled per variant.
    pipeline_ran = False
    idle_elapsed = state.idle_ticks * dt
    if variant in ("admc_continuous", "admc_threshold"):
        _run_pipeline(state, scenario, config, events)
        pipeline_ran = True
    elif variant == "admc_request" and frame.request:
        _run_pipeline(state, scenario, config, events)
        pipeline_ran = True
    elif variant == "admc_idle" and idle_elapsed >= config.idle_timeout_s:
        _run_pipeline(state, scenario, config, events)
        pipeline_ran = True

    # 2. Adoption rules.
    if variant == "classic":
        if frame.mode_switch:
            state.classic_mode = state.classic_mode % CLASSIC_MODE_COUNT + 1
            state.mapping = classic_mapping(state.classic_mode,
                                            config.lambda_rot,
                                            config.lambda_grip,
                                            since_tick=state.tick)
            state.switch_count_user += 1
            events.append({"type": "MappingAdopted", "by": "user",
                           "mode": state.classic_mode})
    elif variant == "admc_request":
        if frame.request and state.pending_suggestion is not None:
            _adopt(state, config, "user", events)
    elif variant == "admc_idle":
        if pipeline_ran and state.pending_suggestion is not None and \
                _suggestion_differs(state.mapping, state.pending_suggestion,
                                    config):
            _adopt(state, config, "auto", events)
            state.idle_ticks = 0
    else:  # admc_continuous / admc_threshold
        if frame.accept and suggestion_exposed(state, config):
            _adopt(state, config, "user", events)

    # 3. Confidence nudge from actual user motion.
    twist = apply_input(state.mapping, frame, config)
    if config.is_admc and state.dist is not None and \
            (frame.axis0 != 0.0 or frame.axis1 != 0.0):
        state.dist = nudge_confidence(state.dist, twist, state.gripper,
                                      cfg=config.intent)

    # 4. Integrate the gripper.
    state.gripper = integrate(state.gripper, twist, dt, scenario.limits)

    # 5. World step (attached object follows, phases advance).
    phase_before = state.task.phase
    state.task, scenario, world_events = step_world(state.task, scenario,
                                                    state.gripper)
    events.extend(world_events)

    # 5b. Deadlock watch: estimator active but unable to commit while the
    # user is idle.  Only then is an autonomous look-around justified.
    if config.is_admc and state.task.phase is not Phase.DONE:
        stuck = (state.pending_suggestion is None
                 or state.pending_suggestion.confidence
                 < config.intent.low_confidence)
        if pipeline_ran and frame.idle and stuck:
            state.stall_ticks += 1
        else:
            state.stall_ticks = 0
        if state.stall_ticks * dt >= config.intent.stuck_timeout_s:
            trigger_perspective_change(state, scenario, config, events)

    # 6. Idle tracking.
    if frame.idle and not perspective_requested:
        state.idle_ticks += 1
    else:
        state.idle_ticks = 0

    state.tick += 1
    return twist, events
