"""Scripted operators for headless benchmarking.

The simulated user observes only what a human at the cockpit could see:
the gripper pose, the current task subgoal, the active mapping columns,
and whichever suggestion the variant chooses to expose.  It never reads
the estimator's internal distribution.

Each tick it projects its desired motion onto the active columns and
deflects the stick accordingly.  Button presses are scheduled with a
fixed reaction delay and fire unconditionally once due, one press in
flight at a time.

The greedy policy is deterministic and never draws from the RNG, so its
sessions are identical across seeds.  The noisy policy perturbs the
axes with Gaussian noise after the deadband.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .control import InputFrame
from .errors import DegenerateDirectionError, InvalidModeError
from .geometry import LAMBDA_GRIP, LAMBDA_ROT, Pose, Twist, goal_twist, weighted_dot
from .intent import MappingSuggestion
from .scene import Phase

POLICIES = ("greedy", "noisy")

MIN_AXIS = 0.02  # stick deadband on the projected command
LOW_PROJECTION = 0.2  # below this the current mapping is considered spent
ACCEPT_MARGIN = 0.05  # required gain of a suggestion over the active span


@dataclass
class UserPolicy:
    kind: str = "greedy"
    reaction_delay_ticks: int = 4
    noise_std: float = 0.05
    _pending: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.kind not in POLICIES:
            raise InvalidModeError(
                f"unknown policy {self.kind!r}; expected one of {POLICIES}")
        if self.reaction_delay_ticks < 0:
            raise ValueError("reaction_delay_ticks must be >= 0")

    def reset(self) -> None:
        self._pending.clear()


@dataclass(frozen=True)
class SessionView:
    """The observable slice of a session, as the operator sees it."""

    tick: int
    gripper: Pose
    subgoal: Pose
    phase: Phase
    mapping_columns: tuple
    variant: str
    exposed: MappingSuggestion | None


def _desired(view: SessionView,
             lambda_rot: float, lambda_grip: float) -> Twist | None:
    try:
        return goal_twist(view.gripper, view.subgoal,
                          lambda_rot=lambda_rot, lambda_grip=lambda_grip)
    except DegenerateDirectionError:
        return None


def _schedule(policy: UserPolicy, view: SessionView, button: str) -> None:
    if not policy._pending:
        policy._pending.append(
            (view.tick + policy.reaction_delay_ticks, button))


def _due(policy: UserPolicy, view: SessionView) -> str | None:
    if policy._pending and view.tick >= policy._pending[0][0]:
        return policy._pending.pop(0)[1]
    return None


def decide(policy: UserPolicy, view: SessionView, rng: np.random.Generator,
           lambda_rot: float = LAMBDA_ROT,
           lambda_grip: float = LAMBDA_GRIP) -> InputFrame:
    """Produce this tick's input frame for the simulated operator."""
    desired = _desired(view, lambda_rot, lambda_grip)
    if desired is None:
        return InputFrame.zero(source="simulated")

    dots = [weighted_dot(desired, col, lambda_rot, lambda_grip)
            for col in view.mapping_columns[:2]]
    axes = [d if abs(d) >= MIN_AXIS else 0.0 for d in dots]
    # projection of the (unit) desired direction onto the active span
    projection = math.sqrt(sum(d * d for d in dots))

    if view.variant == "classic":
        if projection < LOW_PROJECTION:
            _schedule(policy, view, "mode_switch")
    elif view.variant == "admc_request":
        if projection < LOW_PROJECTION:
            _schedule(policy, view, "request")
    elif view.variant in ("admc_continuous", "admc_threshold"):
        if view.exposed is not None:
            gain = abs(weighted_dot(desired, view.exposed.ranked[0],
                                    lambda_rot, lambda_grip))
            if gain > projection + ACCEPT_MARGIN:
                _schedule(policy, view, "accept")
    # admc_idle: hands off, the controller switches on its own

    if policy.kind == "noisy":
        axes = [a + rng.normal(0.0, policy.noise_std) for a in axes]

    fired = _due(policy, view)
    frame = InputFrame(
        axis0=axes[0],
        axis1=axes[1] if len(axes) > 1 else 0.0,
        mode_switch=fired == "mode_switch",
        accept=fired == "accept",
        request=fired == "request",
        source="simulated",
    )
    return frame
