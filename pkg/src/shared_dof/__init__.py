"""Shared-control simulator for a 7-DoF assistive end effector.

A low-DoF input device drives the effector through an active mapping of
weighted-orthonormal twist columns.  The package provides the geometry
core, a kinematic pick-and-place world, a view-cone intent estimator
with adaptive mapping suggestions, five control variants (one manual
mode-cycling baseline, four adaptive), simulated operators, headless
benchmarking with deterministic logs, operator cues, a CLI, and a
WebSocket session service.
"""

from .control import (
    VARIANTS,
    ActiveMapping,
    ControllerConfig,
    InputFrame,
    SessionState,
    advance,
    apply_input,
    classic_mapping,
    exposed_suggestion,
    initial_state,
    trigger_perspective_change,
)
from .cues import (
    ArrowCue,
    DofIndicatorState,
    GhostCue,
    VibroFrame,
    VibroPattern,
    arrow_cues,
    decode_frames,
    decode_pattern,
    dof_indicator,
    encode_direction,
    ghost_cue,
)
from .errors import (
    DecodeError,
    DegenerateDirectionError,
    DegeneratePairError,
    InvalidDirectionError,
    InvalidModeError,
    InvalidTwistError,
    NoIntentError,
    ReportError,
    ScenarioError,
    SessionFinishedError,
    SharedDofError,
)
from .geometry import (
    LAMBDA_GRIP,
    LAMBDA_ROT,
    Pose,
    Twist,
    WorkspaceLimits,
    axis_twist,
    goal_twist,
    integrate,
    orthonormalize_pair,
    rotation_angle_between,
    weighted_dot,
    weighted_norm,
    weighted_normalize,
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
from .kernels import NUMBA_ENABLED
from .runner import RunResult, run_headless
from .scene import (
    Phase,
    Scenario,
    SceneObject,
    TargetZone,
    TaskState,
    builtin_scenario,
    list_builtin_scenarios,
    load_scenario,
    scenario_from_dict,
)
from .simuser import POLICIES, SessionView, UserPolicy, decide
from .telemetry import (
    Metrics,
    RunningMetrics,
    TickRecord,
    aggregate_csv,
    compare,
    metrics_csv,
    read_jsonl,
    summarize,
    text_report,
    write_jsonl,
)

__version__ = "0.1.0"

__all__ = [
    "ActiveMapping", "ArrowCue", "ControllerConfig", "DecodeError",
    "DegenerateDirectionError", "DegeneratePairError", "DofIndicatorState",
    "GhostCue", "InputFrame", "IntentConfig", "IntentDistribution",
    "InvalidDirectionError", "InvalidModeError", "InvalidTwistError",
    "LAMBDA_GRIP", "LAMBDA_ROT", "MappingSuggestion", "Metrics",
    "NoIntentError", "NUMBA_ENABLED", "POLICIES", "Phase", "Pose",
    "ReportError", "RunResult", "RunningMetrics", "Scenario",
    "ScenarioError", "SceneObject", "SessionFinishedError", "SessionState",
    "SessionView", "SharedDofError", "TargetZone", "TaskState",
    "TickRecord", "Twist", "UserPolicy", "VARIANTS", "VibroFrame",
    "VibroPattern", "WorkspaceLimits", "advance", "aggregate_csv",
    "apply_input", "arrow_cues", "axis_twist", "builtin_scenario",
    "change_perspective", "classic_mapping", "compare", "decide",
    "decode_frames", "decode_pattern", "dof_indicator", "encode_direction",
    "exposed_suggestion", "ghost_cue", "goal_twist", "initial_state",
    "integrate", "list_builtin_scenarios", "load_scenario", "metrics_csv",
    "nudge_confidence", "orthonormalize_pair", "perspective_offset",
    "read_jsonl", "rotation_angle_between", "run_headless",
    "scenario_from_dict", "score", "sense", "suggest", "summarize",
    "text_report", "trigger_perspective_change", "weighted_dot",
    "weighted_norm", "weighted_normalize", "write_jsonl",
]
