"""Operator feedback cues derived from controller state.

Visual cues are plain data for a frontend to draw: motion arrows, a
ghost-trajectory preview of the rank 1 suggestion, and a seven-segment
DoF activity indicator.  The vibrotactile channel encodes a heading on
a 3x3 tactor grid; its patterns are exact integer-millisecond schedules
so they can be round-tripped in tests.

Vibro coding.  The horizontal heading collapses to one of eight compass
octants; the octant picks a border cell of the grid.  A pattern plays a
three-step line across the grid (opposite cell, center, target cell),
so the felt motion points the way to go.  The vertical component is
bucketed into three levels and rides on the pattern as either the
repeat count (saltation mode), the amplitude (motion mode), or both:

* rabbit: 60 ms pulses at 0/100/200 ms within a sweep, full amplitude,
  level = number of sweeps, 100 ms between sweeps.
* atm: one sweep of overlapping 120 ms pulses at 0/60/120 ms (apparent
  motion), level = amplitude step (0.33/0.66/1.0).
* dual: rabbit timing, atm amplitude, both carrying the same level.

Every pattern fits inside 2 seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DecodeError, InvalidDirectionError, InvalidModeError
from .geometry import Pose, Twist, WorkspaceLimits, integrate

OCTANT_NAMES = ("N", "NE", "E", "SE", "S", "SW", "W", "NW")
# 3x3 grid cells, row major: 0=NW 1=N 2=NE / 3=W 4=C 5=E / 6=SW 7=S 8=SE
OCTANT_CELLS = (1, 2, 5, 8, 7, 6, 3, 0)
CENTER_CELL = 4
CELL_TO_OCTANT = {cell: i for i, cell in enumerate(OCTANT_CELLS)}

VIBRO_MODES = ("rabbit", "atm", "dual")
AMPLITUDE_STEPS = (0.33, 0.66, 1.0)

PULSE_MS = 60
STEP_MS = 100
SWEEP_MS = 260  # last pulse starts at 200 and lasts 60
SWEEP_GAP_MS = 100
ATM_PULSE_MS = 120
ATM_STEP_MS = 60
MAX_PATTERN_MS = 2000

DOF_LABELS = ("x", "y", "z", "roll", "pitch", "yaw", "grip")

GHOST_SAMPLES = 10
GHOST_HORIZON_S = 1.5


@dataclass(frozen=True)
class ArrowCue:
    kind: str  # "current" | "suggested"
    anchor: tuple  # world position the arrow starts from
    twist: Twist

    def to_dict(self) -> dict:
        return {"kind": self.kind,
                "anchor": [float(v) for v in self.anchor],
                "twist": self.twist.to_dict()}


def arrow_cues(gripper: Pose, mapping_columns, exposed_rank1: Twist | None):
    anchor = tuple(float(v) for v in gripper.position)
    cues = [ArrowCue("current", anchor, col) for col in mapping_columns]
    if exposed_rank1 is not None:
        cues.append(ArrowCue("suggested", anchor, exposed_rank1))
    return cues


@dataclass(frozen=True)
class GhostCue:
    """Preview of where adopting the suggestion would take the gripper."""

    samples: tuple  # GHOST_SAMPLES poses, first one the current pose

    def to_dict(self) -> dict:
        return {"samples": [p.to_dict() for p in self.samples]}


def ghost_cue(gripper: Pose, rank1: Twist, limits: WorkspaceLimits,
              speed_scale: float, horizon_s: float = GHOST_HORIZON_S,
              samples: int = GHOST_SAMPLES) -> GhostCue:
    if samples < 2:
        raise ValueError("ghost preview needs at least 2 samples")
    dt = horizon_s / (samples - 1)
    twist = rank1.scaled(speed_scale)
    poses = [gripper.copy()]
    for _ in range(samples - 1):
        poses.append(integrate(poses[-1], twist, dt, limits))
    return GhostCue(samples=tuple(poses))


@dataclass(frozen=True)
class DofIndicatorState:
    """Activity level per DoF for the currently reachable span.

    levels[d] is the norm over the mapping columns of their weighted
    d-components.  Columns are weighted-orthonormal, so by Bessel each
    level lands in [0, 1]; a cardinal mode lights its own DoFs at 1.
    """

    levels: tuple

    def to_dict(self) -> dict:
        return {"labels": list(DOF_LABELS),
                "levels": [round(float(v), 6) for v in self.levels]}


def dof_indicator(mapping_columns, lambda_rot: float,
                  lambda_grip: float) -> DofIndicatorState:
    acc = np.zeros(7)
    for col in mapping_columns:
        w = col.as_vector().copy()
        w[3:6] *= lambda_rot
        w[6] *= lambda_grip
        acc += w * w
    levels = tuple(float(min(1.0, math.sqrt(v))) for v in acc)
    return DofIndicatorState(levels=levels)


@dataclass(frozen=True)
class VibroFrame:
    cell: int
    start_ms: int
    duration_ms: int
    amplitude: float

    def to_dict(self) -> dict:
        return {"cell": self.cell, "start_ms": self.start_ms,
                "duration_ms": self.duration_ms,
                "amplitude": self.amplitude}


@dataclass(frozen=True)
class VibroPattern:
    mode: str
    octant: int
    z_level: int
    frames: tuple

    @property
    def total_ms(self) -> int:
        return max(f.start_ms + f.duration_ms for f in self.frames)

    def to_dict(self) -> dict:
        return {"mode": self.mode,
                "octant": self.octant,
                "heading": OCTANT_NAMES[self.octant],
                "z_level": self.z_level,
                "total_ms": self.total_ms,
                "frames": [f.to_dict() for f in self.frames]}


def direction_octant(x: float, y: float) -> int:
    """Compass octant of the horizontal heading; +y is north, +x east.

    The vertical pole (no horizontal component) maps to north so every
    direction stays encodable.
    """
    if x == 0.0 and y == 0.0:
        return 0
    az = math.degrees(math.atan2(x, y))
    return int(math.floor(az / 45.0 + 0.5)) % 8


def z_bucket(z: float) -> int:
    """Vertical level 1..3 of a unit direction's z component."""
    if z < -1.0 / 3.0:
        return 1
    if z > 1.0 / 3.0:
        return 3
    return 2


def _line_cells(octant: int) -> tuple:
    target = OCTANT_CELLS[octant]
    opposite = OCTANT_CELLS[(octant + 4) % 8]
    return (opposite, CENTER_CELL, target)


def encode_direction(linear, mode: str = "rabbit") -> VibroPattern:
    """Build the tactor schedule for a world-frame direction vector."""
    if mode not in VIBRO_MODES:
        raise InvalidModeError(
            f"unknown vibro mode {mode!r}; expected one of {VIBRO_MODES}")
    v = np.asarray(linear, dtype=float).reshape(3)
    norm = float(np.linalg.norm(v))
    if norm < 1e-12 or not math.isfinite(norm):
        raise InvalidDirectionError("vibro cue needs a nonzero direction")
    unit = v / norm
    octant = direction_octant(float(unit[0]), float(unit[1]))
    level = z_bucket(float(unit[2]))
    cells = _line_cells(octant)

    frames = []
    if mode == "atm":
        amp = AMPLITUDE_STEPS[level - 1]
        for i, cell in enumerate(cells):
            frames.append(VibroFrame(cell, i * ATM_STEP_MS, ATM_PULSE_MS, amp))
    else:
        amp = 1.0 if mode == "rabbit" else AMPLITUDE_STEPS[level - 1]
        for sweep in range(level):
            base = sweep * (SWEEP_MS + SWEEP_GAP_MS)
            for i, cell in enumerate(cells):
                frames.append(VibroFrame(cell, base + i * STEP_MS,
                                         PULSE_MS, amp))
    pattern = VibroPattern(mode=mode, octant=octant, z_level=level,
                           frames=tuple(frames))
    assert pattern.total_ms <= MAX_PATTERN_MS
    return pattern


def decode_frames(frames) -> tuple:
    """Recover (octant, z_level) from a frame schedule.

    Works for every mode without being told which one produced the
    schedule; inconsistent repeat count and amplitude coding raises
    DecodeError.
    """
    frames = sorted(frames, key=lambda f: (f.start_ms, f.cell))
    if len(frames) % 3 != 0 or not frames:
        raise DecodeError(f"expected sweeps of 3 frames, got {len(frames)}")
    first = frames[:3]
    target = first[2].cell
    if target not in CELL_TO_OCTANT:
        raise DecodeError(f"sweep does not end on a border cell: {target}")
    octant = CELL_TO_OCTANT[target]
    expected = _line_cells(octant)
    if tuple(f.cell for f in first) != expected:
        raise DecodeError("sweep cells do not form an opposite-center-target line")
    for k in range(3, len(frames), 3):
        if tuple(f.cell for f in frames[k:k + 3]) != expected:
            raise DecodeError("later sweeps disagree with the first")

    sweeps = len(frames) // 3
    amp = frames[0].amplitude
    amp_level = None
    for i, step in enumerate(AMPLITUDE_STEPS):
        if abs(amp - step) < 1e-9:
            amp_level = i + 1
    if amp_level is None:
        raise DecodeError(f"amplitude {amp} is not on the 3-step scale")

    if sweeps > 1:
        # saltation coding; amplitude must agree if it carries a level
        if amp_level != 3 and amp_level != sweeps:
            raise DecodeError(
                f"repeat count {sweeps} and amplitude level {amp_level} disagree")
        level = sweeps
    else:
        level = 1 if amp_level == 3 and _is_rabbit_timing(first) else amp_level
    return octant, level


def _is_rabbit_timing(sweep) -> bool:
    return sweep[1].start_ms - sweep[0].start_ms == STEP_MS


def decode_pattern(pattern: VibroPattern) -> tuple:
    return decode_frames(pattern.frames)
