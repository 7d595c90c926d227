"""Pose and twist types plus the weighted algebra used everywhere else.

The end effector state is a position, a unit quaternion (w, x, y, z)
and a gripper aperture in [0, 1].  Commanded motion is a 7 component
twist: linear velocity, angular velocity, aperture rate.  Because those
components carry different units, all norms, projections and
orthogonality statements in this package use a weighted inner product:

    <a, b> = a.lin . b.lin
           + LAMBDA_ROT^2  * a.ang . b.ang
           + LAMBDA_GRIP^2 * a.rate * b.rate

LAMBDA_ROT is "meters per radian": how far a radian of wrist rotation
counts against a meter of hand travel.  LAMBDA_GRIP plays the same role
for the aperture rate.  Every mapping column handed to the controller is
unit length in this norm, so one unit of stick deflection always means
the same effective speed no matter what the column mixes.

Orientation convention: angular velocity lives in the world frame and
integrates by left multiplication, new_q = exp(w * dt) * q.  The
rotation error between two orientations, quat_to_rotvec(qt * qc^-1),
is therefore exactly the angular velocity direction that moves qc
toward qt along the geodesic.  Quaternions are canonicalized (first
nonzero component positive) after every operation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateDirectionError,
    DegeneratePairError,
    InvalidTwistError,
)
from . import kernels

LAMBDA_ROT = 0.2  # m/rad: weight of angular velocity in the twist norm
LAMBDA_GRIP = 0.1  # m: weight of aperture rate in the twist norm

DEGENERATE_NORM = 1e-12  # below this a twist has no usable direction
DEGENERATE_RESIDUAL = 1e-6  # Gram-Schmidt residual cutoff for a pair

# wrist camera axis in body frame: forward along +x, pitched 45 degrees
# down so the sensing cone covers the workspace under a hovering gripper
_SENSOR_AXIS_BODY = np.array([math.sqrt(0.5), 0.0, -math.sqrt(0.5)])


def _as_vec(x, n, what):
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape != (n,):
        raise InvalidTwistError(f"{what} must have shape ({n},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidTwistError(f"{what} contains non-finite values")
    return arr.copy()


@dataclass
class Twist:
    """7-DoF velocity command: linear xyz, angular xyz, aperture rate."""

    linear: np.ndarray = field(default_factory=lambda: np.zeros(3))
    angular: np.ndarray = field(default_factory=lambda: np.zeros(3))
    aperture_rate: float = 0.0

    def __post_init__(self):
        self.linear = _as_vec(self.linear, 3, "linear")
        self.angular = _as_vec(self.angular, 3, "angular")
        rate = float(self.aperture_rate)
        if not math.isfinite(rate):
            raise InvalidTwistError("aperture_rate is non-finite")
        self.aperture_rate = rate

    @classmethod
    def zero(cls) -> "Twist":
        return cls()

    @classmethod
    def from_vector(cls, vec) -> "Twist":
        v = _as_vec(vec, 7, "twist vector")
        return cls(v[0:3], v[3:6], float(v[6]))

    def as_vector(self) -> np.ndarray:
        out = np.empty(7)
        out[0:3] = self.linear
        out[3:6] = self.angular
        out[6] = self.aperture_rate
        return out

    def scaled(self, factor: float) -> "Twist":
        return Twist(self.linear * factor, self.angular * factor,
                     self.aperture_rate * factor)

    def is_zero(self) -> bool:
        return (
            not self.linear.any()
            and not self.angular.any()
            and self.aperture_rate == 0.0
        )

    def to_dict(self) -> dict:
        return {
            "linear": [float(v) for v in self.linear],
            "angular": [float(v) for v in self.angular],
            "aperture_rate": float(self.aperture_rate),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Twist":
        return cls(d["linear"], d["angular"], d["aperture_rate"])


@dataclass
class Pose:
    """End effector pose: position, unit quaternion (w,x,y,z), aperture."""

    position: np.ndarray
    orientation: np.ndarray
    aperture: float

    def __post_init__(self):
        self.position = _as_vec(self.position, 3, "position")
        q = _as_vec(self.orientation, 4, "orientation")
        n = float(np.linalg.norm(q))
        if abs(n - 1.0) > 1e-6:
            raise InvalidTwistError(f"orientation norm {n} is not 1")
        self.orientation = kernels.quat_canonical(q)
        ap = float(self.aperture)
        if not math.isfinite(ap) or ap < -1e-9 or ap > 1.0 + 1e-9:
            raise InvalidTwistError(f"aperture {ap} outside [0, 1]")
        self.aperture = min(1.0, max(0.0, ap))

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.zeros(3), np.array([1.0, 0.0, 0.0, 0.0]), 1.0)

    def copy(self) -> "Pose":
        return Pose(self.position.copy(), self.orientation.copy(), self.aperture)

    def to_dict(self) -> dict:
        return {
            "position": [float(v) for v in self.position],
            "orientation": [float(v) for v in self.orientation],
            "aperture": float(self.aperture),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Pose":
        return cls(d["position"], d["orientation"], d["aperture"])


@dataclass
class WorkspaceLimits:
    """Axis-aligned workspace box plus speed saturation values."""

    min: np.ndarray
    max: np.ndarray
    max_linear_speed: float  # m/s
    max_angular_speed: float  # rad/s
    max_aperture_rate: float  # 1/s

    def __post_init__(self):
        self.min = _as_vec(self.min, 3, "limits.min")
        self.max = _as_vec(self.max, 3, "limits.max")
        if np.any(self.min >= self.max):
            raise InvalidTwistError("workspace box min must be below max per axis")
        for name in ("max_linear_speed", "max_angular_speed", "max_aperture_rate"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v <= 0.0:
                raise InvalidTwistError(f"{name} must be positive")
            setattr(self, name, v)


def weighted_dot(a: Twist, b: Twist, lambda_rot: float = LAMBDA_ROT,
                 lambda_grip: float = LAMBDA_GRIP) -> float:
    return float(kernels.weighted_dot(a.as_vector(), b.as_vector(),
                                      lambda_rot, lambda_grip))


def weighted_norm(t: Twist, lambda_rot: float = LAMBDA_ROT,
                  lambda_grip: float = LAMBDA_GRIP) -> float:
    return float(kernels.weighted_norm(t.as_vector(), lambda_rot, lambda_grip))


def weighted_normalize(t: Twist, lambda_rot: float = LAMBDA_ROT,
                       lambda_grip: float = LAMBDA_GRIP) -> Twist:
    n = weighted_norm(t, lambda_rot, lambda_grip)
    if n < DEGENERATE_NORM:
        raise DegenerateDirectionError("cannot normalize a zero twist")
    return t.scaled(1.0 / n)


def orthonormalize_pair(a: Twist, b: Twist, lambda_rot: float = LAMBDA_ROT,
                        lambda_grip: float = LAMBDA_GRIP) -> tuple:
    """Weighted Gram-Schmidt.  Returns (a_unit, b_orth_unit).

    Raises DegenerateDirectionError when a has no direction and
    DegeneratePairError when b is collinear with a (residual below
    DEGENERATE_RESIDUAL after normalizing b).
    """
    a_n, b_n, na, nr = kernels.orthonormalize_pair_vec(
        a.as_vector(), b.as_vector(), lambda_rot, lambda_grip)
    if na < DEGENERATE_NORM:
        raise DegenerateDirectionError("first twist of the pair is zero")
    if nr < DEGENERATE_RESIDUAL:
        raise DegeneratePairError(
            f"residual norm {nr:.3e} below {DEGENERATE_RESIDUAL:.0e};"
            " twists are collinear")
    return Twist.from_vector(a_n), Twist.from_vector(b_n)


def rotation_error(q_current, q_target) -> np.ndarray:
    """Rotation vector (world frame, shortest way) taking current to target."""
    err = kernels.quat_mul(np.asarray(q_target, dtype=np.float64),
                           kernels.quat_conjugate(
                               np.asarray(q_current, dtype=np.float64)))
    return kernels.quat_to_rotvec(kernels.quat_canonical(err))


def rotation_angle_between(q_a, q_b) -> float:
    """Absolute misalignment angle between two orientations, in [0, pi]."""
    return float(np.linalg.norm(rotation_error(q_a, q_b)))


def raw_pose_error(current: Pose, target: Pose) -> Twist:
    """Unnormalized error twist taking current to target in unit time."""
    return Twist(
        target.position - current.position,
        rotation_error(current.orientation, target.orientation),
        target.aperture - current.aperture,
    )


def pose_error_norm(current: Pose, target: Pose,
                    lambda_rot: float = LAMBDA_ROT,
                    lambda_grip: float = LAMBDA_GRIP) -> float:
    """Combined weighted distance between two poses."""
    return weighted_norm(raw_pose_error(current, target), lambda_rot, lambda_grip)


def goal_twist(current: Pose, target: Pose, lambda_rot: float = LAMBDA_ROT,
               lambda_grip: float = LAMBDA_GRIP) -> Twist:
    """Weighted-unit twist pointing from current toward target.

    Raises DegenerateDirectionError when the poses already coincide
    under the combined error metric.
    """
    return weighted_normalize(raw_pose_error(current, target),
                              lambda_rot, lambda_grip)


def integrate(pose: Pose, twist: Twist, dt: float,
              limits: WorkspaceLimits) -> Pose:
    """Advance a pose by one tick.  See kernels.integrate_vec for clamping."""
    if not math.isfinite(dt) or dt <= 0.0:
        raise InvalidTwistError(f"dt must be positive, got {dt}")
    pos, quat, ap = kernels.integrate_vec(
        pose.position, pose.orientation, pose.aperture, twist.as_vector(),
        dt, limits.min, limits.max, limits.max_linear_speed,
        limits.max_angular_speed, limits.max_aperture_rate)
    out = Pose.__new__(Pose)
    out.position = pos
    out.orientation = quat
    out.aperture = ap
    return out


def yaw_quat(angle: float) -> np.ndarray:
    """Quaternion for a rotation of angle radians about world +z."""
    return kernels.rotvec_to_quat(np.array([0.0, 0.0, float(angle)]))


def sensor_axis(pose: Pose) -> np.ndarray:
    """World direction the wrist camera looks along."""
    return kernels.quat_rotate(pose.orientation, _SENSOR_AXIS_BODY)


def axis_twist(index: int, sign: float = 1.0, lambda_rot: float = LAMBDA_ROT,
               lambda_grip: float = LAMBDA_GRIP) -> Twist:
    """Weighted-unit twist along one cardinal DoF.

    Index order: 0..2 translation xyz, 3..5 rotation xyz (roll, pitch,
    yaw), 6 aperture.  Rotation and aperture entries are scaled by
    1/lambda so the weighted norm is exactly 1.
    """
    v = np.zeros(7)
    if index < 3:
        v[index] = sign
    elif index < 6:
        v[index] = sign / lambda_rot
    elif index == 6:
        v[index] = sign / lambda_grip
    else:
        raise InvalidTwistError(f"cardinal DoF index {index} outside 0..6")
    return Twist.from_vector(v)
