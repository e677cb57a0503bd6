"""Poses, quaternions (w, x, y, z) and the Z-up to Y-up frame change."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InputError

UNIT_TOL = 1e-6

# Rotation taking source (Z-up) coordinates to target (Y-up) coordinates:
# (x, y, z) -> (x, z, -y), i.e. -90 degrees about x.
_H = math.sqrt(0.5)
Z_UP_TO_Y_UP = (_H, -_H, 0.0, 0.0)


def quat_mul(a: Sequence[float], b: Sequence[float]) -> tuple[float, float, float, float]:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def quat_conj(q: Sequence[float]) -> tuple[float, float, float, float]:
    return (q[0], -q[1], -q[2], -q[3])


def quat_norm(q: Sequence[float]) -> float:
    return math.sqrt(sum(c * c for c in q))


def quat_normalize(q: Sequence[float]) -> tuple[float, float, float, float]:
    n = quat_norm(q)
    return tuple(c / n for c in q)  # type: ignore[return-value]


def rotate(q: Sequence[float], v: Sequence[float]) -> tuple[float, float, float]:
    w, x, y, z = q
    vx, vy, vz = v
    # v' = v + 2w (u x v) + 2 u x (u x v)
    cx = y * vz - z * vy
    cy = z * vx - x * vz
    cz = x * vy - y * vx
    return (
        vx + 2 * (w * cx + y * cz - z * cy),
        vy + 2 * (w * cy + z * cx - x * cz),
        vz + 2 * (w * cz + x * cy - y * cx),
    )


def rotation_matrix(q: Sequence[float]) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def rpy_to_quat(roll: float, pitch: float, yaw: float) -> tuple[float, float, float, float]:
    """Fixed-axis roll/pitch/yaw (rotate about X, then Y, then Z) as a quaternion."""
    cr, sr = math.cos(roll / 2), math.sin(roll / 2)
    cp, sp = math.cos(pitch / 2), math.sin(pitch / 2)
    cy, sy = math.cos(yaw / 2), math.sin(yaw / 2)
    return (
        cr * cp * cy + sr * sp * sy,
        sr * cp * cy - cr * sp * sy,
        cr * sp * cy + sr * cp * sy,
        cr * cp * sy - sr * sp * cy,
    )


def yaw_to_quat(yaw: float) -> tuple[float, float, float, float]:
    return (math.cos(yaw / 2), 0.0, 0.0, math.sin(yaw / 2))


@dataclass(frozen=True)
class Pose:
    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    orientation: tuple[float, float, float, float] = (1.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        if len(self.position) != 3 or len(self.orientation) != 4:
            raise InputError("pose needs a 3-vector position and a 4-component quaternion")
        if abs(quat_norm(self.orientation) - 1.0) > UNIT_TOL:
            raise InputError(f"orientation {self.orientation} is not a unit quaternion")

    @classmethod
    def from_xyz_rpy(cls, values: Sequence[float]) -> "Pose":
        x, y, z, r, p, yw = values
        return cls((x, y, z), rpy_to_quat(r, p, yw))

    def compose(self, child: "Pose") -> "Pose":
        """Pose of ``child`` (expressed in this frame) in this frame's parent."""
        px, py, pz = rotate(self.orientation, child.position)
        pos = (self.position[0] + px, self.position[1] + py, self.position[2] + pz)
        return Pose(pos, quat_normalize(quat_mul(self.orientation, child.orientation)))

    def translated(self, dx: float = 0.0, dy: float = 0.0, dz: float = 0.0) -> "Pose":
        x, y, z = self.position
        return Pose((x + dx, y + dy, z + dz), self.orientation)

    def to_dict(self) -> dict:
        return {"position": list(self.position), "rotation": list(self.orientation)}


def convert_vector(v: Sequence[float]) -> tuple[float, float, float]:
    """Map a Z-up vector into the Y-up frame."""
    x, y, z = v
    return (x, z, -y)


def convert_frame(p: Pose) -> Pose:
    """Express a Z-up source pose in the Y-up target frame.

    Positions map as (x, y, z) -> (x, z, -y); the orientation is left-composed
    with the fixed -90 degree rotation about x, so an object's local axes are
    kept as authored.
    """
    if abs(quat_norm(p.orientation) - 1.0) > UNIT_TOL:
        raise InputError("orientation is not a unit quaternion")
    q = quat_normalize(quat_mul(Z_UP_TO_Y_UP, p.orientation))
    return Pose(convert_vector(p.position), q)


def convert_frame_inverse(p: Pose) -> Pose:
    """Undo :func:`convert_frame`."""
    if abs(quat_norm(p.orientation) - 1.0) > UNIT_TOL:
        raise InputError("orientation is not a unit quaternion")
    x, y, z = p.position
    q = quat_normalize(quat_mul(quat_conj(Z_UP_TO_Y_UP), p.orientation))
    return Pose((x, -z, y), q)


@dataclass(frozen=True)
class AABB:
    min: tuple[float, float, float]
    max: tuple[float, float, float]

    @classmethod
    def of_points(cls, pts: np.ndarray) -> "AABB":
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        return cls(tuple(float(v) for v in lo), tuple(float(v) for v in hi))

    def corners(self) -> np.ndarray:
        lo, hi = self.min, self.max
        return np.array(
            [[(lo, hi)[i][0], (lo, hi)[j][1], (lo, hi)[k][2]]
             for i in (0, 1) for j in (0, 1) for k in (0, 1)]
        )

    def transformed(self, pose: Pose, scale: Sequence[float] = (1.0, 1.0, 1.0)) -> "AABB":
        pts = self.corners() * np.asarray(scale, dtype=float)
        pts = pts @ rotation_matrix(pose.orientation).T + np.asarray(pose.position)
        return AABB.of_points(pts)

    def union(self, other: "AABB") -> "AABB":
        return AABB(
            tuple(min(a, b) for a, b in zip(self.min, other.min)),
            tuple(max(a, b) for a, b in zip(self.max, other.max)),
        )

    @property
    def center(self) -> tuple[float, float, float]:
        return tuple((a + b) / 2 for a, b in zip(self.min, self.max))  # type: ignore[return-value]

    def xy_area(self) -> float:
        return max(0.0, self.max[0] - self.min[0]) * max(0.0, self.max[1] - self.min[1])

    def to_dict(self) -> dict:
        return {"min": list(self.min), "max": list(self.max)}
