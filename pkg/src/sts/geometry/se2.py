"""Planar rigid transforms (SE(2)) and angle helpers."""

from __future__ import annotations

import math
from typing import NamedTuple


class Pose2(NamedTuple):
    """Position plus heading on the ground plane."""

    x: float
    y: float
    yaw: float


def normalize_angle(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.remainder(float(angle), math.tau)
    if wrapped == -math.pi:
        return math.pi
    return wrapped


def angle_diff(a: float, b: float) -> float:
    """Signed smallest rotation taking b to a, in (-pi, pi]."""
    return normalize_angle(a - b)


def relative_pose(subject: Pose2, reference: Pose2) -> Pose2:
    """Express subject in reference's body frame (x forward, y left)."""
    dx = subject.x - reference.x
    dy = subject.y - reference.y
    c = math.cos(reference.yaw)
    s = math.sin(reference.yaw)
    return Pose2(
        c * dx + s * dy,
        -s * dx + c * dy,
        normalize_angle(subject.yaw - reference.yaw),
    )


def compose(reference: Pose2, local: Pose2) -> Pose2:
    """Map a pose out of reference's body frame into the global frame.

    Inverse of relative_pose: compose(r, relative_pose(s, r)) == s.
    """
    c = math.cos(reference.yaw)
    s = math.sin(reference.yaw)
    return Pose2(
        reference.x + c * local.x - s * local.y,
        reference.y + s * local.x + c * local.y,
        normalize_angle(reference.yaw + local.yaw),
    )


def transform_point(pose: Pose2, point: tuple[float, float]) -> tuple[float, float]:
    """Map a body-frame point into the global frame."""
    c = math.cos(pose.yaw)
    s = math.sin(pose.yaw)
    return (pose.x + c * point[0] - s * point[1],
            pose.y + s * point[0] + c * point[1])


def point_in_frame(pose: Pose2, point: tuple[float, float]) -> tuple[float, float]:
    """Map a global point into pose's body frame."""
    dx = point[0] - pose.x
    dy = point[1] - pose.y
    c = math.cos(pose.yaw)
    s = math.sin(pose.yaw)
    return (c * dx + s * dy, -s * dx + c * dy)
