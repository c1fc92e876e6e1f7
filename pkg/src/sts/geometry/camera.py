"""Pinhole projection of upright agent boxes and per-frame view choice.

Cameras are planar mounts: a position (x, y, z) plus an optical-axis yaw.
The image x axis points to the camera's right, image y points down.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import TYPE_CHECKING, NamedTuple

from sts.geometry.se2 import angle_diff

if TYPE_CHECKING:
    from sts.scene.model import AgentSize, CameraModel

_MIN_DEPTH = 1e-9


class CameraProjection(NamedTuple):
    center_px: tuple[float, float]
    box_px: tuple[float, float, float, float]


def _project(rel_x: float, rel_y: float, rel_z: float, yaw: float,
             camera: "CameraModel", depth: float) -> tuple[float, float]:
    right = rel_x * math.sin(yaw) - rel_y * math.cos(yaw)
    down = -rel_z
    return (camera.cx + camera.fx * right / depth,
            camera.cy + camera.fy * down / depth)


def project_agent_to_camera(state, size: "AgentSize",
                            camera: "CameraModel",
                            frame: int) -> CameraProjection | None:
    """Project an agent's upright box into one camera at one frame.

    Returns None when the box center sits behind the image plane.
    Otherwise center_px is the (possibly off-image) projected center and
    box_px is the axis-aligned hull of the 8 box corners clamped to the
    image bounds. Corners behind the plane are clamped to a tiny positive
    depth so the hull stays finite.
    """
    pose = camera.poses[frame]
    yaw = pose.rotation
    fwd = (math.cos(yaw), math.sin(yaw))

    cz = size.height / 2.0
    rel_cx = state.x - pose.x
    rel_cy = state.y - pose.y
    center_depth = rel_cx * fwd[0] + rel_cy * fwd[1]
    if center_depth <= 0.0:
        return None
    center = _project(rel_cx, rel_cy, cz - pose.z, yaw, camera, center_depth)

    half_l = size.length / 2.0
    half_w = size.width / 2.0
    c = math.cos(state.yaw)
    s = math.sin(state.yaw)
    us: list[float] = []
    vs: list[float] = []
    for bx, by in ((half_l, half_w), (half_l, -half_w),
                   (-half_l, half_w), (-half_l, -half_w)):
        corner_x = state.x + c * bx - s * by
        corner_y = state.y + s * bx + c * by
        rel_x = corner_x - pose.x
        rel_y = corner_y - pose.y
        depth = max(rel_x * fwd[0] + rel_y * fwd[1], _MIN_DEPTH)
        for corner_z in (0.0, size.height):
            u, v = _project(rel_x, rel_y, corner_z - pose.z, yaw, camera,
                            depth)
            us.append(u)
            vs.append(v)

    def clamp(value: float, hi: float) -> float:
        return min(max(value, 0.0), hi)

    box = (clamp(min(us), camera.width), clamp(min(vs), camera.height),
           clamp(max(us), camera.width), clamp(max(vs), camera.height))
    return CameraProjection(center, box)


def assign_views(states: Sequence, size: "AgentSize",
                 cameras: Sequence["CameraModel"]) -> list[str | None]:
    """Pick the best camera per state.

    A camera sees the agent when projection succeeds and the projected
    center falls inside the image. Among seeing cameras the one whose
    optical axis points closest to the agent wins. States no camera sees
    map to None; if nothing is seen at any state the list is empty (the
    agent went unobserved).
    """
    views: list[str | None] = []
    for state in states:
        best: tuple[float, str] | None = None
        for camera in cameras:
            proj = project_agent_to_camera(state, size, camera, state.frame)
            if proj is None:
                continue
            u, v = proj.center_px
            if not (0.0 <= u <= camera.width and 0.0 <= v <= camera.height):
                continue
            pose = camera.poses[state.frame]
            bearing = math.atan2(state.y - pose.y, state.x - pose.x)
            angle = abs(angle_diff(bearing, pose.rotation))
            if best is None or angle < best[0]:
                best = (angle, camera.name)
        views.append(None if best is None else best[1])
    if all(v is None for v in views):
        return []
    return views
