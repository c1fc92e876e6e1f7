"""Invariant checks for scenes."""

from __future__ import annotations

import math
from typing import NamedTuple

from sts.geometry.polygon import polygon_is_simple
from sts.scene.model import AGENT_CLASSES, Scene

_YAW_TOL = 1e-6


class Violation(NamedTuple):
    """One broken invariant: where it broke and which rule broke."""

    path: str
    rule: str

    def __str__(self) -> str:
        return f"{self.path}: {self.rule}"


def _check_finite(out: list[Violation], path: str, **values: float | None) -> None:
    for name, value in values.items():
        if value is not None and not math.isfinite(value):
            out.append(Violation(f"{path}.{name}", "value not finite"))


def _check_yaw(out: list[Violation], path: str, yaw: float) -> None:
    if not math.isfinite(yaw):
        return
    if abs(yaw) > math.pi + _YAW_TOL:
        out.append(Violation(path, "yaw not normalized to (-pi, pi]"))


def _check_points(out: list[Violation], path: str, points, minimum: int,
                  kind: str) -> None:
    if len(points) < minimum:
        out.append(Violation(path, f"{kind} needs at least {minimum} vertices"))
    for i, (x, y) in enumerate(points):
        _check_finite(out, f"{path}[{i}]", x=x, y=y)


def validate_scene(scene: Scene) -> list[Violation]:
    """Return all invariant violations; empty list means the scene is valid."""
    out: list[Violation] = []
    frame_count = len(scene.frames)

    if frame_count == 0:
        out.append(Violation("frames", "scene needs at least one frame"))
    for i, stamp in enumerate(scene.frames):
        if stamp.index != i:
            out.append(Violation(f"frames[{i}].index",
                                 f"expected index {i}, got {stamp.index}"))
        if i > 0 and stamp.timestamp_us <= scene.frames[i - 1].timestamp_us:
            out.append(Violation(f"frames[{i}].timestamp_us",
                                 "timestamps not strictly increasing"))

    if len(scene.ego) != frame_count:
        out.append(Violation("ego", f"expected one state per frame "
                             f"({frame_count}), got {len(scene.ego)}"))
    for i, state in enumerate(scene.ego):
        path = f"ego[{i}]"
        if i < frame_count and state.frame != i:
            out.append(Violation(f"{path}.frame",
                                 f"expected frame {i}, got {state.frame}"))
        _check_finite(out, path, x=state.x, y=state.y, yaw=state.yaw,
                      speed=state.speed)
        _check_yaw(out, f"{path}.yaw", state.yaw)
        if state.speed is not None and state.speed < 0.0:
            out.append(Violation(f"{path}.speed", "speed must be >= 0"))

    for a, track in enumerate(scene.agents):
        path = f"agents[{a}]"
        if track.agent_class not in AGENT_CLASSES:
            out.append(Violation(f"{path}.class",
                                 f"unknown agent class {track.agent_class!r}"))
        for dim in ("length", "width", "height"):
            value = getattr(track.size, dim)
            if not (value > 0.0):
                out.append(Violation(f"{path}.size.{dim}",
                                     "size components must be > 0"))
        if len(track.states) == 0:
            out.append(Violation(f"{path}.states",
                                 "track needs at least one state"))
        previous = None
        for i, state in enumerate(track.states):
            spath = f"{path}.states[{i}]"
            if not 0 <= state.frame < frame_count:
                out.append(Violation(f"{spath}.frame", "frame out of range"))
            if previous is not None and state.frame <= previous:
                out.append(Violation(f"{spath}.frame",
                                     "states not sorted by frame without "
                                     "duplicates"))
            previous = state.frame
            _check_finite(out, spath, x=state.x, y=state.y, yaw=state.yaw,
                          speed=state.speed, visibility=state.visibility)
            _check_yaw(out, f"{spath}.yaw", state.yaw)
            if state.speed is not None and state.speed < 0.0:
                out.append(Violation(f"{spath}.speed", "speed must be >= 0"))
            if state.visibility is not None \
                    and not 0.0 <= state.visibility <= 1.0:
                out.append(Violation(f"{spath}.visibility",
                                     "visibility must be within [0, 1]"))

    boundary_ids = {b.boundary_id for b in scene.map.boundaries}
    for i, lane in enumerate(scene.map.lanes):
        path = f"map.lanes[{i}]"
        _check_points(out, f"{path}.centerline", lane.centerline, 2, "polyline")
        for side in ("left_boundary_id", "right_boundary_id"):
            ref = getattr(lane, side)
            if ref not in boundary_ids:
                out.append(Violation(f"{path}.{side}",
                                     f"boundary {ref!r} does not exist"))
    for i, boundary in enumerate(scene.map.boundaries):
        _check_points(out, f"map.boundaries[{i}].polyline", boundary.polyline,
                      2, "polyline")
    for i, crosswalk in enumerate(scene.map.crosswalks):
        path = f"map.crosswalks[{i}].polygon"
        _check_points(out, path, crosswalk.polygon, 3, "polygon")
        if len(crosswalk.polygon) >= 3 and not polygon_is_simple(crosswalk.polygon):
            out.append(Violation(path, "polygon must be simple"))
    for i, polygon in enumerate(scene.map.drivable_area):
        path = f"map.drivable_area[{i}].polygon"
        _check_points(out, path, polygon, 3, "polygon")
        if len(polygon) >= 3 and not polygon_is_simple(polygon):
            out.append(Violation(path, "polygon must be simple"))

    for i, camera in enumerate(scene.cameras or ()):
        path = f"cameras[{i}]"
        for name in ("fx", "fy"):
            if not (getattr(camera, name) > 0.0):
                out.append(Violation(f"{path}.intrinsics.{name}",
                                     "focal length must be > 0"))
        _check_finite(out, f"{path}.intrinsics", fx=camera.fx, fy=camera.fy,
                      cx=camera.cx, cy=camera.cy)
        if camera.width <= 0 or camera.height <= 0:
            out.append(Violation(f"{path}.width",
                                 "image dimensions must be > 0"))
        if len(camera.poses) != frame_count:
            out.append(Violation(f"{path}.poses",
                                 f"expected one pose per frame "
                                 f"({frame_count}), got {len(camera.poses)}"))
        for j, pose in enumerate(camera.poses):
            _check_finite(out, f"{path}.poses[{j}]", x=pose.x, y=pose.y,
                          z=pose.z, rotation=pose.rotation)

    return out
