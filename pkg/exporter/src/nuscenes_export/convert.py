"""Assembly of interchange documents from neutral scene bundles.

A SceneBundle is plain data (ids, poses, polylines) with no devkit
types, so the whole document-building path is testable without the
dataset. bundle_to_document applies the interchange conventions:
frames reindexed 0..N-1, speeds derived from positions, visibility
buckets mapped to scalars, map elements kept whole when near the ego
route, and every float quantized to the 6-decimal wire precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

# Dataset visibility buckets (fraction of the box visible) mapped to
# their midpoint scalar; annotations without a bucket carry none.
VISIBILITY_LEVELS = {
    "v0-40": 0.2,
    "v40-60": 0.5,
    "v60-80": 0.7,
    "v80-100": 0.95,
}

# Dataset category prefixes mapped to interchange agent classes; any
# category not listed (debris, traffic cones, animals) is not an agent.
CATEGORY_CLASSES = {
    "vehicle.car": "car",
    "vehicle.truck": "truck",
    "vehicle.bus": "bus",
    "vehicle.trailer": "trailer",
    "vehicle.construction": "construction_vehicle",
    "vehicle.motorcycle": "motorcycle",
    "vehicle.bicycle": "bicycle",
    "human.pedestrian": "pedestrian",
}

Point = tuple[float, float]


@dataclass
class SceneBundle:
    """One scene's worth of raw export data, in dataset order.

    ego_poses holds one (x, y, yaw) per key frame. Agent states refer
    to key-frame positions by index into timestamps_us. Lane records
    may carry explicit left/right divider polylines; when a side is
    None a virtual boundary is synthesized along the centerline.
    """

    scene_id: str
    timestamps_us: list[int]
    ego_poses: list[tuple[float, float, float]]
    agents: list[dict] = field(default_factory=list)
    lanes: list[dict] = field(default_factory=list)
    dividers: list[dict] = field(default_factory=list)
    crosswalks: list[dict] = field(default_factory=list)
    drivable_area: list[list[Point]] = field(default_factory=list)
    cameras: list[dict] = field(default_factory=list)


def _q(value: float) -> float:
    return float(format(float(value), ".6f"))


def _q_xy(points) -> list[list[float]]:
    return [[_q(x), _q(y)] for x, y in points]


def normalize_yaw(yaw: float) -> float:
    wrapped = math.atan2(math.sin(yaw), math.cos(yaw))
    return math.pi if wrapped == -math.pi else wrapped


def class_for_category(category: str) -> str | None:
    for prefix, agent_class in CATEGORY_CLASSES.items():
        if category == prefix or category.startswith(prefix + "."):
            return agent_class
    return None


def visibility_value(level: str | None) -> float | None:
    if level is None or level == "":
        return None
    if level not in VISIBILITY_LEVELS:
        raise ValueError(f"unknown visibility level {level!r}")
    return VISIBILITY_LEVELS[level]


def speeds_from_positions(positions: list[Point],
                          timestamps_us: list[int]) -> list[float | None]:
    """Per-point speed magnitudes by finite differences.

    Interior points use the central difference, the ends use one-sided
    differences. A single point has no estimate.
    """
    n = len(positions)
    if n != len(timestamps_us):
        raise ValueError("positions and timestamps differ in length")
    if n < 2:
        return [None] * n
    speeds: list[float | None] = []
    for i in range(n):
        lo = max(i - 1, 0)
        hi = min(i + 1, n - 1)
        dt = (timestamps_us[hi] - timestamps_us[lo]) / 1e6
        if dt <= 0:
            speeds.append(None)
            continue
        dist = math.hypot(positions[hi][0] - positions[lo][0],
                          positions[hi][1] - positions[lo][1])
        speeds.append(dist / dt)
    return speeds


def near_route(points, route: list[Point], radius: float) -> bool:
    for x, y in points:
        for rx, ry in route:
            if math.hypot(x - rx, y - ry) <= radius:
                return True
    return False


def _boundary_for_side(lane: dict, side: str) -> dict:
    """The divider polyline for one lane side, or a virtual boundary
    along the centerline when the map gives none (lane connectors
    inside intersections have no painted dividers)."""
    polyline = lane.get(f"{side}_polyline")
    crossable = bool(lane.get(f"{side}_crossable", True))
    if polyline is None or len(polyline) < 2:
        polyline = lane["centerline"]
        crossable = True
    return {
        "boundary_id": f"{lane['lane_id']}:{side}",
        "polyline": _q_xy(polyline),
        "crossable": crossable,
    }


def _agent_entry(agent: dict, timestamps_us: list[int]) -> dict | None:
    agent_class = class_for_category(agent["category"])
    if agent_class is None:
        return None
    states = sorted(agent["states"], key=lambda s: s["frame"])
    deduped = [s for i, s in enumerate(states)
               if i == 0 or s["frame"] != states[i - 1]["frame"]]
    if not deduped:
        return None
    speeds = speeds_from_positions(
        [(s["x"], s["y"]) for s in deduped],
        [timestamps_us[s["frame"]] for s in deduped])
    out_states = []
    for state, speed in zip(deduped, speeds):
        entry = {
            "frame": int(state["frame"]),
            "x": _q(state["x"]),
            "y": _q(state["y"]),
            "yaw": _q(normalize_yaw(state["yaw"])),
        }
        if speed is not None:
            entry["speed"] = _q(speed)
        visibility = visibility_value(state.get("visibility_level"))
        if visibility is not None:
            entry["visibility"] = _q(visibility)
        out_states.append(entry)
    length, width, height = agent["size"]
    return {
        "agent_id": str(agent["agent_id"]),
        "class": agent_class,
        "size": {"length": _q(length), "width": _q(width),
                 "height": _q(height)},
        "states": out_states,
    }


def bundle_to_document(bundle: SceneBundle,
                       map_radius_m: float = 80.0) -> dict:
    """Render one bundle as an interchange document dict.

    Map elements are kept whole when any vertex lies within
    map_radius_m of the ego route and dropped otherwise; cutting
    polylines or polygons could break their geometric invariants.
    """
    if len(bundle.ego_poses) != len(bundle.timestamps_us):
        raise ValueError("one ego pose per key frame required")
    if not bundle.timestamps_us:
        raise ValueError(f"scene {bundle.scene_id!r} has no key frames")

    route = [(x, y) for x, y, _ in bundle.ego_poses]
    ego_speeds = speeds_from_positions(route, bundle.timestamps_us)
    ego = []
    for i, ((x, y, yaw), speed) in enumerate(zip(bundle.ego_poses,
                                                 ego_speeds)):
        entry = {"frame": i, "x": _q(x), "y": _q(y),
                 "yaw": _q(normalize_yaw(yaw))}
        if speed is not None:
            entry["speed"] = _q(speed)
        ego.append(entry)

    agents = []
    for agent in bundle.agents:
        entry = _agent_entry(agent, bundle.timestamps_us)
        if entry is not None:
            agents.append(entry)
    agents.sort(key=lambda a: a["agent_id"])

    kept_lanes = [lane for lane in bundle.lanes
                  if near_route(lane["centerline"], route, map_radius_m)]
    lanes = []
    boundaries = []
    for lane in kept_lanes:
        lanes.append({
            "lane_id": str(lane["lane_id"]),
            "centerline": _q_xy(lane["centerline"]),
            "left_boundary_id": f"{lane['lane_id']}:left",
            "right_boundary_id": f"{lane['lane_id']}:right",
            "successors": [str(s) for s in lane.get("successors", ())],
        })
        boundaries.append(_boundary_for_side(lane, "left"))
        boundaries.append(_boundary_for_side(lane, "right"))

    # Medians and other painted lines not tied to a kept lane still
    # matter as context; they join the boundary list under their own
    # ids.
    for divider in bundle.dividers:
        if near_route(divider["polyline"], route, map_radius_m):
            boundaries.append({
                "boundary_id": str(divider["id"]),
                "polyline": _q_xy(divider["polyline"]),
                "crossable": bool(divider["crossable"]),
            })

    crosswalks = [{"id": str(c["id"]), "polygon": _q_xy(c["polygon"])}
                  for c in bundle.crosswalks
                  if near_route(c["polygon"], route, map_radius_m)]
    drivable = [{"polygon": _q_xy(polygon)}
                for polygon in bundle.drivable_area
                if near_route(polygon, route, map_radius_m)]

    doc = {
        "scene_id": bundle.scene_id,
        "frames": [{"index": i, "timestamp_us": int(ts)}
                   for i, ts in enumerate(bundle.timestamps_us)],
        "ego": ego,
        "agents": agents,
        "map": {
            "lanes": lanes,
            "boundaries": boundaries,
            "crosswalks": crosswalks,
            "drivable_area": drivable,
        },
    }
    if bundle.cameras:
        doc["cameras"] = [
            {
                "name": str(cam["name"]),
                "intrinsics": {"fx": _q(cam["fx"]), "fy": _q(cam["fy"]),
                               "cx": _q(cam["cx"]), "cy": _q(cam["cy"])},
                "width": int(cam["width"]),
                "height": int(cam["height"]),
                "poses": [{"x": _q(p["x"]), "y": _q(p["y"]),
                           "z": _q(p["z"]),
                           "rotation": _q(normalize_yaw(p["rotation"]))}
                          for p in cam["poses"]],
            }
            for cam in bundle.cameras
        ]
    return doc


def _emit(value, out: list[str]) -> None:
    if value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, float):
        out.append(format(value, ".6f"))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, dict):
        out.append("{")
        for i, (key, item) in enumerate(value.items()):
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _emit(item, out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def render_document(doc: dict) -> bytes:
    """Canonical bytes: fixed key order, floats with 6 decimals, one
    trailing newline. Matches the interchange wire convention, so a
    consumer re-serializing the parsed document reproduces the file."""
    parts: list[str] = []
    _emit(doc, parts)
    parts.append("\n")
    return "".join(parts).encode("utf-8")


def write_document(doc: dict, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes(render_document(doc))
    return path
