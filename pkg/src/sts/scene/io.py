"""Parsing and bit-stable serialization of .scene.json documents.

The wire format is one UTF-8 JSON document per scene with a fixed key
order and every float rendered with exactly 6 decimals, so serializing
the same scene twice is byte-identical and golden files diff cleanly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from sts.scene.model import (
    AgentSize,
    AgentState,
    AgentTrack,
    Boundary,
    CameraModel,
    CameraPose,
    Crosswalk,
    EgoState,
    FrameStamp,
    Lane,
    MapModel,
    Scene,
)
from sts.scene.validate import validate_scene

SCENE_SUFFIX = ".scene.json"


class SceneParseError(ValueError):
    """Raised for malformed syntax or structure, with a field path."""


class SceneValidationError(ValueError):
    """Raised when a structurally sound document breaks an invariant."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def _obj(value: Any, path: str, required: frozenset[str],
         optional: frozenset[str] = frozenset()) -> dict:
    if not isinstance(value, dict):
        raise SceneParseError(f"{path}: expected object")
    missing = required - value.keys()
    if missing:
        raise SceneParseError(f"{path}: missing key {sorted(missing)[0]!r}")
    unknown = value.keys() - required - optional
    if unknown:
        raise SceneParseError(f"{path}: unexpected key {sorted(unknown)[0]!r}")
    return value


def _string(obj: dict, key: str, path: str) -> str:
    value = obj[key]
    if not isinstance(value, str):
        raise SceneParseError(f"{path}.{key}: expected string")
    return value


def _integer(obj: dict, key: str, path: str) -> int:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise SceneParseError(f"{path}.{key}: expected integer")
    return value


def _number(obj: dict, key: str, path: str) -> float:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneParseError(f"{path}.{key}: expected number")
    return float(value)


def _boolean(obj: dict, key: str, path: str) -> bool:
    value = obj[key]
    if not isinstance(value, bool):
        raise SceneParseError(f"{path}.{key}: expected boolean")
    return value


def _array(obj: dict, key: str, path: str) -> list:
    value = obj[key]
    if not isinstance(value, list):
        raise SceneParseError(f"{path}.{key}: expected array")
    return value


def _points(value: Any, path: str) -> tuple[tuple[float, float], ...]:
    if not isinstance(value, list):
        raise SceneParseError(f"{path}: expected array of [x, y] points")
    points = []
    for i, item in enumerate(value):
        ok = isinstance(item, list) and len(item) == 2 and all(
            not isinstance(c, bool) and isinstance(c, (int, float))
            for c in item)
        if not ok:
            raise SceneParseError(f"{path}[{i}]: expected [x, y] point")
        points.append((float(item[0]), float(item[1])))
    return tuple(points)


_STATE_KEYS = frozenset({"frame", "x", "y", "yaw"})


def _parse_ego_state(value: Any, path: str) -> EgoState:
    obj = _obj(value, path, _STATE_KEYS, frozenset({"speed"}))
    return EgoState(
        frame=_integer(obj, "frame", path),
        x=_number(obj, "x", path),
        y=_number(obj, "y", path),
        yaw=_number(obj, "yaw", path),
        speed=_number(obj, "speed", path) if "speed" in obj else None,
    )


def _parse_agent_state(value: Any, path: str) -> AgentState:
    obj = _obj(value, path, _STATE_KEYS, frozenset({"speed", "visibility"}))
    return AgentState(
        frame=_integer(obj, "frame", path),
        x=_number(obj, "x", path),
        y=_number(obj, "y", path),
        yaw=_number(obj, "yaw", path),
        speed=_number(obj, "speed", path) if "speed" in obj else None,
        visibility=_number(obj, "visibility", path)
        if "visibility" in obj else None,
    )


def _parse_track(value: Any, path: str) -> AgentTrack:
    obj = _obj(value, path, frozenset({"agent_id", "class", "size", "states"}))
    size_obj = _obj(obj["size"], f"{path}.size",
                    frozenset({"length", "width", "height"}))
    return AgentTrack(
        agent_id=_string(obj, "agent_id", path),
        agent_class=_string(obj, "class", path),
        size=AgentSize(
            length=_number(size_obj, "length", f"{path}.size"),
            width=_number(size_obj, "width", f"{path}.size"),
            height=_number(size_obj, "height", f"{path}.size"),
        ),
        states=tuple(
            _parse_agent_state(s, f"{path}.states[{i}]")
            for i, s in enumerate(_array(obj, "states", path))
        ),
    )


def _parse_lane(value: Any, path: str) -> Lane:
    obj = _obj(value, path,
               frozenset({"lane_id", "centerline", "left_boundary_id",
                          "right_boundary_id", "successors"}),
               frozenset({"adjacent_left", "adjacent_right"}))
    successors = _array(obj, "successors", path)
    for i, s in enumerate(successors):
        if not isinstance(s, str):
            raise SceneParseError(f"{path}.successors[{i}]: expected string")
    return Lane(
        lane_id=_string(obj, "lane_id", path),
        centerline=_points(obj["centerline"], f"{path}.centerline"),
        left_boundary_id=_string(obj, "left_boundary_id", path),
        right_boundary_id=_string(obj, "right_boundary_id", path),
        successors=tuple(successors),
        adjacent_left=_string(obj, "adjacent_left", path)
        if "adjacent_left" in obj else None,
        adjacent_right=_string(obj, "adjacent_right", path)
        if "adjacent_right" in obj else None,
    )


def _parse_map(value: Any, path: str) -> MapModel:
    obj = _obj(value, path,
               frozenset({"lanes", "boundaries", "crosswalks",
                          "drivable_area"}))
    boundaries = []
    for i, b in enumerate(_array(obj, "boundaries", path)):
        bpath = f"{path}.boundaries[{i}]"
        bobj = _obj(b, bpath, frozenset({"boundary_id", "polyline",
                                         "crossable"}))
        boundaries.append(Boundary(
            boundary_id=_string(bobj, "boundary_id", bpath),
            polyline=_points(bobj["polyline"], f"{bpath}.polyline"),
            crossable=_boolean(bobj, "crossable", bpath),
        ))
    crosswalks = []
    for i, c in enumerate(_array(obj, "crosswalks", path)):
        cpath = f"{path}.crosswalks[{i}]"
        cobj = _obj(c, cpath, frozenset({"id", "polygon"}))
        crosswalks.append(Crosswalk(
            id=_string(cobj, "id", cpath),
            polygon=_points(cobj["polygon"], f"{cpath}.polygon"),
        ))
    drivable = []
    for i, d in enumerate(_array(obj, "drivable_area", path)):
        dpath = f"{path}.drivable_area[{i}]"
        dobj = _obj(d, dpath, frozenset({"polygon"}))
        drivable.append(_points(dobj["polygon"], f"{dpath}.polygon"))
    return MapModel(
        lanes=tuple(_parse_lane(l, f"{path}.lanes[{i}]")
                    for i, l in enumerate(_array(obj, "lanes", path))),
        boundaries=tuple(boundaries),
        crosswalks=tuple(crosswalks),
        drivable_area=tuple(drivable),
    )


def _parse_camera(value: Any, path: str) -> CameraModel:
    obj = _obj(value, path, frozenset({"name", "intrinsics", "width",
                                       "height", "poses"}))
    intr = _obj(obj["intrinsics"], f"{path}.intrinsics",
                frozenset({"fx", "fy", "cx", "cy"}))
    poses = []
    for i, p in enumerate(_array(obj, "poses", path)):
        ppath = f"{path}.poses[{i}]"
        pobj = _obj(p, ppath, frozenset({"x", "y", "z", "rotation"}))
        poses.append(CameraPose(
            x=_number(pobj, "x", ppath),
            y=_number(pobj, "y", ppath),
            z=_number(pobj, "z", ppath),
            rotation=_number(pobj, "rotation", ppath),
        ))
    return CameraModel(
        name=_string(obj, "name", path),
        fx=_number(intr, "fx", f"{path}.intrinsics"),
        fy=_number(intr, "fy", f"{path}.intrinsics"),
        cx=_number(intr, "cx", f"{path}.intrinsics"),
        cy=_number(intr, "cy", f"{path}.intrinsics"),
        width=_integer(obj, "width", path),
        height=_integer(obj, "height", path),
        poses=tuple(poses),
    )


def scene_from_dict(doc: Any) -> Scene:
    """Build a Scene from a parsed JSON document. Structure only; run
    validate_scene (or use parse_scene) for invariant checking."""
    obj = _obj(doc, "document",
               frozenset({"scene_id", "frames", "ego", "agents", "map"}),
               frozenset({"cameras"}))
    frames = []
    for i, f in enumerate(_array(obj, "frames", "document")):
        fpath = f"frames[{i}]"
        fobj = _obj(f, fpath, frozenset({"index", "timestamp_us"}))
        frames.append(FrameStamp(index=_integer(fobj, "index", fpath),
                                 timestamp_us=_integer(fobj, "timestamp_us",
                                                       fpath)))
    cameras = None
    if "cameras" in obj:
        cameras = tuple(_parse_camera(c, f"cameras[{i}]")
                        for i, c in enumerate(_array(obj, "cameras",
                                                     "document")))
    return Scene(
        scene_id=_string(obj, "scene_id", "document"),
        frames=tuple(frames),
        ego=tuple(_parse_ego_state(e, f"ego[{i}]")
                  for i, e in enumerate(_array(obj, "ego", "document"))),
        agents=tuple(_parse_track(t, f"agents[{i}]")
                     for i, t in enumerate(_array(obj, "agents",
                                                  "document"))),
        map=_parse_map(obj["map"], "map"),
        cameras=cameras,
    )


def parse_scene(data: bytes | str) -> Scene:
    """Parse and validate one scene interchange document."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as err:
        raise SceneParseError(
            f"line {err.lineno}, column {err.colno}: {err.msg}") from err
    scene = scene_from_dict(doc)
    violations = validate_scene(scene)
    if violations:
        raise SceneValidationError(violations)
    return scene


def _ego_state_dict(state: EgoState) -> dict:
    out = {"frame": state.frame, "x": state.x, "y": state.y, "yaw": state.yaw}
    if state.speed is not None:
        out["speed"] = state.speed
    return out


def _agent_state_dict(state: AgentState) -> dict:
    out = {"frame": state.frame, "x": state.x, "y": state.y, "yaw": state.yaw}
    if state.speed is not None:
        out["speed"] = state.speed
    if state.visibility is not None:
        out["visibility"] = state.visibility
    return out


def _lane_dict(lane: Lane) -> dict:
    out = {
        "lane_id": lane.lane_id,
        "centerline": [[x, y] for x, y in lane.centerline],
        "left_boundary_id": lane.left_boundary_id,
        "right_boundary_id": lane.right_boundary_id,
        "successors": list(lane.successors),
    }
    if lane.adjacent_left is not None:
        out["adjacent_left"] = lane.adjacent_left
    if lane.adjacent_right is not None:
        out["adjacent_right"] = lane.adjacent_right
    return out


def scene_to_dict(scene: Scene) -> dict:
    """Render a Scene as a JSON-ready dict in wire key order."""
    doc = {
        "scene_id": scene.scene_id,
        "frames": [{"index": f.index, "timestamp_us": f.timestamp_us}
                   for f in scene.frames],
        "ego": [_ego_state_dict(s) for s in scene.ego],
        "agents": [
            {
                "agent_id": t.agent_id,
                "class": t.agent_class,
                "size": {"length": t.size.length, "width": t.size.width,
                         "height": t.size.height},
                "states": [_agent_state_dict(s) for s in t.states],
            }
            for t in scene.agents
        ],
        "map": {
            "lanes": [_lane_dict(l) for l in scene.map.lanes],
            "boundaries": [
                {"boundary_id": b.boundary_id,
                 "polyline": [[x, y] for x, y in b.polyline],
                 "crossable": b.crossable}
                for b in scene.map.boundaries
            ],
            "crosswalks": [
                {"id": c.id, "polygon": [[x, y] for x, y in c.polygon]}
                for c in scene.map.crosswalks
            ],
            "drivable_area": [
                {"polygon": [[x, y] for x, y in p]}
                for p in scene.map.drivable_area
            ],
        },
    }
    if scene.cameras is not None:
        doc["cameras"] = [
            {
                "name": c.name,
                "intrinsics": {"fx": c.fx, "fy": c.fy, "cx": c.cx,
                               "cy": c.cy},
                "width": c.width,
                "height": c.height,
                "poses": [{"x": p.x, "y": p.y, "z": p.z,
                           "rotation": p.rotation} for p in c.poses],
            }
            for c in scene.cameras
        ]
    return doc


def _emit(value: Any, out: list[str]) -> None:
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


def serialize_scene(scene: Scene) -> bytes:
    """Serialize a valid scene to its canonical byte representation."""
    parts: list[str] = []
    _emit(scene_to_dict(scene), parts)
    parts.append("\n")
    return "".join(parts).encode("utf-8")


def load_scene(path: str | Path) -> Scene:
    return parse_scene(Path(path).read_bytes())


def save_scene(scene: Scene, path: str | Path) -> None:
    Path(path).write_bytes(serialize_scene(scene))
