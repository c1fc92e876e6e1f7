"""Dataclasses for the scene interchange format.

A scene is a sequence of annotated key frames: ego poses, agent tracks
with 3D box sizes, a vector map, and optional camera calibrations. All
angles are radians, lengths are meters, timestamps are integer
microseconds. Floats are quantized to 6 decimals on construction so that
serialization round-trips bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

AGENT_CLASSES = frozenset({
    "car",
    "truck",
    "bus",
    "trailer",
    "construction_vehicle",
    "motorcycle",
    "bicycle",
    "pedestrian",
})

Point = tuple[float, float]
Polyline = tuple[Point, ...]
Polygon = tuple[Point, ...]


def _q(value: float) -> float:
    """Quantize a float to the 6-decimal wire precision."""
    value = float(value)
    if not math.isfinite(value):
        return value
    return float(format(value, ".6f"))


def _q_opt(value: float | None) -> float | None:
    return None if value is None else _q(value)


def _q_points(points) -> tuple[Point, ...]:
    return tuple((_q(x), _q(y)) for x, y in points)


def _set(obj, **fields) -> None:
    for name, value in fields.items():
        object.__setattr__(obj, name, value)


@dataclass(frozen=True)
class FrameStamp:
    """One annotated key frame."""

    index: int
    timestamp_us: int

    def __post_init__(self) -> None:
        _set(self, index=int(self.index), timestamp_us=int(self.timestamp_us))


@dataclass(frozen=True)
class EgoState:
    """Ego pose at one frame, in the global frame."""

    frame: int
    x: float
    y: float
    yaw: float
    speed: float | None = None

    def __post_init__(self) -> None:
        _set(self, frame=int(self.frame), x=_q(self.x), y=_q(self.y),
             yaw=_q(self.yaw), speed=_q_opt(self.speed))


@dataclass(frozen=True)
class AgentState:
    """Agent pose at one frame, in the global frame."""

    frame: int
    x: float
    y: float
    yaw: float
    speed: float | None = None
    visibility: float | None = None

    def __post_init__(self) -> None:
        _set(self, frame=int(self.frame), x=_q(self.x), y=_q(self.y),
             yaw=_q(self.yaw), speed=_q_opt(self.speed),
             visibility=_q_opt(self.visibility))


@dataclass(frozen=True)
class AgentSize:
    """Upright box dimensions in meters."""

    length: float
    width: float
    height: float

    def __post_init__(self) -> None:
        _set(self, length=_q(self.length), width=_q(self.width),
             height=_q(self.height))


@dataclass(frozen=True)
class AgentTrack:
    agent_id: str
    agent_class: str
    size: AgentSize
    states: tuple[AgentState, ...]

    def __post_init__(self) -> None:
        _set(self, agent_id=str(self.agent_id),
             agent_class=str(self.agent_class), states=tuple(self.states))


@dataclass(frozen=True)
class Lane:
    lane_id: str
    centerline: Polyline
    left_boundary_id: str
    right_boundary_id: str
    successors: tuple[str, ...] = ()
    adjacent_left: str | None = None
    adjacent_right: str | None = None

    def __post_init__(self) -> None:
        _set(self, centerline=_q_points(self.centerline),
             successors=tuple(str(s) for s in self.successors))


@dataclass(frozen=True)
class Boundary:
    boundary_id: str
    polyline: Polyline
    crossable: bool

    def __post_init__(self) -> None:
        _set(self, polyline=_q_points(self.polyline),
             crossable=bool(self.crossable))


@dataclass(frozen=True)
class Crosswalk:
    id: str
    polygon: Polygon

    def __post_init__(self) -> None:
        _set(self, polygon=_q_points(self.polygon))


@dataclass(frozen=True)
class MapModel:
    lanes: tuple[Lane, ...] = ()
    boundaries: tuple[Boundary, ...] = ()
    crosswalks: tuple[Crosswalk, ...] = ()
    drivable_area: tuple[Polygon, ...] = ()

    def __post_init__(self) -> None:
        _set(self, lanes=tuple(self.lanes), boundaries=tuple(self.boundaries),
             crosswalks=tuple(self.crosswalks),
             drivable_area=tuple(_q_points(p) for p in self.drivable_area))

    def lane_by_id(self, lane_id: str) -> Lane | None:
        for lane in self.lanes:
            if lane.lane_id == lane_id:
                return lane
        return None


@dataclass(frozen=True)
class CameraPose:
    """Camera mount pose at one frame: position plus optical-axis yaw."""

    x: float
    y: float
    z: float
    rotation: float

    def __post_init__(self) -> None:
        _set(self, x=_q(self.x), y=_q(self.y), z=_q(self.z),
             rotation=_q(self.rotation))


@dataclass(frozen=True)
class CameraModel:
    name: str
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    poses: tuple[CameraPose, ...]

    def __post_init__(self) -> None:
        _set(self, fx=_q(self.fx), fy=_q(self.fy), cx=_q(self.cx),
             cy=_q(self.cy), width=int(self.width), height=int(self.height),
             poses=tuple(self.poses))


@dataclass(frozen=True)
class Scene:
    scene_id: str
    frames: tuple[FrameStamp, ...]
    ego: tuple[EgoState, ...]
    agents: tuple[AgentTrack, ...]
    map: MapModel
    cameras: tuple[CameraModel, ...] | None = None

    def __post_init__(self) -> None:
        _set(self, frames=tuple(self.frames), ego=tuple(self.ego),
             agents=tuple(self.agents),
             cameras=None if self.cameras is None else tuple(self.cameras))

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    @property
    def timestamps_us(self) -> tuple[int, ...]:
        return tuple(f.timestamp_us for f in self.frames)
