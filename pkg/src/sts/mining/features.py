"""Per-window track views and relational features shared by the detectors.

A Track wraps one agent (or the ego vehicle) for a whole scene with
precomputed speeds and velocities; WindowTrack is the slice a detector
sees. All relational quantities use the planar body frame: x forward,
y left of the reference subject.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from sts.geometry import (
    Pose2,
    angle_diff,
    relative_pose,
    speed_profile,
    velocity_profile,
)
from sts.scene import AgentTrack, MapModel, Scene

EGO_ID = "ego"


@dataclass(frozen=True)
class WindowTrack:
    """One subject over one window: aligned per-frame arrays."""

    agent_id: str
    agent_class: str
    is_ego: bool
    length: float
    width: float
    frame_start: int
    frame_end: int
    x: tuple[float, ...]
    y: tuple[float, ...]
    yaw: tuple[float, ...]
    speed: tuple[float, ...]
    velocity: tuple[tuple[float, float], ...]

    def __len__(self) -> int:
        return len(self.x)

    def pose(self, i: int) -> Pose2:
        return Pose2(self.x[i], self.y[i], self.yaw[i])

    def point(self, i: int) -> tuple[float, float]:
        return (self.x[i], self.y[i])

    def path(self) -> list[tuple[float, float]]:
        return [(xi, yi) for xi, yi in zip(self.x, self.y)]


class Track:
    """Full-scene view of one subject with frame lookup."""

    def __init__(
        self,
        agent_id: str,
        agent_class: str,
        is_ego: bool,
        length: float,
        width: float,
        states: list,
        timestamps: list[int],
    ) -> None:
        self.agent_id = agent_id
        self.agent_class = agent_class
        self.is_ego = is_ego
        self.length = length
        self.width = width
        self.states = states
        self._pos = {s.frame: i for i, s in enumerate(states)}
        self.speeds = speed_profile(states, timestamps)
        self.velocities = velocity_profile(states, timestamps)

    def covers(self, frame_start: int, frame_end: int) -> bool:
        return all(f in self._pos for f in range(frame_start, frame_end + 1))

    def state_at(self, frame: int):
        return self.states[self._pos[frame]]

    def window(self, frame_start: int, frame_end: int) -> WindowTrack:
        idx = [self._pos[f] for f in range(frame_start, frame_end + 1)]
        states = [self.states[i] for i in idx]
        return WindowTrack(
            agent_id=self.agent_id,
            agent_class=self.agent_class,
            is_ego=self.is_ego,
            length=self.length,
            width=self.width,
            frame_start=frame_start,
            frame_end=frame_end,
            x=tuple(s.x for s in states),
            y=tuple(s.y for s in states),
            yaw=tuple(s.yaw for s in states),
            speed=tuple(self.speeds[i] for i in idx),
            velocity=tuple(self.velocities[i] for i in idx),
        )


def ego_track(scene: Scene, length: float, width: float) -> Track:
    return Track(EGO_ID, EGO_ID, True, length, width,
                 list(scene.ego), list(scene.timestamps_us))


def agent_track(scene: Scene, agent: AgentTrack) -> Track:
    stamps = [scene.timestamps_us[s.frame] for s in agent.states]
    return Track(agent.agent_id, agent.agent_class, False,
                 agent.size.length, agent.size.width,
                 list(agent.states), stamps)


def relative_series(subject: WindowTrack, reference: WindowTrack) -> list[Pose2]:
    """Subject pose in the reference body frame, one entry per frame."""
    return [relative_pose(subject.pose(i), reference.pose(i))
            for i in range(len(subject))]


def heading_gap_series(a: WindowTrack, b: WindowTrack) -> list[float]:
    return [abs(angle_diff(a.yaw[i], b.yaw[i])) for i in range(len(a))]


def distance_series(a: WindowTrack, b: WindowTrack) -> list[float]:
    return [math.hypot(a.x[i] - b.x[i], a.y[i] - b.y[i])
            for i in range(len(a))]


def interloper_between(
    a: WindowTrack,
    b: WindowTrack,
    others: list[WindowTrack],
    half_width: float = 1.75,
) -> bool:
    """True when any third subject sits between a and b at any frame.

    Between means the center projects strictly inside segment ab and lies
    within half_width of it laterally.
    """
    for i in range(len(a)):
        ax, ay = a.point(i)
        bx, by = b.point(i)
        dx, dy = bx - ax, by - ay
        seg_sq = dx * dx + dy * dy
        if seg_sq <= 0.0:
            continue
        for other in others:
            ox, oy = other.point(i)
            t = ((ox - ax) * dx + (oy - ay) * dy) / seg_sq
            if not 0.0 < t < 1.0:
                continue
            perp = abs(dx * (oy - ay) - dy * (ox - ax)) / math.sqrt(seg_sq)
            if perp <= half_width:
                return True
    return False


class MapIndex:
    """Lane topology lookups derived once per scene."""

    def __init__(self, map_model: MapModel) -> None:
        self.map = map_model
        self.lanes = {lane.lane_id: lane for lane in map_model.lanes}
        self.predecessors: dict[str, set[str]] = {
            lane_id: set() for lane_id in self.lanes
        }
        for lane in map_model.lanes:
            for succ in lane.successors:
                if succ in self.predecessors:
                    self.predecessors[succ].add(lane.lane_id)

    def chain_related(self, lane_a: str, lane_b: str, hops: int = 2) -> bool:
        """True when lane_b lies within `hops` successor or predecessor
        steps of lane_a (or they are the same lane)."""
        if lane_a == lane_b:
            return True
        frontier = {lane_a}
        for _ in range(hops):
            step: set[str] = set()
            for lane_id in frontier:
                lane = self.lanes.get(lane_id)
                if lane is not None:
                    step.update(lane.successors)
                step.update(self.predecessors.get(lane_id, ()))
            if lane_b in step:
                return True
            frontier = step
        return False

    def shared_boundary(self, lane_a: str, lane_b: str) -> str | None:
        """Boundary id separating two laterally adjacent lanes, if any."""
        a = self.lanes.get(lane_a)
        b = self.lanes.get(lane_b)
        if a is None or b is None:
            return None
        if a.adjacent_left == lane_b:
            return a.left_boundary_id
        if a.adjacent_right == lane_b:
            return a.right_boundary_id
        if b.adjacent_left == lane_a:
            return b.left_boundary_id
        if b.adjacent_right == lane_a:
            return b.right_boundary_id
        return None

    def adjacent(self, lane_a: str, lane_b: str) -> bool:
        a = self.lanes.get(lane_a)
        if a is None:
            return False
        return lane_b in (a.adjacent_left, a.adjacent_right)
