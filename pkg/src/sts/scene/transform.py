"""Whole-scene rigid transforms and re-epoching.

Scenes are planar, so a global SE(2) transform (rotate by yaw about the
origin, then translate) maps every pose, map vertex, and camera mount
consistently. Timestamps can be shifted to a new epoch without touching
geometry. Both operations preserve validity.
"""
from __future__ import annotations

import math
from dataclasses import replace

from sts.geometry.se2 import normalize_angle
from sts.scene.model import (
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


def _make_point_map(x: float, y: float, yaw: float):
    c = math.cos(yaw)
    s = math.sin(yaw)

    def apply(px: float, py: float) -> tuple[float, float]:
        return (c * px - s * py + x, s * px + c * py + y)

    return apply


def transform_scene(scene: Scene, x: float = 0.0, y: float = 0.0,
                    yaw: float = 0.0) -> Scene:
    """Apply one rigid transform to everything in the scene."""
    point = _make_point_map(x, y, yaw)

    ego = tuple(
        EgoState(frame=st.frame, x=point(st.x, st.y)[0],
                 y=point(st.x, st.y)[1],
                 yaw=normalize_angle(st.yaw + yaw), speed=st.speed)
        for st in scene.ego)
    agents = tuple(
        AgentTrack(
            agent_id=tr.agent_id, agent_class=tr.agent_class, size=tr.size,
            states=tuple(
                AgentState(frame=st.frame, x=point(st.x, st.y)[0],
                           y=point(st.x, st.y)[1],
                           yaw=normalize_angle(st.yaw + yaw),
                           speed=st.speed, visibility=st.visibility)
                for st in tr.states))
        for tr in scene.agents)

    def points(seq):
        return tuple(point(px, py) for px, py in seq)

    map_model = MapModel(
        lanes=tuple(replace(lane, centerline=points(lane.centerline))
                    for lane in scene.map.lanes),
        boundaries=tuple(replace(b, polyline=points(b.polyline))
                         for b in scene.map.boundaries),
        crosswalks=tuple(Crosswalk(id=cw.id, polygon=points(cw.polygon))
                         for cw in scene.map.crosswalks),
        drivable_area=tuple(points(poly)
                            for poly in scene.map.drivable_area),
    )

    cameras = scene.cameras
    if cameras is not None:
        cameras = tuple(
            replace(cam, poses=tuple(
                CameraPose(x=point(p.x, p.y)[0], y=point(p.x, p.y)[1],
                           z=p.z,
                           rotation=normalize_angle(p.rotation + yaw))
                for p in cam.poses))
            for cam in cameras)

    return Scene(scene_id=scene.scene_id, frames=scene.frames, ego=ego,
                 agents=agents, map=map_model, cameras=cameras)


def shift_timestamps(scene: Scene, offset_us: int) -> Scene:
    """Move the scene to a new epoch; frame spacing is preserved."""
    frames = tuple(FrameStamp(index=f.index,
                              timestamp_us=f.timestamp_us + int(offset_us))
                   for f in scene.frames)
    return replace(scene, frames=frames)


def rename_agents(scene: Scene, mapping: dict[str, str]) -> Scene:
    """Rename agent ids; ids absent from the mapping stay unchanged."""
    agents = tuple(
        replace(tr, agent_id=mapping.get(tr.agent_id, tr.agent_id))
        for tr in scene.agents)
    return replace(scene, agents=agents)
