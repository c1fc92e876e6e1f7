"""Minimal vector maps and a virtual camera rig for synthetic scenes.

Roads run along +x in the local build frame; builders lay trajectories
out in that frame and the whole scene is rigidly transformed afterwards,
so nothing downstream may rely on axis alignment.
"""
from __future__ import annotations

import math

from sts.geometry import normalize_angle
from sts.scene import (
    Boundary,
    CameraModel,
    CameraPose,
    Crosswalk,
    EgoState,
    Lane,
    MapModel,
)

LANE_WIDTH = 3.5


def _rect(x0: float, y0: float, x1: float, y1: float):
    return ((x0, y0), (x1, y0), (x1, y1), (x0, y1))


def single_lane_map(x0: float = -50.0, x1: float = 50.0,
                    half_width: float = 1.6,
                    crosswalk_at: float | None = None) -> MapModel:
    """One straight lane with tight shoulders; optionally a crosswalk
    band across the road centered at crosswalk_at."""
    crosswalks = ()
    if crosswalk_at is not None:
        crosswalks = (Crosswalk(
            id="cw0",
            polygon=_rect(crosswalk_at - 1.0, -(half_width + 0.2),
                          crosswalk_at + 1.0, half_width + 0.2)),)
    return MapModel(
        lanes=(Lane(lane_id="lane0",
                    centerline=((x0, 0.0), (x1, 0.0)),
                    left_boundary_id="b_left",
                    right_boundary_id="b_right"),),
        boundaries=(
            Boundary(boundary_id="b_left",
                     polyline=((x0, half_width), (x1, half_width)),
                     crossable=False),
            Boundary(boundary_id="b_right",
                     polyline=((x0, -half_width), (x1, -half_width)),
                     crossable=False),
        ),
        crosswalks=crosswalks,
        drivable_area=(_rect(x0, -half_width, x1, half_width),),
    )


def parallel_lane_map(count: int, x0: float = -60.0,
                      x1: float = 120.0) -> MapModel:
    """count parallel same-direction lanes, each one lane width left of
    the previous; interior boundaries are crossable, the outer two are
    not. lane0 runs at y=0.
    """
    mid = LANE_WIDTH / 2.0
    boundaries = tuple(
        Boundary(boundary_id=f"b{k}",
                 polyline=((x0, k * LANE_WIDTH - mid),
                           (x1, k * LANE_WIDTH - mid)),
                 crossable=0 < k < count)
        for k in range(count + 1))
    lanes = tuple(
        Lane(lane_id=f"lane{k}",
             centerline=((x0, k * LANE_WIDTH), (x1, k * LANE_WIDTH)),
             left_boundary_id=f"b{k + 1}",
             right_boundary_id=f"b{k}",
             adjacent_left=f"lane{k + 1}" if k + 1 < count else None,
             adjacent_right=f"lane{k - 1}" if k > 0 else None)
        for k in range(count))
    return MapModel(
        lanes=lanes,
        boundaries=boundaries,
        drivable_area=(_rect(x0, -mid, x1,
                             (count - 1) * LANE_WIDTH + mid),),
    )


def two_lane_map(x0: float = -60.0, x1: float = 120.0) -> MapModel:
    """Two parallel same-direction lanes sharing a crossable boundary.

    lane0 runs at y=0, lane1 at y=LANE_WIDTH; lane1 is to the left of
    lane0 when driving toward +x.
    """
    return parallel_lane_map(2, x0, x1)


def patch_map(x0: float, y0: float, x1: float, y1: float) -> MapModel:
    """Drivable area only; no lane structure at all."""
    return MapModel(drivable_area=(_rect(x0, y0, x1, y1),))


RIG = (
    ("CAM_FRONT", 0.0),
    ("CAM_FRONT_LEFT", 55.0),
    ("CAM_FRONT_RIGHT", -55.0),
    ("CAM_BACK", 180.0),
    ("CAM_BACK_LEFT", 110.0),
    ("CAM_BACK_RIGHT", -110.0),
)


def camera_rig(ego_states: tuple[EgoState, ...]) -> tuple[CameraModel, ...]:
    """Six cameras mounted at the ego center, 1.5 m up, covering the
    full horizon with overlap."""
    cameras = []
    for name, offset_deg in RIG:
        offset = math.radians(offset_deg)
        poses = tuple(
            CameraPose(x=st.x, y=st.y, z=1.5,
                       rotation=normalize_angle(st.yaw + offset))
            for st in ego_states)
        cameras.append(CameraModel(name=name, fx=1266.0, fy=1266.0,
                                   cx=800.0, cy=450.0,
                                   width=1600, height=900, poses=poses))
    return tuple(cameras)
