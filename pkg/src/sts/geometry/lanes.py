"""Lane association: map a pose to (lane, s, d) coordinates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

from sts.geometry.polyline import project_to_polyline, tangent_at_segment
from sts.geometry.se2 import angle_diff

if TYPE_CHECKING:
    from sts.scene.model import MapModel


class LaneCoordinate(NamedTuple):
    """Arclength s along a lane centerline and signed lateral offset d
    (positive left of travel direction)."""

    lane_id: str
    s: float
    d: float


@dataclass(frozen=True)
class LaneAssignConfig:
    max_lateral: float = 3.0
    max_heading: float = math.radians(60.0)


DEFAULT_LANE_ASSIGN = LaneAssignConfig()


def assign_lane(state, map_model: "MapModel",
                cfg: LaneAssignConfig = DEFAULT_LANE_ASSIGN,
                ) -> LaneCoordinate | None:
    """Associate a pose (anything with x, y, yaw) with the best lane.

    Candidates must lie within cfg.max_lateral of the centerline and
    within cfg.max_heading of the local tangent. Among candidates the
    smallest |d| wins; exact ties break to the smaller lane_id.
    """
    best_key: tuple[float, str] | None = None
    best: LaneCoordinate | None = None
    for lane in map_model.lanes:
        proj = project_to_polyline((state.x, state.y), lane.centerline)
        if abs(proj.d) > cfg.max_lateral:
            continue
        tangent = tangent_at_segment(lane.centerline, proj.segment_index)
        if abs(angle_diff(state.yaw, tangent)) > cfg.max_heading:
            continue
        key = (abs(proj.d), lane.lane_id)
        if best_key is None or key < best_key:
            best_key = key
            best = LaneCoordinate(lane.lane_id, proj.s, proj.d)
    return best
