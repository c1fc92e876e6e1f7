"""Planar geometry and kinematics kernel."""

from sts.geometry.camera import (
    CameraProjection,
    assign_views,
    project_agent_to_camera,
)
from sts.geometry.kinematics import (
    heading_change,
    net_displacement,
    path_length,
    speed_profile,
    velocity_profile,
)
from sts.geometry.lanes import (
    DEFAULT_LANE_ASSIGN,
    LaneAssignConfig,
    LaneCoordinate,
    assign_lane,
)
from sts.geometry.polygon import (
    point_in_polygon,
    point_on_boundary,
    polygon_is_simple,
    polyline_intersects_polygon,
)
from sts.geometry.polyline import (
    PolylineProjection,
    point_at_arclength,
    polyline_length,
    project_to_polyline,
    tangent_at_segment,
)
from sts.geometry.se2 import (
    Pose2,
    angle_diff,
    compose,
    normalize_angle,
    point_in_frame,
    relative_pose,
    transform_point,
)

__all__ = [
    "DEFAULT_LANE_ASSIGN",
    "CameraProjection",
    "LaneAssignConfig",
    "LaneCoordinate",
    "Pose2",
    "PolylineProjection",
    "angle_diff",
    "assign_lane",
    "assign_views",
    "compose",
    "heading_change",
    "net_displacement",
    "normalize_angle",
    "path_length",
    "point_at_arclength",
    "point_in_frame",
    "point_in_polygon",
    "point_on_boundary",
    "polygon_is_simple",
    "polyline_intersects_polygon",
    "polyline_length",
    "project_agent_to_camera",
    "project_to_polyline",
    "relative_pose",
    "speed_profile",
    "tangent_at_segment",
    "transform_point",
    "velocity_profile",
]
