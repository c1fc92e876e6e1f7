"""Window-level scenario detectors.

Each detector inspects one window (per-frame arrays of equal length) and
either returns a Detection or stays silent. The action names here are
local verbs; the miner maps them onto catalog scenario types according
to who the subject is.

Detections carry a strength so that overlapping windows firing the same
(type, subjects) can be merged onto the most pronounced one. Strength is
only ever compared between windows of the same detector and action, so
each detector picks whatever monotone scale suits it.
"""
from __future__ import annotations

import math
import statistics
from typing import NamedTuple

from sts.geometry import (
    angle_diff,
    heading_change,
    net_displacement,
    point_in_polygon,
    polyline_intersects_polygon,
    project_to_polyline,
    assign_lane,
)
from sts.mining.config import MinerConfig
from sts.mining.features import (
    MapIndex,
    WindowTrack,
    distance_series,
    heading_gap_series,
    interloper_between,
    relative_series,
)

# Fixed geometric tolerances that the contracts state as literals rather
# than tunable thresholds.
TURN_MIN_DISPLACEMENT = 2.0
CORRIDOR_HALF_WIDTH = 1.75
STATIONARY_LAT_TOL = 2.0
STATIONARY_LONG_TOL = 3.0
MOVING_SIDE_HEADING_MAX_DEG = 20.0
MOVING_SIDE_LONG_MAX = 5.0
REVERSE_MIN_FRAMES = 3
RUN_MIN_FRAMES = 3


class Detection(NamedTuple):
    action: str
    strength: float
    metrics: dict[str, float]


def _poses(track: WindowTrack) -> list:
    return [track.pose(i) for i in range(len(track))]


def detect_longitudinal(track: WindowTrack,
                        cfg: MinerConfig) -> Detection | None:
    """Stop, decelerate, or accelerate; stop wins over decelerate."""
    speeds = track.speed
    dv = speeds[-1] - speeds[0]
    metrics = {"delta_v": dv, "v_start": speeds[0], "v_end": speeds[-1]}
    if (speeds[0] >= cfg.v_moving
            and speeds[-1] < cfg.v_stationary
            and speeds[-2] < cfg.v_stationary):
        return Detection("stop", -(speeds[-1] + speeds[-2]) / 2.0, metrics)
    if dv <= cfg.dv_decel and speeds[-1] >= cfg.v_stationary:
        return Detection("decelerate", -dv, metrics)
    if dv >= cfg.dv_accel:
        return Detection("accelerate", dv, metrics)
    return None


def detect_turn(track: WindowTrack, cfg: MinerConfig) -> Detection | None:
    """Left turn, right turn, or u-turn by accumulated heading change.

    Requires some motion (a speed above v_stationary and at least 2 m of
    net displacement) so parked vehicles with noisy yaw stay silent.
    """
    if not any(s >= cfg.v_stationary for s in track.speed):
        return None
    poses = _poses(track)
    if net_displacement(poses) < TURN_MIN_DISPLACEMENT:
        return None
    dh = heading_change(poses)
    dh_deg = math.degrees(dh)
    metrics = {"delta_heading_deg": dh_deg}
    if abs(dh_deg) >= cfg.uturn_min_deg:
        return Detection("u_turn", abs(dh_deg), metrics)
    if cfg.turn_min_deg <= dh_deg <= cfg.turn_max_deg:
        return Detection("left_turn", abs(dh_deg), metrics)
    if cfg.turn_min_deg <= -dh_deg <= cfg.turn_max_deg:
        return Detection("right_turn", abs(dh_deg), metrics)
    return None


def detect_lane_change(track: WindowTrack, index: MapIndex,
                       cfg: MinerConfig) -> Detection | None:
    """Transition between laterally adjacent lanes across their shared
    boundary, with the heading staying near the lane direction."""
    poses = _poses(track)
    dh_deg = math.degrees(heading_change(poses))
    if abs(dh_deg) >= cfg.lc_heading_max_deg:
        return None
    start = assign_lane(poses[0], index.map)
    end = assign_lane(poses[-1], index.map)
    if start is None or end is None or start.lane_id == end.lane_id:
        return None
    if not (index.adjacent(start.lane_id, end.lane_id)
            or index.adjacent(end.lane_id, start.lane_id)):
        return None
    boundary_id = index.shared_boundary(start.lane_id, end.lane_id)
    if boundary_id is None:
        return None
    boundary = next((b for b in index.map.boundaries
                     if b.boundary_id == boundary_id), None)
    if boundary is None:
        return None
    offsets = [project_to_polyline(track.point(i), boundary.polyline).d
               for i in range(len(track))]
    first_sign = 0.0
    crossed = False
    for d in offsets:
        if d == 0.0:
            continue
        if first_sign == 0.0:
            first_sign = math.copysign(1.0, d)
        elif math.copysign(1.0, d) != first_sign:
            crossed = True
            break
    if not crossed:
        return None
    lateral_shift = abs(offsets[-1] - offsets[0])
    return Detection("lane_change", lateral_shift,
                     {"delta_heading_deg": dh_deg,
                      "lateral_shift": lateral_shift})


def detect_follow_lead(a: WindowTrack, b: WindowTrack,
                       others: list[WindowTrack], index: MapIndex,
                       cfg: MinerConfig) -> Detection | None:
    """a follows (or leads) b: same lane chain, steady gap, similar
    speed, nobody in between."""
    rel = relative_series(a, b)
    xs = [p.x for p in rel]
    if all(x < 0.0 for x in xs):
        action = "follow"
    elif all(x > 0.0 for x in xs):
        action = "lead"
    else:
        return None
    gaps = [abs(x) for x in xs]
    if not all(cfg.follow_gap_min <= g <= cfg.follow_gap_max for g in gaps):
        return None
    if any(s < cfg.v_moving for s in a.speed + b.speed):
        return None
    dv_mean = statistics.fmean(abs(sa - sb)
                               for sa, sb in zip(a.speed, b.speed))
    if dv_mean > cfg.follow_dv:
        return None
    gap_std = statistics.pstdev(gaps)
    if gap_std > cfg.follow_gap_std:
        return None
    lane_a = assign_lane(a.pose(0), index.map)
    lane_b = assign_lane(b.pose(0), index.map)
    if lane_a is None or lane_b is None:
        return None
    if not index.chain_related(lane_a.lane_id, lane_b.lane_id, hops=2):
        return None
    if interloper_between(a, b, others, CORRIDOR_HALF_WIDTH):
        return None
    return Detection(action, -gap_std,
                     {"gap_mean": statistics.fmean(gaps),
                      "gap_std": gap_std, "dv_mean": dv_mean})


def detect_overtake_pass(a: WindowTrack, b: WindowTrack,
                         cfg: MinerConfig) -> Detection | None:
    """a sweeps past b in the adjacent lateral band, front to back."""
    rel = relative_series(a, b)
    if not all(cfg.adjacent_lateral_min <= abs(p.y)
               <= cfg.adjacent_lateral_max for p in rel):
        return None
    threshold = (a.length + b.length) / 2.0
    xs = [p.x for p in rel]
    behind = [i for i, x in enumerate(xs) if x < -threshold]
    ahead = [i for i, x in enumerate(xs) if x > threshold]
    if not behind or not ahead or min(behind) >= max(ahead):
        return None
    metrics = {"delta_x": xs[-1] - xs[0],
               "lateral_mean": statistics.fmean(abs(p.y) for p in rel)}
    if all(s >= cfg.v_moving for s in a.speed):
        if all(s >= cfg.v_moving for s in b.speed):
            return Detection("overtake", xs[-1] - xs[0], metrics)
        if all(s < cfg.v_stationary for s in b.speed):
            return Detection("pass", xs[-1] - xs[0], metrics)
    return None


def detect_stationary_relation(a: WindowTrack, b: WindowTrack,
                               others: list[WindowTrack],
                               cfg: MinerConfig) -> Detection | None:
    """Where a sits relative to stationary b, both parked throughout."""
    if any(s >= cfg.v_stationary for s in a.speed + b.speed):
        return None
    rel = relative_series(a, b)
    mx = statistics.fmean(p.x for p in rel)
    my = statistics.fmean(p.y for p in rel)
    if mx > 0.0 and abs(my) < STATIONARY_LAT_TOL \
            and mx < cfg.stationary_gap_long:
        action = "in_front"
    elif mx < 0.0 and abs(my) < STATIONARY_LAT_TOL \
            and -mx < cfg.stationary_gap_long:
        action = "behind"
    elif my > 0.0 and abs(mx) < STATIONARY_LONG_TOL \
            and my < cfg.stationary_gap_lat:
        action = "left"
    elif my < 0.0 and abs(mx) < STATIONARY_LONG_TOL \
            and -my < cfg.stationary_gap_lat:
        action = "right"
    else:
        return None
    if interloper_between(a, b, others, CORRIDOR_HALF_WIDTH):
        return None
    mean_dist = statistics.fmean(distance_series(a, b))
    return Detection(action, -mean_dist,
                     {"rel_x_mean": mx, "rel_y_mean": my})


def detect_moving_side(a: WindowTrack, b: WindowTrack,
                       cfg: MinerConfig) -> Detection | None:
    """a travels beside b: parallel headings, constant side, no lead."""
    if any(s < cfg.v_moving for s in a.speed + b.speed):
        return None
    max_gap = math.radians(MOVING_SIDE_HEADING_MAX_DEG)
    if any(g > max_gap for g in heading_gap_series(a, b)):
        return None
    rel = relative_series(a, b)
    if any(abs(p.x) >= MOVING_SIDE_LONG_MAX for p in rel):
        return None
    ys = [p.y for p in rel]
    if all(y > 0.0 for y in ys):
        action = "moving_left_of"
    elif all(y < 0.0 for y in ys):
        action = "moving_right_of"
    else:
        return None
    mean_dist = statistics.fmean(distance_series(a, b))
    return Detection(action, -mean_dist,
                     {"rel_y_mean": statistics.fmean(ys)})


def _on_road(point: tuple[float, float], index: MapIndex) -> bool:
    return any(point_in_polygon(point, poly)
               for poly in index.map.drivable_area)


def _in_crosswalk(point: tuple[float, float], index: MapIndex) -> bool:
    return any(point_in_polygon(point, cw.polygon)
               for cw in index.map.crosswalks)


def _crosses_centerline(samples: list[tuple[float, float]],
                        index: MapIndex) -> bool:
    for lane in index.map.lanes:
        signs = set()
        for point in samples:
            d = project_to_polyline(point, lane.centerline).d
            if d > 0.0:
                signs.add(1)
            elif d < 0.0:
                signs.add(-1)
        if len(signs) == 2:
            return True
    return False


def detect_pedestrian_action(track: WindowTrack, index: MapIndex,
                             cfg: MinerConfig) -> list[Detection]:
    """Speed class (stand, walk, or run) plus road use (cross or
    jaywalk). Run beats walk when both hold; cross suppresses jaywalk."""
    speeds = track.speed
    out: list[Detection] = []
    if all(s < cfg.ped_stand for s in speeds):
        out.append(Detection("stand", -max(speeds),
                             {"v_max": max(speeds)}))
    elif _has_run(speeds, cfg):
        out.append(Detection("run", max(speeds), {"v_max": max(speeds)}))
    elif cfg.ped_stand <= statistics.median(speeds) < cfg.ped_run:
        out.append(Detection("walk", -statistics.pstdev(speeds),
                             {"v_median": statistics.median(speeds)}))

    path = track.path()
    on_road = [p for p in path if _on_road(p, index)]
    in_crosswalk = sum(1 for p in on_road if _in_crosswalk(p, index))
    hits_crosswalk = any(polyline_intersects_polygon(path, cw.polygon)
                         for cw in index.map.crosswalks)
    if hits_crosswalk and _crosses_centerline(on_road, index):
        out.append(Detection("cross", float(in_crosswalk),
                             {"crosswalk_samples": float(in_crosswalk)}))
    elif len(on_road) >= 2 and in_crosswalk == 0:
        out.append(Detection("jaywalk", float(len(on_road)),
                             {"road_samples": float(len(on_road))}))
    return out


def _has_run(speeds: tuple[float, ...], cfg: MinerConfig) -> bool:
    streak = 0
    for s in speeds:
        streak = streak + 1 if s >= cfg.ped_run else 0
        if streak >= RUN_MIN_FRAMES:
            return True
    return False


def detect_wait_ped_cross(vehicle: WindowTrack, ped: WindowTrack,
                          index: MapIndex,
                          cfg: MinerConfig) -> Detection | None:
    """Vehicle held stationary while a pedestrian moves through its lane
    corridor just ahead."""
    half = len(vehicle) // 2
    held = all(s < cfg.v_stationary for s in vehicle.speed[half:])
    if not held:
        longitudinal = detect_longitudinal(vehicle, cfg)
        if longitudinal is None or longitudinal.action != "stop":
            return None
    lane_coord = assign_lane(vehicle.pose(len(vehicle) - 1), index.map)
    if lane_coord is None:
        return None
    lane = index.lanes[lane_coord.lane_id]
    ahead: list[float] = []
    for i in range(len(ped)):
        proj = project_to_polyline(ped.point(i), lane.centerline)
        gap = proj.s - lane_coord.s
        if abs(proj.d) <= CORRIDOR_HALF_WIDTH \
                and 0.0 < gap <= cfg.wait_ped_lookahead:
            ahead.append(gap)
    if not ahead:
        return None
    return Detection("wait_ped_cross",
                     -statistics.fmean(vehicle.speed),
                     {"ped_ahead_m": min(ahead)})


def detect_reverse(track: WindowTrack, cfg: MinerConfig) -> Detection | None:
    """Sustained backward motion in the body frame. Derived from
    positions, so a track annotated with a flipped yaw while moving
    forward also reads as reversing."""
    body_vx = [math.cos(track.yaw[i]) * track.velocity[i][0]
               + math.sin(track.yaw[i]) * track.velocity[i][1]
               for i in range(len(track))]
    streak = 0
    hit = False
    for vx in body_vx:
        streak = streak + 1 if vx <= -cfg.v_stationary else 0
        if streak >= REVERSE_MIN_FRAMES:
            hit = True
            break
    if not hit:
        return None
    return Detection("reverse", -min(body_vx), {"vx_min": min(body_vx)})


def detect_ped_pair(a: WindowTrack, b: WindowTrack,
                    cfg: MinerConfig) -> Detection | None:
    """Two pedestrians moving together (alongside) or through each
    other (opposite)."""
    if any(s < cfg.ped_stand for s in a.speed + b.speed):
        return None
    gaps = heading_gap_series(a, b)
    dists = distance_series(a, b)
    alongside_max = math.radians(cfg.pair_heading_alongside_deg)
    opposite_min = math.radians(cfg.pair_heading_opposite_deg)
    if all(g <= alongside_max for g in gaps) \
            and all(d <= cfg.pair_dist for d in dists):
        mean_dist = statistics.fmean(dists)
        return Detection("walk_alongside", -mean_dist,
                         {"dist_mean": mean_dist})
    if all(g >= opposite_min for g in gaps) \
            and min(dists) <= cfg.pair_dist:
        return Detection("walk_opposite", -min(dists),
                         {"dist_min": min(dists)})
    return None
