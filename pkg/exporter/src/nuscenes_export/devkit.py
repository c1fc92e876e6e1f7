"""Adapter around the official nuScenes devkit.

Everything devkit-specific lives here: table walking, quaternion to
yaw, map API queries. The devkit import is deferred so the package
(and its tests) work without it; only an actual export needs it.
"""

from __future__ import annotations

import math
from pathlib import Path

from nuscenes_export.convert import SceneBundle

CAMERA_CHANNELS = (
    "CAM_FRONT",
    "CAM_FRONT_LEFT",
    "CAM_FRONT_RIGHT",
    "CAM_BACK",
    "CAM_BACK_LEFT",
    "CAM_BACK_RIGHT",
)

SPLIT_VERSIONS = {
    "train": "v1.0-trainval",
    "val": "v1.0-trainval",
    "test": "v1.0-test",
    "mini_train": "v1.0-mini",
    "mini_val": "v1.0-mini",
}

# How far apart (meters) route points may be when querying map records
# around the ego path; the union of per-point queries covers the route.
_ROUTE_QUERY_STEP_M = 25.0


class DevkitUnavailable(RuntimeError):
    """The nuscenes-devkit package is not importable."""


def version_for_split(split: str) -> str:
    if split not in SPLIT_VERSIONS:
        known = ", ".join(sorted(SPLIT_VERSIONS))
        raise ValueError(f"unknown split {split!r}; expected one of {known}")
    return SPLIT_VERSIONS[split]


def crossable_from_segments(segment_types: list[str]) -> bool:
    """Painted lines are treated as crossable unless any segment is a
    solid marking."""
    return not any("SOLID" in t.upper() for t in segment_types)


def require_devkit():
    try:
        from nuscenes import nuscenes as nuscenes_module
        from nuscenes.map_expansion import arcline_path_utils
        from nuscenes.map_expansion.map_api import NuScenesMap
        from nuscenes.utils import splits as splits_module
        from pyquaternion import Quaternion
    except ImportError as err:
        raise DevkitUnavailable(
            "the nuscenes-devkit package is required for exporting; "
            "install it with: pip install 'sts-nuscenes-export[nuscenes]'"
        ) from err
    return nuscenes_module, NuScenesMap, arcline_path_utils, \
        splits_module, Quaternion


def open_dataset(root: Path, version: str):
    nuscenes_module, *_ = require_devkit()
    return nuscenes_module.NuScenes(version=version, dataroot=str(root),
                                    verbose=False)


def open_map(root: Path, location: str):
    _, NuScenesMap, *_ = require_devkit()
    expansion = Path(root) / "maps" / "expansion" / f"{location}.json"
    if not expansion.is_file():
        raise FileNotFoundError(
            f"map expansion file {expansion} is missing; download the "
            "nuScenes map expansion pack and unpack it under "
            f"{Path(root) / 'maps' / 'expansion'}")
    return NuScenesMap(dataroot=str(root), map_name=location)


def split_scene_names(split: str) -> list[str]:
    *_, splits_module, _ = require_devkit()
    return list(splits_module.create_splits_scenes()[split])


def _yaw_of(rotation, Quaternion) -> float:
    return Quaternion(rotation).yaw_pitch_roll[0]


def _lane_records(nusc_map, tokens: set[str]) -> list[dict]:
    lanes = []
    from nuscenes.map_expansion import arcline_path_utils

    for token in sorted(tokens):
        arcline = nusc_map.get_arcline_path(token)
        centerline = [(p[0], p[1]) for p in
                      arcline_path_utils.discretize_lane(
                          arcline, resolution_meters=1.0)]
        if len(centerline) < 2:
            continue
        try:
            record = nusc_map.get("lane", token)
        except (KeyError, AssertionError):
            record = nusc_map.get("lane_connector", token)
        lane = {
            "lane_id": token,
            "centerline": centerline,
            "successors": nusc_map.get_outgoing_lane_ids(token),
        }
        for side in ("left", "right"):
            segments = record.get(f"{side}_lane_divider_segments") or []
            points = [(nusc_map.get("node", s["node_token"])["x"],
                       nusc_map.get("node", s["node_token"])["y"])
                      for s in segments]
            if len(points) >= 2:
                lane[f"{side}_polyline"] = points
                lane[f"{side}_crossable"] = crossable_from_segments(
                    [s.get("segment_type", "NIL") for s in segments])
        lanes.append(lane)
    return lanes


def _divider_records(nusc_map, layer: str, tokens: set[str],
                     crossable: bool) -> list[dict]:
    dividers = []
    for token in sorted(tokens):
        record = nusc_map.get(layer, token)
        if "line_token" in record and record["line_token"]:
            line = nusc_map.extract_line(record["line_token"])
            points = list(line.coords)
        else:
            points = [(nusc_map.get("node", s["node_token"])["x"],
                       nusc_map.get("node", s["node_token"])["y"])
                      for s in record.get("lane_divider_segments", [])]
        if len(points) >= 2:
            dividers.append({
                "id": f"{layer}:{token}",
                "polyline": [(p[0], p[1]) for p in points],
                "crossable": crossable,
            })
    return dividers


def _map_tokens_near_route(nusc_map, route, radius: float) -> dict:
    """Union of map record tokens within radius of sampled route
    points, keyed by layer."""
    layers = ("lane", "lane_connector", "lane_divider", "road_divider",
              "ped_crossing", "drivable_area")
    found: dict[str, set[str]] = {layer: set() for layer in layers}
    picked = [route[0]]
    for point in route[1:]:
        if math.dist(point, picked[-1]) >= _ROUTE_QUERY_STEP_M:
            picked.append(point)
    if route[-1] != picked[-1]:
        picked.append(route[-1])
    for x, y in picked:
        records = nusc_map.get_records_in_radius(x, y, radius, list(layers))
        for layer, tokens in records.items():
            found[layer].update(tokens)
    return found


def bundle_scene(nusc, nusc_map, scene_record: dict, Quaternion,
                 map_radius_m: float) -> SceneBundle:
    """Walk one scene's key frames into a neutral bundle."""
    timestamps: list[int] = []
    ego_poses: list[tuple[float, float, float]] = []
    tracks: dict[str, dict] = {}
    camera_data: dict[str, dict] = {}

    sample_token = scene_record["first_sample_token"]
    frame = 0
    while sample_token:
        sample = nusc.get("sample", sample_token)
        lidar = nusc.get("sample_data", sample["data"]["LIDAR_TOP"])
        pose = nusc.get("ego_pose", lidar["ego_pose_token"])
        timestamps.append(int(sample["timestamp"]))
        ego_poses.append((pose["translation"][0], pose["translation"][1],
                          _yaw_of(pose["rotation"], Quaternion)))

        for ann_token in sample["anns"]:
            ann = nusc.get("sample_annotation", ann_token)
            instance = ann["instance_token"]
            track = tracks.setdefault(instance, {
                "agent_id": instance,
                "category": ann["category_name"],
                # dataset size order is (width, length, height)
                "size": (ann["size"][1], ann["size"][0], ann["size"][2]),
                "states": [],
            })
            level = None
            if ann.get("visibility_token"):
                level = nusc.get("visibility",
                                 ann["visibility_token"])["level"]
            track["states"].append({
                "frame": frame,
                "x": ann["translation"][0],
                "y": ann["translation"][1],
                "yaw": _yaw_of(ann["rotation"], Quaternion),
                "visibility_level": level,
            })

        for channel in CAMERA_CHANNELS:
            if channel not in sample["data"]:
                continue
            data = nusc.get("sample_data", sample["data"][channel])
            calib = nusc.get("calibrated_sensor",
                             data["calibrated_sensor_token"])
            cam_pose = nusc.get("ego_pose", data["ego_pose_token"])
            entry = camera_data.setdefault(channel, {
                "name": channel,
                "fx": calib["camera_intrinsic"][0][0],
                "fy": calib["camera_intrinsic"][1][1],
                "cx": calib["camera_intrinsic"][0][2],
                "cy": calib["camera_intrinsic"][1][2],
                "width": data["width"],
                "height": data["height"],
                "poses": [],
            })
            ego_q = Quaternion(cam_pose["rotation"])
            cam_q = Quaternion(calib["rotation"])
            position = (ego_q.rotate(calib["translation"])
                        + cam_pose["translation"])
            axis = (ego_q * cam_q).rotate([0.0, 0.0, 1.0])
            entry["poses"].append({
                "x": position[0],
                "y": position[1],
                "z": position[2],
                "rotation": math.atan2(axis[1], axis[0]),
            })

        sample_token = sample["next"]
        frame += 1

    route = [(x, y) for x, y, _ in ego_poses]
    tokens = _map_tokens_near_route(nusc_map, route, map_radius_m)
    lanes = _lane_records(nusc_map,
                          tokens["lane"] | tokens["lane_connector"])
    dividers = (
        _divider_records(nusc_map, "road_divider",
                         tokens["road_divider"], crossable=False)
        + _divider_records(nusc_map, "lane_divider",
                           tokens["lane_divider"], crossable=True))

    crosswalks = []
    for token in sorted(tokens["ped_crossing"]):
        record = nusc_map.get("ped_crossing", token)
        polygon = nusc_map.extract_polygon(record["polygon_token"])
        points = list(polygon.exterior.coords)[:-1]
        if len(points) >= 3:
            crosswalks.append({"id": token, "polygon": points})

    drivable = []
    for token in sorted(tokens["drivable_area"]):
        record = nusc_map.get("drivable_area", token)
        for polygon_token in record["polygon_tokens"]:
            polygon = nusc_map.extract_polygon(polygon_token)
            points = list(polygon.exterior.coords)[:-1]
            if len(points) >= 3:
                drivable.append(points)

    # Cameras missing on some frame cannot satisfy the one-pose-per-
    # frame contract; drop them rather than fabricate poses.
    cameras = [cam for cam in camera_data.values()
               if len(cam["poses"]) == len(timestamps)]
    cameras.sort(key=lambda c: c["name"])

    return SceneBundle(
        scene_id=scene_record["name"],
        timestamps_us=timestamps,
        ego_poses=ego_poses,
        agents=list(tracks.values()),
        lanes=lanes,
        dividers=dividers,
        crosswalks=crosswalks,
        drivable_area=drivable,
        cameras=cameras,
    )
