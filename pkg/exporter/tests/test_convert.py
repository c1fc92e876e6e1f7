"""Bundle-to-document assembly and the canonical writer."""

import json
import math
import shutil
import subprocess

import pytest

from nuscenes_export.convert import (
    SceneBundle,
    bundle_to_document,
    class_for_category,
    near_route,
    normalize_yaw,
    render_document,
    speeds_from_positions,
    visibility_value,
    write_document,
)


def sample_bundle():
    """Three key frames of straight 10 m/s driving with two mappable
    agents, one unmappable object, and map elements on both sides of
    the clip radius."""
    far = [(500.0, 500.0), (550.0, 500.0)]
    return SceneBundle(
        scene_id="scene-0001",
        timestamps_us=[1_000_000, 1_500_000, 2_000_000],
        ego_poses=[(0.0, 0.0, 0.0), (5.0, 0.0, 0.0), (10.0, 0.0, 0.0)],
        agents=[
            {
                "agent_id": "car-1",
                "category": "vehicle.car",
                "size": (4.5, 2.0, 1.6),
                "states": [
                    {"frame": 1, "x": 13.0, "y": 3.5, "yaw": 0.0,
                     "visibility_level": "v80-100"},
                    {"frame": 0, "x": 8.0, "y": 3.5, "yaw": 0.0,
                     "visibility_level": "v80-100"},
                    {"frame": 1, "x": 99.0, "y": 99.0, "yaw": 0.0,
                     "visibility_level": "v80-100"},
                ],
            },
            {
                "agent_id": "ped-1",
                "category": "human.pedestrian.adult",
                "size": (0.6, 0.7, 1.8),
                "states": [
                    {"frame": 2, "x": 12.0, "y": -2.0,
                     "yaw": 3.0 * math.pi,
                     "visibility_level": "v0-40"},
                ],
            },
            {
                "agent_id": "cone-1",
                "category": "movable_object.trafficcone",
                "size": (0.3, 0.3, 0.5),
                "states": [{"frame": 0, "x": 1.0, "y": 1.0, "yaw": 0.0,
                            "visibility_level": None}],
            },
        ],
        lanes=[
            {
                "lane_id": "L1",
                "centerline": [(0.0, -10.0), (50.0, -10.0)],
                "successors": ["L9"],
                "left_polyline": [(0.0, -8.123456789), (50.0, -8.0)],
                "left_crossable": False,
            },
            {
                "lane_id": "L2",
                "centerline": far,
                "successors": [],
            },
        ],
        dividers=[
            {"id": "road_divider:rd1",
             "polyline": [(0.0, 2.0), (50.0, 2.0)], "crossable": False},
            {"id": "road_divider:rd2", "polyline": far,
             "crossable": False},
        ],
        crosswalks=[
            {"id": "cw1",
             "polygon": [(1.0, 1.0), (3.0, 1.0), (3.0, 3.0), (1.0, 3.0)]},
            {"id": "cw2", "polygon": [(500.0, 500.0), (503.0, 500.0),
                                      (503.0, 503.0)]},
        ],
        drivable_area=[
            [(-5.0, -15.0), (60.0, -15.0), (60.0, 15.0), (-5.0, 15.0)],
            [(500.0, 500.0), (510.0, 500.0), (510.0, 510.0)],
        ],
        cameras=[
            {
                "name": "CAM_FRONT",
                "fx": 1266.417203, "fy": 1266.417203,
                "cx": 816.2670197, "cy": 491.50706579,
                "width": 1600, "height": 900,
                "poses": [
                    {"x": 1.7, "y": 0.0, "z": 1.5, "rotation": 0.0},
                    {"x": 6.7, "y": 0.0, "z": 1.5, "rotation": 0.0},
                    {"x": 11.7, "y": 0.0, "z": 1.5, "rotation": 0.0},
                ],
            },
        ],
    )


class TestHelpers:
    def test_visibility_levels(self):
        assert visibility_value("v0-40") == 0.2
        assert visibility_value("v40-60") == 0.5
        assert visibility_value("v60-80") == 0.7
        assert visibility_value("v80-100") == 0.95
        assert visibility_value(None) is None
        assert visibility_value("") is None

    def test_unknown_visibility_level_rejected(self):
        with pytest.raises(ValueError, match="v50"):
            visibility_value("v50")

    @pytest.mark.parametrize("category,expected", [
        ("vehicle.car", "car"),
        ("vehicle.bus.bendy", "bus"),
        ("vehicle.construction", "construction_vehicle"),
        ("human.pedestrian.construction_worker", "pedestrian"),
        ("movable_object.trafficcone", None),
        ("animal", None),
        ("vehicle.carriage", None),
    ])
    def test_category_mapping(self, category, expected):
        assert class_for_category(category) == expected

    def test_speeds_constant_motion(self):
        speeds = speeds_from_positions(
            [(0.0, 0.0), (5.0, 0.0), (10.0, 0.0)],
            [0, 500_000, 1_000_000])
        assert speeds == [10.0, 10.0, 10.0]

    def test_speeds_single_point(self):
        assert speeds_from_positions([(1.0, 2.0)], [0]) == [None]

    def test_speeds_length_mismatch(self):
        with pytest.raises(ValueError):
            speeds_from_positions([(0.0, 0.0)], [0, 1])

    def test_normalize_yaw_wraps(self):
        assert normalize_yaw(3.0 * math.pi) == pytest.approx(math.pi)
        assert normalize_yaw(-math.pi) == pytest.approx(math.pi)
        assert normalize_yaw(0.5) == pytest.approx(0.5)

    def test_near_route(self):
        route = [(0.0, 0.0), (10.0, 0.0)]
        assert near_route([(12.0, 0.0)], route, 5.0)
        assert not near_route([(50.0, 50.0)], route, 5.0)


@pytest.fixture(scope="module")
def doc():
    return bundle_to_document(sample_bundle(), map_radius_m=80.0)


@pytest.fixture(scope="module")
def written(tmp_path_factory):
    out = tmp_path_factory.mktemp("docs")
    return write_document(bundle_to_document(sample_bundle()),
                          out / "scene-0001.scene.json")


class TestAssembly:
    def test_frames_reindexed(self, doc):
        assert doc["frames"] == [
            {"index": 0, "timestamp_us": 1_000_000},
            {"index": 1, "timestamp_us": 1_500_000},
            {"index": 2, "timestamp_us": 2_000_000},
        ]

    def test_ego_speed_derived(self, doc):
        assert [e["speed"] for e in doc["ego"]] == [10.0, 10.0, 10.0]
        assert [e["frame"] for e in doc["ego"]] == [0, 1, 2]

    def test_unmappable_agent_dropped(self, doc):
        assert [a["agent_id"] for a in doc["agents"]] == ["car-1", "ped-1"]

    def test_agent_states_sorted_and_deduped(self, doc):
        car = doc["agents"][0]
        assert [s["frame"] for s in car["states"]] == [0, 1]
        assert car["states"][1]["x"] == 13.0

    def test_visibility_mapped(self, doc):
        car, ped = doc["agents"]
        assert car["states"][0]["visibility"] == 0.95
        assert ped["states"][0]["visibility"] == 0.2

    def test_agent_yaw_normalized(self, doc):
        ped = doc["agents"][1]
        assert abs(ped["states"][0]["yaw"]) <= math.pi + 1e-6

    def test_single_state_has_no_speed(self, doc):
        ped = doc["agents"][1]
        assert "speed" not in ped["states"][0]

    def test_far_map_elements_dropped(self, doc):
        assert [l["lane_id"] for l in doc["map"]["lanes"]] == ["L1"]
        assert [c["id"] for c in doc["map"]["crosswalks"]] == ["cw1"]
        assert len(doc["map"]["drivable_area"]) == 1
        ids = [b["boundary_id"] for b in doc["map"]["boundaries"]]
        assert "road_divider:rd2" not in ids

    def test_lane_boundaries_synthesized(self, doc):
        lane = doc["map"]["lanes"][0]
        assert lane["left_boundary_id"] == "L1:left"
        assert lane["right_boundary_id"] == "L1:right"
        by_id = {b["boundary_id"]: b for b in doc["map"]["boundaries"]}
        assert by_id["L1:left"]["crossable"] is False
        assert by_id["L1:left"]["polyline"][0] == [0.0, -8.123457]
        # the missing right side falls back to a virtual crossable
        # boundary along the centerline
        assert by_id["L1:right"]["polyline"] == lane["centerline"]
        assert by_id["L1:right"]["crossable"] is True
        assert by_id["road_divider:rd1"]["crossable"] is False

    def test_cameras_rendered(self, doc):
        cam = doc["cameras"][0]
        assert cam["intrinsics"]["fx"] == 1266.417203
        assert cam["width"] == 1600
        assert len(cam["poses"]) == 3

    def test_floats_quantized(self, doc):
        rendered = render_document(doc).decode()
        for token in rendered.replace("{", " ").split(","):
            if "." in token and token.strip().replace("-", "").replace(
                    ".", "").isdigit():
                assert len(token.strip().split(".")[1]) == 6

    def test_empty_bundle_rejected(self):
        with pytest.raises(ValueError, match="key frames"):
            bundle_to_document(SceneBundle("empty", [], []))

    def test_pose_count_mismatch_rejected(self):
        with pytest.raises(ValueError, match="ego pose"):
            bundle_to_document(SceneBundle("bad", [0, 1],
                                           [(0.0, 0.0, 0.0)]))


class TestWriter:
    def test_render_is_deterministic(self):
        doc = bundle_to_document(sample_bundle())
        assert render_document(doc) == render_document(doc)
        assert render_document(doc).endswith(b"\n")

    def test_write_document(self, tmp_path):
        doc = bundle_to_document(sample_bundle())
        path = write_document(doc, tmp_path / "scene-0001.scene.json")
        assert path.read_bytes() == render_document(doc)
        assert json.loads(path.read_text())["scene_id"] == "scene-0001"


class TestInterchangeConformance:
    """The written artifact must satisfy the interchange toolchain."""

    def test_validator_accepts_document(self, written):
        if shutil.which("sts") is None:
            pytest.skip("sts command not installed")
        result = subprocess.run(
            ["sts", "validate", "--scenes", str(written.parent)],
            capture_output=True, text=True)
        assert result.returncode == 0, result.stdout + result.stderr

    def test_round_trip_identity(self, written):
        sts_scene = pytest.importorskip("sts.scene")
        data = written.read_bytes()
        scene = sts_scene.parse_scene(data)
        assert sts_scene.serialize_scene(scene) == data
