"""Scene interchange format: model, validation, serialization."""

from sts.scene.io import (
    SCENE_SUFFIX,
    SceneParseError,
    SceneValidationError,
    load_scene,
    parse_scene,
    save_scene,
    scene_from_dict,
    scene_to_dict,
    serialize_scene,
)
from sts.scene.model import (
    AGENT_CLASSES,
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
from sts.scene.transform import rename_agents, shift_timestamps, transform_scene
from sts.scene.validate import Violation, validate_scene

__all__ = [
    "AGENT_CLASSES",
    "SCENE_SUFFIX",
    "AgentSize",
    "AgentState",
    "AgentTrack",
    "Boundary",
    "CameraModel",
    "CameraPose",
    "Crosswalk",
    "EgoState",
    "FrameStamp",
    "Lane",
    "MapModel",
    "Scene",
    "SceneParseError",
    "SceneValidationError",
    "Violation",
    "load_scene",
    "parse_scene",
    "rename_agents",
    "save_scene",
    "scene_from_dict",
    "scene_to_dict",
    "serialize_scene",
    "shift_timestamps",
    "transform_scene",
    "validate_scene",
]
