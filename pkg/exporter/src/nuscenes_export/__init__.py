"""nuScenes to scene-interchange exporter.

Reads a nuScenes installation through the official devkit and writes
one `.scene.json` document per scene: annotated key frames only, ego
poses, agent tracks with visibility, vector map layers clipped around
the ego route, and camera calibrations. The devkit is an optional
dependency; everything except the actual dataset access works without
it.
"""

from nuscenes_export.config import ExportConfig
from nuscenes_export.convert import (
    VISIBILITY_LEVELS,
    SceneBundle,
    bundle_to_document,
    write_document,
)
from nuscenes_export.export import ExportError, export_split

__all__ = [
    "ExportConfig",
    "ExportError",
    "SceneBundle",
    "VISIBILITY_LEVELS",
    "bundle_to_document",
    "export_split",
    "write_document",
]
