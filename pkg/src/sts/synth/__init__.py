"""Synthetic scene generation with known scenario labels."""
from sts.synth.maps import (
    camera_rig,
    patch_map,
    single_lane_map,
    two_lane_map,
)
from sts.synth.scenes import (
    COMPOSITE_KINDS,
    CONTROL_KINDS,
    NEAR_MISS,
    SCENARIO_KINDS,
    ExpectedLabel,
    SynthError,
    SynthSpec,
    control_near_miss,
    spec_for,
    synth_scene,
    synth_suite,
)

__all__ = [
    "COMPOSITE_KINDS",
    "CONTROL_KINDS",
    "NEAR_MISS",
    "SCENARIO_KINDS",
    "ExpectedLabel",
    "SynthError",
    "SynthSpec",
    "camera_rig",
    "control_near_miss",
    "patch_map",
    "single_lane_map",
    "spec_for",
    "synth_scene",
    "synth_suite",
    "two_lane_map",
]
