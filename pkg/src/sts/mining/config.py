"""Thresholds steering every scenario detector.

All values are plain numbers in SI units (meters, m/s) except the angle
fields, which are degrees for readability in config files. A config file
is a JSON object overriding any subset of fields.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, fields


class MinerConfigError(ValueError):
    """Raised for malformed or inconsistent miner configuration."""


@dataclass(frozen=True)
class MinerConfig:
    window_frames: int = 6
    stride: int = 1
    v_stationary: float = 0.5
    v_moving: float = 1.0
    dv_accel: float = 3.0
    dv_decel: float = -3.0
    turn_min_deg: float = 60.0
    turn_max_deg: float = 135.0
    uturn_min_deg: float = 150.0
    lc_heading_max_deg: float = 30.0
    follow_gap_min: float = 2.0
    follow_gap_max: float = 25.0
    follow_dv: float = 2.0
    follow_gap_std: float = 2.0
    adjacent_lateral_min: float = 2.0
    adjacent_lateral_max: float = 6.0
    stationary_gap_long: float = 15.0
    stationary_gap_lat: float = 5.0
    ped_stand: float = 0.3
    ped_run: float = 2.5
    pair_heading_alongside_deg: float = 30.0
    pair_heading_opposite_deg: float = 150.0
    pair_dist: float = 3.0
    wait_ped_lookahead: float = 15.0
    ego_length: float = 4.08
    ego_width: float = 1.73
    ego_height: float = 1.56

    def __post_init__(self) -> None:
        if self.window_frames < 2:
            raise MinerConfigError("window_frames must be at least 2")
        if self.stride < 1:
            raise MinerConfigError("stride must be positive")
        if not self.v_stationary < self.v_moving:
            raise MinerConfigError("v_stationary must be below v_moving")
        if not self.turn_min_deg < self.turn_max_deg < self.uturn_min_deg + 45.0:
            raise MinerConfigError(
                "need turn_min < turn_max < uturn_min + 45 degrees"
            )
        for name in (
            "follow_gap_min", "follow_gap_max", "follow_dv", "follow_gap_std",
            "adjacent_lateral_min", "adjacent_lateral_max",
            "stationary_gap_long", "stationary_gap_lat", "pair_dist",
            "wait_ped_lookahead", "ego_length", "ego_width", "ego_height",
        ):
            if getattr(self, name) <= 0:
                raise MinerConfigError(f"{name} must be positive")


DEFAULT_MINER_CONFIG = MinerConfig()

_FIELD_NAMES = {f.name for f in fields(MinerConfig)}


def load_miner_config(document: str | bytes | dict) -> MinerConfig:
    """Build a config from JSON text or a dict; absent fields keep defaults."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise MinerConfigError(f"invalid config JSON: {exc}") from None
    if not isinstance(document, dict):
        raise MinerConfigError("miner config must be a JSON object")
    unknown = set(document) - _FIELD_NAMES
    if unknown:
        raise MinerConfigError(f"unknown config field '{sorted(unknown)[0]}'")
    return MinerConfig(**document)
