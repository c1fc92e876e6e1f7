"""Sliding-window scenario mining over one scene.

mine_scene runs every detector over every window, merges overlapping
firings of the same (type, subjects) onto the strongest window, prunes
each instance's negatives against everything else observed for the same
subjects, and returns records in a deterministic order.

Detections whose catalog entry is distractor-only still participate in
context pruning; they just never become instances themselves.
"""
from __future__ import annotations

import math
import statistics
import warnings
from typing import Iterable, NamedTuple

from sts.catalog import Catalog, default_catalog
from sts.geometry import Pose2, assign_views, relative_pose
from sts.mining.config import DEFAULT_MINER_CONFIG, MinerConfig
from sts.mining.detectors import (
    detect_follow_lead,
    detect_lane_change,
    detect_longitudinal,
    detect_moving_side,
    detect_overtake_pass,
    detect_ped_pair,
    detect_pedestrian_action,
    detect_reverse,
    detect_stationary_relation,
    detect_turn,
    detect_wait_ped_cross,
)
from sts.mining.features import (
    EGO_ID,
    MapIndex,
    Track,
    WindowTrack,
    agent_track,
    ego_track,
)
from sts.mining.instances import ScenarioInstance, make_instance
from sts.scene import Scene

PEDESTRIAN = "pedestrian"


class _Hit(NamedTuple):
    type: str
    agents: tuple[str, ...]
    frame_start: int
    frame_end: int
    strength: float
    metrics: dict[str, float]


def _subject_name(track: WindowTrack) -> str:
    return "ego" if track.is_ego else "agent"


def _pair_type(action: str, a: WindowTrack, b: WindowTrack) -> str:
    return f"{_subject_name(a)}_{action}_{_subject_name(b)}"


def _pair_agents(a: WindowTrack, b: WindowTrack) -> tuple[str, ...]:
    ids = []
    if not a.is_ego:
        ids.append(a.agent_id)
    if not b.is_ego:
        ids.append(b.agent_id)
    return tuple(ids)


_STATIONARY_ACTION = {
    "in_front": "stationary_in_front_of",
    "behind": "stationary_behind",
    "left": "stationary_left_of",
    "right": "stationary_right_of",
}


def _window_hits(ego_w: WindowTrack, vehicles: list[WindowTrack],
                 peds: list[WindowTrack], index: MapIndex,
                 cfg: MinerConfig) -> Iterable[_Hit]:
    t0 = ego_w.frame_start
    t1 = ego_w.frame_end

    def hit(type_name: str, agents: tuple[str, ...], det) -> _Hit:
        return _Hit(type_name, agents, t0, t1, det.strength, det.metrics)

    for track in [ego_w] + vehicles:
        prefix = _subject_name(track)
        agents = () if track.is_ego else (track.agent_id,)
        det = detect_longitudinal(track, cfg)
        if det is not None:
            yield hit(f"{prefix}_{det.action}", agents, det)
        det = detect_turn(track, cfg)
        if det is not None:
            yield hit(f"{prefix}_{det.action}", agents, det)
        det = detect_lane_change(track, index, cfg)
        if det is not None:
            yield hit(f"{prefix}_lane_change", agents, det)
        det = detect_reverse(track, cfg)
        if det is not None:
            yield hit(f"{prefix}_reverse", agents, det)

    for ped in peds:
        for det in detect_pedestrian_action(ped, index, cfg):
            yield hit(f"agent_{det.action}", (ped.agent_id,), det)

    everyone = [ego_w] + vehicles + peds
    for a in [ego_w] + vehicles:
        for b in [ego_w] + vehicles:
            if a is b:
                continue
            others = [w for w in everyone if w is not a and w is not b]
            det = detect_follow_lead(a, b, others, index, cfg)
            if det is not None:
                yield hit(_pair_type(det.action, a, b),
                          _pair_agents(a, b), det)
            det = detect_overtake_pass(a, b, cfg)
            if det is not None:
                yield hit(_pair_type(det.action, a, b),
                          _pair_agents(a, b), det)
            det = detect_stationary_relation(a, b, others, cfg)
            if det is not None:
                yield hit(_pair_type(_STATIONARY_ACTION[det.action], a, b),
                          _pair_agents(a, b), det)
            det = detect_moving_side(a, b, cfg)
            if det is not None:
                yield hit(_pair_type(det.action, a, b),
                          _pair_agents(a, b), det)

    for vehicle in [ego_w] + vehicles:
        for ped in peds:
            det = detect_wait_ped_cross(vehicle, ped, index, cfg)
            if det is None:
                continue
            yield hit(f"{_subject_name(vehicle)}_wait_ped_cross",
                      _pair_agents(vehicle, ped), det)

    for i, p in enumerate(peds):
        for q in peds[i + 1:]:
            first, second = sorted((p, q), key=lambda w: w.agent_id)
            det = detect_ped_pair(first, second, cfg)
            if det is not None:
                yield hit(f"agent_{det.action}",
                          (first.agent_id, second.agent_id), det)


def _merge_overlapping(hits: list[_Hit]) -> list[_Hit]:
    """Collapse overlapping windows of one (type, subjects) group onto
    the strongest window; ties go to the earliest."""
    groups: dict[tuple[str, tuple[str, ...]], list[_Hit]] = {}
    for h in hits:
        groups.setdefault((h.type, h.agents), []).append(h)
    merged: list[_Hit] = []
    for key in sorted(groups):
        chain: list[_Hit] = []
        chain_end = -1
        for h in sorted(groups[key], key=lambda h: h.frame_start):
            if chain and h.frame_start > chain_end:
                merged.append(max(chain,
                                  key=lambda c: (c.strength,
                                                 -c.frame_start)))
                chain = []
                chain_end = -1
            chain.append(h)
            chain_end = max(chain_end, h.frame_end)
        if chain:
            merged.append(max(chain,
                              key=lambda c: (c.strength, -c.frame_start)))
    return merged


def _subject_views(hit: _Hit, tracks: dict[str, Track],
                   scene: Scene) -> list[str | None]:
    cameras = scene.cameras or ()
    if not hit.agents:
        if not cameras:
            return []
        front = next((c.name for c in cameras if c.name == "CAM_FRONT"),
                     cameras[0].name)
        return [front] * (hit.frame_end - hit.frame_start + 1)
    track = tracks[hit.agents[0]]
    states = [track.state_at(f)
              for f in range(hit.frame_start, hit.frame_end + 1)]
    size = next(a.size for a in scene.agents
                if a.agent_id == hit.agents[0])
    return assign_views(states, size, cameras)


def _subject_metrics(hit: _Hit, tracks: dict[str, Track],
                     ego: Track) -> dict[str, float]:
    out = dict(hit.metrics)
    out["strength"] = hit.strength
    frames = range(hit.frame_start, hit.frame_end + 1)
    if hit.agents:
        track = tracks[hit.agents[0]]
        rel = []
        visibilities = []
        for f in frames:
            s = track.state_at(f)
            e = ego.state_at(f)
            rel.append(relative_pose(Pose2(s.x, s.y, s.yaw),
                                     Pose2(e.x, e.y, e.yaw)))
            visibilities.append(s.visibility)
        rel_x = statistics.fmean(p.x for p in rel)
        rel_y = statistics.fmean(p.y for p in rel)
        occlusion = 1.0 - min(1.0 if v is None else v
                              for v in visibilities)
    else:
        rel_x = rel_y = 0.0
        occlusion = 0.0
    out["rel_x"] = rel_x
    out["rel_y"] = rel_y
    out["ego_distance"] = math.hypot(rel_x, rel_y)
    out["occlusion"] = occlusion
    return out


def mine_scene(scene: Scene, catalog: Catalog | None = None,
               cfg: MinerConfig = DEFAULT_MINER_CONFIG,
               ) -> list[ScenarioInstance]:
    """Detect every catalog scenario type occurring in one scene."""
    if catalog is None:
        catalog = default_catalog()
    w = cfg.window_frames
    n = scene.frame_count
    if n < w:
        warnings.warn(f"scene '{scene.scene_id}' has {n} frames, "
                      f"shorter than the {w}-frame window; nothing mined",
                      stacklevel=2)
        return []

    index = MapIndex(scene.map)
    ego = ego_track(scene, cfg.ego_length, cfg.ego_width)
    tracks = {a.agent_id: agent_track(scene, a) for a in scene.agents}

    hits: list[_Hit] = []
    for t0 in range(0, n - w + 1, cfg.stride):
        t1 = t0 + w - 1
        ego_w = ego.window(t0, t1)
        covering = [t for t in tracks.values() if t.covers(t0, t1)]
        vehicles = [t.window(t0, t1) for t in covering
                    if t.agent_class != PEDESTRIAN]
        peds = [t.window(t0, t1) for t in covering
                if t.agent_class == PEDESTRIAN]
        hits.extend(_window_hits(ego_w, vehicles, peds, index, cfg))

    merged = _merge_overlapping(hits)

    context: dict[tuple[str, ...], set[str]] = {}
    for h in merged:
        context.setdefault(h.agents, set()).add(h.type)

    instances: list[ScenarioInstance] = []
    for h in merged:
        entry = catalog.entry(h.type)
        if entry.distractor_only:
            continue
        negatives = catalog.negatives_of(
            h.type, context=context[h.agents] - {h.type})
        instances.append(make_instance(
            scene_id=scene.scene_id,
            type_name=h.type,
            category=entry.category,
            frame_start=h.frame_start,
            frame_end=h.frame_end,
            agent_ids=h.agents,
            views=_subject_views(h, tracks, scene),
            negatives=negatives,
            metrics=_subject_metrics(h, tracks, ego),
        ))
    instances.sort(key=lambda i: (i.type, i.agent_ids, i.frame_start))
    return instances
