"""Spatial subsampling of over-represented scenario types.

Each instance gets a score combining occlusion, distance to the ego
vehicle, and a polar bin around the ego (8 sectors, 3 radial rings by
default). Types above the per-type cap are thinned by a deterministic
greedy pass that visits bins round-robin and keeps the most visible,
nearest instance each bin still holds, so the kept set stays spread
around the vehicle instead of clustering wherever mining was easiest.
"""
from __future__ import annotations

import math
import warnings
from bisect import bisect_right
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from sts.geometry import Pose2, relative_pose
from sts.mining import ScenarioInstance
from sts.scene import Scene


class SamplerError(ValueError):
    """Invalid configuration or scores that do not match instances."""


@dataclass(frozen=True)
class SamplingConfig:
    cap: int = 50
    sectors: int = 8
    ring_bounds: tuple[float, ...] = (0.0, 10.0, 25.0, 50.0)
    occlusion_weight: float = 1.0
    distance_weight: float = 0.5

    def __post_init__(self) -> None:
        if self.cap < 1:
            raise SamplerError(f"cap must be >= 1, got {self.cap}")
        if self.sectors < 1:
            raise SamplerError(f"sectors must be >= 1, got {self.sectors}")
        if len(self.ring_bounds) < 2 or any(
                a >= b for a, b in zip(self.ring_bounds,
                                       self.ring_bounds[1:])):
            raise SamplerError("ring bounds must be increasing, got "
                               f"{self.ring_bounds}")

    @property
    def rings(self) -> int:
        return len(self.ring_bounds) - 1


DEFAULT_SAMPLING_CONFIG = SamplingConfig()


class SampleScore(NamedTuple):
    scenario_id: str
    occlusion: float
    ego_distance: float
    bin: tuple[int, int]


def _sector_of(angle: float, sectors: int) -> int:
    """Sectors count counterclockwise from -180 degrees, so an agent
    dead astern lands in sector 0 and dead ahead in sectors/2."""
    width = math.tau / sectors
    return min(int((angle + math.pi) / width), sectors - 1)


def _ring_of(distance: float, bounds: tuple[float, ...]) -> int:
    ring = bisect_right(bounds, distance) - 1
    return max(0, min(ring, len(bounds) - 2))


def score_sample(instance: ScenarioInstance, scene: Scene,
                 cfg: SamplingConfig = DEFAULT_SAMPLING_CONFIG,
                 ) -> SampleScore:
    """Occlusion, ego distance, and polar bin for one instance.

    Ego-subject instances score (0, 0) in bin (0, 0): the ego cannot
    occlude itself and has no distance to itself. States lacking a
    visibility annotation count as fully visible, with a warning.
    """
    if not instance.agent_ids:
        return SampleScore(instance.scenario_id, 0.0, 0.0, (0, 0))

    tracks = {t.agent_id: t for t in scene.agents}
    ego_at = {st.frame: st for st in scene.ego}
    lo, hi = instance.frame_start, instance.frame_end

    min_visibility = 1.0
    min_distance = math.inf
    blank_states = 0
    first_rel: Pose2 | None = None
    for agent_id in instance.agent_ids:
        track = tracks.get(agent_id)
        if track is None:
            raise SamplerError(
                f"instance {instance.scenario_id}: agent '{agent_id}' "
                f"not in scene '{scene.scene_id}'")
        for st in track.states:
            if not lo <= st.frame <= hi:
                continue
            ego = ego_at[st.frame]
            min_distance = min(min_distance,
                               math.hypot(st.x - ego.x, st.y - ego.y))
            if st.visibility is None:
                blank_states += 1
            else:
                min_visibility = min(min_visibility, st.visibility)
            if agent_id == instance.agent_ids[0] and first_rel is None:
                first_rel = relative_pose(Pose2(st.x, st.y, st.yaw),
                                          Pose2(ego.x, ego.y, ego.yaw))
    if blank_states:
        warnings.warn(
            f"instance {instance.scenario_id}: {blank_states} window "
            "state(s) lack visibility; treating them as fully visible",
            stacklevel=2)
    if first_rel is None or math.isinf(min_distance):
        raise SamplerError(
            f"instance {instance.scenario_id}: no subject states inside "
            f"frames {lo}..{hi} of scene '{scene.scene_id}'")

    angle = math.atan2(first_rel.y, first_rel.x)
    distance0 = math.hypot(first_rel.x, first_rel.y)
    return SampleScore(
        scenario_id=instance.scenario_id,
        occlusion=1.0 - min_visibility,
        ego_distance=min_distance,
        bin=(_sector_of(angle, cfg.sectors),
             _ring_of(distance0, cfg.ring_bounds)),
    )


def score_scenes(instances: Iterable[ScenarioInstance],
                 scenes: Mapping[str, Scene],
                 cfg: SamplingConfig = DEFAULT_SAMPLING_CONFIG,
                 ) -> dict[str, SampleScore]:
    """Scores for many instances, keyed by scenario_id."""
    out: dict[str, SampleScore] = {}
    for inst in instances:
        scene = scenes.get(inst.scene_id)
        if scene is None:
            raise SamplerError(f"instance {inst.scenario_id}: scene "
                               f"'{inst.scene_id}' not provided")
        out[inst.scenario_id] = score_sample(inst, scene, cfg)
    return out


def _canonical(instances: Iterable[ScenarioInstance],
               ) -> list[ScenarioInstance]:
    return sorted(instances, key=lambda i: (i.type, i.scene_id,
                                            i.agent_ids, i.frame_start,
                                            i.scenario_id))


def subsample(instances: Iterable[ScenarioInstance],
              scores: Mapping[str, SampleScore] | Iterable[SampleScore],
              cfg: SamplingConfig = DEFAULT_SAMPLING_CONFIG,
              ) -> list[ScenarioInstance]:
    """Thin each over-cap type; returns the kept set in canonical order.

    Bins are visited round-robin in fixed (sector, ring) order; each
    visit keeps the cheapest remaining instance of that bin, where cost
    is occlusion_weight * occlusion + distance_weight * normalized
    distance. Output depends only on the input set, not its order.
    """
    if not isinstance(scores, Mapping):
        scores = {s.scenario_id: s for s in scores}
    by_type: dict[str, list[ScenarioInstance]] = defaultdict(list)
    for inst in instances:
        if inst.scenario_id not in scores:
            raise SamplerError(
                f"instance {inst.scenario_id} has no score")
        by_type[inst.type].append(inst)

    span = cfg.ring_bounds[-1]
    def cost(inst: ScenarioInstance) -> tuple[float, str]:
        s = scores[inst.scenario_id]
        return (cfg.occlusion_weight * s.occlusion
                + cfg.distance_weight * (s.ego_distance / span),
                inst.scenario_id)

    bin_order = [(sector, ring) for sector in range(cfg.sectors)
                 for ring in range(cfg.rings)]
    kept: list[ScenarioInstance] = []
    for type_name in sorted(by_type):
        group = by_type[type_name]
        if len(group) <= cfg.cap:
            kept.extend(group)
            continue
        buckets: dict[tuple[int, int], list[ScenarioInstance]] = \
            defaultdict(list)
        for inst in group:
            buckets[scores[inst.scenario_id].bin].append(inst)
        for bucket in buckets.values():
            bucket.sort(key=cost, reverse=True)
        taken = 0
        while taken < cfg.cap:
            for bin_key in bin_order:
                bucket = buckets.get(bin_key)
                if not bucket:
                    continue
                kept.append(bucket.pop())
                taken += 1
                if taken == cfg.cap:
                    break
    return _canonical(kept)


def sampling_report(instances: Iterable[ScenarioInstance],
                    kept: Iterable[ScenarioInstance],
                    ) -> dict[str, dict[str, int]]:
    """Per-type kept/dropped counts, JSON-ready."""
    total: dict[str, int] = defaultdict(int)
    for inst in instances:
        total[inst.type] += 1
    kept_counts: dict[str, int] = defaultdict(int)
    for inst in kept:
        kept_counts[inst.type] += 1
    return {name: {"kept": kept_counts[name],
                   "dropped": total[name] - kept_counts[name]}
            for name in sorted(total)}
