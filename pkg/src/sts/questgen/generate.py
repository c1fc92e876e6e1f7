"""Turns verified instances into balanced multiple-choice questions.

Every instance becomes one question whose distractors are drawn from the
instance's surviving negatives, so an option list never contains a
scenario that also holds in the window. Letter placement is uniform at
random under a per-question seed derived from the global seed and the
scenario id, which keeps each question stable when other instances are
added or removed.
"""
from __future__ import annotations

import hashlib
import random
import warnings
from pathlib import Path
from string import ascii_uppercase
from typing import Iterable, Mapping

from sts.catalog import (Catalog, CatalogEntry, DEFAULT_CATALOG_RESOURCE,
                         default_catalog)
from sts.geometry import Pose2, relative_pose
from sts.geometry.camera import assign_views, project_agent_to_camera
from sts.mining import ScenarioInstance
from sts.scene import AgentTrack, Scene

from .types import (BENCHMARK_VERSION, MAX_OPTIONS, MIN_OPTIONS, AgentRef,
                    BenchmarkDoc, Option, Question, QuestgenError,
                    TrajectoryPoint)

EGO_TOKEN = "ego"
AGENT_TOKENS = ("{AGENT1}", "{AGENT2}")

# Slot each referenced agent occupies in its relation. The ego holds
# slot 1 of an ego-to-agent relation, so the partner agent is number 2.
_ROLES_BY_CATEGORY = {"Ego": (), "Agent": (1,),
                      "EgoToAgent": (2,), "AgentToAgent": (1, 2)}

_MIN_FLOOR = 4


def _sub_seed(seed: int, scenario_id: str) -> int:
    digest = hashlib.sha256(f"{seed}:{scenario_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def default_catalog_version() -> str:
    return Path(DEFAULT_CATALOG_RESOURCE).name.removesuffix(".json")


def render_question_text(instance: ScenarioInstance,
                         catalog: Catalog | None = None) -> str:
    """Question sentence for an instance, with agent tokens kept.

    The returned text still carries the family-neutral {AGENT1} and
    {AGENT2} tokens; prompt rendering substitutes the per-family
    referral strings later.
    """
    catalog = catalog if catalog is not None else default_catalog()
    entry = catalog.entry(instance.type)
    supplied = len(instance.agent_ids)
    if supplied != entry.arity:
        raise QuestgenError(
            f"instance {instance.scenario_id}: type '{instance.type}' "
            f"references {entry.arity} agent(s), got {supplied}")
    return entry.question_template


def subject_token(entry: CatalogEntry) -> str:
    if entry.category in ("Ego", "EgoToAgent"):
        return EGO_TOKEN
    return AGENT_TOKENS[0]


def partner_token(entry: CatalogEntry) -> str:
    """Token for the other participant named by an entry's label."""
    if entry.category == "EgoToAgent":
        return AGENT_TOKENS[0]
    if entry.category == "AgentToAgent":
        return AGENT_TOKENS[1]
    if entry.category == "Agent":
        return EGO_TOKEN
    raise QuestgenError(
        f"type '{entry.name}' names a partner but category "
        f"'{entry.category}' has none")


def option_text(entry: CatalogEntry) -> str:
    """Family-neutral option sentence: subject token plus label."""
    label = entry.option_label
    if "{PARTNER}" in label:
        label = label.replace("{PARTNER}", partner_token(entry))
    return f"{subject_token(entry)} {label}"


def _window_states(track: AgentTrack, lo: int, hi: int,
                   scenario_id: str) -> list:
    by_frame = {s.frame: s for s in track.states}
    missing = [f for f in range(lo, hi + 1) if f not in by_frame]
    if missing:
        raise QuestgenError(
            f"instance {scenario_id}: agent '{track.agent_id}' has no "
            f"state for frame(s) {missing}")
    return [by_frame[f] for f in range(lo, hi + 1)]


def _ego_window(instance: ScenarioInstance, scene: Scene) -> list:
    by_frame = {s.frame: s for s in scene.ego}
    lo, hi = instance.frame_start, instance.frame_end
    missing = [f for f in range(lo, hi + 1) if f not in by_frame]
    if missing:
        raise QuestgenError(
            f"instance {instance.scenario_id}: ego has no state for "
            f"frame(s) {missing}")
    return [by_frame[f] for f in range(lo, hi + 1)]


def _sensor_trajectory(states, ego_states) -> tuple[TrajectoryPoint, ...]:
    """Agent poses relative to the ego pose of the same frame."""
    points = []
    for st, ego in zip(states, ego_states):
        rel = relative_pose(Pose2(st.x, st.y, st.yaw),
                            Pose2(ego.x, ego.y, ego.yaw))
        points.append((rel.x, rel.y, rel.yaw, st.speed))
    return tuple(points)


def _camera_columns(states, track: AgentTrack, scene: Scene, lo: int):
    """Per-frame view names, center pixels, and integer pixel boxes."""
    if not scene.cameras:
        return None, None, None
    by_name = {c.name: c for c in scene.cameras}
    names = assign_views(states, track.size, scene.cameras)
    views: list[str | None] = []
    centers: list[tuple[float, float] | None] = []
    boxes: list[tuple[int, int, int, int] | None] = []
    for offset, (state, name) in enumerate(zip(states, names)):
        projection = None
        if name is not None:
            projection = project_agent_to_camera(state, track.size,
                                                 by_name[name], lo + offset)
        if projection is None:
            views.append(None)
            centers.append(None)
            boxes.append(None)
            continue
        u, v = projection.center_px
        views.append(name)
        centers.append((round(u, 2), round(v, 2)))
        boxes.append(tuple(int(round(value))
                           for value in projection.box_px))
    return tuple(views), tuple(centers), tuple(boxes)


def _expert_referral(role: int, views, centers, scene: Scene) -> str | None:
    """Referral tag "<cN,VIEW,u,v>" with percent-of-image coordinates."""
    if views is None or centers is None:
        return None
    by_name = {c.name: c for c in scene.cameras}
    for name, center in zip(views, centers):
        if name is None or center is None:
            continue
        camera = by_name[name]
        u = round(100.0 * center[0] / camera.width)
        v = round(100.0 * center[1] / camera.height)
        return f"<c{role},{name},{u},{v}>"
    return None


def _agent_refs(instance: ScenarioInstance,
                scene: Scene) -> tuple[AgentRef, ...]:
    roles = _ROLES_BY_CATEGORY.get(instance.category)
    if roles is None:
        raise QuestgenError(
            f"instance {instance.scenario_id}: unknown category "
            f"'{instance.category}'")
    if len(roles) != len(instance.agent_ids):
        raise QuestgenError(
            f"instance {instance.scenario_id}: category "
            f"'{instance.category}' references {len(roles)} agent(s), "
            f"got {len(instance.agent_ids)}")
    tracks = {t.agent_id: t for t in scene.agents}
    ego_states = _ego_window(instance, scene)
    refs = []
    for role, agent_id in zip(roles, instance.agent_ids):
        track = tracks.get(agent_id)
        if track is None:
            raise QuestgenError(
                f"instance {instance.scenario_id}: agent '{agent_id}' "
                f"not in scene '{scene.scene_id}'")
        states = _window_states(track, instance.frame_start,
                                instance.frame_end, instance.scenario_id)
        views, centers, boxes = _camera_columns(states, track, scene,
                                                instance.frame_start)
        referrals = {"llm_trajectory": f"agent {role}",
                     "vlm_images": f"object {role}"}
        expert = _expert_referral(role, views, centers, scene)
        if expert is not None:
            referrals["expert_multiview"] = expert
        refs.append(AgentRef(
            role=role,
            agent_id=agent_id,
            agent_class=track.agent_class,
            trajectory=_sensor_trajectory(states, ego_states),
            views=views,
            centers_px=centers,
            boxes_px=boxes,
            referrals=referrals,
        ))
    return tuple(refs)


def _ego_trajectory(instance: ScenarioInstance,
                    scene: Scene) -> tuple[TrajectoryPoint, ...]:
    """Ego poses relative to its own pose at the first window frame."""
    states = _ego_window(instance, scene)
    anchor = states[0]
    return _sensor_trajectory(states, [anchor] * len(states))


def _duration_s(instance: ScenarioInstance, scene: Scene) -> float:
    stamps = {f.index: f.timestamp_us for f in scene.frames}
    lo, hi = instance.frame_start, instance.frame_end
    if lo not in stamps or hi not in stamps:
        raise QuestgenError(
            f"instance {instance.scenario_id}: scene '{scene.scene_id}' "
            f"has no timestamps for frames {lo}..{hi}")
    return (stamps[hi] - stamps[lo]) / 1e6


def build_question(instance: ScenarioInstance, scene: Scene,
                   catalog: Catalog, k: int, seed: int) -> Question | None:
    """One question for one instance, or None when it must be skipped.

    The option count drops to the size the negative pool supports, down
    to a floor of four (or the requested count when that is smaller);
    below the floor the instance is skipped with a warning.
    """
    pool = list(instance.negatives)
    count = min(k, len(pool) + 1)
    if count < min(_MIN_FLOOR, k):
        warnings.warn(
            f"skipping {instance.scenario_id}: {len(pool)} usable "
            f"negative(s) cannot fill {min(_MIN_FLOOR, k)} options",
            stacklevel=2)
        return None
    rng = random.Random(_sub_seed(seed, instance.scenario_id))
    ordered = rng.sample(pool, count - 1)
    ordered.insert(rng.randrange(count), instance.type)
    options = tuple(
        Option(letter=ascii_uppercase[i],
               text=option_text(catalog.entry(name)),
               scenario_type=name)
        for i, name in enumerate(ordered))
    correct = next(o.letter for o in options
                   if o.scenario_type == instance.type)
    return Question(
        question_id=f"q-{instance.scenario_id}",
        scenario_id=instance.scenario_id,
        scene_id=instance.scene_id,
        category=instance.category,
        frame_start=instance.frame_start,
        frame_end=instance.frame_end,
        agents=_agent_refs(instance, scene),
        question_text=render_question_text(instance, catalog),
        options=options,
        correct_letter=correct,
        seed=_sub_seed(seed, instance.scenario_id),
        ego_trajectory=_ego_trajectory(instance, scene),
        duration_s=_duration_s(instance, scene),
        views_available=bool(scene.cameras),
    )


def generate_questions(instances: Iterable[ScenarioInstance],
                       scenes: Mapping[str, Scene],
                       catalog: Catalog | None = None,
                       k: int = 5,
                       seed: int = 0,
                       catalog_version: str | None = None) -> BenchmarkDoc:
    """Benchmark for the given instances, deterministic in the seed.

    ``scenes`` maps scene ids to loaded scenes. Instances are processed
    in scenario-id order, so the document does not depend on input
    order. Instances whose negative pool cannot fill the option floor
    are skipped with a warning.
    """
    if not MIN_OPTIONS <= k <= MAX_OPTIONS:
        raise QuestgenError(
            f"option count must be {MIN_OPTIONS}..{MAX_OPTIONS}, got {k}")
    catalog = catalog if catalog is not None else default_catalog()
    questions = []
    for instance in sorted(instances, key=lambda i: i.scenario_id):
        scene = scenes.get(instance.scene_id)
        if scene is None:
            raise QuestgenError(
                f"instance {instance.scenario_id}: no scene "
                f"'{instance.scene_id}'")
        question = build_question(instance, scene, catalog, k, seed)
        if question is not None:
            questions.append(question)
    width = max((len(q.options) for q in questions), default=0)
    counts = {letter: 0 for letter in ascii_uppercase[:width]}
    for question in questions:
        counts[question.correct_letter] += 1
    return BenchmarkDoc(
        version=BENCHMARK_VERSION,
        catalog_version=(catalog_version if catalog_version is not None
                         else default_catalog_version()),
        seed=seed,
        questions=tuple(questions),
        letter_counts=counts,
    )
