"""Scenario instance records and the JSON-lines database format.

Each mined occurrence of a scenario type is one immutable record with a
deterministic identifier derived from what it points at, so re-mining a
scene reproduces identical ids. The on-disk form is UTF-8 JSON lines,
one record per line, `mined.scenarios.jsonl` by convention.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Iterable, Iterator

STATUSES = ("mined", "accepted", "rejected")


class InstanceError(ValueError):
    """A scenario record that violates the interchange contract."""


def scenario_instance_id(scene_id: str, type_name: str,
                         agent_ids: Iterable[str],
                         frame_start: int, frame_end: int) -> str:
    """Stable 16-hex-digit identifier for one (scene, type, subjects,
    window) tuple."""
    key = (f"{scene_id}/{type_name}/{','.join(agent_ids)}/"
           f"{frame_start}-{frame_end}")
    return hashlib.sha256(key.encode("utf-8")).hexdigest()[:16]


def _q(value: float) -> float:
    return float(format(float(value), ".6f"))


@dataclass(frozen=True)
class ScenarioInstance:
    scenario_id: str
    scene_id: str
    type: str
    category: str
    frame_start: int
    frame_end: int
    agent_ids: tuple[str, ...]
    views: tuple[str | None, ...]
    negatives: tuple[str, ...]
    metrics: dict[str, float] = field(default_factory=dict)
    status: str = "mined"

    def __post_init__(self) -> None:
        object.__setattr__(self, "agent_ids", tuple(self.agent_ids))
        object.__setattr__(self, "views", tuple(self.views))
        object.__setattr__(self, "negatives", tuple(self.negatives))
        object.__setattr__(
            self, "metrics",
            {str(k): _q(v) for k, v in sorted(self.metrics.items())})
        if self.frame_end < self.frame_start:
            raise InstanceError(
                f"'{self.scenario_id}': frame_end {self.frame_end} before "
                f"frame_start {self.frame_start}")
        if self.status not in STATUSES:
            raise InstanceError(
                f"'{self.scenario_id}': unknown status '{self.status}'")

    @property
    def window_length(self) -> int:
        return self.frame_end - self.frame_start + 1

    def with_status(self, status: str) -> "ScenarioInstance":
        return replace(self, status=status)

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "scene_id": self.scene_id,
            "type": self.type,
            "category": self.category,
            "frame_start": self.frame_start,
            "frame_end": self.frame_end,
            "agent_ids": list(self.agent_ids),
            "views": list(self.views),
            "negatives": list(self.negatives),
            "metrics": dict(self.metrics),
            "status": self.status,
        }


def make_instance(scene_id: str, type_name: str, category: str,
                  frame_start: int, frame_end: int,
                  agent_ids: Iterable[str],
                  views: Iterable[str | None],
                  negatives: Iterable[str],
                  metrics: dict[str, float]) -> ScenarioInstance:
    agents = tuple(agent_ids)
    return ScenarioInstance(
        scenario_id=scenario_instance_id(scene_id, type_name, agents,
                                         frame_start, frame_end),
        scene_id=scene_id,
        type=type_name,
        category=category,
        frame_start=frame_start,
        frame_end=frame_end,
        agent_ids=agents,
        views=tuple(views),
        negatives=tuple(negatives),
        metrics=metrics,
    )


_FIELDS = ("scenario_id", "scene_id", "type", "category", "frame_start",
           "frame_end", "agent_ids", "views", "negatives", "metrics",
           "status")


def instance_from_dict(doc: dict) -> ScenarioInstance:
    if not isinstance(doc, dict):
        raise InstanceError(f"expected object, got {type(doc).__name__}")
    missing = [k for k in _FIELDS if k not in doc]
    if missing:
        raise InstanceError(f"missing field '{missing[0]}'")
    unexpected = [k for k in doc if k not in _FIELDS]
    if unexpected:
        raise InstanceError(f"unexpected field '{unexpected[0]}'")
    try:
        return ScenarioInstance(
            scenario_id=str(doc["scenario_id"]),
            scene_id=str(doc["scene_id"]),
            type=str(doc["type"]),
            category=str(doc["category"]),
            frame_start=int(doc["frame_start"]),
            frame_end=int(doc["frame_end"]),
            agent_ids=tuple(str(a) for a in doc["agent_ids"]),
            views=tuple(None if v is None else str(v)
                        for v in doc["views"]),
            negatives=tuple(str(n) for n in doc["negatives"]),
            metrics={str(k): float(v)
                     for k, v in doc["metrics"].items()},
            status=str(doc["status"]),
        )
    except (TypeError, AttributeError) as exc:
        raise InstanceError(f"malformed record: {exc}") from exc


def dump_instances(instances: Iterable[ScenarioInstance],
                   target: str | Path | IO[str]) -> int:
    """Write records as JSON lines. Returns the number written."""
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as handle:
            return dump_instances(instances, handle)
    count = 0
    for inst in instances:
        target.write(json.dumps(inst.to_dict(), ensure_ascii=False,
                                separators=(",", ":")))
        target.write("\n")
        count += 1
    return count


def load_instances(source: str | Path | IO[str]) -> list[ScenarioInstance]:
    """Read a JSON-lines scenario database; blank lines are skipped."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as handle:
            return load_instances(handle)
    out: list[ScenarioInstance] = []
    for lineno, line in enumerate(source, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"line {lineno}: invalid JSON: {exc}") \
                from exc
        try:
            out.append(instance_from_dict(doc))
        except InstanceError as exc:
            raise InstanceError(f"line {lineno}: {exc}") from exc
    return out


def iter_instances(source: str | Path) -> Iterator[ScenarioInstance]:
    with open(source, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                yield instance_from_dict(json.loads(text))
            except (json.JSONDecodeError, InstanceError) as exc:
                raise InstanceError(f"line {lineno}: {exc}") from exc
