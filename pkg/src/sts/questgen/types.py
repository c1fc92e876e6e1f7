"""Question, agent reference, and benchmark document types."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from string import ascii_uppercase
from typing import Any, Mapping

MIN_OPTIONS = 2
MAX_OPTIONS = 8

FAMILIES = ("llm_trajectory", "vlm_images", "expert_multiview")

BENCHMARK_VERSION = "1"


class QuestgenError(ValueError):
    """Raised when an instance cannot become a well-formed question."""


TrajectoryPoint = tuple[float, float, float, float]


@dataclass(frozen=True)
class AgentRef:
    """One referenced agent with everything prompt renderers need.

    ``role`` is the agent's slot in the relation the question asks about.
    The ego implicitly occupies slot 1 in ego-to-agent relations, so the
    partner agent there carries role 2 even though it is the only entry.
    ``trajectory`` holds per frame (x, y, yaw, speed) in the ego body
    frame of the same frame, the way an ego-mounted sensor reports it.
    ``views`` and the pixel fields stay None when the scene has no
    cameras.
    """

    role: int
    agent_id: str
    agent_class: str
    trajectory: tuple[TrajectoryPoint, ...]
    views: tuple[str | None, ...] | None = None
    centers_px: tuple[tuple[float, float] | None, ...] | None = None
    boxes_px: tuple[tuple[int, int, int, int] | None, ...] | None = None
    referrals: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.role not in (1, 2):
            raise QuestgenError(f"agent role must be 1 or 2, got {self.role}")
        if not self.trajectory:
            raise QuestgenError(f"agent '{self.agent_id}' has an empty trajectory")
        for name in ("views", "centers_px", "boxes_px"):
            value = getattr(self, name)
            if value is not None and len(value) != len(self.trajectory):
                raise QuestgenError(
                    f"agent '{self.agent_id}': {name} has {len(value)} entries "
                    f"for {len(self.trajectory)} trajectory frames")

    def to_dict(self) -> dict[str, Any]:
        return {
            "role": self.role,
            "agent_id": self.agent_id,
            "agent_class": self.agent_class,
            "trajectory": [list(point) for point in self.trajectory],
            "views": list(self.views) if self.views is not None else None,
            "centers_px": ([list(c) if c else None for c in self.centers_px]
                           if self.centers_px is not None else None),
            "boxes_px": ([list(b) if b else None for b in self.boxes_px]
                         if self.boxes_px is not None else None),
            "referrals": dict(self.referrals),
        }

    @classmethod
    def from_dict(cls, record: Mapping[str, Any]) -> "AgentRef":
        return cls(
            role=record["role"],
            agent_id=record["agent_id"],
            agent_class=record["agent_class"],
            trajectory=tuple(tuple(p) for p in record["trajectory"]),
            views=(tuple(record["views"])
                   if record.get("views") is not None else None),
            centers_px=(tuple(tuple(c) if c else None
                              for c in record["centers_px"])
                        if record.get("centers_px") is not None else None),
            boxes_px=(tuple(tuple(b) if b else None
                            for b in record["boxes_px"])
                      if record.get("boxes_px") is not None else None),
            referrals=dict(record.get("referrals", {})),
        )


@dataclass(frozen=True)
class Option:
    letter: str
    text: str
    scenario_type: str

    def to_dict(self) -> dict[str, str]:
        return {"letter": self.letter, "text": self.text,
                "scenario_type": self.scenario_type}


@dataclass(frozen=True)
class Question:
    """One multiple-choice question with exactly one correct option."""

    question_id: str
    scenario_id: str
    scene_id: str
    category: str
    frame_start: int
    frame_end: int
    agents: tuple[AgentRef, ...]
    question_text: str
    options: tuple[Option, ...]
    correct_letter: str
    seed: int
    ego_trajectory: tuple[TrajectoryPoint, ...]
    duration_s: float
    views_available: bool

    def __post_init__(self) -> None:
        count = len(self.options)
        if not MIN_OPTIONS <= count <= MAX_OPTIONS:
            raise QuestgenError(
                f"question '{self.question_id}' has {count} options, "
                f"expected {MIN_OPTIONS}..{MAX_OPTIONS}")
        letters = tuple(o.letter for o in self.options)
        if letters != tuple(ascii_uppercase[:count]):
            raise QuestgenError(
                f"question '{self.question_id}' letters {letters} are not "
                f"consecutive from 'A'")
        if self.correct_letter not in letters:
            raise QuestgenError(
                f"question '{self.question_id}' answer "
                f"'{self.correct_letter}' is not one of its letters")
        texts = [o.text for o in self.options]
        if len(set(texts)) != count:
            raise QuestgenError(
                f"question '{self.question_id}' repeats an option text")
        types = [o.scenario_type for o in self.options]
        if len(set(types)) != count:
            raise QuestgenError(
                f"question '{self.question_id}' repeats a scenario type")
        window = self.frame_end - self.frame_start + 1
        if window < 1:
            raise QuestgenError(
                f"question '{self.question_id}' has an empty frame window")
        if len(self.ego_trajectory) != window:
            raise QuestgenError(
                f"question '{self.question_id}' ego trajectory covers "
                f"{len(self.ego_trajectory)} frames, window has {window}")
        for agent in self.agents:
            if len(agent.trajectory) != window:
                raise QuestgenError(
                    f"question '{self.question_id}' agent "
                    f"'{agent.agent_id}' trajectory covers "
                    f"{len(agent.trajectory)} frames, window has {window}")

    @property
    def type(self) -> str:
        """Scenario type of the correct option."""
        for option in self.options:
            if option.letter == self.correct_letter:
                return option.scenario_type
        raise AssertionError("unreachable: correct letter validated")

    @property
    def window_length(self) -> int:
        return self.frame_end - self.frame_start + 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "question_id": self.question_id,
            "scenario_id": self.scenario_id,
            "scene_id": self.scene_id,
            "category": self.category,
            "frame_start": self.frame_start,
            "frame_end": self.frame_end,
            "agents": [a.to_dict() for a in self.agents],
            "question_text": self.question_text,
            "options": [o.to_dict() for o in self.options],
            "correct_letter": self.correct_letter,
            "seed": self.seed,
            "ego_trajectory": [list(p) for p in self.ego_trajectory],
            "duration_s": self.duration_s,
            "views_available": self.views_available,
        }

    @classmethod
    def from_dict(cls, record: Mapping[str, Any]) -> "Question":
        return cls(
            question_id=record["question_id"],
            scenario_id=record["scenario_id"],
            scene_id=record["scene_id"],
            category=record["category"],
            frame_start=record["frame_start"],
            frame_end=record["frame_end"],
            agents=tuple(AgentRef.from_dict(a) for a in record["agents"]),
            question_text=record["question_text"],
            options=tuple(Option(**o) for o in record["options"]),
            correct_letter=record["correct_letter"],
            seed=record["seed"],
            ego_trajectory=tuple(tuple(p)
                                 for p in record["ego_trajectory"]),
            duration_s=record["duration_s"],
            views_available=record["views_available"],
        )


@dataclass(frozen=True)
class BenchmarkDoc:
    """A generated benchmark: questions plus provenance of the draw."""

    version: str
    catalog_version: str
    seed: int
    questions: tuple[Question, ...]
    letter_counts: Mapping[str, int]

    def __post_init__(self) -> None:
        total = sum(self.letter_counts.values())
        if total != len(self.questions):
            raise QuestgenError(
                f"letter counts sum to {total} for "
                f"{len(self.questions)} questions")

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "catalog_version": self.catalog_version,
            "seed": self.seed,
            "questions": [q.to_dict() for q in self.questions],
            "letter_counts": dict(self.letter_counts),
        }

    @classmethod
    def from_dict(cls, record: Mapping[str, Any]) -> "BenchmarkDoc":
        return cls(
            version=record["version"],
            catalog_version=record["catalog_version"],
            seed=record["seed"],
            questions=tuple(Question.from_dict(q)
                            for q in record["questions"]),
            letter_counts=dict(record["letter_counts"]),
        )


def save_benchmark(doc: BenchmarkDoc, path: str | Path) -> None:
    """Write a benchmark as one UTF-8 JSON document."""
    text = json.dumps(doc.to_dict(), indent=2, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_benchmark(path: str | Path) -> BenchmarkDoc:
    return BenchmarkDoc.from_dict(
        json.loads(Path(path).read_text(encoding="utf-8")))
