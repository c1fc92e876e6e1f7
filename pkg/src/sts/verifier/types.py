"""Domain records for the human verification workflow."""
from __future__ import annotations

from dataclasses import dataclass


class VerifierError(Exception):
    """Base class for verification workflow failures."""


class NotFoundError(VerifierError):
    """A scenario or session id that is not in the store."""


class ConflictError(VerifierError):
    """An ingest that reuses a scenario id with a different payload."""


class StoreError(VerifierError):
    """A corrupt log file or a lock held by another writer."""


class ValidationError(VerifierError):
    """A request whose content violates a field constraint."""

    def __init__(self, message: str, field: str | None = None) -> None:
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class Review:
    """One reviewer's verdict on one scenario instance.

    positive confirms or rejects the mined occurrence itself;
    invalid_negatives lists attached negative types the reviewer judged
    to actually hold (so they must not be used as distractors).
    """

    scenario_id: str
    reviewer: str
    positive: bool
    invalid_negatives: tuple[str, ...] = ()
    elapsed_ms: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "invalid_negatives",
                           tuple(dict.fromkeys(self.invalid_negatives)))
        if not self.reviewer:
            raise ValidationError("reviewer must be non-empty",
                                  field="reviewer")
        if not self.scenario_id:
            raise ValidationError("scenario_id must be non-empty",
                                  field="scenario_id")
        if self.elapsed_ms < 0:
            raise ValidationError(
                f"elapsed_ms must be >= 0, got {self.elapsed_ms}",
                field="elapsed_ms")

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "reviewer": self.reviewer,
            "positive": self.positive,
            "invalid_negatives": list(self.invalid_negatives),
            "elapsed_ms": self.elapsed_ms,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Review":
        return cls(scenario_id=str(doc["scenario_id"]),
                   reviewer=str(doc["reviewer"]),
                   positive=bool(doc["positive"]),
                   invalid_negatives=tuple(
                       str(n) for n in doc["invalid_negatives"]),
                   elapsed_ms=int(doc["elapsed_ms"]))


@dataclass(frozen=True)
class ReviewSession:
    session_id: str
    reviewer: str
    created_at_us: int
    scenario_ids: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "scenario_ids",
                           tuple(self.scenario_ids))

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "reviewer": self.reviewer,
            "created_at_us": self.created_at_us,
            "scenario_ids": list(self.scenario_ids),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ReviewSession":
        return cls(session_id=str(doc["session_id"]),
                   reviewer=str(doc["reviewer"]),
                   created_at_us=int(doc["created_at_us"]),
                   scenario_ids=tuple(str(s)
                                      for s in doc["scenario_ids"]))


POSITIVE_RULES = ("majority",)
NEGATIVE_RULES = ("full_agreement",)


@dataclass(frozen=True)
class MergePolicy:
    positive_rule: str = "majority"
    negative_rule: str = "full_agreement"
    quorum: int = 3

    def __post_init__(self) -> None:
        if self.positive_rule not in POSITIVE_RULES:
            raise ValidationError(
                f"unknown positive_rule '{self.positive_rule}'",
                field="positive_rule")
        if self.negative_rule not in NEGATIVE_RULES:
            raise ValidationError(
                f"unknown negative_rule '{self.negative_rule}'",
                field="negative_rule")
        if self.quorum < 1:
            raise ValidationError(
                f"quorum must be >= 1, got {self.quorum}", field="quorum")

    def to_dict(self) -> dict:
        return {
            "positive_rule": self.positive_rule,
            "negative_rule": self.negative_rule,
            "quorum": self.quorum,
        }


@dataclass(frozen=True)
class AgreementStats:
    """Reviewer agreement over all instances that reached quorum."""

    merged: int = 0
    unanimous_positive: int = 0
    positive_agreement_pct: float = 0.0
    negative_disagreement_pct: float = 0.0
    under_quorum: int = 0

    def to_dict(self) -> dict:
        return {
            "merged": self.merged,
            "unanimous_positive": self.unanimous_positive,
            "positive_agreement_pct": self.positive_agreement_pct,
            "negative_disagreement_pct": self.negative_disagreement_pct,
            "under_quorum": self.under_quorum,
        }
