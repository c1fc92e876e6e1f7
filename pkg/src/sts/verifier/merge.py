"""Merging reviewer verdicts into the verified scenario set.

Acceptance takes a majority of the quorum; an attached negative
survives only when no reviewer marked it invalid, so a single objection
removes it. Everything here is pure: the store calls in with snapshots.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass, replace
from typing import Iterable

from sts.mining import ScenarioInstance
from sts.verifier.types import AgreementStats, MergePolicy, Review

DEFAULT_MERGE_POLICY = MergePolicy()


@dataclass(frozen=True)
class MergeResult:
    accepted: tuple[ScenarioInstance, ...]
    rejected: tuple[ScenarioInstance, ...]
    under_quorum: tuple[str, ...]
    unusable: tuple[str, ...]
    stats: AgreementStats

    def to_dict(self) -> dict:
        return {
            "accepted": [inst.to_dict() for inst in self.accepted],
            "rejected": [inst.scenario_id for inst in self.rejected],
            "under_quorum": list(self.under_quorum),
            "unusable": list(self.unusable),
            "stats": self.stats.to_dict(),
        }


def merge_reviews(instances: Iterable[ScenarioInstance],
                  reviews: Iterable[Review],
                  policy: MergePolicy = DEFAULT_MERGE_POLICY,
                  ) -> MergeResult:
    """Fold reviews into accepted/rejected sets plus agreement figures.

    Instances with fewer than quorum reviews are reported, not merged.
    Accepted instances carry only the negatives every reviewer left
    standing; those left with none are flagged unusable. When the same
    (scenario, reviewer) pair appears twice the later review wins,
    matching store resubmission semantics.
    """
    votes: dict[str, dict[str, Review]] = {}
    for review in reviews:
        votes.setdefault(review.scenario_id,
                         {})[review.reviewer] = review

    accepted: list[ScenarioInstance] = []
    rejected: list[ScenarioInstance] = []
    under_quorum: list[str] = []
    unusable: list[str] = []
    unanimous_positive = 0
    merged = 0
    negative_pairs = 0
    negative_disagreements = 0

    for inst in sorted(instances, key=lambda i: i.scenario_id):
        cast = list(votes.get(inst.scenario_id, {}).values())
        if len(cast) < policy.quorum:
            under_quorum.append(inst.scenario_id)
            continue
        merged += 1
        positives = sum(1 for r in cast if r.positive)
        if positives == len(cast):
            unanimous_positive += 1
        invalid_union = {name for r in cast for name in
                         r.invalid_negatives}
        for name in inst.negatives:
            negative_pairs += 1
            marks = sum(1 for r in cast
                        if name in r.invalid_negatives)
            if 0 < marks < len(cast):
                negative_disagreements += 1
        if positives > policy.quorum / 2:
            surviving = tuple(n for n in inst.negatives
                              if n not in invalid_union)
            accepted.append(replace(inst, negatives=surviving,
                                    status="accepted"))
            if not surviving:
                unusable.append(inst.scenario_id)
        else:
            rejected.append(inst.with_status("rejected"))

    stats = AgreementStats(
        merged=merged,
        unanimous_positive=unanimous_positive,
        positive_agreement_pct=(100.0 * unanimous_positive / merged
                                if merged else 0.0),
        negative_disagreement_pct=(
            100.0 * negative_disagreements / negative_pairs
            if negative_pairs else 0.0),
        under_quorum=len(under_quorum),
    )
    return MergeResult(accepted=tuple(accepted),
                       rejected=tuple(rejected),
                       under_quorum=tuple(under_quorum),
                       unusable=tuple(unusable),
                       stats=stats)


def _timing_row(elapsed_ms: list[int]) -> dict:
    if not elapsed_ms:
        return {"count": 0, "mean_ms": 0.0, "median_ms": 0.0,
                "total_hours": 0.0, "seconds_per_sample": 0.0}
    mean = statistics.fmean(elapsed_ms)
    return {
        "count": len(elapsed_ms),
        "mean_ms": mean,
        "median_ms": float(statistics.median(elapsed_ms)),
        "total_hours": sum(elapsed_ms) / 3_600_000.0,
        "seconds_per_sample": mean / 1000.0,
    }


def timing_report(reviews: Iterable[Review]) -> dict:
    """Per-reviewer and overall elapsed-time figures."""
    reviews = list(reviews)
    by_reviewer: dict[str, list[int]] = {}
    for review in reviews:
        by_reviewer.setdefault(review.reviewer,
                               []).append(review.elapsed_ms)
    return {
        "overall": _timing_row([r.elapsed_ms for r in reviews]),
        "reviewers": {name: _timing_row(times)
                      for name, times in sorted(by_reviewer.items())},
    }
