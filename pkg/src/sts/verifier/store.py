"""Embedded single-writer store backing the review service.

All state lives in one append-only JSON-lines log. Every mutation
appends one event and updates the in-memory view; opening the store
replays the log, so a crash loses at most a torn final line, which is
detected and truncated away. An exclusive file lock enforces the
single-writer rule across processes; a mutex serializes writers within
one process while reads run against immutable snapshots.
"""
from __future__ import annotations

import fcntl
import hashlib
import json
import os
import threading
import time
import warnings
from dataclasses import replace
from pathlib import Path
from typing import IO, Callable, Iterable

from sts.mining import ScenarioInstance, instance_from_dict, load_instances
from sts.verifier.merge import (
    DEFAULT_MERGE_POLICY,
    MergeResult,
    merge_reviews,
    timing_report,
)
from sts.verifier.types import (
    ConflictError,
    MergePolicy,
    NotFoundError,
    Review,
    ReviewSession,
    StoreError,
    ValidationError,
)


def _session_id(reviewer: str) -> str:
    digest = hashlib.sha256(reviewer.encode("utf-8")).hexdigest()
    return f"sess-{digest[:12]}"


class ReviewStore:
    """Scenario instances, sessions, and reviews in one log file."""

    def __init__(self, path: str | Path,
                 clock: Callable[[], float] = time.time) -> None:
        self._path = Path(path)
        self._clock = clock
        self._mutex = threading.Lock()
        self._instances: dict[str, ScenarioInstance] = {}
        self._status: dict[str, str] = {}
        self._reviews: dict[tuple[str, str], Review] = {}
        self._sessions: dict[str, ReviewSession] = {}
        self._handle: IO[str] | None = None
        self._open()

    # -- lifecycle ----------------------------------------------------

    def _open(self) -> None:
        self._path.parent.mkdir(parents=True, exist_ok=True)
        handle = open(self._path, "a+", encoding="utf-8")
        try:
            fcntl.flock(handle.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            handle.close()
            raise StoreError(
                f"store '{self._path}' is locked by another writer")
        self._handle = handle
        self._replay()

    def close(self) -> None:
        if self._handle is not None:
            fcntl.flock(self._handle.fileno(), fcntl.LOCK_UN)
            self._handle.close()
            self._handle = None

    def __enter__(self) -> "ReviewStore":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    # -- log plumbing -------------------------------------------------

    def _replay(self) -> None:
        self._handle.seek(0)
        raw = self._handle.read()
        offset = 0
        for lineno, line in enumerate(raw.split("\n"), start=1):
            terminated = offset + len(line) < len(raw)
            if not line.strip():
                offset += len(line) + 1
                continue
            try:
                event = json.loads(line)
            except json.JSONDecodeError as exc:
                if not terminated:
                    warnings.warn(
                        f"store '{self._path}': dropping torn final "
                        f"line {lineno}", stacklevel=2)
                    self._handle.seek(offset)
                    self._handle.truncate(offset)
                    return
                raise StoreError(
                    f"store '{self._path}' line {lineno}: invalid "
                    f"JSON: {exc}") from exc
            try:
                self._apply(event)
            except (KeyError, TypeError, ValueError) as exc:
                raise StoreError(
                    f"store '{self._path}' line {lineno}: {exc}") \
                    from exc
            offset += len(line) + 1
        if raw and not raw.endswith("\n"):
            # The final event parsed but lost its newline to a crash;
            # restore it so the next append starts a fresh line.
            self._handle.seek(0, os.SEEK_END)
            self._handle.write("\n")
            self._handle.flush()

    def _apply(self, event: dict) -> None:
        kind = event["event"]
        if kind == "instance":
            inst = instance_from_dict(event["record"])
            self._instances[inst.scenario_id] = inst
            self._status[inst.scenario_id] = "mined"
        elif kind == "review":
            review = Review.from_dict(event)
            self._reviews[(review.scenario_id,
                           review.reviewer)] = review
        elif kind == "session":
            session = ReviewSession.from_dict(event)
            self._sessions[session.reviewer] = session
        elif kind == "status":
            self._status[str(event["scenario_id"])] = \
                str(event["status"])
        else:
            raise ValueError(f"unknown event kind '{kind}'")

    def _append(self, event: dict) -> None:
        line = json.dumps(event, ensure_ascii=False,
                          separators=(",", ":"))
        self._handle.seek(0, os.SEEK_END)
        self._handle.write(line + "\n")
        self._handle.flush()
        os.fsync(self._handle.fileno())

    # -- ingest -------------------------------------------------------

    def ingest(self, instances: Iterable[ScenarioInstance]) -> int:
        """Store new instances with status mined; returns how many were
        new. Re-ingesting an identical record is a no-op; the same id
        with a different payload is a conflict."""
        with self._mutex:
            added = 0
            for inst in instances:
                canonical = (inst if inst.status == "mined"
                             else replace(inst, status="mined"))
                existing = self._instances.get(canonical.scenario_id)
                if existing is not None:
                    if existing != canonical:
                        raise ConflictError(
                            f"scenario '{canonical.scenario_id}' "
                            "already stored with a different payload")
                    continue
                self._append({"event": "instance",
                              "record": canonical.to_dict()})
                self._instances[canonical.scenario_id] = canonical
                self._status[canonical.scenario_id] = "mined"
                added += 1
            return added

    def ingest_file(self, path: str | Path) -> int:
        return self.ingest(load_instances(path))

    # -- sessions -----------------------------------------------------

    def create_session(self, reviewer: str,
                       scenario_ids: Iterable[str] | None = None,
                       ) -> ReviewSession:
        """Open (or return the already-open) session for a reviewer.

        With no explicit assignment the session covers every stored
        instance, in scenario_id order.
        """
        if not reviewer:
            raise ValidationError("reviewer must be non-empty",
                                  field="reviewer")
        with self._mutex:
            existing = self._sessions.get(reviewer)
            if existing is not None:
                return existing
            if scenario_ids is None:
                assigned = tuple(sorted(self._instances))
            else:
                assigned = tuple(scenario_ids)
                unknown = [s for s in assigned
                           if s not in self._instances]
                if unknown:
                    raise NotFoundError(
                        f"unknown scenario '{unknown[0]}'")
            session = ReviewSession(
                session_id=_session_id(reviewer),
                reviewer=reviewer,
                created_at_us=int(self._clock() * 1_000_000),
                scenario_ids=assigned,
            )
            self._append({"event": "session", **session.to_dict()})
            self._sessions[reviewer] = session
            return session

    def session_for(self, reviewer: str) -> ReviewSession | None:
        return self._sessions.get(reviewer)

    # -- reviews ------------------------------------------------------

    def submit_review(self, review: Review) -> Review:
        """Persist one verdict; resubmission by the same reviewer for
        the same scenario overwrites."""
        with self._mutex:
            inst = self._instances.get(review.scenario_id)
            if inst is None:
                raise NotFoundError(
                    f"unknown scenario '{review.scenario_id}'")
            if review.reviewer not in self._sessions:
                raise ValidationError(
                    f"reviewer '{review.reviewer}' has no open "
                    "session", field="reviewer")
            stray = [n for n in review.invalid_negatives
                     if n not in inst.negatives]
            if stray:
                raise ValidationError(
                    f"'{stray[0]}' is not a negative of scenario "
                    f"'{review.scenario_id}'",
                    field="invalid_negatives")
            self._append({"event": "review", **review.to_dict()})
            self._reviews[(review.scenario_id,
                           review.reviewer)] = review
            return review

    def reviews(self, scenario_id: str | None = None) -> list[Review]:
        found = [r for r in self._reviews.values()
                 if scenario_id is None
                 or r.scenario_id == scenario_id]
        return sorted(found, key=lambda r: (r.scenario_id, r.reviewer))

    @property
    def review_count(self) -> int:
        return len(self._reviews)

    # -- instances ----------------------------------------------------

    def instance(self, scenario_id: str) -> ScenarioInstance:
        inst = self._instances.get(scenario_id)
        if inst is None:
            raise NotFoundError(f"unknown scenario '{scenario_id}'")
        return self._with_status(inst)

    def instances(self, status: str | None = None,
                  pending_for: str | None = None,
                  ) -> list[ScenarioInstance]:
        """Stored instances in scenario_id order, optionally filtered
        to one status or to a reviewer's not-yet-reviewed assignment."""
        out = []
        assigned: set[str] | None = None
        if pending_for is not None:
            session = self._sessions.get(pending_for)
            assigned = set(session.scenario_ids) if session else set()
        for sid in sorted(self._instances):
            if status is not None and self._status[sid] != status:
                continue
            if assigned is not None and (
                    sid not in assigned
                    or (sid, pending_for) in self._reviews):
                continue
            out.append(self._with_status(self._instances[sid]))
        return out

    def _with_status(self, inst: ScenarioInstance) -> ScenarioInstance:
        status = self._status[inst.scenario_id]
        return inst if inst.status == status \
            else inst.with_status(status)

    def __len__(self) -> int:
        return len(self._instances)

    # -- merge and stats ----------------------------------------------

    def merge(self, policy: MergePolicy = DEFAULT_MERGE_POLICY,
              ) -> MergeResult:
        """Merge reviews under a policy and persist resulting statuses.

        Runs exclusively; the original instance payloads are never
        rewritten, so merging is idempotent as long as the reviews do
        not change.
        """
        with self._mutex:
            result = merge_reviews(self._instances.values(),
                                   self._reviews.values(), policy)
            outcome = {sid: "mined" for sid in result.under_quorum}
            outcome.update((i.scenario_id, "accepted")
                           for i in result.accepted)
            outcome.update((i.scenario_id, "rejected")
                           for i in result.rejected)
            for sid, status in sorted(outcome.items()):
                if self._status[sid] != status:
                    self._append({"event": "status",
                                  "scenario_id": sid,
                                  "status": status})
                    self._status[sid] = status
            return result

    def stats(self, policy: MergePolicy = DEFAULT_MERGE_POLICY) -> dict:
        """Timing and agreement report; read-only."""
        reviews = list(self._reviews.values())
        agreement = merge_reviews(self._instances.values(), reviews,
                                  policy).stats
        report = timing_report(reviews)
        report["reviews"] = len(reviews)
        report["instances"] = len(self._instances)
        report["agreement"] = agreement.to_dict()
        return report
