"""Human verification: persistent review store, merge rules, HTTP service."""

from sts.verifier.merge import (
    DEFAULT_MERGE_POLICY,
    MergeResult,
    merge_reviews,
    timing_report,
)
from sts.verifier.service import SceneDirectory, create_app, scene_excerpt
from sts.verifier.store import ReviewStore
from sts.verifier.types import (
    AgreementStats,
    ConflictError,
    MergePolicy,
    NotFoundError,
    Review,
    ReviewSession,
    StoreError,
    ValidationError,
    VerifierError,
)

__all__ = [
    "AgreementStats",
    "ConflictError",
    "DEFAULT_MERGE_POLICY",
    "MergePolicy",
    "MergeResult",
    "NotFoundError",
    "Review",
    "ReviewSession",
    "ReviewStore",
    "SceneDirectory",
    "StoreError",
    "ValidationError",
    "VerifierError",
    "create_app",
    "merge_reviews",
    "scene_excerpt",
    "timing_report",
]
