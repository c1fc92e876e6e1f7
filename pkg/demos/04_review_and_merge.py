"""Collect human verdicts and merge them by majority vote.

Each sampled instance goes to three reviewers who answer two questions:
is the scenario really happening (accept/reject), and are any of its
attached negatives actually occurring too (invalidate them). Positives
merge by majority; a negative survives only under full agreement. The
store is an append-only log, so a crashed session replays cleanly.
"""

import tempfile
from pathlib import Path

from sts.catalog import default_catalog
from sts.mining import make_instance
from sts.verifier import MergePolicy, Review, ReviewStore


def main():
    entry = default_catalog().entry("ego_overtake_agent")
    instances = [
        make_instance(f"scene-{k}", entry.name, entry.category, 0, 5,
                      ("a0",), (), entry.negatives, {})
        for k in range(3)
    ]
    clear, contested, doomed = (i.scenario_id for i in instances)

    with tempfile.TemporaryDirectory() as tmp:
        store = ReviewStore(Path(tmp) / "reviews.db")
        print(f"ingested {store.ingest(instances)} instances")

        # A reviewer opens a session and works through their queue.
        # Verdict scripts: everyone accepts the first instance, the
        # second gets two accepts and a reject, the third two rejects.
        # One reviewer also flags a negative of the contested instance
        # as invalid (it was visibly happening in the scene).
        vetoed = entry.negatives[0]
        scripts = {
            "ana": [(clear, True, ()), (contested, True, (vetoed,)),
                    (doomed, False, ())],
            "ben": [(clear, True, ()), (contested, True, ()),
                    (doomed, False, ())],
            "kim": [(clear, True, ()), (contested, False, ()),
                    (doomed, True, ())],
        }
        for reviewer, verdicts in scripts.items():
            store.create_session(reviewer)
            for scenario_id, positive, invalid in verdicts:
                store.submit_review(Review(scenario_id, reviewer,
                                           positive, invalid, 1400))
        print(f"reviews on record: {store.review_count}")

        result = store.merge(MergePolicy(quorum=3))
        accepted = {i.scenario_id: i for i in result.accepted}
        print(f"accepted: {sorted(accepted)}")
        print(f"rejected: {sorted(i.scenario_id for i in result.rejected)}")

        # The contested instance survived 2-1, but the vetoed negative
        # is gone: one reviewer saw it happen, so it can never serve as
        # a guaranteed-false distractor.
        merged = accepted[contested]
        print(f"negative '{vetoed}' kept: {vetoed in merged.negatives} "
              f"({len(merged.negatives)} of {len(entry.negatives)} remain)")

        stats = store.stats(MergePolicy(quorum=3))
        agreement = stats["agreement"]
        print(f"unanimous positives: {agreement['unanimous_positive']} "
              f"of {agreement['merged']} merged "
              f"({agreement['positive_agreement_pct']:.1f}%)")
        print(f"median review time: "
              f"{stats['overall']['median_ms'] / 1000:.1f}s")


if __name__ == "__main__":
    main()
