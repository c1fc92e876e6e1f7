"""Cap over-represented scenario types without spatial bias.

Mining a large corpus produces thousands of instances of the common
types and a handful of the rare ones. Before human review, each type is
capped at a fixed count, but dropping instances naively would skew the
kept set toward close, unoccluded, dead-ahead subjects. The sampler
bins instances by bearing sector and range ring around the ego and
fills the cap round-robin across bins, preferring visible subjects.
"""

from collections import Counter

from sts.catalog import default_catalog
from sts.mining import make_instance
from sts.sampler import DEFAULT_SAMPLING_CONFIG, SampleScore, subsample


def main():
    cfg = DEFAULT_SAMPLING_CONFIG
    print(f"cap={cfg.cap} sectors={cfg.sectors} "
          f"rings={cfg.ring_bounds}")

    # Build an over-cap population of one type: 120 instances spread
    # over 8 bearing sectors and 3 range rings, occlusion cycling 0.0
    # to 0.9. On real data these scores come from score_scenes.
    entry = default_catalog().entry("agent_stop")
    instances, scores = [], {}
    for k in range(120):
        inst = make_instance(f"scene-{k:03d}", entry.name, entry.category,
                             0, 5, (f"a{k}",), (), entry.negatives, {})
        instances.append(inst)
        scores[inst.scenario_id] = SampleScore(
            scenario_id=inst.scenario_id,
            occlusion=(k % 10) / 10.0,
            ego_distance=float(k % 47) + 1.0,
            bin=(k % 8, (k // 8) % 3))

    kept = subsample(instances, scores)
    kept_ids = {i.scenario_id for i in kept}
    sectors = Counter(scores[s].bin[0] for s in kept_ids)
    print(f"kept {len(kept)} of {len(instances)}")
    print(f"per-sector counts: {dict(sorted(sectors.items()))}")

    kept_occ = [scores[s].occlusion for s in kept_ids]
    dropped_occ = [scores[i.scenario_id].occlusion for i in instances
                   if i.scenario_id not in kept_ids]
    print(f"mean occlusion kept:    {sum(kept_occ) / len(kept_occ):.3f}")
    print(f"mean occlusion dropped: "
          f"{sum(dropped_occ) / len(dropped_occ):.3f}")

    # Under-cap types pass through untouched.
    few = instances[:7]
    print(f"under-cap pass-through: kept {len(subsample(few, scores))} "
          f"of {len(few)}")


if __name__ == "__main__":
    main()
