"""Mine typed scenarios from trajectories and check against labels.

The catalog defines 43 scenario types in four categories, each with a
textual definition and a list of negatives (types that cannot co-occur
with it for the same subjects). The miner walks a scene and emits one
instance per detected type, subjects, and frame window. The synthetic
suite carries ground-truth labels, so we can grade the miner exactly.
"""

from collections import Counter

from sts.catalog import default_catalog
from sts.mining import mine_scene
from sts.synth import synth_suite


def main():
    catalog = default_catalog()
    mined_types = catalog.mined_entries()
    split = Counter(e.category for e in mined_types)
    print(f"catalog: {len(mined_types)} scenario types {dict(split)}")

    entry = catalog.entry("ego_overtake_agent")
    print(f"  {entry.name}: \"{entry.definition_text[:60]}...\"")
    print(f"  negatives: {entry.negatives[:4]}...")

    # Every suite scene is built to contain specific scenarios; the
    # labels say which. Mining should find exactly those.
    hits = misses = extras = 0
    per_type = Counter()
    for scene, expected in synth_suite(seed=0):
        found = {(i.type, i.agent_ids, i.frame_start, i.frame_end)
                 for i in mine_scene(scene)}
        wanted = {(l.type, tuple(l.agent_ids), l.frame_start, l.frame_end)
                  for l in expected}
        hits += len(found & wanted)
        misses += len(wanted - found)
        extras += len(found - wanted)
        per_type.update(t for t, *_ in found & wanted)

    print(f"suite: {hits} detected, {misses} missed, {extras} spurious")
    busiest = per_type.most_common(3)
    print(f"  most frequent: {busiest}")

    # A mined instance carries everything the review and question
    # stages need: window, subjects, views, and the pruned negatives.
    scene, _ = synth_suite(seed=0)[0]
    instance = mine_scene(scene)[0]
    print(f"example instance from {instance.scene_id}:")
    print(f"  type={instance.type} category={instance.category}")
    print(f"  frames {instance.frame_start}..{instance.frame_end} "
          f"agents={instance.agent_ids}")
    print(f"  negatives carried: {len(instance.negatives)}")


if __name__ == "__main__":
    main()
