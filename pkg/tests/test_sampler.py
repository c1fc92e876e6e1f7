"""Spatial subsampler: polar binning, scoring, and the greedy cap pass."""

import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import body_frame_offset, polar_bin
from sts.mining import make_instance
from sts.sampler import (
    DEFAULT_SAMPLING_CONFIG,
    SamplerError,
    SampleScore,
    SamplingConfig,
    sampling_report,
    score_sample,
    score_scenes,
    subsample,
)
from sts.scene import (
    AgentSize,
    AgentState,
    AgentTrack,
    EgoState,
    FrameStamp,
    MapModel,
    Scene,
)
from sts.synth import spec_for, synth_scene

N_FRAMES = 6
FRAME_US = 500_000
BOUNDS = DEFAULT_SAMPLING_CONFIG.ring_bounds


def agent_track(agent_id, positions, visibility=None):
    """Car track over the six fixture frames.

    positions is one (x, y) pair held for all frames, or a per-frame
    list; visibility is None, a constant, or a per-frame list.
    """
    if isinstance(positions[0], (int, float)):
        positions = [positions] * N_FRAMES
    if visibility is None or isinstance(visibility, (int, float)):
        visibility = [visibility] * N_FRAMES
    states = tuple(
        AgentState(frame=i, x=float(p[0]), y=float(p[1]), yaw=0.0,
                   speed=None, visibility=visibility[i])
        for i, p in enumerate(positions))
    return AgentTrack(agent_id=agent_id, agent_class="car",
                      size=AgentSize(4.5, 1.9, 1.7), states=states)


def spot_scene(tracks, ego_yaw=0.0, scene_id="sampler-scene"):
    """Parked ego at the origin watching the given tracks."""
    return Scene(
        scene_id=scene_id,
        frames=tuple(FrameStamp(i, i * FRAME_US) for i in range(N_FRAMES)),
        ego=tuple(EgoState(frame=i, x=0.0, y=0.0, yaw=ego_yaw, speed=0.0)
                  for i in range(N_FRAMES)),
        agents=tuple(tracks),
        map=MapModel(),
    )


def instance_for(scene_id, agent_ids, type_name="agent_stop",
                 frame_start=0, frame_end=N_FRAMES - 1):
    category = "Ego" if not agent_ids else "Agent"
    return make_instance(scene_id, type_name, category, frame_start,
                         frame_end, tuple(agent_ids), views=(),
                         negatives=(), metrics={})


class TestConfig:
    def test_defaults(self):
        cfg = DEFAULT_SAMPLING_CONFIG
        assert cfg.cap == 50
        assert cfg.sectors == 8
        assert cfg.ring_bounds == (0.0, 10.0, 25.0, 50.0)
        assert cfg.occlusion_weight == 1.0
        assert cfg.distance_weight == 0.5
        assert cfg.rings == 3

    def test_cap_must_be_positive(self):
        with pytest.raises(SamplerError, match="cap"):
            SamplingConfig(cap=0)

    def test_ring_bounds_must_increase(self):
        with pytest.raises(SamplerError, match="ring bounds"):
            SamplingConfig(ring_bounds=(0.0, 25.0, 10.0, 50.0))
        with pytest.raises(SamplerError, match="ring bounds"):
            SamplingConfig(ring_bounds=(0.0,))

    def test_sectors_must_be_positive(self):
        with pytest.raises(SamplerError, match="sectors"):
            SamplingConfig(sectors=0)


class TestScoreSample:
    def test_visible_agent_ahead(self):
        scene = spot_scene([agent_track("a0", (5.0, 0.0), 1.0)])
        score = score_sample(instance_for(scene.scene_id, ["a0"]), scene)
        assert score.occlusion == 0.0
        assert score.ego_distance == pytest.approx(5.0)
        assert score.bin[1] == 0
        assert score.bin == polar_bin(5.0, 0.0, 8, BOUNDS)

    def test_occlusion_from_worst_frame(self):
        vis = [1.0, 1.0, 0.3, 1.0, 1.0, 1.0]
        scene = spot_scene([agent_track("a0", (5.0, 0.0), vis)])
        score = score_sample(instance_for(scene.scene_id, ["a0"]), scene)
        assert score.occlusion == pytest.approx(0.7)

    def test_agent_astern_right(self):
        # -90 degrees sits two sectors up from the -180 origin, and
        # 30 m lands in the outermost default ring.
        scene = spot_scene([agent_track("a0", (0.0, -30.0), 1.0)])
        score = score_sample(instance_for(scene.scene_id, ["a0"]), scene)
        assert score.bin == (2, 2)
        assert score.bin == polar_bin(0.0, -30.0, 8, BOUNDS)

    def test_ego_instance_scores_zero(self):
        scene = spot_scene([])
        inst = instance_for(scene.scene_id, [], type_name="ego_stop")
        assert score_sample(inst, scene) == SampleScore(
            inst.scenario_id, 0.0, 0.0, (0, 0))

    def test_missing_visibility_warns(self):
        scene = spot_scene([agent_track("a0", (5.0, 0.0), None)])
        with pytest.warns(UserWarning, match="visibility"):
            score = score_sample(instance_for(scene.scene_id, ["a0"]),
                                 scene)
        assert score.occlusion == 0.0

    def test_pair_distance_uses_nearest_subject(self):
        scene = spot_scene([agent_track("a0", (0.0, -30.0), 1.0),
                            agent_track("a1", (3.0, 0.0), 1.0)])
        inst = instance_for(scene.scene_id, ["a0", "a1"])
        score = score_sample(inst, scene)
        assert score.ego_distance == pytest.approx(3.0)
        assert score.bin == (2, 2)

    def test_bin_anchored_at_first_window_frame(self):
        path = [(0.0, -30.0), (0.4, -24.0), (0.8, -18.0), (1.2, -12.0),
                (1.6, -6.0), (2.0, -3.0)]
        scene = spot_scene([agent_track("a0", path, 1.0)])
        score = score_sample(instance_for(scene.scene_id, ["a0"]), scene)
        assert score.bin == (2, 2)
        assert score.ego_distance == pytest.approx(math.hypot(2.0, -3.0))

    def test_bin_rotates_with_ego_frame(self):
        scene = spot_scene([agent_track("a0", (0.0, 10.0), 1.0)],
                           ego_yaw=math.pi / 2)
        score = score_sample(instance_for(scene.scene_id, ["a0"]), scene)
        rel = body_frame_offset(0.0, 0.0, math.pi / 2, 0.0, 10.0)
        assert score.bin == polar_bin(rel[0], rel[1], 8, BOUNDS)
        assert score.bin == (4, 1)

    def test_beyond_last_bound_clamps_to_last_ring(self):
        scene = spot_scene([agent_track("a0", (80.0, 0.0), 1.0)])
        score = score_sample(instance_for(scene.scene_id, ["a0"]), scene)
        assert score.bin == (4, 2)

    def test_unknown_agent_rejected(self):
        scene = spot_scene([agent_track("a0", (5.0, 0.0), 1.0)])
        with pytest.raises(SamplerError, match="'zz'"):
            score_sample(instance_for(scene.scene_id, ["zz"]), scene)

    def test_empty_window_rejected(self):
        track = agent_track("a0", (5.0, 0.0), 1.0)
        track = AgentTrack(agent_id="a0", agent_class="car",
                           size=AgentSize(4.5, 1.9, 1.7),
                           states=track.states[:2])
        scene = spot_scene([track])
        inst = instance_for(scene.scene_id, ["a0"], frame_start=3)
        with pytest.raises(SamplerError, match="no subject states"):
            score_sample(inst, scene)

    @given(sector=st.integers(0, 7),
           jitter=st.floats(-20.0, 20.0),
           distance=st.floats(0.5, 70.0).filter(
               lambda d: all(abs(d - b) > 0.01 for b in BOUNDS)))
    @settings(max_examples=60, deadline=None)
    def test_bin_matches_polar_oracle(self, sector, jitter, distance):
        deg = -180.0 + (sector + 0.5) * 45.0 + jitter
        x = distance * math.cos(math.radians(deg))
        y = distance * math.sin(math.radians(deg))
        scene = spot_scene([agent_track("a0", (x, y), 1.0)])
        score = score_sample(instance_for(scene.scene_id, ["a0"]), scene)
        assert score.bin == polar_bin(x, y, 8, BOUNDS)
        assert score.bin[0] == sector

    @given(vis=st.lists(st.floats(0.0, 1.0), min_size=N_FRAMES,
                        max_size=N_FRAMES))
    @settings(max_examples=40, deadline=None)
    def test_occlusion_is_one_minus_min_visibility(self, vis):
        scene = spot_scene([agent_track("a0", (5.0, 0.0), vis)])
        score = score_sample(instance_for(scene.scene_id, ["a0"]), scene)
        stored = [s.visibility for s in scene.agents[0].states]
        assert score.occlusion == pytest.approx(1.0 - min(stored),
                                                abs=1e-12)
        assert score.occlusion == pytest.approx(1.0 - min(vis), abs=1e-6)
        assert 0.0 <= score.occlusion <= 1.0


class TestScoreScenes:
    def test_scores_keyed_by_scenario_id(self):
        scene = spot_scene([agent_track("a0", (5.0, 0.0), 1.0),
                            agent_track("a1", (0.0, -30.0), 1.0)])
        insts = [instance_for(scene.scene_id, ["a0"]),
                 instance_for(scene.scene_id, ["a1"])]
        scores = score_scenes(insts, {scene.scene_id: scene})
        assert set(scores) == {i.scenario_id for i in insts}

    def test_missing_scene_rejected(self):
        inst = instance_for("elsewhere", ["a0"])
        with pytest.raises(SamplerError, match="'elsewhere'"):
            score_scenes([inst], {})


def scored_population(count, type_name="agent_stop", occlusion=None,
                      distance=None, sector=None, ring=None):
    """Instances plus hand-made scores, one per index."""
    instances = []
    scores = {}
    for k in range(count):
        inst = instance_for(f"scene-{k:03d}", [f"a{k}"],
                            type_name=type_name)
        instances.append(inst)
        scores[inst.scenario_id] = SampleScore(
            scenario_id=inst.scenario_id,
            occlusion=occlusion(k) if occlusion else 0.0,
            ego_distance=distance(k) if distance else 10.0,
            bin=(sector(k) if sector else k % 8,
                 ring(k) if ring else 0),
        )
    return instances, scores


class TestSubsample:
    def test_under_cap_passes_through(self):
        instances, scores = scored_population(40)
        kept = subsample(instances, scores)
        assert {i.scenario_id for i in kept} == \
            {i.scenario_id for i in instances}

    def test_uniform_spread_keeps_every_sector(self):
        instances, scores = scored_population(
            120, occlusion=lambda k: (k % 10) / 10.0,
            distance=lambda k: float(k % 47) + 1.0,
            ring=lambda k: (k // 8) % 3)
        kept = subsample(instances, scores)
        assert len(kept) == 50
        sectors = {scores[i.scenario_id].bin[0] for i in kept}
        assert sectors == set(range(8))

    def test_kept_mean_occlusion_not_above_dropped(self):
        instances, scores = scored_population(
            120, occlusion=lambda k: 0.9 if k < 60 else 0.1)
        kept = subsample(instances, scores)
        kept_ids = {i.scenario_id for i in kept}
        kept_occ = [scores[i].occlusion for i in kept_ids]
        drop_occ = [s.occlusion for sid, s in scores.items()
                    if sid not in kept_ids]
        assert len(kept) == 50 and len(drop_occ) == 70
        assert (sum(kept_occ) / len(kept_occ)
                <= sum(drop_occ) / len(drop_occ))

    def test_every_type_capped(self):
        all_instances = []
        all_scores = {}
        for type_name, count in (("agent_stop", 120),
                                 ("agent_walk", 50),
                                 ("agent_run", 7)):
            insts, scores = scored_population(count, type_name=type_name)
            all_instances.extend(insts)
            all_scores.update(scores)
        kept = subsample(all_instances, all_scores,
                         SamplingConfig(cap=20))
        counts = Counter(i.type for i in kept)
        assert counts == {"agent_stop": 20, "agent_walk": 20,
                          "agent_run": 7}

    def test_order_independent(self):
        rng = random.Random(20240814)
        instances, scores = scored_population(
            75, occlusion=lambda k: rng.random(),
            distance=lambda k: rng.uniform(0.0, 50.0),
            ring=lambda k: rng.randrange(3))
        baseline = subsample(instances, scores)
        for seed in range(5):
            shuffled = instances[:]
            random.Random(seed).shuffle(shuffled)
            assert subsample(shuffled, scores) == baseline

    def test_bin_keeps_least_occluded(self):
        instances, scores = scored_population(
            2, occlusion=lambda k: (0.8, 0.2)[k], sector=lambda k: 3)
        kept = subsample(instances, scores, SamplingConfig(cap=1))
        assert scores[kept[0].scenario_id].occlusion == 0.2

    def test_round_robin_covers_bins_before_repeating(self):
        instances, scores = scored_population(4, sector=lambda k: k % 2)
        kept = subsample(instances, scores, SamplingConfig(cap=2))
        assert {scores[i.scenario_id].bin[0] for i in kept} == {0, 1}

    def test_nearer_wins_at_equal_occlusion(self):
        instances, scores = scored_population(
            2, distance=lambda k: (45.0, 5.0)[k], sector=lambda k: 3)
        kept = subsample(instances, scores, SamplingConfig(cap=1))
        assert scores[kept[0].scenario_id].ego_distance == 5.0

    def test_weights_steer_the_choice(self):
        instances, scores = scored_population(
            2, occlusion=lambda k: (0.0, 0.9)[k],
            distance=lambda k: (45.0, 5.0)[k], sector=lambda k: 3)
        default_kept = subsample(instances, scores, SamplingConfig(cap=1))
        assert scores[default_kept[0].scenario_id].occlusion == 0.0
        distance_only = SamplingConfig(cap=1, occlusion_weight=0.0)
        kept = subsample(instances, scores, distance_only)
        assert scores[kept[0].scenario_id].ego_distance == 5.0

    def test_unscored_instance_rejected(self):
        instances, _ = scored_population(3)
        with pytest.raises(SamplerError, match="no score"):
            subsample(instances, {})


class TestReport:
    def test_kept_dropped_counts(self):
        stops, stop_scores = scored_population(120)
        runs, run_scores = scored_population(7, type_name="agent_run")
        instances = stops + runs
        kept = subsample(instances, {**stop_scores, **run_scores})
        report = sampling_report(instances, kept)
        assert report == {
            "agent_run": {"kept": 7, "dropped": 0},
            "agent_stop": {"kept": 50, "dropped": 70},
        }


class TestOrbitScene:
    """A ring of parked cars with fading visibility exercises the whole
    scoring path on real scene data."""

    def setup_method(self):
        self.scene, _ = synth_scene(spec_for("orbit", count=16,
                                             jitter=False))
        self.instances = [
            instance_for(self.scene.scene_id, [track.agent_id])
            for track in self.scene.agents
        ]
        self.scores = score_scenes(self.instances,
                                   {self.scene.scene_id: self.scene})

    def test_ring_of_cars_covers_every_sector(self):
        sectors = {s.bin[0] for s in self.scores.values()}
        assert sectors == set(range(8))
        assert {s.bin[1] for s in self.scores.values()} == {1}

    def test_occlusion_tracks_visibility_fades(self):
        seen = {round(s.occlusion, 6) for s in self.scores.values()}
        assert seen == {0.0, 0.2, 0.4, 0.6}

    def test_small_cap_still_spans_sectors(self):
        kept = subsample(self.instances, self.scores,
                         SamplingConfig(cap=8))
        assert len(kept) == 8
        sectors = {self.scores[i.scenario_id].bin[0] for i in kept}
        assert sectors == set(range(8))
