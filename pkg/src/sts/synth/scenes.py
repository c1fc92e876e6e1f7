"""Labeled synthetic scenes with closed-form maneuvers.

One builder per scenario type constructs a 6-frame scene at 2 Hz whose
trajectories satisfy exactly the intended detector, plus ten
near-threshold negative controls placed at least 20 percent outside the
default thresholds, plus a few composite fixtures (convoy, interloper,
orbit). Every scene is rigidly jittered by a seeded transform before it
leaves, so detectors are always exercised off-axis.

Expected labels name the scenario type, the subject agent ids, and the
inclusive frame window.
"""
from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from sts.scene import (
    AgentSize,
    AgentState,
    AgentTrack,
    EgoState,
    FrameStamp,
    MapModel,
    Scene,
    transform_scene,
)
from sts.synth.maps import (
    camera_rig,
    parallel_lane_map,
    patch_map,
    single_lane_map,
    two_lane_map,
)

N_FRAMES = 6
DT = 0.5
FRAME_US = 500_000

CAR = AgentSize(length=4.5, width=1.9, height=1.7)
PED = AgentSize(length=0.6, width=0.6, height=1.8)

_LAST = N_FRAMES - 1


class SynthError(ValueError):
    """Unknown kind or malformed parameters."""


class ExpectedLabel(NamedTuple):
    type: str
    agent_ids: tuple[str, ...]
    frame_start: int
    frame_end: int


@dataclass(frozen=True)
class SynthSpec:
    kind: str
    params: dict = field(default_factory=dict)
    expected: tuple[ExpectedLabel, ...] = ()


class _AgentSpec(NamedTuple):
    agent_id: str
    agent_class: str
    size: AgentSize
    states: list[tuple[float, float, float, float]]
    visibility: tuple[float, ...] | None = None


class _Built(NamedTuple):
    ego: list[tuple[float, float, float, float]]
    agents: list[_AgentSpec]
    map: MapModel
    expected: list[ExpectedLabel]


def _label(type_name: str, *agent_ids: str) -> ExpectedLabel:
    return ExpectedLabel(type_name, tuple(agent_ids), 0, _LAST)


def _cumulative(speeds: list[float]) -> list[float]:
    out = [0.0]
    for a, b in zip(speeds, speeds[1:]):
        out.append(out[-1] + (a + b) / 2.0 * DT)
    return out


def _straight(speeds: list[float], start: tuple[float, float] = (0.0, 0.0),
              heading: float = 0.0,
              backward: bool = False) -> list[tuple[float, float, float, float]]:
    """Constant-heading profile; positions integrate the speed
    trapezoidally. backward moves against the heading (reversing)."""
    sign = -1.0 if backward else 1.0
    c, s = math.cos(heading), math.sin(heading)
    return [(start[0] + sign * c * d, start[1] + sign * s * d,
             heading, v)
            for v, d in zip(speeds, _cumulative(speeds))]


def _parked(x: float, y: float,
            heading: float = 0.0) -> list[tuple[float, float, float, float]]:
    return [(x, y, heading, 0.0)] * N_FRAMES


def _arc(speed: float, total_deg: float,
         start: tuple[float, float] = (0.0, 0.0),
         heading0: float = 0.0) -> list[tuple[float, float, float, float]]:
    """Constant-speed circular arc sweeping total_deg (signed, left
    positive) over the scene."""
    step = math.radians(total_deg) / _LAST
    radius = speed * DT / step
    cx = start[0] - radius * math.sin(heading0)
    cy = start[1] + radius * math.cos(heading0)
    out = []
    for i in range(N_FRAMES):
        angle = heading0 + step * i
        out.append((cx + radius * math.sin(angle),
                    cy - radius * math.cos(angle),
                    _wrap(angle), speed))
    return out


def _wrap(angle: float) -> float:
    wrapped = math.remainder(angle, math.tau)
    return math.pi if wrapped == -math.pi else wrapped


def _sinusoid_lane_change(speed_x: float = 8.0,
                          shift: float = 3.5) -> list[tuple[float, float, float, float]]:
    """Smooth lateral shift of one lane width; heading peaks around 15
    degrees, well under the lane-change heading cap."""
    out = []
    omega = math.pi / (_LAST * DT)
    for i in range(N_FRAMES):
        t = i * DT
        y = shift * (1.0 - math.cos(omega * t)) / 2.0
        vy = shift * omega * math.sin(omega * t) / 2.0
        out.append((speed_x * t, y, math.atan2(vy, speed_x),
                    math.hypot(speed_x, vy)))
    return out


_FAR_EGO = (0.0, -30.0)

_BUILDERS: dict[str, Callable[[dict], _Built]] = {}


def _builder(kind: str):
    def register(fn: Callable[[dict], _Built]):
        _BUILDERS[kind] = fn
        return fn
    return register


def _car(agent_id: str,
         states: list[tuple[float, float, float, float]]) -> _AgentSpec:
    return _AgentSpec(agent_id, "car", CAR, states)


def _ped(agent_id: str,
         states: list[tuple[float, float, float, float]]) -> _AgentSpec:
    return _AgentSpec(agent_id, "pedestrian", PED, states)


# -- ego maneuvers ----------------------------------------------------

STOP_PROFILE = [8.0, 6.0, 4.0, 2.0, 0.3, 0.1]
DECEL_PROFILE = [10.0, 9.0, 8.0, 7.0, 6.5, 6.0]
ACCEL_PROFILE = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0]


@_builder("ego_stop")
def _(params: dict) -> _Built:
    return _Built(_straight(STOP_PROFILE), [], single_lane_map(),
                  [_label("ego_stop")])


@_builder("ego_decelerate")
def _(params: dict) -> _Built:
    return _Built(_straight(DECEL_PROFILE), [], single_lane_map(),
                  [_label("ego_decelerate")])


@_builder("ego_accelerate")
def _(params: dict) -> _Built:
    return _Built(_straight(ACCEL_PROFILE), [], single_lane_map(),
                  [_label("ego_accelerate")])


@_builder("ego_left_turn")
def _(params: dict) -> _Built:
    return _Built(_arc(5.0, 90.0), [], patch_map(-20, -20, 20, 20),
                  [_label("ego_left_turn")])


@_builder("ego_right_turn")
def _(params: dict) -> _Built:
    return _Built(_arc(5.0, -90.0), [], patch_map(-20, -20, 20, 20),
                  [_label("ego_right_turn")])


@_builder("ego_lane_change")
def _(params: dict) -> _Built:
    return _Built(_sinusoid_lane_change(), [], two_lane_map(),
                  [_label("ego_lane_change")])


# -- solo agent maneuvers ---------------------------------------------

def _solo_vehicle(states: list[tuple[float, float, float, float]],
                  map_model: MapModel, *labels: str) -> _Built:
    return _Built(_parked(*_FAR_EGO), [_car("a0", states)], map_model,
                  [_label(name, "a0") for name in labels])


@_builder("agent_stop")
def _(params: dict) -> _Built:
    return _solo_vehicle(_straight(STOP_PROFILE), single_lane_map(),
                         "agent_stop")


@_builder("agent_decelerate_control")
def _(params: dict) -> _Built:
    # agent_decelerate is distractor-only: it must be observed (for
    # context pruning) but never emitted, so its scene expects nothing.
    return _Built(_parked(*_FAR_EGO),
                  [_car("a0", _straight(DECEL_PROFILE))],
                  single_lane_map(), [])


@_builder("agent_accelerate")
def _(params: dict) -> _Built:
    return _solo_vehicle(_straight(ACCEL_PROFILE), single_lane_map(),
                         "agent_accelerate")


@_builder("agent_left_turn")
def _(params: dict) -> _Built:
    return _solo_vehicle(_arc(5.0, 90.0), patch_map(-20, -20, 20, 20),
                         "agent_left_turn")


@_builder("agent_right_turn")
def _(params: dict) -> _Built:
    return _solo_vehicle(_arc(5.0, -90.0), patch_map(-20, -20, 20, 20),
                         "agent_right_turn")


@_builder("agent_u_turn")
def _(params: dict) -> _Built:
    return _solo_vehicle(_arc(4.0, 180.0), patch_map(-20, -20, 20, 20),
                         "agent_u_turn")


@_builder("agent_lane_change")
def _(params: dict) -> _Built:
    return _solo_vehicle(_sinusoid_lane_change(), two_lane_map(),
                         "agent_lane_change")


@_builder("agent_reverse")
def _(params: dict) -> _Built:
    states = _straight([1.0] * N_FRAMES, start=(10.0, 0.0), backward=True)
    return _solo_vehicle(states, patch_map(-20, -20, 20, 20),
                         "agent_reverse")


# -- pedestrians ------------------------------------------------------

_OFF_ROAD = patch_map(-60, 20, 60, 30)


def _solo_ped(states: list[tuple[float, float, float, float]],
              map_model: MapModel, *labels: str) -> _Built:
    return _Built(_parked(*_FAR_EGO), [_ped("p0", states)], map_model,
                  [_label(name, "p0") for name in labels])


@_builder("agent_stand")
def _(params: dict) -> _Built:
    return _solo_ped(_parked(0.0, 0.0), _OFF_ROAD, "agent_stand")


@_builder("agent_walk")
def _(params: dict) -> _Built:
    return _solo_ped(_straight([1.4] * N_FRAMES), _OFF_ROAD, "agent_walk")


@_builder("agent_run")
def _(params: dict) -> _Built:
    return _solo_ped(_straight([3.0] * N_FRAMES), _OFF_ROAD,
                     "agent_run", )


def _crossing_ped(x: float) -> list[tuple[float, float, float, float]]:
    return _straight([1.4] * N_FRAMES, start=(x, -2.2),
                     heading=math.pi / 2)


@_builder("agent_cross")
def _(params: dict) -> _Built:
    return _solo_ped(_crossing_ped(0.0), single_lane_map(crosswalk_at=0.0),
                     "agent_walk", "agent_cross")


@_builder("agent_jaywalk")
def _(params: dict) -> _Built:
    return _solo_ped(_crossing_ped(0.0), single_lane_map(),
                     "agent_walk", "agent_jaywalk")


# -- following and leading --------------------------------------------

def _tandem(front_label: str, rear_label: str, *,
            ego_in_front: bool) -> _Built:
    """Ego and one car in the same lane, 10 m apart, both at 8 m/s."""
    speeds = [8.0] * N_FRAMES
    road = single_lane_map(x0=-60.0, x1=120.0)
    if ego_in_front:
        ego = _straight(speeds)
        agent = _car("a0", _straight(speeds, start=(-10.0, 0.0)))
    else:
        ego = _straight(speeds)
        agent = _car("a0", _straight(speeds, start=(10.0, 0.0)))
    return _Built(ego, [agent], road,
                  [_label(front_label, "a0"), _label(rear_label, "a0")])


@_builder("agent_follow_ego")
def _(params: dict) -> _Built:
    return _tandem("ego_lead_agent", "agent_follow_ego", ego_in_front=True)


@_builder("ego_lead_agent")
def _(params: dict) -> _Built:
    return _tandem("ego_lead_agent", "agent_follow_ego", ego_in_front=True)


@_builder("agent_lead_ego")
def _(params: dict) -> _Built:
    return _tandem("agent_lead_ego", "ego_follow_agent", ego_in_front=False)


@_builder("ego_follow_agent")
def _(params: dict) -> _Built:
    return _tandem("agent_lead_ego", "ego_follow_agent", ego_in_front=False)


@_builder("agent_follow_agent")
def _(params: dict) -> _Built:
    speeds = [8.0] * N_FRAMES
    return _Built(
        _parked(*_FAR_EGO),
        [_car("a0", _straight(speeds, start=(-10.0, 0.0))),
         _car("a1", _straight(speeds))],
        single_lane_map(x0=-60.0, x1=120.0),
        [_label("agent_follow_agent", "a0", "a1"),
         _label("agent_lead_agent", "a1", "a0")])


@_builder("agent_lead_agent")
def _(params: dict) -> _Built:
    built = _BUILDERS["agent_follow_agent"](params)
    return built


# -- overtaking and passing -------------------------------------------

def _sweep(mover_speed: float, target_speed: float, *,
           start_gap: float, lateral: float = 3.5):
    """Mover trajectory starting start_gap behind a target that departs
    from x=0, one lane over."""
    target = _straight([target_speed] * N_FRAMES)
    mover = _straight([mover_speed] * N_FRAMES,
                      start=(start_gap, lateral))
    return mover, target


@_builder("agent_overtake_ego")
def _(params: dict) -> _Built:
    mover, ego = _sweep(10.0, 6.0, start_gap=-5.4)
    return _Built(ego, [_car("a0", mover)], two_lane_map(),
                  [_label("agent_overtake_ego", "a0")])


@_builder("ego_overtake_agent")
def _(params: dict) -> _Built:
    ego_states, target = _sweep(10.0, 6.0, start_gap=-5.4, lateral=-3.5)
    agent = [(x, y + 3.5, yaw, v) for x, y, yaw, v in target]
    ego = [(x, y + 3.5, yaw, v) for x, y, yaw, v in ego_states]
    return _Built(ego, [_car("a0", agent)], two_lane_map(),
                  [_label("ego_overtake_agent", "a0")])


@_builder("ego_pass_agent")
def _(params: dict) -> _Built:
    ego = _straight([8.0] * N_FRAMES)
    agent = _parked(8.0, 3.5)
    return _Built(ego, [_car("a0", agent)], two_lane_map(),
                  [_label("ego_pass_agent", "a0")])


@_builder("agent_overtake_agent")
def _(params: dict) -> _Built:
    mover, target = _sweep(10.0, 6.0, start_gap=-5.2)
    return _Built(_parked(*_FAR_EGO),
                  [_car("a0", mover), _car("a1", target)],
                  two_lane_map(),
                  [_label("agent_overtake_agent", "a0", "a1")])


@_builder("agent_pass_agent")
def _(params: dict) -> _Built:
    mover = _straight([8.0] * N_FRAMES)
    return _Built(_parked(*_FAR_EGO),
                  [_car("a0", mover), _car("a1", _parked(8.0, 3.5))],
                  two_lane_map(),
                  [_label("agent_pass_agent", "a0", "a1")])


# -- waiting for pedestrians ------------------------------------------

@_builder("ego_wait_ped_cross")
def _(params: dict) -> _Built:
    ahead = float(params.get("ped_ahead", 8.0))
    return _Built(
        _parked(0.0, 0.0),
        [_ped("p0", _crossing_ped(ahead))],
        single_lane_map(crosswalk_at=ahead),
        [_label("ego_wait_ped_cross", "p0"),
         _label("agent_walk", "p0"), _label("agent_cross", "p0")])


@_builder("agent_wait_ped_cross")
def _(params: dict) -> _Built:
    return _Built(
        _parked(*_FAR_EGO),
        [_car("a0", _parked(0.0, 0.0)),
         _ped("p0", _crossing_ped(8.0))],
        single_lane_map(crosswalk_at=8.0),
        [_label("agent_wait_ped_cross", "a0", "p0"),
         _label("agent_walk", "p0"), _label("agent_cross", "p0")])


# -- stationary relations ---------------------------------------------

def _ego_vs_parked(offset: tuple[float, float], agent_label: str,
                   ego_label: str) -> _Built:
    return _Built(_parked(0.0, 0.0),
                  [_car("a0", _parked(*offset))],
                  patch_map(-20, -20, 20, 20),
                  [_label(agent_label, "a0"), _label(ego_label, "a0")])


@_builder("agent_stationary_right_of_ego")
def _(params: dict) -> _Built:
    return _ego_vs_parked((0.5, -3.0), "agent_stationary_right_of_ego",
                          "ego_stationary_left_of_agent")


@_builder("ego_stationary_left_of_agent")
def _(params: dict) -> _Built:
    return _ego_vs_parked((0.5, -3.0), "agent_stationary_right_of_ego",
                          "ego_stationary_left_of_agent")


@_builder("agent_stationary_behind_ego")
def _(params: dict) -> _Built:
    return _ego_vs_parked((-7.0, 0.3), "agent_stationary_behind_ego",
                          "ego_stationary_in_front_of_agent")


@_builder("ego_stationary_in_front_of_agent")
def _(params: dict) -> _Built:
    return _ego_vs_parked((-7.0, 0.3), "agent_stationary_behind_ego",
                          "ego_stationary_in_front_of_agent")


def _parked_pair(offset: tuple[float, float], first_label: str,
                 second_label: str) -> _Built:
    return _Built(_parked(*_FAR_EGO),
                  [_car("a0", _parked(*offset)),
                   _car("a1", _parked(0.0, 0.0))],
                  patch_map(-20, -20, 20, 20),
                  [_label(first_label, "a0", "a1"),
                   _label(second_label, "a1", "a0")])


@_builder("agent_stationary_left_of_agent")
def _(params: dict) -> _Built:
    return _parked_pair((0.5, 3.0), "agent_stationary_left_of_agent",
                        "agent_stationary_right_of_agent")


@_builder("agent_stationary_right_of_agent")
def _(params: dict) -> _Built:
    return _parked_pair((0.5, -3.0), "agent_stationary_right_of_agent",
                        "agent_stationary_left_of_agent")


@_builder("agent_stationary_in_front_of_agent")
def _(params: dict) -> _Built:
    return _parked_pair((6.0, 0.3), "agent_stationary_in_front_of_agent",
                        "agent_stationary_behind_agent")


@_builder("agent_stationary_behind_agent")
def _(params: dict) -> _Built:
    return _parked_pair((-6.0, 0.3), "agent_stationary_behind_agent",
                        "agent_stationary_in_front_of_agent")


# -- moving side by side ----------------------------------------------

def _parallel_pair(lateral: float, first_label: str,
                   second_label: str) -> _Built:
    speeds = [8.0] * N_FRAMES
    return _Built(_parked(*_FAR_EGO),
                  [_car("a0", _straight(speeds, start=(0.5, lateral))),
                   _car("a1", _straight(speeds))],
                  patch_map(-10, -10, 60, 10),
                  [_label(first_label, "a0", "a1"),
                   _label(second_label, "a1", "a0")])


@_builder("agent_moving_left_of_agent")
def _(params: dict) -> _Built:
    return _parallel_pair(3.0, "agent_moving_left_of_agent",
                          "agent_moving_right_of_agent")


@_builder("agent_moving_right_of_agent")
def _(params: dict) -> _Built:
    return _parallel_pair(-3.0, "agent_moving_right_of_agent",
                          "agent_moving_left_of_agent")


# -- pedestrian pairs -------------------------------------------------

@_builder("agent_walk_alongside")
def _(params: dict) -> _Built:
    speeds = [1.4] * N_FRAMES
    return _Built(_parked(*_FAR_EGO),
                  [_ped("p0", _straight(speeds, start=(0.0, 0.75))),
                   _ped("p1", _straight(speeds, start=(0.0, -0.75)))],
                  _OFF_ROAD,
                  [_label("agent_walk_alongside", "p0", "p1"),
                   _label("agent_walk", "p0"), _label("agent_walk", "p1")])


@_builder("agent_walk_opposite")
def _(params: dict) -> _Built:
    speeds = [1.4] * N_FRAMES
    toward = _straight(speeds, start=(0.0, 0.75))
    against = _straight(speeds, start=(4.2, -0.75), heading=math.pi)
    return _Built(_parked(*_FAR_EGO),
                  [_ped("p0", toward), _ped("p1", against)],
                  _OFF_ROAD,
                  [_label("agent_walk_opposite", "p0", "p1"),
                   _label("agent_walk", "p0"), _label("agent_walk", "p1")])


# -- composites -------------------------------------------------------

@_builder("convoy")
def _(params: dict) -> _Built:
    speeds = [8.0] * N_FRAMES
    return _Built(
        _parked(*_FAR_EGO),
        [_car("a0", _straight(speeds)),
         _car("a1", _straight(speeds, start=(-10.0, 0.0))),
         _car("a2", _straight(speeds, start=(-20.0, 0.0)))],
        single_lane_map(x0=-60.0, x1=120.0),
        [_label("agent_follow_agent", "a1", "a0"),
         _label("agent_follow_agent", "a2", "a1"),
         _label("agent_lead_agent", "a0", "a1"),
         _label("agent_lead_agent", "a1", "a2")])


def _interloper_convoy(params: dict) -> _Built:
    speeds = [8.0] * N_FRAMES
    return _Built(
        _parked(*_FAR_EGO),
        [_car("a0", _straight(speeds, start=(-20.0, 0.0))),
         _car("a1", _straight(speeds)),
         _car("c0", _parked(-10.0, 0.8))],
        single_lane_map(x0=-60.0, x1=120.0),
        [])


_BUILDERS["interloper"] = _interloper_convoy


@_builder("orbit")
def _(params: dict) -> _Built:
    count = int(params.get("count", 8))
    radius = float(params.get("radius", 20.0))
    fades = (1.0, 0.8, 0.6, 0.4)
    agents = []
    for k in range(count):
        bearing = math.tau * k / count
        states = _parked(radius * math.cos(bearing),
                         radius * math.sin(bearing),
                         _wrap(bearing + math.pi / 2))
        agents.append(_AgentSpec(f"a{k}", "car", CAR, states,
                                 (fades[k % len(fades)],) * N_FRAMES))
    return _Built(_parked(0.0, 0.0), agents,
                  patch_map(-radius - 10, -radius - 10,
                            radius + 10, radius + 10), [])


# -- negative controls ------------------------------------------------

NEAR_MISS = {
    "control_shallow_turn": "ego_left_turn",
    "control_wide_overtake": "agent_overtake_ego",
    "control_interloper_convoy": "agent_follow_agent",
    "control_gentle_decel": "ego_decelerate",
    "control_two_lane_sweep": "ego_lane_change",
    "control_rolling_stop": "ego_stop",
    "control_distant_follow": "agent_follow_ego",
    "control_sharp_turn": "agent_u_turn",
    "control_brisk_walk": "agent_run",
    "control_far_ped": "ego_wait_ped_cross",
}


@_builder("control_shallow_turn")
def _(params: dict) -> _Built:
    return _Built(_arc(5.0, 25.0), [], patch_map(-40, -40, 40, 40), [])


@_builder("control_wide_overtake")
def _(params: dict) -> _Built:
    mover, ego = _sweep(10.0, 6.0, start_gap=-5.4, lateral=7.5)
    return _Built(ego, [_car("a0", mover)], patch_map(-20, -10, 40, 20),
                  [])


_BUILDERS["control_interloper_convoy"] = _interloper_convoy


@_builder("control_gentle_decel")
def _(params: dict) -> _Built:
    profile = [10.0, 9.4, 8.8, 8.2, 7.9, 7.6]
    return _Built(_straight(profile), [], single_lane_map(), [])


@_builder("control_two_lane_sweep")
def _(params: dict) -> _Built:
    # Crosses two lane widths in one window; start and end lanes are
    # not laterally adjacent, so no lane change may be reported.
    return _Built(_sinusoid_lane_change(speed_x=11.0, shift=7.0), [],
                  parallel_lane_map(3), [])


@_builder("control_rolling_stop")
def _(params: dict) -> _Built:
    profile = [1.3, 1.1, 1.0, 0.9, 0.75, 0.65]
    return _Built(_straight(profile), [], single_lane_map(), [])


@_builder("control_distant_follow")
def _(params: dict) -> _Built:
    speeds = [8.0] * N_FRAMES
    return _Built(_straight(speeds),
                  [_car("a0", _straight(speeds, start=(-31.0, 0.0)))],
                  single_lane_map(x0=-60.0, x1=120.0), [])


@_builder("control_sharp_turn")
def _(params: dict) -> _Built:
    return _Built(_parked(*_FAR_EGO),
                  [_car("a0", _arc(5.0, 120.0))],
                  patch_map(-20, -20, 20, 20),
                  [_label("agent_left_turn", "a0")])


@_builder("control_brisk_walk")
def _(params: dict) -> _Built:
    return _solo_ped(_straight([1.9] * N_FRAMES), _OFF_ROAD, "agent_walk")


@_builder("control_far_ped")
def _(params: dict) -> _Built:
    ahead = 20.0
    return _Built(
        _parked(0.0, 0.0),
        [_ped("p0", _crossing_ped(ahead))],
        single_lane_map(crosswalk_at=ahead),
        [_label("agent_walk", "p0"), _label("agent_cross", "p0")])


# -- assembly ----------------------------------------------------------

SCENARIO_KINDS = tuple(sorted(
    kind for kind in _BUILDERS
    if not kind.startswith("control_")
    and kind not in ("convoy", "interloper", "orbit",
                     "agent_decelerate_control")))
CONTROL_KINDS = tuple(sorted(NEAR_MISS))
COMPOSITE_KINDS = ("convoy", "interloper", "orbit")


def spec_for(kind: str, seed: int = 0, **params) -> SynthSpec:
    if kind not in _BUILDERS:
        raise SynthError(f"unknown synth kind '{kind}'")
    merged = {"seed": int(seed), **params}
    built = _BUILDERS[kind](merged)
    if kind in SCENARIO_KINDS and not built.expected:
        raise SynthError(f"kind '{kind}' built no expected labels")
    return SynthSpec(kind=kind, params=merged,
                     expected=tuple(built.expected))


def _jitter(seed: int, kind: str) -> tuple[float, float, float]:
    digest = hashlib.sha256(f"{seed}:{kind}".encode("utf-8")).digest()
    rng = random.Random(int.from_bytes(digest[:8], "big"))
    return (rng.uniform(-150.0, 150.0), rng.uniform(-150.0, 150.0),
            rng.uniform(-math.pi, math.pi))


def synth_scene(spec: SynthSpec) -> tuple[Scene, list[ExpectedLabel]]:
    """Materialize one spec into a valid, jittered scene."""
    if spec.kind not in _BUILDERS:
        raise SynthError(f"unknown synth kind '{spec.kind}'")
    seed = int(spec.params.get("seed", 0))
    built = _BUILDERS[spec.kind](dict(spec.params))

    frames = tuple(FrameStamp(index=i, timestamp_us=i * FRAME_US)
                   for i in range(N_FRAMES))
    ego = tuple(EgoState(frame=i, x=x, y=y, yaw=yaw, speed=v)
                for i, (x, y, yaw, v) in enumerate(built.ego))
    agents = tuple(
        AgentTrack(
            agent_id=a.agent_id, agent_class=a.agent_class, size=a.size,
            states=tuple(
                AgentState(frame=i, x=x, y=y, yaw=yaw, speed=v,
                           visibility=(a.visibility[i]
                                       if a.visibility is not None
                                       else 1.0))
                for i, (x, y, yaw, v) in enumerate(a.states)))
        for a in built.agents)

    scene = Scene(scene_id=f"synth-{spec.kind}-{seed}",
                  frames=frames, ego=ego, agents=agents, map=built.map,
                  cameras=camera_rig(ego))
    if spec.params.get("jitter", True):
        tx, ty, yaw = _jitter(seed, spec.kind)
        scene = transform_scene(scene, x=tx, y=ty, yaw=yaw)
    expected = list(spec.expected) if spec.expected else list(built.expected)
    return scene, expected


def synth_suite(seed: int = 0) -> list[tuple[Scene, list[ExpectedLabel]]]:
    """One designated scene per scenario type plus the ten controls."""
    out = []
    for kind in SCENARIO_KINDS + CONTROL_KINDS:
        out.append(synth_scene(spec_for(kind, seed=seed)))
    return out


def control_near_miss(kind: str) -> str | None:
    """The scenario type a control flirts with but must not trigger."""
    return NEAR_MISS.get(kind)
