"""Motion profiles derived from tracked states."""

from __future__ import annotations

import math
from collections.abc import Sequence

from sts.geometry.se2 import normalize_angle


def speed_profile(states: Sequence, timestamps_us: Sequence[int]) -> list[float]:
    """Speed in m/s for each state.

    Stored speeds are used verbatim. Missing ones are derived from
    positions with central differences over the true timestamp deltas
    (one-sided at the ends). timestamps_us must align with states.
    """
    n = len(states)
    if n == 0:
        raise ValueError("speed_profile needs at least one state")
    if len(timestamps_us) != n:
        raise ValueError("timestamps must align with states")
    out: list[float] = []
    for i, state in enumerate(states):
        if state.speed is not None:
            out.append(float(state.speed))
            continue
        if n == 1:
            out.append(0.0)
            continue
        if i == 0:
            j, k = 0, 1
        elif i == n - 1:
            j, k = n - 2, n - 1
        else:
            j, k = i - 1, i + 1
        # difference in integer microseconds first, so equal deltas give
        # bit-equal speeds regardless of the absolute epoch
        dt = (timestamps_us[k] - timestamps_us[j]) * 1e-6
        dist = math.hypot(states[k].x - states[j].x,
                          states[k].y - states[j].y)
        out.append(dist / dt if dt > 0.0 else 0.0)
    return out


def velocity_profile(
    states: Sequence, timestamps_us: Sequence[int]
) -> list[tuple[float, float]]:
    """World-frame velocity vector in m/s for each state.

    Always derived from positions (central differences, one-sided at the
    ends); stored scalar speeds carry no direction and are ignored here.
    """
    n = len(states)
    if n == 0:
        raise ValueError("velocity_profile needs at least one state")
    if len(timestamps_us) != n:
        raise ValueError("timestamps must align with states")
    out: list[tuple[float, float]] = []
    for i in range(n):
        if n == 1:
            out.append((0.0, 0.0))
            continue
        if i == 0:
            j, k = 0, 1
        elif i == n - 1:
            j, k = n - 2, n - 1
        else:
            j, k = i - 1, i + 1
        dt = (timestamps_us[k] - timestamps_us[j]) * 1e-6
        if dt <= 0.0:
            out.append((0.0, 0.0))
            continue
        out.append(((states[k].x - states[j].x) / dt,
                    (states[k].y - states[j].y) / dt))
    return out


def heading_change(states: Sequence) -> float:
    """Accumulated signed yaw change over a track, radians.

    Each successive delta is wrapped into (-pi, pi] before summing, so
    tracks crossing the +-pi seam accumulate the short way around.
    Left turns are positive.
    """
    if len(states) < 2:
        raise ValueError("heading_change needs at least two states")
    total = 0.0
    for a, b in zip(states, states[1:]):
        total += normalize_angle(b.yaw - a.yaw)
    return total


def net_displacement(states: Sequence) -> float:
    """Straight-line distance between the first and last state."""
    if len(states) == 0:
        raise ValueError("net_displacement needs at least one state")
    return math.hypot(states[-1].x - states[0].x, states[-1].y - states[0].y)


def path_length(states: Sequence) -> float:
    """Summed distance over consecutive states."""
    if len(states) == 0:
        raise ValueError("path_length needs at least one state")
    return sum(math.hypot(b.x - a.x, b.y - a.y)
               for a, b in zip(states, states[1:]))
