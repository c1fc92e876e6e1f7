"""Arclength projection onto polylines."""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import NamedTuple

import numpy as np


class PolylineProjection(NamedTuple):
    s: float
    d: float
    segment_index: int


def _as_array(polyline: Sequence[tuple[float, float]]) -> np.ndarray:
    arr = np.asarray(polyline, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2 or arr.shape[1] != 2:
        raise ValueError("polyline needs at least 2 (x, y) vertices")
    return arr


def polyline_length(polyline: Sequence[tuple[float, float]]) -> float:
    verts = _as_array(polyline)
    return float(np.hypot(*np.diff(verts, axis=0).T).sum())


def project_to_polyline(point: tuple[float, float],
                        polyline: Sequence[tuple[float, float]],
                        ) -> PolylineProjection:
    """Project a point onto a polyline.

    Returns arclength s of the closest point, signed lateral offset d
    (positive left of travel direction), and the index of the segment
    the foot lies on. Ties across segments resolve to the smallest
    segment index.
    """
    verts = _as_array(polyline)
    a = verts[:-1]
    ab = np.diff(verts, axis=0)
    seg_len = np.hypot(ab[:, 0], ab[:, 1])
    seg_len_sq = seg_len * seg_len
    p = np.asarray(point, dtype=float)
    ap = p - a
    t = np.divide(np.einsum("ij,ij->i", ap, ab), seg_len_sq,
                  out=np.zeros(len(a)), where=seg_len_sq > 0.0)
    t = np.clip(t, 0.0, 1.0)
    feet = a + t[:, None] * ab
    dist = np.hypot(*(p - feet).T)
    k = int(np.argmin(dist))
    cum = np.concatenate(([0.0], np.cumsum(seg_len)))
    s = float(cum[k] + t[k] * seg_len[k])
    offset = p - feet[k]
    cross = ab[k, 0] * offset[1] - ab[k, 1] * offset[0]
    d = float(dist[k] if cross >= 0.0 else -dist[k])
    return PolylineProjection(s, d, k)


def point_at_arclength(polyline: Sequence[tuple[float, float]],
                       s: float) -> tuple[float, float]:
    """Point at arclength s, clamped to the polyline's extent."""
    verts = _as_array(polyline)
    seg = np.diff(verts, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    cum = np.concatenate(([0.0], np.cumsum(seg_len)))
    s = min(max(float(s), 0.0), float(cum[-1]))
    k = int(np.searchsorted(cum[1:], s, side="left"))
    k = min(k, len(seg) - 1)
    t = 0.0 if seg_len[k] == 0.0 else (s - cum[k]) / seg_len[k]
    x, y = verts[k] + t * seg[k]
    return (float(x), float(y))


def tangent_at_segment(polyline: Sequence[tuple[float, float]],
                       segment_index: int) -> float:
    """Heading of one polyline segment, radians."""
    verts = _as_array(polyline)
    k = int(segment_index)
    if not 0 <= k < len(verts) - 1:
        raise IndexError("segment index out of range")
    dx, dy = verts[k + 1] - verts[k]
    return math.atan2(dy, dx)
