"""Point-in-polygon and polygon sanity tests on the ground plane."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

_EDGE_TOL = 1e-9


def _as_array(polygon: Sequence[tuple[float, float]]) -> np.ndarray:
    arr = np.asarray(polygon, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 3 or arr.shape[1] != 2:
        raise ValueError("polygon needs at least 3 (x, y) vertices")
    return arr


def point_on_boundary(point: tuple[float, float],
                      polygon: Sequence[tuple[float, float]],
                      tol: float = _EDGE_TOL) -> bool:
    """True when the point lies within tol of any polygon edge."""
    verts = _as_array(polygon)
    a = verts
    b = np.roll(verts, -1, axis=0)
    p = np.asarray(point, dtype=float)
    ab = b - a
    ap = p - a
    seg_len_sq = np.einsum("ij,ij->i", ab, ab)
    t = np.divide(np.einsum("ij,ij->i", ap, ab), seg_len_sq,
                  out=np.zeros(len(a)), where=seg_len_sq > 0.0)
    t = np.clip(t, 0.0, 1.0)
    foot = a + t[:, None] * ab
    dist = np.hypot(*(p - foot).T)
    return bool(np.any(dist <= tol))


def point_in_polygon(point: tuple[float, float],
                     polygon: Sequence[tuple[float, float]]) -> bool:
    """Even-odd membership test; boundary points count as inside."""
    verts = _as_array(polygon)
    if point_on_boundary(point, verts):
        return True
    x, y = float(point[0]), float(point[1])
    xa, ya = verts[:, 0], verts[:, 1]
    xb, yb = np.roll(xa, -1), np.roll(ya, -1)
    straddles = (ya > y) != (yb > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = xa + (y - ya) * (xb - xa) / (yb - ya)
    hits = straddles & (x < x_cross)
    return bool(np.count_nonzero(hits) % 2 == 1)


def polyline_intersects_polygon(
    polyline: Sequence[tuple[float, float]],
    polygon: Sequence[tuple[float, float]],
) -> bool:
    """True when the path touches the polygon.

    Either a path vertex lies inside (boundary counts), or a path segment
    crosses a polygon edge.
    """
    verts = _as_array(polygon)
    if any(point_in_polygon(p, verts) for p in polyline):
        return True
    edges_a = verts
    edges_b = np.roll(verts, -1, axis=0)
    for p1, p2 in zip(polyline, polyline[1:]):
        p1 = np.asarray(p1, dtype=float)
        p2 = np.asarray(p2, dtype=float)
        d1 = _orient(p1, p2, edges_a)
        d2 = _orient(p1, p2, edges_b)
        d3 = _orient(edges_a, edges_b, p1)
        d4 = _orient(edges_a, edges_b, p2)
        proper = (np.sign(d1) * np.sign(d2) < 0) & (np.sign(d3) * np.sign(d4) < 0)
        if bool(np.any(proper)):
            return True
    return False


def _orient(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) \
        - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def _on_segment(a, b, c) -> np.ndarray:
    """True where collinear point c falls inside segment ab's bounding box."""
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    return np.all((c >= lo) & (c <= hi), axis=-1)


def polygon_is_simple(polygon: Sequence[tuple[float, float]]) -> bool:
    """True when no two non-adjacent edges intersect or touch."""
    verts = _as_array(polygon)
    n = len(verts)
    a = verts
    b = np.roll(verts, -1, axis=0)
    i, j = np.triu_indices(n, k=2)
    adjacent = (i == 0) & (j == n - 1)
    i, j = i[~adjacent], j[~adjacent]
    if len(i) == 0:
        return True
    p1, p2 = a[i], b[i]
    q1, q2 = a[j], b[j]
    d1 = _orient(p1, p2, q1)
    d2 = _orient(p1, p2, q2)
    d3 = _orient(q1, q2, p1)
    d4 = _orient(q1, q2, p2)
    proper = (np.sign(d1) * np.sign(d2) < 0) & (np.sign(d3) * np.sign(d4) < 0)
    touch = ((d1 == 0) & _on_segment(p1, p2, q1)) \
        | ((d2 == 0) & _on_segment(p1, p2, q2)) \
        | ((d3 == 0) & _on_segment(q1, q2, p1)) \
        | ((d4 == 0) & _on_segment(q1, q2, p2))
    return not bool(np.any(proper | touch))
