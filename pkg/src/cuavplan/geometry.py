"""Distance, coverage and segment-intersection primitives."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

# Tolerance on orientation cross products, in m^2.
ORIENT_EPS = 1e-9

Point = Sequence[float]


def _xy(p) -> tuple[float, float]:
    if hasattr(p, "x"):
        return float(p.x), float(p.y)
    return float(p[0]), float(p[1])


def dist_uav_node(p, s, h: float) -> float:
    """Slant distance from a hover point at altitude ``h`` to a ground node."""
    px, py = _xy(p)
    sx, sy = _xy(s)
    dx, dy = px - sx, py - sy
    return math.sqrt(dx * dx + dy * dy + h * h)


def covers(p, s, scenario) -> bool:
    """True if node ``s`` is within charging range of hover point ``p`` (boundary inclusive)."""
    return dist_uav_node(p, s, scenario.altitude_h) <= scenario.d_max


def slant_distances(points: np.ndarray, nodes_xy: np.ndarray, h: float) -> np.ndarray:
    """``(k, n)`` matrix of hover-point to node distances."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    dx = points[:, 0:1] - nodes_xy[None, :, 0]
    dy = points[:, 1:2] - nodes_xy[None, :, 1]
    # same operation order as dist_uav_node so boundary cases agree bit-for-bit
    return np.sqrt(dx * dx + dy * dy + h * h)


def coverage_matrix(points: np.ndarray, scenario) -> np.ndarray:
    """Boolean ``(k, n)`` matrix ``u[j, i]``: hover point j charges node i."""
    return slant_distances(points, scenario.xy, scenario.altitude_h) <= scenario.d_max


def euclid(a, b) -> float:
    ax, ay = _xy(a)
    bx, by = _xy(b)
    return math.hypot(ax - bx, ay - by)


def distance_matrix(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt((diff**2).sum(axis=-1))


def orient(a, b, c) -> int:
    """Sign of the turn a -> b -> c: +1 ccw, -1 cw, 0 collinear within ORIENT_EPS."""
    cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if cross > ORIENT_EPS:
        return 1
    if cross < -ORIENT_EPS:
        return -1
    return 0


def _on_segment(a, b, c) -> bool:
    # c is already known to be collinear with a-b
    return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])


def segments_intersect(s1, s2) -> bool:
    """Whether closed segments ``s1 = (a, b)`` and ``s2 = (c, d)`` share a point.

    Segments that share an endpoint are reported as not intersecting, so
    consecutive tour edges never count as a crossing. Collinear overlap
    counts. Zero-length segments intersect nothing.
    """
    a, b = _xy(s1[0]), _xy(s1[1])
    c, d = _xy(s2[0]), _xy(s2[1])
    if a == b or c == d:
        return False
    if a == c or a == d or b == c or b == d:
        return False
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return (
        (o1 == 0 and _on_segment(a, b, c))
        or (o2 == 0 and _on_segment(a, b, d))
        or (o3 == 0 and _on_segment(c, d, a))
        or (o4 == 0 and _on_segment(c, d, b))
    )


def _orient_many(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    cross = (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])
    return np.where(cross > ORIENT_EPS, 1, np.where(cross < -ORIENT_EPS, -1, 0))


def _on_segment_many(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return (
        (np.minimum(a[..., 0], b[..., 0]) <= c[..., 0])
        & (c[..., 0] <= np.maximum(a[..., 0], b[..., 0]))
        & (np.minimum(a[..., 1], b[..., 1]) <= c[..., 1])
        & (c[..., 1] <= np.maximum(a[..., 1], b[..., 1]))
    )


def segments_intersect_many(a, b, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Vectorised :func:`segments_intersect` of one segment ``a-b`` against segments ``c[i]-d[i]``."""
    a = np.broadcast_to(np.asarray(a, dtype=float), np.shape(c))
    b = np.broadcast_to(np.asarray(b, dtype=float), np.shape(c))
    c = np.asarray(c, dtype=float)
    d = np.asarray(d, dtype=float)

    def same(p, q):
        return (p[..., 0] == q[..., 0]) & (p[..., 1] == q[..., 1])

    excluded = same(a, b) | same(c, d) | same(a, c) | same(a, d) | same(b, c) | same(b, d)
    o1, o2 = _orient_many(a, b, c), _orient_many(a, b, d)
    o3, o4 = _orient_many(c, d, a), _orient_many(c, d, b)
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)
    touching = (
        ((o1 == 0) & _on_segment_many(a, b, c))
        | ((o2 == 0) & _on_segment_many(a, b, d))
        | ((o3 == 0) & _on_segment_many(c, d, a))
        | ((o4 == 0) & _on_segment_many(c, d, b))
    )
    return ~excluded & (proper | touching)
