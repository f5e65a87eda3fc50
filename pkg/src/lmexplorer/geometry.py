"""Planar geometry primitives backing the collision predicates.

All intersection tests are inclusive: touching boundaries count as
intersecting (obstacles are closed sets).  Scalar routines operate on
length-2 sequences; the ``*_many`` variants are vectorized over an
``(n, 2)`` array of query points and are used on hot paths.
"""

from __future__ import annotations

import numpy as np


def dist_point_segment(p, a, b) -> float:
    """Euclidean distance from point p to segment ab."""
    px, py = p
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0.0:
        return float(np.hypot(px - ax, py - ay))
    t = ((px - ax) * dx + (py - ay) * dy) / denom
    t = min(1.0, max(0.0, t))
    return float(np.hypot(px - (ax + t * dx), py - (ay + t * dy)))


def dists_points_segment(points: np.ndarray, a, b) -> np.ndarray:
    """Distances from each row of ``points`` to segment ab."""
    a = np.asarray(a, dtype=float)
    d = np.asarray(b, dtype=float) - a
    denom = float(d @ d)
    rel = points - a
    if denom == 0.0:
        return np.hypot(rel[:, 0], rel[:, 1])
    t = np.clip((rel @ d) / denom, 0.0, 1.0)
    closest = a + t[:, None] * d
    return np.hypot(points[:, 0] - closest[:, 0], points[:, 1] - closest[:, 1])


def _orient(a, b, c) -> float:
    """Twice the signed area of triangle abc (>0 when counterclockwise)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(p, a, b) -> bool:
    """True if collinear point p lies within the bounding box of ab."""
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def segments_intersect(a1, a2, b1, b2) -> bool:
    """Inclusive segment intersection test (shared endpoints count)."""
    d1 = _orient(b1, b2, a1)
    d2 = _orient(b1, b2, a2)
    d3 = _orient(a1, a2, b1)
    d4 = _orient(a1, a2, b2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    if d1 == 0 and _on_segment(a1, b1, b2):
        return True
    if d2 == 0 and _on_segment(a2, b1, b2):
        return True
    if d3 == 0 and _on_segment(b1, a1, a2):
        return True
    if d4 == 0 and _on_segment(b2, a1, a2):
        return True
    return False


def point_in_polygon(p, verts: np.ndarray) -> bool:
    """Inclusive point-in-polygon test (boundary points count as inside)."""
    n = len(verts)
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        if _orient(a, b, p) == 0 and _on_segment(p, a, b):
            return True
    inside = False
    px, py = p
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        if (ay > py) != (by > py):
            x_cross = ax + (py - ay) * (bx - ax) / (by - ay)
            if px < x_cross:
                inside = not inside
    return inside


def points_in_polygon(points: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Vectorized crossing-number containment for many query points.

    Boundary points are not handled exactly here; callers that need the
    closed-set convention combine this with an edge-distance test.
    """
    px = points[:, 0]
    py = points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    n = len(verts)
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        crosses = (ay > py) != (by > py)
        if not crosses.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = ax + (py - ay) * (bx - ax) / (by - ay)
        inside ^= crosses & (px < x_cross)
    return inside


def polygon_signed_area(verts: np.ndarray) -> float:
    x = verts[:, 0]
    y = verts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_is_simple(verts: np.ndarray) -> bool:
    """True if no two non-adjacent edges intersect."""
    n = len(verts)
    edges = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue  # adjacent edges share a vertex by construction
            if segments_intersect(edges[i][0], edges[i][1], edges[j][0], edges[j][1]):
                return False
    return True


def disk_disk_collide(c1, r1: float, c2, r2: float) -> bool:
    """Inclusive: exact contact (distance == r1 + r2) is a collision."""
    return float(np.hypot(c1[0] - c2[0], c1[1] - c2[1])) <= r1 + r2


def disk_polygon_collide(center, radius: float, verts: np.ndarray) -> bool:
    if point_in_polygon(center, verts):
        return True
    n = len(verts)
    for i in range(n):
        if dist_point_segment(center, verts[i], verts[(i + 1) % n]) <= radius:
            return True
    return False


def disks_polygon_collide(centers: np.ndarray, radius: float, verts: np.ndarray) -> np.ndarray:
    """Vectorized disk-vs-polygon collision mask for many disk centers."""
    starts = verts
    ends = np.roll(verts, -1, axis=0)
    d = ends - starts  # (E, 2)
    denom = np.einsum("ij,ij->i", d, d)
    denom = np.where(denom == 0.0, 1.0, denom)
    rel = centers[:, None, :] - starts[None, :, :]  # (n, E, 2)
    t = np.clip(np.einsum("nej,ej->ne", rel, d) / denom, 0.0, 1.0)
    closest = rel - t[:, :, None] * d[None, :, :]
    edge_dist = np.min(np.hypot(closest[:, :, 0], closest[:, :, 1]), axis=1)
    return (edge_dist <= radius) | points_in_polygon(centers, verts)


def polygons_collide(verts_a: np.ndarray, verts_b: np.ndarray) -> bool:
    """Intersection test for two simple polygons (boundary + containment)."""
    na, nb = len(verts_a), len(verts_b)
    for i in range(na):
        a1, a2 = verts_a[i], verts_a[(i + 1) % na]
        for j in range(nb):
            if segments_intersect(a1, a2, verts_b[j], verts_b[(j + 1) % nb]):
                return True
    return point_in_polygon(verts_a[0], verts_b) or point_in_polygon(verts_b[0], verts_a)


def segment_polygon_collide(a, b, verts: np.ndarray) -> bool:
    n = len(verts)
    for i in range(n):
        if segments_intersect(a, b, verts[i], verts[(i + 1) % n]):
            return True
    return point_in_polygon(a, verts)
