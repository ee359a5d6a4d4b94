"""Planar geometry primitives shared by the polygonal and sampling code.

Coordinates are treated as exact reals; containment and crossing
predicates resolve contacts with an absolute tolerance ``EPS`` in
domain length units. Anything within ``EPS`` of a boundary counts as
touching, and touching is never a collision.
"""

from __future__ import annotations

import math

import numpy as np

EPS = 1e-9


def cross(ox, oy, ax, ay, bx, by):
    """z-component of (a - o) x (b - o)."""
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def signed_area(poly: np.ndarray) -> float:
    """Shoelace area; positive for counterclockwise orientation."""
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def poly_edges(poly: np.ndarray, closed: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Edge endpoint arrays (A, B) of a ring (closed) or polyline (open)."""
    poly = np.asarray(poly, dtype=float)
    if len(poly) == 1:
        return poly.copy(), poly.copy()
    if closed:
        return poly, np.roll(poly, -1, axis=0)
    return poly[:-1], poly[1:]


def point_segment_distance(p, a, b) -> tuple[float, np.ndarray]:
    """Distance from point to closed segment, with the closest point."""
    p, a, b = (np.asarray(v, dtype=float) for v in (p, a, b))
    d = b - a
    len2 = float(d @ d)
    if len2 <= 0.0:
        return float(math.hypot(*(p - a))), a.copy()
    t = min(max(float((p - a) @ d) / len2, 0.0), 1.0)
    closest = a + t * d
    return float(math.hypot(*(p - closest))), closest


def points_segment_distance(pts: np.ndarray, a, b) -> np.ndarray:
    """Distances from many points to one closed segment."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    len2 = float(d @ d)
    if len2 <= 0.0:
        return np.hypot(pts[:, 0] - a[0], pts[:, 1] - a[1])
    t = np.clip(((pts - a) @ d) / len2, 0.0, 1.0)
    closest = a + t[:, None] * d
    return np.hypot(pts[:, 0] - closest[:, 0], pts[:, 1] - closest[:, 1])


def points_edges_distance(pts: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """(n, k) distances from n points to k closed segments."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    d = B - A
    len2 = np.maximum((d * d).sum(axis=1), 1e-300)
    ap = pts[:, None, :] - A[None, :, :]
    t = np.clip((ap * d[None, :, :]).sum(axis=2) / len2[None, :], 0.0, 1.0)
    closest = A[None, :, :] + t[:, :, None] * d[None, :, :]
    diff = pts[:, None, :] - closest
    return np.sqrt((diff * diff).sum(axis=2))


def points_in_ring(pts: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Crossing-number membership against precomputed ring edges (A, B);
    boundary undefined (pair with a boundary-distance check when it
    matters)."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    x = pts[:, 0][:, None]
    y = pts[:, 1][:, None]
    x1, y1 = A[:, 0][None, :], A[:, 1][None, :]
    x2, y2 = B[:, 0][None, :], B[:, 1][None, :]
    straddle = (y1 > y) != (y2 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_at_y = (x2 - x1) * (y - y1) / (y2 - y1) + x1
    hits = straddle & (x < x_at_y)
    return (hits.sum(axis=1) % 2).astype(bool)


def points_in_polygon(pts: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Crossing-number membership for many points; boundary undefined
    (pair with an explicit boundary-distance check when it matters)."""
    A, B = poly_edges(poly)
    return points_in_ring(pts, A, B)


def point_in_polygon(pt, poly: np.ndarray, include_boundary: bool = True) -> bool:
    """Single-point membership with explicit boundary handling."""
    pt = np.asarray(pt, dtype=float)
    A, B = poly_edges(poly)
    if points_edges_distance(pt[None, :], A, B).min() <= EPS:
        return include_boundary
    return bool(points_in_polygon(pt[None, :], poly)[0])


def point_strictly_in_polygon(pt, poly: np.ndarray) -> bool:
    """Inside and farther than EPS from the boundary."""
    pt = np.asarray(pt, dtype=float)
    A, B = poly_edges(poly)
    if points_edges_distance(pt[None, :], A, B).min() <= EPS:
        return False
    return bool(points_in_polygon(pt[None, :], poly)[0])


def polygon_is_simple(poly: np.ndarray) -> bool:
    """No two non-adjacent edges intersect; adjacent edges meet only at
    their shared vertex."""
    n = len(poly)
    if n < 3:
        return False
    A, B = poly_edges(poly)
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            d = _segment_pair_distance(A[i], B[i], A[j], B[j])[0]
            if adjacent:
                continue
            if d <= EPS:
                return False
    # adjacent edges must not fold back onto each other
    for i in range(n):
        j = (i + 1) % n
        u = B[i] - A[i]
        w = B[j] - A[j]
        scale = max(math.hypot(*u) * math.hypot(*w), 1e-300)
        if abs(u[0] * w[1] - u[1] * w[0]) <= EPS * scale and (u @ w) < 0:
            return False
    return True


# --- segment-segment distances -------------------------------------------------


def _segment_pair_distance(p1, p2, q1, q2):
    """Distance between two closed segments with witness points."""
    d1 = cross(p1[0], p1[1], p2[0], p2[1], q1[0], q1[1])
    d2 = cross(p1[0], p1[1], p2[0], p2[1], q2[0], q2[1])
    d3 = cross(q1[0], q1[1], q2[0], q2[1], p1[0], p1[1])
    d4 = cross(q1[0], q1[1], q2[0], q2[1], p2[0], p2[1])
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != d2:
        t = d1 / (d1 - d2)
        pt = q1 + t * (q2 - q1)
        return 0.0, pt, pt
    best = None
    for p, a, b, swap in ((p1, q1, q2, False), (p2, q1, q2, False),
                          (q1, p1, p2, True), (q2, p1, p2, True)):
        d, closest = point_segment_distance(p, a, b)
        if best is None or d < best[0]:
            best = (d, closest, p) if swap else (d, p, closest)
    return best


def segment_to_segments_distance(p1, p2, Q1: np.ndarray, Q2: np.ndarray):
    """Distances from one segment to many, with witness points.

    Returns (dists (k,), on_first (k, 2), on_second (k, 2)).
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    k = len(Q1)
    dists = np.empty(k)
    wp = np.empty((k, 2))
    wq = np.empty((k, 2))
    for i in range(k):
        d, a, b = _segment_pair_distance(p1, p2, Q1[i], Q2[i])
        dists[i] = d
        wp[i] = a
        wq[i] = b
    return dists, wp, wq


def chain_to_chain_distance(chain_a: np.ndarray, chain_b: np.ndarray,
                            closed_a: bool = False, closed_b: bool = False):
    """Minimum distance between two boundary chains with a witness segment.

    Chains are vertex arrays; closed chains include the wrap-around
    edge. Returns (distance, point_on_a, point_on_b).
    """
    chain_a = np.asarray(chain_a, dtype=float).reshape(-1, 2)
    chain_b = np.asarray(chain_b, dtype=float).reshape(-1, 2)
    A1, A2 = poly_edges(chain_a, closed=closed_a)
    B1, B2 = poly_edges(chain_b, closed=closed_b)
    best = (math.inf, None, None)
    for i in range(len(A1)):
        dists, wp, wq = segment_to_segments_distance(A1[i], A2[i], B1, B2)
        j = int(np.argmin(dists))
        if dists[j] < best[0]:
            best = (float(dists[j]), wp[j].copy(), wq[j].copy())
    return best


# --- segment vs obstacle-edge batches -------------------------------------------


def _normalized_sides(P1, P2, A, B):
    """Signed point-line distances used by the crossing predicates.

    P1, P2: (m, 2) segment endpoints; A, B: (k, 2) edge endpoints.
    Returns (sa, sb, da, db) of shape (m, k): sides of A/B relative to
    each segment's line, and sides of P1/P2 relative to each edge's line,
    all in length units.
    """
    u = P2 - P1
    ulen = np.maximum(np.hypot(u[:, 0], u[:, 1]), 1e-300)[:, None]
    w = B - A
    wlen = np.maximum(np.hypot(w[:, 0], w[:, 1]), 1e-300)[None, :]

    ax = A[None, :, 0] - P1[:, None, 0]
    ay = A[None, :, 1] - P1[:, None, 1]
    bx = B[None, :, 0] - P1[:, None, 0]
    by = B[None, :, 1] - P1[:, None, 1]
    sa = (u[:, None, 0] * ay - u[:, None, 1] * ax) / ulen
    sb = (u[:, None, 0] * by - u[:, None, 1] * bx) / ulen

    px = P1[:, None, 0] - A[None, :, 0]
    py = P1[:, None, 1] - A[None, :, 1]
    qx = P2[:, None, 0] - A[None, :, 0]
    qy = P2[:, None, 1] - A[None, :, 1]
    da = (w[None, :, 0] * py - w[None, :, 1] * px) / wlen
    db = (w[None, :, 0] * qy - w[None, :, 1] * qx) / wlen
    return sa, sb, da, db


def segments_cross_edges(P1: np.ndarray, P2: np.ndarray,
                         A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """(m,) mask: segment i properly crosses at least one edge."""
    sa, sb, da, db = _normalized_sides(P1, P2, A, B)
    straddle_edge = ((sa < -EPS) & (sb > EPS)) | ((sa > EPS) & (sb < -EPS))
    straddle_seg = ((da < -EPS) & (db > EPS)) | ((da > EPS) & (db < -EPS))
    return (straddle_edge & straddle_seg).any(axis=1)


def segments_touch_edges(P1: np.ndarray, P2: np.ndarray,
                         A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """(m,) mask: segment i comes within EPS of some edge without a
    proper crossing being implied. Over-approximates; used to route
    rare contact cases to the exact interval test."""
    sa, sb, da, db = _normalized_sides(P1, P2, A, B)
    near_line = (
        (np.abs(sa) <= EPS) | (np.abs(sb) <= EPS)
        | (np.abs(da) <= EPS) | (np.abs(db) <= EPS)
    )
    lo = np.minimum(P1, P2)[:, None, :] - EPS
    hi = np.maximum(P1, P2)[:, None, :] + EPS
    elo = np.minimum(A, B)[None, :, :]
    ehi = np.maximum(A, B)[None, :, :]
    boxes = ((lo <= ehi) & (hi >= elo)).all(axis=2)
    return (near_line & boxes).any(axis=1)


def segment_polygon_params(p1, p2, poly: np.ndarray) -> list[float]:
    """Parameters t in [0, 1] where segment p1 + t*(p2-p1) meets the
    polygon boundary, including grazing contacts and collinear overlaps."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    u = p2 - p1
    ulen = math.hypot(*u)
    if ulen <= EPS:
        return []
    tol_t = EPS / ulen
    params: list[float] = []
    A, B = poly_edges(poly)
    for a, b in zip(A, B):
        w = b - a
        denom = u[0] * w[1] - u[1] * w[0]
        r = a - p1
        if abs(denom) > 1e-300:
            t = (r[0] * w[1] - r[1] * w[0]) / denom
            s = (r[0] * u[1] - r[1] * u[0]) / denom
            wlen = math.hypot(*w)
            tol_s = EPS / max(wlen, EPS)
            if -tol_t <= t <= 1 + tol_t and -tol_s <= s <= 1 + tol_s:
                params.append(min(max(t, 0.0), 1.0))
        else:
            # parallel; collinear if a is on the segment's line
            if abs(r[0] * u[1] - r[1] * u[0]) / ulen <= EPS:
                for pt in (a, b):
                    t = float((pt - p1) @ u) / (ulen * ulen)
                    if -tol_t <= t <= 1 + tol_t:
                        params.append(min(max(t, 0.0), 1.0))
    return sorted(params)
