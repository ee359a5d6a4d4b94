"""Free-space graph builders: 8-connected grid, incremental random
graph (RRG), and batch roadmap (PRM*).

The randomized builders share the asymptotic-optimality connection
radius ``gamma * (log n / n)^(1/d)`` with d = 2; ``gamma`` multiplies
the theoretical threshold by 1.0001 to satisfy its strict inequality,
using the free-space area for the measure term. Randomness comes from
numpy's PCG64 generator seeded directly with the caller's seed, so a
(builder, params, seed) triple reproduces the graph bit for bit; the
same seed at a larger iteration count extends the smaller graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geom
from .errors import EmptyTerminalSet, SchemaError
from .polygeom import PolygonalDomain

DEFAULT_ETA_FRACTION = 0.05  # steering range as a share of the bbox diagonal


@dataclass
class SampledGraph:
    """Sampled free-space graph with directed edges and terminal sets."""

    points: dict[int, tuple[float, float]]
    edges: set[tuple[int, int]]
    source_set: set[int]
    sink_set: set[int]
    builder: str
    seed: int = 0
    params: dict = field(default_factory=dict)

    def point_array(self, order: list[int] | None = None) -> np.ndarray:
        ids = sorted(self.points) if order is None else order
        return np.array([self.points[i] for i in ids], dtype=float)


def connection_gamma(domain: PolygonalDomain, d: int = 2) -> float:
    """Radius constant strictly above the asymptotic-optimality bound."""
    zeta = math.pi  # volume of the unit disk in the plane
    mu = domain.free_area
    return 2.0001 * (1.0 + 1.0 / d) ** (1.0 / d) * (mu / zeta) ** (1.0 / d)


def connection_radius(domain: PolygonalDomain, n: int, eta: float | None = None) -> float:
    """Shrinking near-neighbor radius at vertex count n, capped by eta."""
    if n < 2:
        return 0.0
    r = connection_gamma(domain) * math.sqrt(math.log(n) / n)
    return min(r, eta) if eta is not None else r


# --- collision predicates -----------------------------------------------------


def collision_free(a, b, domain: PolygonalDomain) -> bool:
    """True iff the closed segment from a to b stays in free space.

    Contacts within the geometric tolerance (grazing a hole vertex,
    running along a boundary) count as free.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return bool(
        segments_free(a[None, :], b[None, :], domain)[0]
    )


def segments_free(P1: np.ndarray, P2: np.ndarray, domain: PolygonalDomain) -> np.ndarray:
    """Vectorized collision test for m segments; (m,) boolean mask.

    A fast pass rejects proper boundary crossings and accepts contact-
    free segments; the rare segments that merely touch a boundary fall
    back to an exact interval test.
    """
    P1 = np.asarray(P1, dtype=float).reshape(-1, 2)
    P2 = np.asarray(P2, dtype=float).reshape(-1, 2)
    A, B = domain.obstacle_edges
    endpoint_free = domain.points_free(np.vstack([P1, P2]))
    ok = endpoint_free[: len(P1)] & endpoint_free[len(P1):]
    crossed = geom.segments_cross_edges(P1, P2, A, B)
    ok &= ~crossed
    touched = geom.segments_touch_edges(P1, P2, A, B)
    for i in np.nonzero(ok & touched)[0]:
        if _blocked_despite_touching(P1[i], P2[i], domain):
            ok[i] = False
    return ok


def _blocked_despite_touching(a, b, domain: PolygonalDomain) -> bool:
    """Exact test for segments flagged as touching a boundary: split the
    segment at every boundary contact and probe the open intervals."""
    if math.hypot(b[0] - a[0], b[1] - a[1]) <= geom.EPS:
        return False
    u = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    for poly, is_hole in [(domain.outer, False)] + [(h, True) for h in domain.holes]:
        cuts = geom.segment_polygon_params(a, b, poly)
        ts = sorted({0.0, 1.0, *cuts})
        for lo, hi in zip(ts[:-1], ts[1:]):
            if hi - lo <= 1e-12:
                continue
            mid = np.asarray(a, dtype=float) + 0.5 * (lo + hi) * u
            if is_hole:
                if geom.point_strictly_in_polygon(mid, poly):
                    return True
            elif not geom.point_in_polygon(mid, poly, include_boundary=True):
                return True
    return False


# --- builders -------------------------------------------------------------------


def grid_sample(domain: PolygonalDomain, spacing: float) -> SampledGraph:
    """8-connected lattice at absolute multiples of ``spacing``.

    Keeps lattice points in free space, connects each to its eight
    neighbors when the joining segment is collision-free (both
    directions), and snaps terminal sets to lattice points within one
    spacing of the respective boundary edge.
    """
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    x0, y0, x1, y1 = domain.bbox
    ix0, ix1 = math.ceil(x0 / spacing - geom.EPS), math.floor(x1 / spacing + geom.EPS)
    iy0, iy1 = math.ceil(y0 / spacing - geom.EPS), math.floor(y1 / spacing + geom.EPS)
    lattice = [
        (ix, iy) for ix in range(ix0, ix1 + 1) for iy in range(iy0, iy1 + 1)
    ]
    pts = np.array([[ix * spacing, iy * spacing] for ix, iy in lattice], dtype=float)
    if len(pts) == 0:
        raise EmptyTerminalSet("spacing larger than the domain")
    free = domain.points_free(pts)

    ids: dict[tuple[int, int], int] = {}
    points: dict[int, tuple[float, float]] = {}
    for cell, keep, xy in zip(lattice, free, pts):
        if keep:
            ids[cell] = len(points)
            points[len(points)] = (float(xy[0]), float(xy[1]))

    neighbor_steps = [(1, 0), (0, 1), (1, 1), (1, -1)]
    cand_a, cand_b = [], []
    for (ix, iy), i in ids.items():
        for dx, dy in neighbor_steps:
            j = ids.get((ix + dx, iy + dy))
            if j is not None:
                cand_a.append(i)
                cand_b.append(j)
    edges: set[tuple[int, int]] = set()
    if cand_a:
        arr = np.array([points[i] for i in range(len(points))])
        ok = segments_free(arr[cand_a], arr[cand_b], domain)
        for i, j, keep in zip(cand_a, cand_b, ok):
            if keep:
                edges.add((i, j))
                edges.add((j, i))

    graph = SampledGraph(
        points=points,
        edges=edges,
        source_set=set(),
        sink_set=set(),
        builder="grid",
        seed=0,
        params={"spacing": spacing},
    )
    _snap_terminals(graph, domain, spacing)
    if not graph.source_set or not graph.sink_set:
        raise EmptyTerminalSet("no grid point within one spacing of a terminal edge")
    return graph


def _snap_terminals(graph: SampledGraph, domain: PolygonalDomain, snap: float) -> None:
    if not graph.points:
        return
    order = sorted(graph.points)
    pts = graph.point_array(order)
    d_src = geom.points_segment_distance(pts, *domain.source_segment)
    d_snk = geom.points_segment_distance(pts, *domain.sink_segment)
    graph.source_set = {order[i] for i in np.nonzero(d_src <= snap + geom.EPS)[0]}
    graph.sink_set = {order[i] for i in np.nonzero(d_snk <= snap + geom.EPS)[0]}


def default_eta(domain: PolygonalDomain) -> float:
    return DEFAULT_ETA_FRACTION * domain.diagonal()


def _initial_vertex(domain: PolygonalDomain, eta: float) -> tuple[float, float]:
    """Centroid of the source edge, nudged into free space if needed."""
    a, b = domain.source_segment
    mid = 0.5 * (a + b)
    direction = b - a
    norm = math.hypot(*direction)
    inward = np.array([-direction[1], direction[0]]) / max(norm, geom.EPS)
    for step in (0.1 * eta, 0.02 * eta, 0.0):
        candidate = mid + step * inward
        if domain.point_free(candidate):
            return (float(candidate[0]), float(candidate[1]))
    return (float(mid[0]), float(mid[1]))


def _sample_free(rng: np.random.Generator, domain: PolygonalDomain) -> np.ndarray:
    # fixed-size batches keep the draw count per call independent of n,
    # which preserves the same-seed prefix property of incremental builds
    x0, y0, x1, y1 = domain.bbox
    while True:
        batch = np.column_stack(
            [rng.uniform(x0, x1, size=8), rng.uniform(y0, y1, size=8)]
        )
        free = domain.points_free(batch)
        hits = np.nonzero(free)[0]
        if hits.size:
            return batch[hits[0]]


def rrg_build(
    domain: PolygonalDomain, n: int, eta: float | None = None, seed: int = 0
) -> SampledGraph:
    """Incremental random graph: n rounds of sample, steer from the
    nearest vertex, and bidirectional connection to all neighbors within
    the shrinking radius (capped by eta).

    Rounds whose steered segment is blocked add nothing. A fixed seed
    makes the graph at n a subgraph of the graph at any larger n.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if eta is None:
        eta = default_eta(domain)
    rng = np.random.Generator(np.random.PCG64(seed))
    gamma = connection_gamma(domain)

    init = _initial_vertex(domain, eta)
    coords = np.empty((n + 1, 2))
    coords[0] = init
    count = 1
    edges: set[tuple[int, int]] = set()

    for _ in range(n):
        x_rand = _sample_free(rng, domain)
        live = coords[:count]
        nearest = int(np.argmin(np.hypot(live[:, 0] - x_rand[0], live[:, 1] - x_rand[1])))
        x_new = _steer(live[nearest], x_rand, eta)
        if not collision_free(live[nearest], x_new, domain):
            continue
        radius = min(gamma * math.sqrt(math.log(count) / count) if count > 1 else 0.0, eta)
        dists = np.hypot(live[:, 0] - x_new[0], live[:, 1] - x_new[1])
        near_mask = dists <= radius
        near_mask[nearest] = False
        near = np.nonzero(near_mask)[0]

        new_id = count
        coords[new_id] = x_new
        count += 1
        edges.add((nearest, new_id))
        edges.add((new_id, nearest))
        if near.size:
            ok = segments_free(live[near], np.tile(x_new, (near.size, 1)), domain)
            for i, keep in zip(near, ok):
                if keep:
                    edges.add((int(i), new_id))
                    edges.add((new_id, int(i)))

    points = {i: (float(coords[i, 0]), float(coords[i, 1])) for i in range(count)}
    graph = SampledGraph(
        points=points,
        edges=edges,
        source_set=set(),
        sink_set=set(),
        builder="rrg",
        seed=seed,
        params={"n": n, "eta": eta},
    )
    _snap_terminals(graph, domain, eta)
    return graph


def _steer(origin: np.ndarray, target: np.ndarray, eta: float) -> np.ndarray:
    delta = target - origin
    dist = math.hypot(*delta)
    if dist <= eta:
        return target.copy()
    return origin + (eta / dist) * delta


def prm_star_build(domain: PolygonalDomain, n: int, seed: int = 0) -> SampledGraph:
    """Batch roadmap over n free samples, connecting every pair within
    the radius ``gamma * (log n / n)^(1/2)`` whose segment is free."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    pts = np.array([_sample_free(rng, domain) for _ in range(n)])
    radius = connection_radius(domain, n)

    edges: set[tuple[int, int]] = set()
    if radius > 0:
        for i in range(n):
            d = np.hypot(pts[:, 0] - pts[i, 0], pts[:, 1] - pts[i, 1])
            near = [j for j in range(i + 1, n) if d[j] <= radius]
            if not near:
                continue
            ok = segments_free(np.tile(pts[i], (len(near), 1)), pts[near], domain)
            for j, keep in zip(near, ok):
                if keep:
                    edges.add((i, j))
                    edges.add((j, i))

    points = {i: (float(pts[i, 0]), float(pts[i, 1])) for i in range(n)}
    graph = SampledGraph(
        points=points,
        edges=edges,
        source_set=set(),
        sink_set=set(),
        builder="prmstar",
        seed=seed,
        params={"n": n, "radius": radius},
    )
    _snap_terminals(graph, domain, radius if radius > 0 else 0.0)
    return graph


def build(
    domain: PolygonalDomain,
    builder: str,
    n: int,
    seed: int = 0,
    eta: float | None = None,
) -> SampledGraph:
    """Dispatch by builder name; grid derives its spacing from a target
    vertex count over the bounding box."""
    if builder == "grid":
        return grid_sample(domain, grid_spacing_for(domain, n))
    if builder == "rrg":
        return rrg_build(domain, n, eta=eta, seed=seed)
    if builder == "prmstar":
        return prm_star_build(domain, n, seed=seed)
    raise ValueError(f"unknown builder {builder!r}")


def grid_spacing_for(domain: PolygonalDomain, n: int) -> float:
    """Spacing whose lattice puts roughly n vertices in the bounding box."""
    x0, y0, x1, y1 = domain.bbox
    area = max((x1 - x0) * (y1 - y0), geom.EPS)
    return math.sqrt(area / max(n, 1))


# --- JSON schema ------------------------------------------------------------------


def graph_to_json(graph: SampledGraph) -> dict:
    return {
        "points": {str(i): [x, y] for i, (x, y) in sorted(graph.points.items())},
        "edges": [[u, v] for u, v in sorted(graph.edges)],
        "source_set": sorted(graph.source_set),
        "sink_set": sorted(graph.sink_set),
        "builder": graph.builder,
        "seed": graph.seed,
        "params": graph.params,
    }


def graph_from_json(obj: dict) -> SampledGraph:
    for key in ("points", "edges", "source_set", "sink_set"):
        if key not in obj:
            raise SchemaError(key, "missing required field")
    try:
        points = {int(i): (float(x), float(y)) for i, (x, y) in obj["points"].items()}
    except (TypeError, ValueError):
        raise SchemaError("points", "expected id -> [x, y]")
    try:
        edges = {(int(u), int(v)) for u, v in obj["edges"]}
    except (TypeError, ValueError):
        raise SchemaError("edges", "expected a list of [u, v] pairs")
    for u, v in edges:
        if u not in points or v not in points:
            raise SchemaError("edges", f"edge ({u}, {v}) references unknown point")
    return SampledGraph(
        points=points,
        edges=edges,
        source_set={int(v) for v in obj["source_set"]},
        sink_set={int(v) for v in obj["sink_set"]},
        builder=obj.get("builder", "unknown"),
        seed=int(obj.get("seed", 0)),
        params=dict(obj.get("params", {})),
    )
