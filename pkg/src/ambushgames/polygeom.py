"""Analytic ambush games on polygonal domains with holes.

The traveler crosses a polygon between two boundary edges while the
ambusher, whose trap reaches a radius R, picks points anywhere in the
domain. The machinery: a clearance graph over the holes and the two
boundary chains, a thresholded shortest path through it giving the
minimum number of ambushes that seal the domain, the game value as its
reciprocal, and the ambusher's evenly spaced placement along the
sealing segments.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import geom
from .errors import InvalidReach, SchemaError

TOP = "T"
BOTTOM = "B"


@dataclass
class PolygonalDomain:
    """Simple polygon with disjoint polygonal holes and two terminal edges.

    ``outer`` is counterclockwise; ``source_edge`` and ``sink_edge``
    are indices (i, j) of outer vertices with j following i, naming
    disjoint boundary segments. The top chain runs counterclockwise
    from the sink edge to the source edge, the bottom chain clockwise.
    """

    outer: np.ndarray
    holes: list = field(default_factory=list)
    source_edge: tuple[int, int] = (0, 1)
    sink_edge: tuple[int, int] = (2, 3)

    def __post_init__(self):
        self.outer = np.asarray(self.outer, dtype=float).reshape(-1, 2)
        self.holes = [np.asarray(h, dtype=float).reshape(-1, 2) for h in self.holes]
        self.source_edge = (int(self.source_edge[0]), int(self.source_edge[1]))
        self.sink_edge = (int(self.sink_edge[0]), int(self.sink_edge[1]))
        self._validate()

    def _validate(self):
        n = len(self.outer)
        if n < 3:
            raise ValueError("outer boundary needs at least 3 vertices")
        if not geom.polygon_is_simple(self.outer):
            raise ValueError("outer boundary must be a simple polygon")
        if geom.signed_area(self.outer) <= 0:
            raise ValueError("outer boundary must be counterclockwise")
        for idx, name in ((self.source_edge, "source_edge"), (self.sink_edge, "sink_edge")):
            i, j = idx
            if not (0 <= i < n and 0 <= j < n and j == (i + 1) % n):
                raise ValueError(f"{name} must name consecutive outer vertices")
        if set(self.source_edge) & set(self.sink_edge):
            raise ValueError("source and sink edges must be disjoint")
        for hi, hole in enumerate(self.holes):
            if len(hole) < 3 or not geom.polygon_is_simple(hole):
                raise ValueError(f"hole {hi} must be a simple polygon")
            for pt in hole:
                if not geom.point_strictly_in_polygon(pt, self.outer):
                    raise ValueError(f"hole {hi} is not strictly inside the outer boundary")
            A, B = geom.poly_edges(hole)
            OA, OB = geom.poly_edges(self.outer)
            if geom.segments_cross_edges(A, B, OA, OB).any():
                raise ValueError(f"hole {hi} crosses the outer boundary")
        for i in range(len(self.holes)):
            for j in range(i + 1, len(self.holes)):
                d, _, _ = geom.chain_to_chain_distance(
                    self.holes[i], self.holes[j], closed_a=True, closed_b=True
                )
                if d <= geom.EPS:
                    raise ValueError(f"holes {i} and {j} touch or overlap")
                if geom.points_in_polygon(self.holes[i][:1], self.holes[j])[0] or (
                    geom.points_in_polygon(self.holes[j][:1], self.holes[i])[0]
                ):
                    raise ValueError(f"holes {i} and {j} are nested")

    # -- derived geometry ------------------------------------------------------

    @cached_property
    def source_segment(self) -> np.ndarray:
        i, j = self.source_edge
        return np.array([self.outer[i], self.outer[j]])

    @cached_property
    def sink_segment(self) -> np.ndarray:
        i, j = self.sink_edge
        return np.array([self.outer[i], self.outer[j]])

    @cached_property
    def top_chain(self) -> np.ndarray:
        """Boundary polyline from the sink edge's end counterclockwise to
        the source edge's start."""
        return self._walk(self.sink_edge[1], self.source_edge[0])

    @cached_property
    def bottom_chain(self) -> np.ndarray:
        """Boundary polyline from the source edge's end counterclockwise to
        the sink edge's start (the clockwise walk from sink to source)."""
        return self._walk(self.source_edge[1], self.sink_edge[0])

    def _walk(self, start: int, stop: int) -> np.ndarray:
        n = len(self.outer)
        idx = [start]
        while idx[-1] != stop:
            idx.append((idx[-1] + 1) % n)
        return self.outer[idx]

    @cached_property
    def obstacle_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """All boundary edges (outer ring plus hole rings) as (A, B)."""
        firsts, seconds = [], []
        for poly in [self.outer, *self.holes]:
            A, B = geom.poly_edges(poly)
            firsts.append(A)
            seconds.append(B)
        return np.vstack(firsts), np.vstack(seconds)

    @cached_property
    def bbox(self) -> tuple[float, float, float, float]:
        return (
            float(self.outer[:, 0].min()),
            float(self.outer[:, 1].min()),
            float(self.outer[:, 0].max()),
            float(self.outer[:, 1].max()),
        )

    @cached_property
    def free_area(self) -> float:
        return geom.signed_area(self.outer) - sum(
            abs(geom.signed_area(h)) for h in self.holes
        )

    def diagonal(self) -> float:
        x0, y0, x1, y1 = self.bbox
        return math.hypot(x1 - x0, y1 - y0)

    # -- free-space queries ------------------------------------------------------

    def point_free(self, pt) -> bool:
        """Inside the outer boundary (inclusive) and in no hole interior."""
        if not geom.point_in_polygon(pt, self.outer, include_boundary=True):
            return False
        return not any(geom.point_strictly_in_polygon(pt, h) for h in self.holes)

    @cached_property
    def _ring_edges(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Cached (A, B) edge arrays: outer ring first, then each hole."""
        return [geom.poly_edges(p) for p in [self.outer, *self.holes]]

    def points_free(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`point_free` over an (n, 2) array."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        OA, OB = self._ring_edges[0]
        on_outer = geom.points_edges_distance(pts, OA, OB).min(axis=1) <= geom.EPS
        free = geom.points_in_ring(pts, OA, OB) | on_outer
        for HA, HB in self._ring_edges[1:]:
            on_hole = geom.points_edges_distance(pts, HA, HB).min(axis=1) <= geom.EPS
            free &= ~(geom.points_in_ring(pts, HA, HB) & ~on_hole)
        return free


@dataclass
class CriticalGraph:
    """Complete clearance graph over the holes and the two boundary chains.

    Node names: ``"T"``, ``"B"``, and ``"H<i>"`` per hole. Edge lengths
    are plain Euclidean clearances; each edge carries the closest point
    pair realizing it.
    """

    nodes: list[str]
    edge_length: dict[tuple[str, str], float]
    witness_segment: dict[tuple[str, str], tuple[np.ndarray, np.ndarray]]

    def length(self, a: str, b: str) -> float:
        return self.edge_length[_key(a, b)]

    def witness(self, a: str, b: str):
        p, q = self.witness_segment[_key(a, b)]
        return (p, q) if _key(a, b) == (a, b) else (q, p)


def _key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass
class AmbushMinCut:
    """A sealing chain of witness segments with per-segment ambush counts."""

    segments: list[tuple[np.ndarray, np.ndarray]]
    per_segment_count: list[int]
    capacity: int
    reach: float
    node_path: list[str]


def polygon_distance(chain_a, chain_b, closed_a=False, closed_b=False):
    """Euclidean clearance between two boundary chains with a witness.

    Intersecting inputs give distance 0 with a common point as witness.
    """
    return geom.chain_to_chain_distance(chain_a, chain_b, closed_a, closed_b)


def critical_graph(domain: PolygonalDomain) -> CriticalGraph:
    """Clearance graph over holes plus the top and bottom chains."""
    chains: dict[str, tuple[np.ndarray, bool]] = {
        TOP: (domain.top_chain, False),
        BOTTOM: (domain.bottom_chain, False),
    }
    for i, hole in enumerate(domain.holes):
        chains[f"H{i}"] = (hole, True)
    nodes = [TOP, BOTTOM] + [f"H{i}" for i in range(len(domain.holes))]

    lengths: dict[tuple[str, str], float] = {}
    witnesses: dict[tuple[str, str], tuple[np.ndarray, np.ndarray]] = {}
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            pa, ca = chains[a]
            pb, cb = chains[b]
            d, wa, wb = geom.chain_to_chain_distance(pa, pb, closed_a=ca, closed_b=cb)
            key = _key(a, b)
            lengths[key] = d
            witnesses[key] = (wa, wb) if key == (a, b) else (wb, wa)
    return CriticalGraph(nodes=nodes, edge_length=lengths, witness_segment=witnesses)


def ambush_cardinality(segment_lengths, reach: float) -> int:
    """Ambushes needed to seal a chain of segments: sum of ceil(len / 2R).

    A zero-length segment still needs one ambush at the touching point.
    """
    if reach <= 0:
        raise InvalidReach(f"reach must be positive, got {reach}")
    total = 0
    for length in segment_lengths:
        total += segment_ambush_count(length, reach)
    return total


def segment_ambush_count(length: float, reach: float) -> int:
    if reach <= 0:
        raise InvalidReach(f"reach must be positive, got {reach}")
    if length <= 0.0:
        return 1
    return max(1, math.ceil(length / (2.0 * reach)))


def ambush_min_cut(domain: PolygonalDomain, reach: float) -> AmbushMinCut:
    """Cheapest sealing chain: the shortest top-bottom path in the
    clearance graph under weight ceil(length / 2R) per edge.

    Integer-weight Dijkstra with lexicographic tie-breaking, so output
    is deterministic.
    """
    if reach <= 0:
        raise InvalidReach(f"reach must be positive, got {reach}")
    graph = critical_graph(domain)
    weight = {
        key: segment_ambush_count(length, reach)
        for key, length in graph.edge_length.items()
    }

    dist: dict[str, float] = {TOP: 0.0}
    parent: dict[str, str] = {}
    heap: list[tuple[float, str]] = [(0.0, TOP)]
    done: set[str] = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == BOTTOM:
            break
        for v in graph.nodes:
            if v == u or v in done:
                continue
            nd = d + weight[_key(u, v)]
            if nd < dist.get(v, math.inf) or (
                nd == dist.get(v, math.inf) and u < parent.get(v, "~")
            ):
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))

    path = [BOTTOM]
    while path[-1] != TOP:
        path.append(parent[path[-1]])
    path.reverse()

    segments, counts = [], []
    for a, b in zip(path[:-1], path[1:]):
        segments.append(graph.witness(a, b))
        counts.append(weight[_key(a, b)])
    return AmbushMinCut(
        segments=segments,
        per_segment_count=counts,
        capacity=int(sum(counts)),
        reach=reach,
        node_path=path,
    )


def cag_value(domain: PolygonalDomain, reach: float) -> float:
    """Optimal traveler survival game value: 1 over the sealing count."""
    return 1.0 / ambush_min_cut(domain, reach).capacity


def red_placement(cut: AmbushMinCut) -> list[tuple[np.ndarray, float]]:
    """Evenly spaced ambush points along each cut segment.

    Segment i with count n gets points at fractions (2k-1)/(2n); each
    point carries probability 1/capacity, and consecutive points are at
    most 2R apart with at most R of slack at the segment ends.
    """
    placements = []
    prob = 1.0 / cut.capacity
    for (a, b), n in zip(cut.segments, cut.per_segment_count):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        for k in range(1, n + 1):
            t = (2 * k - 1) / (2 * n)
            placements.append((a + t * (b - a), prob))
    return placements


# --- randomized test environments ----------------------------------------------


def random_domain(
    seed: int,
    width: float = 12.0,
    height: float = 8.0,
    n_holes: int = 3,
    hole_radius: tuple[float, float] = (0.7, 1.4),
    clearance: float = 1.2,
    max_tries: int = 400,
) -> PolygonalDomain:
    """Rectangle with random convex holes, terminals on left and right.

    Holes keep at least ``clearance`` from each other and from the
    boundary, so cut structure stays stable under small perturbations.
    """
    rng = np.random.default_rng(seed)
    outer = np.array(
        [[0.0, 0.0], [width, 0.0], [width, height], [0.0, height]]
    )
    holes: list[np.ndarray] = []
    tries = 0
    while len(holes) < n_holes and tries < max_tries:
        tries += 1
        r = rng.uniform(*hole_radius)
        cx = rng.uniform(clearance + r, width - clearance - r)
        cy = rng.uniform(clearance + r, height - clearance - r)
        k = int(rng.integers(4, 8))
        angles = np.sort(rng.uniform(0, 2 * math.pi, size=k))
        radii = rng.uniform(0.6 * r, r, size=k)
        hole = np.column_stack(
            [cx + radii * np.cos(angles), cy + radii * np.sin(angles)]
        )
        if abs(geom.signed_area(hole)) < 0.2 or not geom.polygon_is_simple(hole):
            continue
        ok = True
        for other in holes:
            d, _, _ = geom.chain_to_chain_distance(hole, other, True, True)
            if d < clearance:
                ok = False
                break
        if ok:
            holes.append(hole)
    return PolygonalDomain(
        outer=outer, holes=holes, source_edge=(3, 0), sink_edge=(1, 2)
    )


def corridor_domain(length: float = 10.0, width: float = 10.0) -> PolygonalDomain:
    """Empty rectangle traversed left to right; the single top-bottom
    clearance equals the corridor width."""
    outer = np.array([[0.0, 0.0], [length, 0.0], [length, width], [0.0, width]])
    return PolygonalDomain(outer=outer, holes=[], source_edge=(3, 0), sink_edge=(1, 2))


# --- JSON schema ----------------------------------------------------------------


def domain_from_json(obj: dict) -> tuple[PolygonalDomain, float | None]:
    """Domain JSON: outer/holes vertex lists, terminal edge indices, and
    an optional reach radius R. Returns (domain, R or None)."""
    if not isinstance(obj, dict):
        raise SchemaError("$", "expected a JSON object")
    for key in ("outer", "source_edge", "sink_edge"):
        if key not in obj:
            raise SchemaError(key, "missing required field")
    try:
        outer = np.asarray(obj["outer"], dtype=float).reshape(-1, 2)
    except (TypeError, ValueError):
        raise SchemaError("outer", "expected a list of [x, y] pairs")
    holes = []
    for i, h in enumerate(obj.get("holes", [])):
        try:
            holes.append(np.asarray(h, dtype=float).reshape(-1, 2))
        except (TypeError, ValueError):
            raise SchemaError(f"holes[{i}]", "expected a list of [x, y] pairs")
    edges = {}
    for name in ("source_edge", "sink_edge"):
        try:
            pair = tuple(int(v) for v in obj[name])
        except (TypeError, ValueError):
            raise SchemaError(name, "expected an [i, j] index pair")
        if len(pair) != 2:
            raise SchemaError(name, "expected exactly two indices")
        edges[name] = pair
    source_edge, sink_edge = edges["source_edge"], edges["sink_edge"]
    reach = None
    if "R" in obj:
        try:
            reach = float(obj["R"])
        except (TypeError, ValueError):
            raise SchemaError("R", "expected a real number")
    try:
        domain = PolygonalDomain(
            outer=outer, holes=holes, source_edge=source_edge, sink_edge=sink_edge
        )
    except ValueError as exc:
        raise SchemaError("domain", str(exc))
    return domain, reach


def domain_to_json(domain: PolygonalDomain, reach: float | None = None) -> dict:
    obj = {
        "outer": domain.outer.tolist(),
        "holes": [h.tolist() for h in domain.holes],
        "source_edge": list(domain.source_edge),
        "sink_edge": list(domain.sink_edge),
    }
    if reach is not None:
        obj["R"] = reach
    return obj
