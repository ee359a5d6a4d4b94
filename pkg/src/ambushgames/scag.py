"""Sampled continuous ambush game over a free-space graph.

Ambush sites carry circular reach zones of radius R; the traveler is
caught on every edge that enters a zone from outside (an edge wholly
inside a zone does not count again). The game is the same minimax LP
as the discrete network game, with one outcome row per site summing
the entering-edge probabilities, and terminals generalized to vertex
sets through a virtual super-source and super-sink.

Ambush sites stay at least R away from the terminal edges; without
that exclusion a route could begin inside a zone and never "enter" it,
making the entering-edge payoff undercount.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import geom, netflow, polygeom, samplers
from .discrete_game import GameSolution, assemble_minimax_lp, strategy_from_dual
from .errors import (
    EmptyTerminalSet,
    InfeasibleGame,
    NoPath,
    NoSites,
    SchemaError,
)
from . import lp as lpmod
from .polygeom import PolygonalDomain
from .samplers import SampledGraph

log = logging.getLogger(__name__)

SUPER_SOURCE = -1
SUPER_SINK = -2


@dataclass
class AmbushSiteSet:
    """Candidate ambush locations with rewards and a shared reach radius."""

    sites: dict[int, tuple[float, float]]
    alpha: dict[int, float]
    reach: float

    def validate(self, domain: PolygonalDomain) -> None:
        if self.reach <= 0:
            raise ValueError("reach must be positive")
        if not self.sites:
            raise NoSites("site set is empty")
        pts = np.array([self.sites[k] for k in sorted(self.sites)])
        inside = geom.points_in_polygon(pts, domain.outer)
        OA, OB = geom.poly_edges(domain.outer)
        on_boundary = geom.points_edges_distance(pts, OA, OB).min(axis=1) <= geom.EPS
        if not np.all(inside | on_boundary):
            raise ValueError("every site must lie inside the outer boundary")
        for seg in (domain.source_segment, domain.sink_segment):
            d = geom.points_segment_distance(pts, *seg)
            if np.any(d <= self.reach - geom.EPS):
                raise ValueError("sites must keep one reach radius away from terminals")
        for k, a in self.alpha.items():
            if a < 0:
                raise ValueError(f"negative reward at site {k}")

    def point_array(self) -> np.ndarray:
        return np.array([self.sites[k] for k in sorted(self.sites)], dtype=float)


def cover_sites(
    domain: PolygonalDomain,
    reach: float,
    density_factor: float = 1.0,
    seed: int = 0,
) -> AmbushSiteSet:
    """Hexagonal site lattice covering the domain at radius R/density_factor.

    Lattice points falling outside the outer boundary or within one
    reach radius of a terminal edge are dropped; a deterministic repair
    pass then adds probe points wherever coverage fell short, so every
    free point outside the terminal exclusion disks ends up within R of
    a site. Rewards default to 1.
    """
    if density_factor < 1.0:
        raise ValueError("density_factor must be at least 1")
    if reach <= 0:
        raise ValueError("reach must be positive")
    cover_radius = reach / density_factor
    pitch = math.sqrt(3.0) * cover_radius
    row_h = pitch * math.sqrt(3.0) / 2.0
    rng = np.random.Generator(np.random.PCG64(seed))
    ox = rng.uniform(0.0, pitch)
    oy = rng.uniform(0.0, row_h)

    x0, y0, x1, y1 = domain.bbox
    candidates = []
    row = 0
    y = y0 - row_h + oy
    while y <= y1 + row_h:
        shift = 0.5 * pitch if row % 2 else 0.0
        x = x0 - pitch + ox + shift
        while x <= x1 + pitch:
            candidates.append((x, y))
            x += pitch
        y += row_h
        row += 1
    kept = _admissible_sites(np.array(candidates), domain, reach)

    # repair: deterministic probes plus seeded random ones
    probes = [_probe_grid(domain, cover_radius / 2.0)]
    x0, y0, x1, y1 = domain.bbox
    rand = np.column_stack(
        [rng.uniform(x0, x1, size=2000), rng.uniform(y0, y1, size=2000)]
    )
    probes.append(rand)
    probe_pts = _admissible_sites(np.vstack(probes), domain, reach)
    probe_pts = probe_pts[domain.points_free(probe_pts)]
    # leave just enough slack that points between probes stay covered
    threshold = reach - 0.75 * (cover_radius / 2.0)
    site_list = [tuple(p) for p in kept]
    for p in probe_pts:
        if not site_list:
            site_list.append((float(p[0]), float(p[1])))
            continue
        arr = np.asarray(site_list)
        if np.min(np.hypot(arr[:, 0] - p[0], arr[:, 1] - p[1])) > threshold:
            site_list.append((float(p[0]), float(p[1])))

    if not site_list:
        raise NoSites("terminal exclusion disks cover the whole domain")
    sites = {i: (float(x), float(y)) for i, (x, y) in enumerate(site_list)}
    return AmbushSiteSet(
        sites=sites, alpha={i: 1.0 for i in sites}, reach=reach
    )


def _probe_grid(domain: PolygonalDomain, pitch: float) -> np.ndarray:
    x0, y0, x1, y1 = domain.bbox
    xs = np.arange(x0, x1 + pitch, pitch)
    ys = np.arange(y0, y1 + pitch, pitch)
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


def _admissible_sites(pts: np.ndarray, domain: PolygonalDomain, reach: float) -> np.ndarray:
    """Inside the outer boundary and clear of both terminal exclusions."""
    if len(pts) == 0:
        return pts.reshape(0, 2)
    OA, OB = geom.poly_edges(domain.outer)
    inside = geom.points_in_polygon(pts, domain.outer)
    inside |= geom.points_edges_distance(pts, OA, OB).min(axis=1) <= geom.EPS
    near_src = geom.points_segment_distance(pts, *domain.source_segment) <= reach
    near_snk = geom.points_segment_distance(pts, *domain.sink_segment) <= reach
    return pts[inside & ~near_src & ~near_snk]


def entering_edges(graph: SampledGraph, site, reach: float) -> set[tuple[int, int]]:
    """Directed edges whose tail is outside the closed reach disk and
    whose head is inside it."""
    if not graph.edges:
        return set()
    edges = sorted(graph.edges)
    tails = np.array([graph.points[u] for u, _ in edges])
    heads = np.array([graph.points[v] for _, v in edges])
    sx, sy = site
    d_tail = np.hypot(tails[:, 0] - sx, tails[:, 1] - sy)
    d_head = np.hypot(heads[:, 0] - sx, heads[:, 1] - sy)
    mask = (d_tail > reach) & (d_head <= reach)
    return {edges[i] for i in np.nonzero(mask)[0]}


@dataclass
class ScagInstance:
    """A sampled graph bound to a site set, with entering-edge sets
    precomputed per site."""

    graph: SampledGraph
    sites: AmbushSiteSet
    entering: dict[int, frozenset]

    @classmethod
    def build(cls, graph: SampledGraph, sites: AmbushSiteSet) -> "ScagInstance":
        edges = sorted(graph.edges)
        entering: dict[int, frozenset] = {k: frozenset() for k in sites.sites}
        if edges:
            # one point-to-site distance matrix, then per-edge lookups
            vertex_ids = sorted(graph.points)
            vindex = {v: i for i, v in enumerate(vertex_ids)}
            pts = graph.point_array(vertex_ids)
            site_ids = sorted(sites.sites)
            centers = np.array([sites.sites[k] for k in site_ids])
            inside = (
                np.hypot(
                    pts[:, None, 0] - centers[None, :, 0],
                    pts[:, None, 1] - centers[None, :, 1],
                )
                <= sites.reach
            )
            tails = np.array([vindex[u] for u, _ in edges])
            heads = np.array([vindex[v] for _, v in edges])
            for col, k in enumerate(site_ids):
                mask = ~inside[tails, col] & inside[heads, col]
                entering[k] = frozenset(edges[i] for i in np.nonzero(mask)[0])
        return cls(graph=graph, sites=sites, entering=entering)


@dataclass
class ScagSolution(GameSolution):
    """Game solution plus the route decomposition used to realize it."""

    path_weights: list[tuple[list[int], float]] = field(default_factory=list)


def _edge_variables(graph: SampledGraph) -> list:
    real = sorted(graph.edges)
    virtual_in = [(SUPER_SOURCE, v) for v in sorted(graph.source_set)]
    virtual_out = [(v, SUPER_SINK) for v in sorted(graph.sink_set)]
    return real + virtual_in + virtual_out


def _terminal_sets_reachable(graph: SampledGraph) -> bool:
    if not graph.source_set or not graph.sink_set:
        return False
    succ: dict[int, list[int]] = {}
    for u, v in graph.edges:
        succ.setdefault(u, []).append(v)
    seen = set(graph.source_set)
    stack = list(seen)
    while stack:
        u = stack.pop()
        if u in graph.sink_set:
            return True
        for v in succ.get(u, []):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return bool(seen & graph.sink_set)


def build_lp(instance: ScagInstance, rewards: dict[int, float] | None = None):
    """Minimax LP over directed graph edges plus virtual terminal edges."""
    if not _terminal_sets_reachable(instance.graph):
        raise InfeasibleGame("sink set unreachable from source set")
    rewards = instance.sites.alpha if rewards is None else rewards
    graph = instance.graph
    variables = _edge_variables(graph)

    eq_rows: list[tuple[dict, float]] = []
    incident_in: dict[int, dict] = {v: {} for v in graph.points}
    for u, v in graph.edges:
        incident_in[v][(u, v)] = incident_in[v].get((u, v), 0.0) + 1.0
        incident_in[u][(u, v)] = incident_in[u].get((u, v), 0.0) - 1.0
    for v in sorted(graph.source_set):
        incident_in[v][(SUPER_SOURCE, v)] = 1.0
    for v in sorted(graph.sink_set):
        incident_in[v][(v, SUPER_SINK)] = -1.0
    for v in sorted(graph.points):
        eq_rows.append((incident_in[v], 0.0))
    eq_rows.append(({(SUPER_SOURCE, v): 1.0 for v in sorted(graph.source_set)}, 1.0))
    eq_rows.append(({(v, SUPER_SINK): 1.0 for v in sorted(graph.sink_set)}, 1.0))

    groups = [
        (rewards.get(k, 0.0), sorted(instance.entering[k]))
        for k in sorted(instance.sites.sites)
        if rewards.get(k, 0.0) > 0.0
    ]
    return assemble_minimax_lp(variables, eq_rows, groups)


def solve_scag(
    instance: ScagInstance,
    rewards: dict[int, float] | None = None,
    method: str = "auto",
) -> ScagSolution:
    """Solve the sampled game; the ambush mixture over sites comes from
    the LP duals and the route mixture from a path decomposition of the
    optimal flow (dropping any degenerate circulation)."""
    rewards = instance.sites.alpha if rewards is None else rewards
    program = build_lp(instance, rewards)
    sol = lpmod.solve(program, method=method)
    if sol.status is lpmod.LpStatus.INFEASIBLE:
        raise InfeasibleGame("traveler flow constraints are infeasible")
    if sol.status is not lpmod.LpStatus.OPTIMAL:
        raise InfeasibleGame(f"unexpected solver status {sol.status}")

    variables = _edge_variables(instance.graph)
    raw = {e: max(float(x), 0.0) for e, x in zip(variables, sol.primal)}
    pieces, _ = netflow._peel_paths(raw, SUPER_SOURCE, SUPER_SINK)
    p = {e: 0.0 for e in sorted(instance.graph.edges)}
    path_weights = []
    for path, w in pieces:
        inner = path[1:-1]
        path_weights.append((inner, w))
        for i in range(len(inner) - 1):
            p[(inner[i], inner[i + 1])] += w

    keys = [
        k for k in sorted(instance.sites.sites) if rewards.get(k, 0.0) > 0.0
    ]
    q_pos = strategy_from_dual(sol.dual_ineq, keys, sorted(instance.sites.sites))
    q = {k: q_pos.get(k, 0.0) for k in sorted(instance.sites.sites)}
    return ScagSolution(
        p=p, q=q, value=float(sol.objective_value), path_weights=path_weights
    )


def expected_outcome(
    instance: ScagInstance,
    p: dict,
    q: dict,
    rewards: dict[int, float] | None = None,
) -> float:
    """Sum over sites of trap probability times reward-weighted mass of
    edges entering the site's reach zone."""
    rewards = instance.sites.alpha if rewards is None else rewards
    total = 0.0
    for k, members in instance.entering.items():
        qk = q.get(k, 0.0)
        if qk == 0.0:
            continue
        total += qk * rewards.get(k, 0.0) * sum(p.get(e, 0.0) for e in members)
    return total


def site_best_response(
    instance: ScagInstance, p: dict, rewards: dict[int, float] | None = None
) -> float:
    """Best single site against a fixed traveler flow."""
    rewards = instance.sites.alpha if rewards is None else rewards
    best = 0.0
    for k, members in instance.entering.items():
        best = max(best, rewards.get(k, 0.0) * sum(p.get(e, 0.0) for e in members))
    return best


def path_best_response(
    instance: ScagInstance, q: dict, rewards: dict[int, float] | None = None
) -> float:
    """Cheapest source-to-sink route against a fixed ambush mixture:
    Dijkstra with the trap mass collected on zone-entering edges."""
    import heapq

    rewards = instance.sites.alpha if rewards is None else rewards
    weight: dict[tuple[int, int], float] = {}
    for k, members in instance.entering.items():
        mass = q.get(k, 0.0) * rewards.get(k, 0.0)
        if mass <= 0.0:
            continue
        for e in members:
            weight[e] = weight.get(e, 0.0) + mass

    graph = instance.graph
    succ: dict[int, list[tuple[int, float]]] = {}
    for u, v in sorted(graph.edges):
        succ.setdefault(u, []).append((v, weight.get((u, v), 0.0)))
    dist = {v: 0.0 for v in graph.source_set}
    heap = [(0.0, v) for v in sorted(graph.source_set)]
    heapq.heapify(heap)
    best = math.inf
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        if u in graph.sink_set:
            best = min(best, d)
        for v, w in succ.get(u, []):
            nd = d + w
            if nd < dist.get(v, math.inf) - 1e-15:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return best


@dataclass
class ConvergencePoint:
    n: int
    seed: int
    value: float | None
    cag_value: float
    runtime_ms: float


def convergence_run(
    domain: PolygonalDomain,
    reach: float,
    builder: str,
    schedule: list[int],
    seeds: tuple[int, ...] = (0,),
    density_factor: float = 2.0,
    site_seed: int = 0,
    eta: float | None = None,
    method: str = "auto",
) -> list[ConvergencePoint]:
    """Solve the sampled game along a growing vertex schedule against one
    fixed covering site set, recording values next to the analytic
    optimum. Infeasible points (no route yet) record an undefined value.
    """
    if list(schedule) != sorted(schedule):
        raise ValueError("schedule must be increasing")
    sites = cover_sites(domain, reach, density_factor=density_factor, seed=site_seed)
    reference = polygeom.cag_value(domain, reach)
    run_seeds = (0,) if builder == "grid" else tuple(seeds)

    points = []
    last: dict[int, float] = {}
    for n in schedule:
        for seed in run_seeds:
            start = time.perf_counter()
            try:
                graph = samplers.build(domain, builder, n, seed=seed, eta=eta)
                instance = ScagInstance.build(graph, sites)
                value = solve_scag(instance, method=method).value
            except (EmptyTerminalSet, InfeasibleGame, NoPath):
                value = None
            elapsed = (time.perf_counter() - start) * 1000.0
            if (
                builder == "grid"
                and value is not None
                and seed in last
                and value > last[seed] + 1e-9
            ):
                # grids are resampled from scratch per n, so the value may
                # climb back up; expected, and worth a trace when it happens
                log.info(
                    "grid value rose from %.6f to %.6f at n=%d", last[seed], value, n
                )
            if value is not None:
                last[seed] = value
            points.append(
                ConvergencePoint(
                    n=n, seed=seed, value=value, cag_value=reference, runtime_ms=elapsed
                )
            )
    return points


# --- JSON schema ------------------------------------------------------------------


def instance_to_json(
    domain: PolygonalDomain, instance: ScagInstance
) -> dict:
    obj = polygeom.domain_to_json(domain, reach=instance.sites.reach)
    obj.update(samplers.graph_to_json(instance.graph))
    obj["sites"] = {str(k): list(xy) for k, xy in sorted(instance.sites.sites.items())}
    obj["alpha"] = {str(k): instance.sites.alpha.get(k, 0.0) for k in sorted(instance.sites.sites)}
    obj["R"] = instance.sites.reach
    return obj


def sites_from_json(obj: dict) -> AmbushSiteSet:
    if "sites" not in obj:
        raise SchemaError("sites", "missing required field")
    if "R" not in obj:
        raise SchemaError("R", "missing required field")
    try:
        sites = {int(k): (float(x), float(y)) for k, (x, y) in obj["sites"].items()}
    except (TypeError, ValueError):
        raise SchemaError("sites", "expected id -> [x, y]")
    alpha = {k: 1.0 for k in sites}
    for k, a in obj.get("alpha", {}).items():
        try:
            alpha[int(k)] = float(a)
        except (TypeError, ValueError):
            raise SchemaError(f"alpha.{k}", "expected site id -> real")
    return AmbushSiteSet(sites=sites, alpha=alpha, reach=float(obj["R"]))
