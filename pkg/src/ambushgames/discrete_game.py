"""The single-ambush game on a directed network.

A traveler (BLUE) ships one unit of route probability from source to
sink; an ambusher (RED) picks one vertex to trap. BLUE pays the local
reward whenever the realized path enters the trapped vertex. BLUE's
minimax program is a linear program over edge probabilities with a
slack variable bounding every vertex's weighted inflow; RED's optimal
mixture falls out of the same solve as the inequality duals.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import lp as lpmod
from . import netflow
from .errors import InfeasibleGame, InvalidFlow, InvalidStrategy, NoPath, SchemaError
from .netflow import Edge, VertexCapNetwork

Rewards = dict[int, float]


@dataclass
class GameSolution:
    """Mixed strategies for both players and the value they guarantee.

    ``p`` maps directed edges to traveler probabilities (a unit flow),
    ``q`` maps ambush locations to trap probabilities, and ``value`` is
    the expected reward under optimal play by both sides.
    """

    p: dict[Edge, float]
    q: dict
    value: float


def uniform_internal_rewards(net: VertexCapNetwork, value: float = 1.0) -> Rewards:
    """Reward ``value`` at every internal vertex, zero at the terminals."""
    return {
        v: (0.0 if v in (net.source, net.sink) else value) for v in net.vertices
    }


def expected_outcome(
    net: VertexCapNetwork, p: dict[Edge, float], q: dict[int, float], rewards: Rewards
) -> float:
    """Bilinear payoff: sum over edges (i,j) of p_ij * q_j * alpha_j."""
    for e in p:
        if e not in net.edges:
            raise InvalidStrategy(f"traveler strategy uses unknown edge {e}")
    for v in q:
        if v not in net.vertices:
            raise InvalidStrategy(f"ambusher strategy uses unknown vertex {v}")
    total = 0.0
    for (i, j), pij in p.items():
        total += pij * q.get(j, 0.0) * rewards.get(j, 0.0)
    return total


def edge_order(net: VertexCapNetwork) -> list[Edge]:
    """Deterministic variable ordering for the game LP."""
    return sorted(net.edges)


def ambush_rows(net: VertexCapNetwork, rewards: Rewards) -> list[int]:
    """Vertices that get an inequality row: positive reward only."""
    return sorted(v for v in net.vertices if rewards.get(v, 0.0) > 0.0)


def assemble_minimax_lp(
    edges: list,
    eq_rows: list[tuple[dict, float]],
    ambush_groups: list[tuple[float, list]],
) -> lpmod.LinearProgram:
    """Generic traveler-vs-ambusher LP over a list of edge variables.

    Variables are the given edges followed by the outcome bound ``z``
    (minimized, nonnegative). ``eq_rows`` are (coefficients-by-edge,
    rhs) pairs encoding flow conservation; each ambush group
    ``(alpha, member_edges)`` contributes ``alpha * sum(p_e) - z <= 0``.
    """
    index = {e: k for k, e in enumerate(edges)}
    n = len(edges) + 1
    z_col = len(edges)

    rows_i, cols_i, vals_i = [], [], []
    for r, (alpha, members) in enumerate(ambush_groups):
        for e in members:
            rows_i.append(r)
            cols_i.append(index[e])
            vals_i.append(alpha)
        rows_i.append(r)
        cols_i.append(z_col)
        vals_i.append(-1.0)
    G = sp.coo_matrix((vals_i, (rows_i, cols_i)), shape=(len(ambush_groups), n)).tocsr()
    h = np.zeros(len(ambush_groups))

    rows_e, cols_e, vals_e = [], [], []
    rhs = np.empty(len(eq_rows))
    for r, (coefs, b) in enumerate(eq_rows):
        for e, c in coefs.items():
            rows_e.append(r)
            cols_e.append(index[e])
            vals_e.append(c)
        rhs[r] = b
    A = sp.coo_matrix((vals_e, (rows_e, cols_e)), shape=(len(eq_rows), n)).tocsr()

    c = np.zeros(n)
    c[z_col] = 1.0
    return lpmod.LinearProgram(
        objective=c, ineq_matrix=G, ineq_rhs=h, eq_matrix=A, eq_rhs=rhs
    )


def _reachable(net: VertexCapNetwork, removed=frozenset()) -> set[int]:
    seen = {net.source} - set(removed)
    queue = deque(seen)
    succ: dict[int, list[int]] = {}
    for u, v in net.edges:
        succ.setdefault(u, []).append(v)
    while queue:
        u = queue.popleft()
        for v in succ.get(u, []):
            if v not in seen and v not in removed:
                seen.add(v)
                queue.append(v)
    return seen


def build_lp(net: VertexCapNetwork, rewards: Rewards) -> lpmod.LinearProgram:
    """Assemble the traveler's minimax LP for a discrete network game.

    One equality row per internal vertex (conservation), one each for a
    net unit flow out of the source and into the sink, and one
    inequality row per positive-reward vertex bounding its weighted
    inflow by z. Netting the terminal rows (rather than counting only
    departures and arrivals) closes the loophole of a "flow" that
    satisfies the sink row with cycles through the terminals while the
    realized routes never cross the network.
    """
    if net.sink not in _reachable(net):
        raise InfeasibleGame(f"sink {net.sink} unreachable from source {net.source}")
    edges = edge_order(net)

    eq_rows: list[tuple[dict, float]] = []
    for v in sorted(net.vertices):
        if v in (net.source, net.sink):
            continue
        coefs: dict[Edge, float] = {}
        for u, w in net.edges:
            if w == v:
                coefs[(u, w)] = coefs.get((u, w), 0.0) + 1.0
            if u == v:
                coefs[(u, w)] = coefs.get((u, w), 0.0) - 1.0
        eq_rows.append((coefs, 0.0))
    source_row = {(u, v): 1.0 for u, v in net.edges if u == net.source}
    for u, v in net.edges:
        if v == net.source:
            source_row[(u, v)] = source_row.get((u, v), 0.0) - 1.0
    sink_row = {(u, v): 1.0 for u, v in net.edges if v == net.sink}
    for u, v in net.edges:
        if u == net.sink:
            sink_row[(u, v)] = sink_row.get((u, v), 0.0) - 1.0
    eq_rows.append((source_row, 1.0))
    eq_rows.append((sink_row, 1.0))

    groups = [
        (rewards[v], [(u, w) for u, w in edges if w == v])
        for v in ambush_rows(net, rewards)
    ]
    return assemble_minimax_lp(edges, eq_rows, groups)


def strategy_from_dual(duals: np.ndarray, keys: list, fallback: list) -> dict:
    """Turn inequality-row duals into an ambush probability distribution.

    The duals of the minimax LP sum to one whenever the bound on the
    outcome is active; in value-zero games the mass can fall short, in
    which case any distribution is optimal and a uniform one over the
    fallback locations is returned.
    """
    lam = np.maximum(np.asarray(duals, dtype=float), 0.0)
    total = float(lam.sum())
    if total > 1e-9:
        return {k: float(v) / total for k, v in zip(keys, lam)}
    targets = keys if keys else fallback
    if not targets:
        return {}
    return {k: 1.0 / len(targets) for k in targets}


def solve_game(
    net: VertexCapNetwork, rewards: Rewards, method: str = "auto"
) -> GameSolution:
    """Solve the discrete game: BLUE's flow from the LP primal, RED's
    mixture from the inequality duals, value from the objective.

    The returned flow is rewritten as a superposition of source-sink
    paths, which removes any circulation left by a degenerate optimal
    basis without changing feasibility or the value.
    """
    program = build_lp(net, rewards)
    sol = lpmod.solve(program, method=method)
    if sol.status is lpmod.LpStatus.INFEASIBLE:
        raise InfeasibleGame("traveler flow constraints are infeasible")
    if sol.status is not lpmod.LpStatus.OPTIMAL:
        raise InfeasibleGame(f"unexpected solver status {sol.status}")

    edges = edge_order(net)
    raw = {e: max(float(x), 0.0) for e, x in zip(edges, sol.primal)}
    pieces, _ = netflow._peel_paths(raw, net.source, net.sink)
    p = {e: 0.0 for e in edges}
    for path, w in pieces:
        for i in range(len(path) - 1):
            p[(path[i], path[i + 1])] += w

    keys = ambush_rows(net, rewards)
    internal = sorted(net.vertices - {net.source, net.sink})
    q_pos = strategy_from_dual(sol.dual_ineq, keys, internal)
    q = {v: q_pos.get(v, 0.0) for v in sorted(net.vertices)}
    return GameSolution(p=p, q=q, value=float(sol.objective_value))


def equidistributed_strategies(net: VertexCapNetwork) -> tuple[dict, dict]:
    """Spread BLUE uniformly over a maximum set of vertex-disjoint paths
    and RED uniformly over a minimum vertex cut.

    Requires unit internal capacities. Together the pair is a saddle
    point of the uniform-reward game with value 1/k, k the cut size.
    """
    cut = netflow.min_vertex_cut(net)
    paths = netflow.vertex_disjoint_paths(net)
    k = len(paths)
    if k == 0:
        raise NoPath("no source-sink path exists")
    p = {e: 0.0 for e in net.edges}
    for path in paths:
        for i in range(len(path) - 1):
            p[(path[i], path[i + 1])] += 1.0 / k
    q = {v: (1.0 / k if v in cut.C else 0.0) for v in sorted(net.vertices)}
    return p, q


def best_response_value(
    net: VertexCapNetwork,
    rewards: Rewards,
    p: dict[Edge, float] | None = None,
    q: dict[int, float] | None = None,
) -> float:
    """Value of the unconstrained best response to one fixed strategy.

    With ``p`` fixed, RED picks the vertex maximizing reward-weighted
    inflow. With ``q`` fixed, BLUE routes along the source-sink path
    minimizing the summed trap mass, found by a shortest path whose
    cost is collected on entering each vertex.
    """
    if (p is None) == (q is None):
        raise ValueError("fix exactly one of p, q")
    if p is not None:
        best = 0.0
        for v in net.vertices:
            inflow = sum(f for (i, j), f in p.items() if j == v)
            best = max(best, rewards.get(v, 0.0) * inflow)
        return best

    weight = {v: q.get(v, 0.0) * rewards.get(v, 0.0) for v in net.vertices}
    dist = {net.source: 0.0}
    heap = [(0.0, net.source)]
    succ: dict[int, list[int]] = {}
    for u, v in net.edges:
        succ.setdefault(u, []).append(v)
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        if u == net.sink:
            return d
        for v in sorted(succ.get(u, [])):
            nd = d + weight[v]
            if nd < dist.get(v, math.inf) - 1e-15:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return math.inf


def red_support_contains_cut(net: VertexCapNetwork, support: set[int]) -> bool:
    """True iff removing the support vertices disconnects source from sink."""
    support = set(support)
    if net.source in support or net.sink in support:
        raise ValueError("support must exclude the terminals")
    return net.sink not in _reachable(net, removed=frozenset(support))


# --- JSON schemas -------------------------------------------------------------


def game_from_json(obj: dict) -> tuple[VertexCapNetwork, Rewards]:
    """Game instance JSON: the network schema plus ``{"alpha": {id: real}}``.

    A missing alpha block defaults to the uniform convention (1 at
    internal vertices, 0 at the terminals); vertices missing from an
    explicit block get 0.
    """
    net = netflow.network_from_json(obj)
    if "alpha" not in obj:
        return net, uniform_internal_rewards(net)
    alpha: Rewards = {v: 0.0 for v in net.vertices}
    for k, val in obj["alpha"].items():
        try:
            key, value = int(k), float(val)
        except (TypeError, ValueError):
            raise SchemaError(f"alpha.{k}", "expected vertex id -> real")
        if key not in net.vertices:
            raise SchemaError(f"alpha.{k}", "unknown vertex")
        if value < 0:
            raise SchemaError(f"alpha.{k}", "rewards must be nonnegative")
        alpha[key] = value
    return net, alpha


def solution_to_json(sol: GameSolution) -> dict:
    return {
        "value": sol.value,
        "p": {f"{u}-{v}": prob for (u, v), prob in sorted(sol.p.items())},
        "q": {str(k): prob for k, prob in sorted(sol.q.items(), key=lambda kv: str(kv[0]))},
    }


def validate_solution(
    net: VertexCapNetwork, rewards: Rewards, sol: GameSolution, tol: float = 1e-8
) -> None:
    """Check the strategy-pair invariants: p is a unit flow, q a
    probability distribution, and the value matches the worst
    reward-weighted inflow."""
    netflow.validate_flow(
        net,
        netflow.Flow(edge_flow=dict(sol.p), value=1.0),
        tol=10 * tol,
        check_capacity=False,
    )
    if any(prob < -tol for prob in sol.q.values()):
        raise InvalidStrategy("negative ambush probability")
    if abs(sum(sol.q.values()) - 1.0) > 1e-9:
        raise InvalidStrategy("ambush probabilities must sum to 1")
    worst = best_response_value(net, rewards, p=sol.p)
    if abs(worst - sol.value) > tol:
        raise InvalidStrategy(
            f"value {sol.value} does not match the worst-case inflow {worst}"
        )


def solution_from_json(obj: dict, net: VertexCapNetwork, rewards: Rewards) -> GameSolution:
    """Parse and re-validate a solution document against its game."""
    for key in ("value", "p", "q"):
        if key not in obj:
            raise SchemaError(key, "missing required field")
    p: dict[Edge, float] = {}
    for key, prob in obj["p"].items():
        try:
            u, v = (int(part) for part in key.split("-"))
            p[(u, v)] = float(prob)
        except (TypeError, ValueError):
            raise SchemaError(f"p.{key}", "expected 'u-v' -> probability")
    q = {}
    for key, prob in obj["q"].items():
        try:
            q[int(key)] = float(prob)
        except (TypeError, ValueError):
            raise SchemaError(f"q.{key}", "expected vertex id -> probability")
    sol = GameSolution(p=p, q=q, value=float(obj["value"]))
    try:
        validate_solution(net, rewards, sol)
    except (InvalidStrategy, InvalidFlow) as exc:
        raise SchemaError("solution", str(exc))
    return sol
