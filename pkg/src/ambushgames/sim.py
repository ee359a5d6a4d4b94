"""Monte Carlo validation of solved games.

Each trial independently draws one realized route from the traveler's
mixture and one trap location from the ambusher's, then scores the
encounter: reward collected at every trapped vertex the route enters
(network games), or once per entry into the trap's reach zone (sampled
games). The empirical mean over many trials should agree with the
analytic game value to within sampling error.

All trials derive from one PCG64 stream seeded by the caller; trial i
consumes row i of a pregenerated draw table, so chunked or parallel
aggregation reproduces the serial result exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import netflow
from .discrete_game import GameSolution, Rewards
from .errors import InvalidFlow
from .netflow import VertexCapNetwork
from .scag import ScagInstance, ScagSolution, SUPER_SINK, SUPER_SOURCE


@dataclass
class PathDistribution:
    """Mixture over realized routes: weights are probabilities summing
    to one and every path runs source to sink along existing edges."""

    paths: list[list[int]]
    weights: list[float]

    def validate(self, net: VertexCapNetwork | None = None, tol: float = 1e-9) -> None:
        if any(w < -tol for w in self.weights):
            raise InvalidFlow("negative path weight")
        if abs(sum(self.weights) - 1.0) > tol:
            raise InvalidFlow("path weights must sum to 1")
        if net is not None:
            for path in self.paths:
                if path[0] != net.source or path[-1] != net.sink:
                    raise InvalidFlow("path does not run source to sink")
                for i in range(len(path) - 1):
                    if (path[i], path[i + 1]) not in net.edges:
                        raise InvalidFlow(f"path uses unknown edge {path[i], path[i+1]}")


def to_path_distribution(net: VertexCapNetwork, p: dict) -> PathDistribution:
    """Decompose a unit traveler flow into a route mixture whose edge
    marginals reproduce the flow."""
    value = sum(f for (u, _), f in p.items() if u == net.source) - sum(
        f for (_, v), f in p.items() if v == net.source
    )
    pieces = netflow.flow_decompose(net, netflow.Flow(edge_flow=dict(p), value=value))
    if abs(value - 1.0) > 1e-9:
        raise InvalidFlow(f"traveler strategy ships {value}, expected a unit flow")
    return PathDistribution(
        paths=[path for path, _ in pieces], weights=[w for _, w in pieces]
    )


def _draw_indices(weights: np.ndarray, u: np.ndarray) -> np.ndarray:
    cumulative = np.cumsum(weights)
    cumulative[-1] = max(cumulative[-1], 1.0)
    return np.minimum(np.searchsorted(cumulative, u, side="right"), len(weights) - 1)


def simulate(
    path_dist: PathDistribution,
    ambush_probs: list[float],
    outcome_matrix: np.ndarray,
    trials: int,
    seed: int,
) -> tuple[float, float]:
    """Core sampler: returns (mean, standard error) of the per-trial
    outcome, with outcome_matrix[i, j] the payoff of route i against
    trap j."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    draws = rng.random((trials, 2))
    path_idx = _draw_indices(np.asarray(path_dist.weights), draws[:, 0])
    site_idx = _draw_indices(np.asarray(ambush_probs), draws[:, 1])
    outcomes = outcome_matrix[path_idx, site_idx]
    mean = float(outcomes.mean())
    spread = float(outcomes.std(ddof=1)) if trials > 1 else 0.0
    return mean, spread / math.sqrt(trials)


def simulate_discrete(
    net: VertexCapNetwork,
    solution: GameSolution,
    rewards: Rewards,
    trials: int,
    seed: int,
) -> tuple[float, float]:
    """Sample the network game: the route pays the trapped vertex's
    reward iff it enters that vertex."""
    dist = to_path_distribution(net, solution.p)
    dist.validate(net)
    sites = sorted(solution.q)
    probs = [solution.q[v] for v in sites]
    matrix = np.zeros((len(dist.paths), len(sites)))
    for i, path in enumerate(dist.paths):
        entered = set(path[1:])
        for j, v in enumerate(sites):
            if v in entered:
                matrix[i, j] = rewards.get(v, 0.0)
    return simulate(dist, probs, matrix, trials, seed)


def scag_path_distribution(instance: ScagInstance, solution: GameSolution) -> PathDistribution:
    """Route mixture for a sampled-game solution.

    Solutions solved in-process carry their decomposition; otherwise
    the flow is re-decomposed on the graph extended with virtual
    terminals (virtual edge flows are the terminal imbalances).
    """
    if isinstance(solution, ScagSolution) and solution.path_weights:
        return PathDistribution(
            paths=[path for path, _ in solution.path_weights],
            weights=[w for _, w in solution.path_weights],
        )
    graph = instance.graph
    edge_flow = {e: f for e, f in solution.p.items() if f > 1e-12}
    outflow: dict[int, float] = {}
    inflow: dict[int, float] = {}
    for (u, v), f in edge_flow.items():
        outflow[u] = outflow.get(u, 0.0) + f
        inflow[v] = inflow.get(v, 0.0) + f
    for v in sorted(graph.source_set):
        surplus = outflow.get(v, 0.0) - inflow.get(v, 0.0)
        if surplus > 1e-12:
            edge_flow[(SUPER_SOURCE, v)] = surplus
    for v in sorted(graph.sink_set):
        deficit = inflow.get(v, 0.0) - outflow.get(v, 0.0)
        if deficit > 1e-12:
            edge_flow[(v, SUPER_SINK)] = deficit
    pieces, residual = netflow._peel_paths(edge_flow, SUPER_SOURCE, SUPER_SINK)
    if sum(residual.values()) > 1e-7:
        raise InvalidFlow("sampled-game flow does not decompose into routes")
    return PathDistribution(
        paths=[path[1:-1] for path, _ in pieces], weights=[w for _, w in pieces]
    )


def simulate_scag(
    instance: ScagInstance,
    solution: GameSolution,
    trials: int,
    seed: int,
    rewards: dict[int, float] | None = None,
) -> tuple[float, float]:
    """Sample the sampled-environment game: the route pays the trap's
    reward once per edge entering its reach zone."""
    rewards = instance.sites.alpha if rewards is None else rewards
    dist = scag_path_distribution(instance, solution)
    dist.validate()
    sites = sorted(solution.q)
    probs = [solution.q[k] for k in sites]
    matrix = np.zeros((len(dist.paths), len(sites)))
    for j, k in enumerate(sites):
        members = instance.entering.get(k, frozenset())
        alpha = rewards.get(k, 0.0)
        if not members or alpha == 0.0:
            continue
        for i, path in enumerate(dist.paths):
            entries = sum(
                1 for a, b in zip(path[:-1], path[1:]) if (a, b) in members
            )
            matrix[i, j] = alpha * entries
    return simulate(dist, probs, matrix, trials, seed)


def report(
    trials: int, mean: float, std_error: float, analytic_value: float
) -> dict:
    """Machine-readable summary comparing the sample to the analytic value."""
    z = 0.0 if std_error == 0 else (mean - analytic_value) / std_error
    return {
        "trials": trials,
        "mean": mean,
        "std_error": std_error,
        "analytic_value": analytic_value,
        "z_score": z,
    }
