#!/usr/bin/env python3
"""Monte Carlo validation of solved games.

Draw realized routes and trap locations from the optimal mixtures and
check that the empirical hit rate agrees with the analytic game value
to within sampling error (a few standard errors at 100k trials).
"""

import numpy as np

from ambushgames import (
    PolygonalDomain,
    ScagInstance,
    VertexCapNetwork,
    cover_sites,
    grid_sample,
    simulate_discrete,
    simulate_scag,
    solve_game,
    solve_scag,
    uniform_internal_rewards,
)
from ambushgames.sim import report

TRIALS = 100_000

net = VertexCapNetwork(
    vertices=set(range(1, 8)),
    edges={
        (1, 2), (1, 3), (1, 4),
        (2, 5), (2, 6), (3, 5), (3, 6), (4, 5), (4, 6),
        (5, 7), (6, 7),
    },
    source=1,
    sink=7,
)
rewards = uniform_internal_rewards(net)
solution = solve_game(net, rewards)
mean, se = simulate_discrete(net, solution, rewards, TRIALS, seed=1)
print("network game:", report(TRIALS, mean, se, solution.value))

domain = PolygonalDomain(
    outer=np.array([[0.0, 0.0], [9.0, 0.0], [9.0, 6.0], [0.0, 6.0]]),
    holes=[np.array([[3.6, 2.3], [5.4, 2.3], [5.4, 3.7], [3.6, 3.7]])],
    source_edge=(3, 0),
    sink_edge=(1, 2),
)
sites = cover_sites(domain, reach=1.0, density_factor=3.0, seed=0)
graph = grid_sample(domain, 0.5)
instance = ScagInstance.build(graph, sites)
sampled = solve_scag(instance)
mean, se = simulate_scag(instance, sampled, TRIALS, seed=2)
print("sampled game:", report(TRIALS, mean, se, sampled.value))
