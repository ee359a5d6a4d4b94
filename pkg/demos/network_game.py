#!/usr/bin/env python3
"""Solve the ambush game on a small layered network.

A traveler routes one unit of probability from vertex 1 to vertex 7
while an ambusher traps a single vertex. The optimal solution spreads
the route mass so that no vertex concentrates more than half of it,
and the ambusher answers on the two-vertex bottleneck.
"""

from ambushgames import (
    VertexCapNetwork,
    best_response_value,
    equidistributed_strategies,
    max_flow,
    min_vertex_cut,
    solve_game,
    uniform_internal_rewards,
)
from ambushgames.svg import render_network

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

print("max flow through unit-capacity vertices:", max_flow(net).value)
cut = min_vertex_cut(net)
print("minimum vertex cut:", sorted(cut.C), "capacity", cut.capacity)

solution = solve_game(net, rewards)
print(f"\ngame value: {solution.value:.4f}")
print("traveler edge probabilities:")
for (u, v), prob in sorted(solution.p.items()):
    if prob > 1e-9:
        print(f"  {u} -> {v}: {prob:.4f}")
print("ambusher vertex probabilities:")
for v, prob in sorted(solution.q.items()):
    if prob > 1e-9:
        print(f"  vertex {v}: {prob:.4f}")

print("\nbest ambush against the solved route:",
      best_response_value(net, rewards, p=solution.p))
print("best route against the solved ambush:",
      best_response_value(net, rewards, q=solution.q))

p_eq, q_eq = equidistributed_strategies(net)
print("\nequidistributed pair uses", sum(1 for f in p_eq.values() if f > 0),
      "edges at 1/2 and traps", sorted(v for v, f in q_eq.items() if f > 0))

with open("network_game.svg", "w") as fh:
    fh.write(render_network(net, p=solution.p, q=solution.q))
print("\nwrote network_game.svg")
