"""Solvers for two-player traveler-vs-ambusher zero-sum games.

Three settings share one minimax core: exact LP solutions on
vertex-capacitated networks, closed-form solutions on polygonal
domains via thresholded clearance-graph cuts, and sampled
approximations over grid/RRG/PRM* roadmaps whose values converge to
the continuous optimum. A Monte Carlo validator checks any solved
game empirically.
"""

from .discrete_game import (
    GameSolution,
    best_response_value,
    equidistributed_strategies,
    expected_outcome,
    red_support_contains_cut,
    solve_game,
    uniform_internal_rewards,
)
from .lp import LinearProgram, LpSolution, LpStatus, solve as solve_lp
from .netflow import (
    Flow,
    VertexCapNetwork,
    VertexCut,
    flow_decompose,
    max_flow,
    min_vertex_cut,
    split_vertices,
    vertex_disjoint_paths,
)
from .polygeom import (
    AmbushMinCut,
    CriticalGraph,
    PolygonalDomain,
    ambush_cardinality,
    ambush_min_cut,
    cag_value,
    critical_graph,
    polygon_distance,
    red_placement,
)
from .samplers import SampledGraph, collision_free, grid_sample, prm_star_build, rrg_build
from .scag import (
    AmbushSiteSet,
    ScagInstance,
    ScagSolution,
    convergence_run,
    cover_sites,
    entering_edges,
    solve_scag,
)
from .sim import PathDistribution, simulate_discrete, simulate_scag, to_path_distribution

__version__ = "0.1.0"

__all__ = [
    "AmbushMinCut",
    "AmbushSiteSet",
    "CriticalGraph",
    "Flow",
    "GameSolution",
    "LinearProgram",
    "LpSolution",
    "LpStatus",
    "PathDistribution",
    "PolygonalDomain",
    "SampledGraph",
    "ScagInstance",
    "ScagSolution",
    "VertexCapNetwork",
    "VertexCut",
    "ambush_cardinality",
    "ambush_min_cut",
    "best_response_value",
    "cag_value",
    "collision_free",
    "convergence_run",
    "cover_sites",
    "critical_graph",
    "entering_edges",
    "equidistributed_strategies",
    "expected_outcome",
    "flow_decompose",
    "grid_sample",
    "max_flow",
    "min_vertex_cut",
    "polygon_distance",
    "prm_star_build",
    "red_placement",
    "red_support_contains_cut",
    "rrg_build",
    "simulate_discrete",
    "simulate_scag",
    "solve_game",
    "solve_lp",
    "solve_scag",
    "split_vertices",
    "to_path_distribution",
    "uniform_internal_rewards",
    "vertex_disjoint_paths",
]
