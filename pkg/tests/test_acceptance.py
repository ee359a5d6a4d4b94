"""Acceptance suite: one test per release criterion, each printing a
PASS line (run with ``pytest tests/test_acceptance.py -s``).

Criteria cover: the seven-vertex reference game, flow/cut duality on
random networks, disjoint-path counts, the uniform-reward optimum, the
missing-cut degenerate case, analytic polygonal cuts and placements,
sampled-game convergence, Monte Carlo consistency, and LP certification.
"""

import json
import math
import statistics
import time
from fractions import Fraction

import numpy as np
import pytest

from ambushgames import cli, discrete_game as dg, lp, netflow, polygeom, samplers, scag, sim
from ambushgames.lp import LpStatus

import oracles
from envs import benchmark_env
from example_networks import seven_vertex_network
from test_polygeom import gauntlet_domain


def _report(line: str) -> None:
    print(f"\nPASS: {line}")


def test_criterion_1_reference_game(tmp_path):
    path = tmp_path / "game.json"
    path.write_text(json.dumps(netflow.network_to_json(seven_vertex_network())))
    out = tmp_path / "solution.json"

    start = time.perf_counter()
    code = cli.main(["solve-discrete", "--input", str(path), "--output", str(out)])
    elapsed = time.perf_counter() - start
    assert code == 0
    solution = json.loads(out.read_text())
    assert solution["value"] == pytest.approx(0.5, abs=1e-8)

    net = seven_vertex_network()
    rewards = dg.uniform_internal_rewards(net)
    p = {tuple(int(v) for v in key.split("-")): prob for key, prob in solution["p"].items()}
    q = {int(k): prob for k, prob in solution["q"].items()}
    value = solution["value"]
    assert dg.best_response_value(net, rewards, p=p) <= value + 1e-7
    assert dg.best_response_value(net, rewards, q=q) >= value - 1e-7
    assert elapsed < 1.0
    _report(
        f"criterion 1 - reference 7-vertex game: value {value:.9f} (0.5 +/- 1e-8), "
        f"saddle gap <= 1e-7, runtime {elapsed:.3f}s < 1s"
    )


def test_criterion_2_max_flow_equals_min_cut():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        net = oracles.random_network(rng, n_lo=5, n_hi=12, cap_range=(0.1, 3.0))
        value = netflow.max_flow(net).value
        oracle = oracles.exhaustive_min_cut_capacity(net)
        worst = max(worst, abs(value - oracle))
        assert value == pytest.approx(oracle, abs=1e-7)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    _report(
        f"criterion 2 - max-flow equals exhaustive min vertex cut on 200 random "
        f"capacitated digraphs: worst gap {worst:.2e} <= 1e-7, runtime {elapsed:.1f}s < 30s"
    )


def test_criterion_3_disjoint_path_counts():
    rng = np.random.default_rng(333)
    for _ in range(200):
        net = oracles.random_network(rng, n_lo=5, n_hi=12)
        paths = netflow.vertex_disjoint_paths(net)
        oracle = round(oracles.exhaustive_min_cut_capacity(net))
        assert len(paths) == oracle
        seen: set = set()
        for path in paths:
            assert path[0] == net.source and path[-1] == net.sink
            for i in range(len(path) - 1):
                assert (path[i], path[i + 1]) in net.edges
            inner = set(path[1:-1])
            assert not (inner & seen)
            seen |= inner
    _report(
        "criterion 3 - vertex-disjoint path count matches the cut oracle with "
        "disjointness verified on 200 random unit-capacity graphs"
    )


def test_criterion_4_uniform_reward_optimum():
    rng = np.random.default_rng(444)
    for _ in range(100):
        net = oracles.random_network(rng, n_lo=5, n_hi=11)
        kappa = round(oracles.exhaustive_min_cut_capacity(net))
        rewards = dg.uniform_internal_rewards(net)
        solution = dg.solve_game(net, rewards)
        assert solution.value == pytest.approx(1.0 / kappa, abs=1e-7)

        p, q = dg.equidistributed_strategies(net)
        exact = oracles.expected_outcome_fraction(
            net,
            {e: Fraction(1, kappa) for e, f in p.items() if f > 0},
            {v: Fraction(1, kappa) for v, f in q.items() if f > 0},
            {v: Fraction(1) if v not in (net.source, net.sink) else Fraction(0) for v in net.vertices},
        )
        assert exact == Fraction(1, kappa)
        assert dg.expected_outcome(net, p, q, rewards) == pytest.approx(
            1.0 / kappa, abs=1e-12
        )
    _report(
        "criterion 4 - uniform-reward LP value equals 1/cut-size within 1e-7 and the "
        "equidistributed pair achieves exactly 1/k (rational arithmetic) on 100 graphs"
    )


def test_criterion_5_support_missing_cut_gives_zero():
    rng = np.random.default_rng(555)
    done = 0
    while done < 50:
        net = oracles.random_network(rng, n_lo=5, n_hi=10)
        internal = sorted(net.vertices - {net.source, net.sink})
        if not internal:
            continue
        support = {v for v in internal if rng.random() < 0.45}
        if dg.red_support_contains_cut(net, support):
            continue
        restricted = {v: (1.0 if v in support else 0.0) for v in net.vertices}
        solution = dg.solve_game(net, restricted)
        assert abs(solution.value) <= 1e-9
        done += 1
    _report(
        "criterion 5 - ambush support missing every cut forces game value 0 "
        "within 1e-9 on 50 constructed instances"
    )


def test_criterion_6_polygonal_cut_structure():
    domain = gauntlet_domain()
    sweep = [0.5, 0.7, 0.9, 1.1, 1.3]
    capacities = [polygeom.ambush_min_cut(domain, r).capacity for r in sweep]
    assert capacities == sorted(capacities, reverse=True)
    assert capacities[0] > capacities[-1], "capacity must strictly decrease over the sweep"
    for r, cap in zip(sweep, capacities):
        assert polygeom.cag_value(domain, r) == 1.0 / cap

    rng = np.random.default_rng(666)
    for _ in range(100):
        width = float(rng.uniform(0.8, 40.0))
        reach = float(rng.uniform(0.15, 5.0))
        corridor = polygeom.corridor_domain(length=7.0, width=width)
        cut = polygeom.ambush_min_cut(corridor, reach)
        assert cut.capacity == math.ceil(width / (2.0 * reach))
    _report(
        f"criterion 6 - sealing capacity decreases {capacities[0]} -> {capacities[-1]} "
        "over the reach sweep with value = 1/capacity exactly; corridor family matches "
        "ceil(W/2R) exactly on 100 random (W, R) pairs"
    )


def test_criterion_7_placement_coverage():
    rng = np.random.default_rng(777)
    for _ in range(100):
        reach = float(rng.uniform(0.2, 2.5))
        segments, counts = [], []
        for _ in range(int(rng.integers(1, 5))):
            a = rng.uniform(-10, 10, 2)
            direction = rng.normal(size=2)
            direction /= np.hypot(*direction)
            length = float(rng.uniform(0.0, 10.0))
            segments.append((a, a + length * direction))
            counts.append(polygeom.segment_ambush_count(length, reach))
        cut = polygeom.AmbushMinCut(
            segments=segments,
            per_segment_count=counts,
            capacity=sum(counts),
            reach=reach,
            node_path=[],
        )
        placements = polygeom.red_placement(cut)
        assert sum(prob for _, prob in placements) == pytest.approx(1.0, abs=1e-12)
        i = 0
        for (a, b), count in zip(segments, counts):
            pts = [pt for pt, _ in placements[i : i + count]]
            i += count
            for u, v in zip(pts[:-1], pts[1:]):
                assert float(np.hypot(*(v - u))) <= 2 * reach + 1e-12
            assert float(np.hypot(*(pts[0] - np.asarray(a)))) <= reach + 1e-12
            assert float(np.hypot(*(pts[-1] - np.asarray(b)))) <= reach + 1e-12
    _report(
        "criterion 7 - ambush placements on 100 random cuts: spacing <= 2R, "
        "end margins <= R, probabilities sum to 1 within 1e-12"
    )


def test_criterion_8_sampled_game_convergence():
    start = time.perf_counter()
    rrg_schedule = [600, 1200, 2000]
    seeds = (0, 1, 2, 3, 4)
    grid_ok, rrg_ok = [], []

    for env_seed in range(10):
        env = benchmark_env(env_seed)
        reference = 1.0 / env.capacity
        x0, y0, x1, y1 = env.domain.bbox
        n_final = int(math.ceil((x1 - x0) * (y1 - y0) / (env.reach / 2.0) ** 2)) + 1
        grid_schedule = [60, 160, n_final]

        grid_points = scag.convergence_run(
            env.domain, env.reach, "grid", grid_schedule,
            density_factor=env.density_factor,
        )
        for pt in grid_points:
            assert pt.cag_value == pytest.approx(reference, abs=1e-12)
            if pt.value is not None:
                assert pt.value >= pt.cag_value - 1e-7, (
                    f"env {env_seed} grid n={pt.n}: {pt.value} < {pt.cag_value}"
                )
        final_grid = grid_points[-1].value
        assert final_grid is not None
        assert final_grid == pytest.approx(reference, rel=0.05)
        grid_ok.append(final_grid / reference)

        rrg_points = scag.convergence_run(
            env.domain, env.reach, "rrg", rrg_schedule, seeds=seeds,
            density_factor=env.density_factor,
        )
        finals = []
        for seed in seeds:
            series = [pt for pt in rrg_points if pt.seed == seed]
            defined = [pt.value for pt in series if pt.value is not None]
            for a, b in zip(defined, defined[1:]):
                assert b <= a + 1e-7, f"env {env_seed} seed {seed}: value increased"
            for pt in series:
                if pt.value is not None:
                    assert pt.value >= pt.cag_value - 1e-7, (
                        f"env {env_seed} rrg seed {seed} n={pt.n}: "
                        f"{pt.value} < {pt.cag_value}"
                    )
            assert series[-1].value is not None
            finals.append(series[-1].value)
        median_final = statistics.median(finals)
        assert median_final == pytest.approx(reference, rel=0.05)
        rrg_ok.append(median_final / reference)

    elapsed = time.perf_counter() - start
    assert elapsed < 600.0
    _report(
        "criterion 8 - sampled-game convergence on 10 environments: values lower-"
        "bounded by the analytic optimum, final grid within 5% "
        f"(ratios {min(grid_ok):.3f}..{max(grid_ok):.3f}), RRG 5-seed medians within 5% "
        f"(ratios {min(rrg_ok):.3f}..{max(rrg_ok):.3f}), per-seed monotone, "
        f"runtime {elapsed:.0f}s < 600s"
    )


def test_criterion_9_monte_carlo_consistency():
    trials = 100_000
    checked = 0
    rng = np.random.default_rng(999)

    for i in range(12):
        net = oracles.random_network(rng, n_lo=5, n_hi=10)
        rewards = dg.uniform_internal_rewards(net)
        solution = dg.solve_game(net, rewards)
        mean, se = sim.simulate_discrete(net, solution, rewards, trials, seed=9000 + i)
        again = sim.simulate_discrete(net, solution, rewards, trials, seed=9000 + i)
        assert (mean, se) == again
        tolerance = 4 * se if se > 0 else 1e-9
        assert abs(mean - solution.value) <= tolerance
        checked += 1

    for i in range(8):
        env = benchmark_env(i)
        sites = scag.cover_sites(env.domain, env.reach, env.density_factor, seed=0)
        graph = samplers.build(env.domain, "grid", 170)
        instance = scag.ScagInstance.build(graph, sites)
        solution = scag.solve_scag(instance)
        mean, se = sim.simulate_scag(instance, solution, trials, seed=9500 + i)
        again = sim.simulate_scag(instance, solution, trials, seed=9500 + i)
        assert (mean, se) == again
        tolerance = 4 * se if se > 0 else 1e-9
        assert abs(mean - solution.value) <= tolerance
        checked += 1

    assert checked == 20
    _report(
        "criterion 9 - Monte Carlo means within 4 standard errors of the analytic "
        "value at 1e5 trials for 20 solved games, byte-identical under fixed seeds"
    )


def test_criterion_10_lp_certification():
    from test_lp import random_bounded_lp

    rng = np.random.default_rng(1010)
    for _ in range(100):
        n = int(rng.integers(2, 9))
        program = random_bounded_lp(rng, n, int(rng.integers(2, 9)))
        solution = lp.solve(program, method="simplex")
        assert solution.status is LpStatus.OPTIMAL
        assert solution.certificate  # populated only when certification passed
        oracle_obj, _ = oracles.lp_min_by_vertex_enumeration(
            program.objective, program.ineq_matrix, program.ineq_rhs, None, None
        )
        assert solution.objective_value == pytest.approx(oracle_obj, abs=1e-7)
    _report(
        "criterion 10 - every optimal solve carries a passing primal/dual/gap "
        "certificate; objective agrees with vertex enumeration on 100 random LPs"
    )
