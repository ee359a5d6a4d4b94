from fractions import Fraction

import numpy as np
import pytest

from ambushgames import discrete_game as dg
from ambushgames import netflow
from ambushgames.errors import InfeasibleGame, InvalidStrategy
from ambushgames.netflow import VertexCapNetwork

import oracles
from example_networks import (
    diamond_network,
    parallel_paths_network,
    seven_vertex_network,
    seven_vertex_optimal_p,
    seven_vertex_optimal_q,
    single_path_network,
)


def saddle_ok(net, rewards, sol, eps=1e-7):
    red_best = dg.best_response_value(net, rewards, p=sol.p)
    blue_best = dg.best_response_value(net, rewards, q=sol.q)
    assert red_best <= sol.value + eps
    assert blue_best >= sol.value - eps


class TestExpectedOutcome:
    def test_seven_vertex_caption_pair(self):
        net = seven_vertex_network()
        value = dg.expected_outcome(
            net,
            seven_vertex_optimal_p(),
            seven_vertex_optimal_q(),
            dg.uniform_internal_rewards(net),
        )
        assert value == pytest.approx(0.5, abs=1e-12)

    def test_mass_on_unvisited_vertex(self):
        net = parallel_paths_network(2)
        p = {(0, 1): 1.0, (1, 3): 1.0}
        q = {2: 1.0}
        assert dg.expected_outcome(net, p, q, dg.uniform_internal_rewards(net)) == 0.0

    def test_diamond_merge_vertex(self):
        net = diamond_network()
        p = {(0, 1): 0.5, (0, 2): 0.5, (1, 3): 0.5, (2, 3): 0.5, (3, 4): 1.0}
        q = {3: 1.0}
        rewards = dg.uniform_internal_rewards(net)
        assert dg.expected_outcome(net, p, q, rewards) == pytest.approx(1.0, abs=1e-12)

    def test_unknown_edge_rejected(self):
        net = single_path_network()
        with pytest.raises(InvalidStrategy):
            dg.expected_outcome(net, {(0, 2): 1.0}, {1: 1.0}, {1: 1.0})


class TestBuildLp:
    def test_seven_vertex_shape(self):
        net = seven_vertex_network()
        prog = dg.build_lp(net, dg.uniform_internal_rewards(net))
        assert prog.n_vars == 11 + 1
        assert prog.ineq_matrix.shape[0] == 5
        assert prog.eq_matrix.shape[0] == 7

    def test_zero_rewards_value_zero(self):
        net = seven_vertex_network()
        rewards = {v: 0.0 for v in net.vertices}
        prog = dg.build_lp(net, rewards)
        assert prog.ineq_matrix.shape[0] == 0
        sol = dg.solve_game(net, rewards)
        assert sol.value == pytest.approx(0.0, abs=1e-12)

    def test_three_vertex_path_forced(self):
        net = single_path_network()
        sol = dg.solve_game(net, dg.uniform_internal_rewards(net))
        assert sol.value == pytest.approx(1.0, abs=1e-8)

    def test_unreachable_sink(self):
        net = VertexCapNetwork(vertices={0, 1, 2}, edges={(1, 0)}, source=0, sink=2)
        with pytest.raises(InfeasibleGame):
            dg.build_lp(net, dg.uniform_internal_rewards(net))


class TestSolveGame:
    def test_seven_vertex_value_and_saddle(self):
        net = seven_vertex_network()
        rewards = dg.uniform_internal_rewards(net)
        sol = dg.solve_game(net, rewards)
        assert sol.value == pytest.approx(0.5, abs=1e-8)
        assert sum(sol.q.values()) == pytest.approx(1.0, abs=1e-9)
        assert all(qv >= -1e-12 for qv in sol.q.values())
        saddle_ok(net, rewards, sol)

    def test_single_path(self):
        net = single_path_network()
        sol = dg.solve_game(net, dg.uniform_internal_rewards(net))
        assert sol.value == pytest.approx(1.0, abs=1e-8)
        assert sol.q[1] == pytest.approx(1.0, abs=1e-9)

    def test_flow_constraints_hold(self):
        net = seven_vertex_network()
        sol = dg.solve_game(net, dg.uniform_internal_rewards(net))
        flow = netflow.Flow(edge_flow=sol.p, value=1.0)
        netflow.validate_flow(net, flow, tol=1e-7)

    def test_decomposable(self):
        net = seven_vertex_network()
        sol = dg.solve_game(net, dg.uniform_internal_rewards(net))
        pieces = netflow.flow_decompose(net, netflow.Flow(edge_flow=sol.p, value=1.0))
        assert sum(w for _, w in pieces) == pytest.approx(1.0, abs=1e-8)


class TestEquidistributed:
    def test_seven_vertex(self):
        net = seven_vertex_network()
        p, q = dg.equidistributed_strategies(net)
        used = sorted(v for v, prob in q.items() if prob > 0)
        assert len(used) == 2
        assert all(q[v] == pytest.approx(0.5) for v in used)
        positive = {e for e, f in p.items() if f > 0}
        assert all(p[e] == pytest.approx(0.5) for e in positive)
        rewards = dg.uniform_internal_rewards(net)
        assert dg.expected_outcome(net, p, q, rewards) == pytest.approx(0.5, abs=1e-12)

    def test_single_path(self):
        net = single_path_network()
        p, q = dg.equidistributed_strategies(net)
        assert p[(0, 1)] == 1.0 and p[(1, 2)] == 1.0
        assert q[1] == 1.0

    def test_three_parallel(self):
        net = parallel_paths_network(3)
        p, q = dg.equidistributed_strategies(net)
        assert all(f == pytest.approx(1 / 3) for f in p.values())
        assert sorted(qv for qv in q.values() if qv > 0) == pytest.approx([1 / 3] * 3)

    def test_exact_rational_outcome(self):
        # exact arithmetic: the equidistributed pair achieves exactly 1/k
        rng = np.random.default_rng(5)
        for _ in range(20):
            net = oracles.random_network(rng, n_lo=5, n_hi=10)
            p, q = dg.equidistributed_strategies(net)
            k = round(1.0 / max(q.values()))
            alpha = dg.uniform_internal_rewards(net)
            exact = oracles.expected_outcome_fraction(
                net,
                {e: Fraction(1, k) for e, f in p.items() if f > 0},
                {v: Fraction(1, k) for v, f in q.items() if f > 0},
                {v: Fraction(int(a)) for v, a in alpha.items()},
            )
            assert exact == Fraction(1, k)
            approx = dg.expected_outcome(net, p, q, alpha)
            assert approx == pytest.approx(float(exact), abs=1e-12)


class TestBestResponse:
    def test_red_against_equidistributed(self):
        net = seven_vertex_network()
        p, _ = dg.equidistributed_strategies(net)
        val = dg.best_response_value(net, dg.uniform_internal_rewards(net), p=p)
        assert val == pytest.approx(0.5, abs=1e-12)

    def test_blue_against_cut_mixture(self):
        net = seven_vertex_network()
        _, q = dg.equidistributed_strategies(net)
        val = dg.best_response_value(net, dg.uniform_internal_rewards(net), q=q)
        assert val == pytest.approx(0.5, abs=1e-12)

    def test_blue_escapes_non_cut_support(self):
        net = seven_vertex_network()
        q = {5: 1.0}
        val = dg.best_response_value(net, dg.uniform_internal_rewards(net), q=q)
        assert val == 0.0

    def test_exactly_one_strategy(self):
        net = single_path_network()
        with pytest.raises(ValueError):
            dg.best_response_value(net, {}, p={}, q={})


class TestSupportContainsCut:
    def test_bottleneck_pair_blocks(self):
        assert dg.red_support_contains_cut(seven_vertex_network(), {5, 6})

    def test_single_bottleneck_vertex_does_not(self):
        assert not dg.red_support_contains_cut(seven_vertex_network(), {5})

    def test_empty_support(self):
        assert not dg.red_support_contains_cut(seven_vertex_network(), set())


class TestProperties:
    def test_uniform_reward_value_is_reciprocal_cut(self):
        rng = np.random.default_rng(31)
        for _ in range(30):
            net = oracles.random_network(rng, n_lo=5, n_hi=10)
            rewards = dg.uniform_internal_rewards(net)
            sol = dg.solve_game(net, rewards)
            k = oracles.exhaustive_min_cut_capacity(net)
            assert sol.value == pytest.approx(1.0 / k, abs=1e-7)
            saddle_ok(net, rewards, sol)

    def test_reward_scaling(self):
        rng = np.random.default_rng(37)
        for _ in range(10):
            net = oracles.random_network(rng, n_lo=5, n_hi=9)
            rewards = {
                v: (0.0 if v in (net.source, net.sink) else float(rng.uniform(0.2, 2)))
                for v in net.vertices
            }
            c = float(rng.uniform(0.5, 3.0))
            base = dg.solve_game(net, rewards)
            scaled_rewards = {v: c * a for v, a in rewards.items()}
            scaled = dg.solve_game(net, scaled_rewards)
            assert scaled.value == pytest.approx(c * base.value, abs=1e-7)
            # original optimal p stays optimal for the scaled game
            red_best = dg.best_response_value(net, scaled_rewards, p=base.p)
            assert red_best <= scaled.value + 1e-7

    def test_missing_cut_support_gives_zero(self):
        rng = np.random.default_rng(41)
        count = 0
        while count < 15:
            net = oracles.random_network(rng, n_lo=5, n_hi=10)
            internal = sorted(net.vertices - {net.source, net.sink})
            if not internal:
                continue
            support = {v for v in internal if rng.random() < 0.4}
            if dg.red_support_contains_cut(net, support):
                continue
            count += 1
            restricted = {v: (1.0 if v in support else 0.0) for v in net.vertices}
            sol = dg.solve_game(net, restricted)
            assert sol.value == pytest.approx(0.0, abs=1e-9)
            # the surviving path gives outcome exactly 0 against any such q
            path_p = _indicator_path(net, support)
            any_q = {v: 1.0 / len(support) for v in support} if support else {}
            assert dg.expected_outcome(net, path_p, any_q, restricted) == 0.0


def _indicator_path(net, blocked):
    from collections import deque

    parent = {net.source: net.source}
    queue = deque([net.source])
    while queue:
        u = queue.popleft()
        if u == net.sink:
            break
        for v in net.successors(u):
            if v not in parent and v not in blocked:
                parent[v] = u
                queue.append(v)
    path = [net.sink]
    while path[-1] != net.source:
        path.append(parent[path[-1]])
    path.reverse()
    return {(path[i], path[i + 1]): 1.0 for i in range(len(path) - 1)}


class TestJson:
    def test_game_roundtrip(self):
        net = seven_vertex_network()
        obj = netflow.network_to_json(net)
        obj["alpha"] = {str(v): 1.0 for v in range(2, 7)}
        parsed_net, alpha = dg.game_from_json(obj)
        assert parsed_net.edges == net.edges
        assert alpha[5] == 1.0 and alpha.get(1, 0.0) == 0.0

    def test_default_alpha_is_uniform_internal(self):
        obj = netflow.network_to_json(single_path_network())
        _, alpha = dg.game_from_json(obj)
        assert alpha == {0: 0.0, 1: 1.0, 2: 0.0}

    def test_solution_json_shape(self):
        net = single_path_network()
        sol = dg.solve_game(net, dg.uniform_internal_rewards(net))
        obj = dg.solution_to_json(sol)
        assert set(obj) == {"value", "p", "q"}
        assert obj["p"]["0-1"] == pytest.approx(1.0)
