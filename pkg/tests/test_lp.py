import numpy as np
import pytest

from ambushgames import lp
from ambushgames.errors import MalformedProgram
from ambushgames.lp import LinearProgram, LpStatus

import oracles


def random_bounded_lp(rng, n_vars, n_ineq, n_eq=0):
    """Random LP with a box constraint so the optimum is a vertex."""
    G = rng.normal(size=(n_ineq, n_vars))
    x0 = rng.uniform(0.1, 1.0, size=n_vars)  # interior point keeps it feasible
    h = G @ x0 + rng.uniform(0.1, 1.0, size=n_ineq)
    box = np.eye(n_vars)
    G = np.vstack([G, box])
    h = np.concatenate([h, np.full(n_vars, 10.0)])
    A = b = None
    if n_eq:
        A = rng.normal(size=(n_eq, n_vars))
        b = A @ x0
    c = rng.normal(size=n_vars)
    return LinearProgram(objective=c, ineq_matrix=G, ineq_rhs=h, eq_matrix=A, eq_rhs=b)


class TestBasics:
    def test_minimum_at_bound(self):
        prog = LinearProgram(objective=[1.0], ineq_matrix=[[-1.0]], ineq_rhs=[-1.0])
        sol = lp.solve(prog, method="simplex")
        assert sol.status is LpStatus.OPTIMAL
        assert sol.primal[0] == pytest.approx(1.0, abs=1e-9)
        assert sol.objective_value == pytest.approx(1.0, abs=1e-9)

    def test_degenerate_optimal_face(self):
        prog = LinearProgram(
            objective=[-1.0, -1.0], ineq_matrix=[[1.0, 1.0]], ineq_rhs=[1.0]
        )
        sol = lp.solve(prog, method="simplex")
        assert sol.objective_value == pytest.approx(-1.0, abs=1e-9)
        # any vertex of the optimal face is acceptable
        assert sol.primal.sum() == pytest.approx(1.0, abs=1e-9)
        assert np.all(sol.primal >= -1e-9)

    def test_infeasible(self):
        prog = LinearProgram(
            objective=[1.0],
            ineq_matrix=[[1.0], [-1.0]],
            ineq_rhs=[1.0, -2.0],  # x <= 1 and x >= 2
        )
        assert lp.solve(prog, method="simplex").status is LpStatus.INFEASIBLE
        assert lp.solve(prog, method="highs").status is LpStatus.INFEASIBLE

    def test_unbounded(self):
        prog = LinearProgram(objective=[-1.0], ineq_matrix=[[-1.0]], ineq_rhs=[0.0])
        assert lp.solve(prog, method="simplex").status is LpStatus.UNBOUNDED
        assert lp.solve(prog, method="highs").status is LpStatus.UNBOUNDED

    def test_free_variable(self):
        prog = LinearProgram(
            objective=[0.0, 1.0],
            ineq_matrix=[[1.0, -1.0]],
            ineq_rhs=[0.0],
            eq_matrix=[[1.0, 0.0]],
            eq_rhs=[2.0],
            nonneg_mask=[True, False],
        )
        sol = lp.solve(prog, method="simplex")
        assert sol.primal[1] == pytest.approx(2.0, abs=1e-9)

    def test_dimension_mismatch(self):
        prog = LinearProgram(objective=[1.0, 2.0], ineq_matrix=[[1.0]], ineq_rhs=[1.0])
        with pytest.raises(MalformedProgram):
            lp.solve(prog)

    def test_determinism(self):
        rng = np.random.default_rng(3)
        prog = random_bounded_lp(rng, 6, 8)
        a = lp.solve(prog, method="simplex")
        b = lp.solve(prog, method="simplex")
        assert np.array_equal(a.primal, b.primal)
        assert a.objective_value == b.objective_value
        assert np.array_equal(a.dual_ineq, b.dual_ineq)


class TestAgainstVertexEnumeration:
    @pytest.mark.parametrize("seed", range(10))
    def test_random_small_programs(self, seed):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(2, 6))
        prog = random_bounded_lp(rng, n, int(rng.integers(2, 6)))
        oracle_obj, _ = oracles.lp_min_by_vertex_enumeration(
            prog.objective, prog.ineq_matrix, prog.ineq_rhs, None, None
        )
        sol = lp.solve(prog, method="simplex")
        assert sol.status is LpStatus.OPTIMAL
        assert sol.objective_value == pytest.approx(oracle_obj, abs=1e-7)

    def test_with_equalities(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            prog = random_bounded_lp(rng, 4, 4, n_eq=1)
            oracle_obj, _ = oracles.lp_min_by_vertex_enumeration(
                prog.objective, prog.ineq_matrix, prog.ineq_rhs,
                prog.eq_matrix, prog.eq_rhs,
            )
            if oracle_obj is None:
                continue
            sol = lp.solve(prog, method="simplex")
            assert sol.objective_value == pytest.approx(oracle_obj, abs=1e-7)


class TestDuality:
    @pytest.mark.parametrize("method", ["simplex", "highs"])
    def test_strong_duality_random(self, method):
        rng = np.random.default_rng(7)
        for _ in range(20):
            prog = random_bounded_lp(rng, int(rng.integers(2, 9)), int(rng.integers(2, 9)))
            sol = lp.solve(prog, method=method)
            assert sol.status is LpStatus.OPTIMAL
            dual_obj = -float(sol.dual_ineq @ prog.ineq_rhs)
            assert dual_obj == pytest.approx(sol.objective_value, abs=1e-7)

    def test_complementary_slackness(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            prog = random_bounded_lp(rng, int(rng.integers(2, 7)), int(rng.integers(2, 7)))
            sol = lp.solve(prog, method="simplex")
            slack = prog.ineq_rhs - prog.ineq_matrix @ sol.primal
            assert np.max(np.abs(sol.dual_ineq * slack)) < 1e-7

    def test_backends_agree(self):
        rng = np.random.default_rng(29)
        for _ in range(15):
            prog = random_bounded_lp(rng, int(rng.integers(2, 8)), int(rng.integers(2, 8)))
            a = lp.solve(prog, method="simplex")
            b = lp.solve(prog, method="highs")
            assert a.objective_value == pytest.approx(b.objective_value, abs=1e-7)


class TestFormatting:
    def test_dump_contains_rows(self):
        prog = LinearProgram(
            objective=[1.0, 0.0], ineq_matrix=[[1.0, 2.0]], ineq_rhs=[3.0]
        )
        text = lp.format_program(prog)
        assert "min" in text and "<=" in text
