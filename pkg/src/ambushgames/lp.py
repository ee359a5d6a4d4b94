"""Dense linear programming with certified primal and dual solutions.

Two interchangeable backends sit behind :func:`solve`:

* an in-house two-phase primal simplex on the standard-form tableau,
  pivoting under Bland's anti-cycling rule, with duals recovered from
  the final basis. This is the reference method and the default for
  the small, dense programs produced by the game builders.
* ``scipy.optimize.linprog`` (HiGHS) for the large sparse programs
  that sampled-environment games generate.

Every Optimal result is certified before it is returned: primal
feasibility, dual feasibility, and the duality gap are checked at
fixed tolerances, and a failing certificate raises
:class:`CertificationError` instead of returning silently wrong data.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize
import scipy.sparse as sp

from .errors import CertificationError, MalformedProgram

log = logging.getLogger(__name__)

# Pivot and feasibility tolerances; inputs are O(1)-scaled probabilities.
PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
_MAX_PIVOTS = 200_000

# Dense-tableau work cap for the automatic backend choice.
_AUTO_SIMPLEX_CELLS = 150_000


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LinearProgram:
    """minimize ``objective . x`` subject to
    ``ineq_matrix @ x <= ineq_rhs``, ``eq_matrix @ x == eq_rhs``, and
    ``x[i] >= 0`` wherever ``nonneg_mask[i]`` is set (free otherwise).

    Matrices may be dense arrays or scipy sparse matrices.
    """

    objective: np.ndarray
    ineq_matrix: object = None
    ineq_rhs: np.ndarray = None
    eq_matrix: object = None
    eq_rhs: np.ndarray = None
    nonneg_mask: np.ndarray = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        n = self.objective.size
        if self.nonneg_mask is None:
            self.nonneg_mask = np.ones(n, dtype=bool)
        else:
            self.nonneg_mask = np.asarray(self.nonneg_mask, dtype=bool).ravel()
        self.ineq_matrix, self.ineq_rhs = _normalize_block(self.ineq_matrix, self.ineq_rhs, n)
        self.eq_matrix, self.eq_rhs = _normalize_block(self.eq_matrix, self.eq_rhs, n)

    @property
    def n_vars(self) -> int:
        return self.objective.size

    def validate(self) -> None:
        n = self.n_vars
        if self.nonneg_mask.size != n:
            raise MalformedProgram("nonneg_mask length does not match objective")
        for name, M, rhs in (
            ("ineq", self.ineq_matrix, self.ineq_rhs),
            ("eq", self.eq_matrix, self.eq_rhs),
        ):
            if M.shape[1] != n:
                raise MalformedProgram(f"{name}_matrix has {M.shape[1]} columns, expected {n}")
            if M.shape[0] != rhs.size:
                raise MalformedProgram(f"{name}_rhs length does not match row count")


def _normalize_block(M, rhs, n):
    if M is None:
        return np.zeros((0, n)), np.zeros(0)
    if not sp.issparse(M):
        M = np.asarray(M, dtype=float)
        if M.ndim == 1:
            M = M.reshape(1, -1)
    rhs = np.zeros(M.shape[0]) if rhs is None else np.asarray(rhs, dtype=float).ravel()
    return M, rhs


@dataclass
class LpSolution:
    status: LpStatus
    primal: np.ndarray = None
    dual_ineq: np.ndarray = None
    dual_eq: np.ndarray = None
    objective_value: float = None
    certificate: dict = field(default_factory=dict)


def solve(lp: LinearProgram, method: str = "auto", debug: bool = False) -> LpSolution:
    """Solve the program, returning a certified primal/dual pair.

    ``method`` is one of ``"auto"``, ``"simplex"``, or ``"highs"``;
    auto routes to the in-house simplex when the dense tableau stays
    small and to HiGHS otherwise. Output is deterministic for a given
    input and method. ``debug`` logs a plain-text coefficient dump.
    """
    lp.validate()
    if debug:
        log.debug("%s", format_program(lp))
    if method == "auto":
        cells = (lp.ineq_matrix.shape[0] + lp.eq_matrix.shape[0]) * max(lp.n_vars, 1)
        method = "simplex" if cells <= _AUTO_SIMPLEX_CELLS else "highs"
    if method == "simplex":
        sol = _solve_simplex(lp)
    elif method == "highs":
        sol = _solve_highs(lp)
    else:
        raise ValueError(f"unknown method {method!r}")
    if sol.status is LpStatus.OPTIMAL:
        sol.certificate = certify(lp, sol)
    return sol


def certify(lp: LinearProgram, sol: LpSolution, tol: float = FEAS_TOL) -> dict:
    """Check primal feasibility, dual feasibility, and the duality gap.

    Returns the worst residuals; raises :class:`CertificationError` if
    any exceeds ``tol`` (the gap is checked relative to the objective
    magnitude).
    """
    x = np.asarray(sol.primal, dtype=float)
    lam = np.asarray(sol.dual_ineq, dtype=float)
    mu = np.asarray(sol.dual_eq, dtype=float)
    G, h = lp.ineq_matrix, lp.ineq_rhs
    A, b = lp.eq_matrix, lp.eq_rhs
    c = lp.objective

    primal_resid = 0.0
    if G.shape[0]:
        primal_resid = float(np.max(G @ x - h, initial=0.0))
    if A.shape[0]:
        primal_resid = max(primal_resid, float(np.max(np.abs(A @ x - b), initial=0.0)))
    primal_resid = max(primal_resid, float(np.max(-x[lp.nonneg_mask], initial=0.0)))

    # Stationarity of the Lagrangian c.x + lam.(Gx-h) + mu.(Ax-b).
    grad = c.copy()
    if G.shape[0]:
        grad = grad + (G.T @ lam if not sp.issparse(G) else G.T.dot(lam))
    if A.shape[0]:
        grad = grad + (A.T @ mu if not sp.issparse(A) else A.T.dot(mu))
    dual_resid = float(np.max(-lam, initial=0.0))
    if lp.nonneg_mask.any():
        dual_resid = max(dual_resid, float(np.max(-grad[lp.nonneg_mask], initial=0.0)))
    free = ~lp.nonneg_mask
    if free.any():
        dual_resid = max(dual_resid, float(np.max(np.abs(grad[free]), initial=0.0)))

    primal_obj = float(c @ x)
    dual_obj = -float(lam @ h) - float(mu @ b)
    gap = abs(primal_obj - dual_obj)

    cert = {"primal_residual": primal_resid, "dual_residual": dual_resid, "gap": gap}
    if primal_resid > tol or dual_resid > tol or gap > tol * (1.0 + abs(primal_obj)):
        raise CertificationError(f"optimality certificate failed: {cert}")
    return cert


def format_program(lp: LinearProgram) -> str:
    """Plain-text diagnostic dump: one row of coefficients per line."""
    lines = ["min " + " ".join(f"{v:.12g}" for v in lp.objective)]
    G = lp.ineq_matrix.toarray() if sp.issparse(lp.ineq_matrix) else lp.ineq_matrix
    A = lp.eq_matrix.toarray() if sp.issparse(lp.eq_matrix) else lp.eq_matrix
    for row, rhs in zip(G, lp.ineq_rhs):
        lines.append(" ".join(f"{v:.12g}" for v in row) + f" <= {rhs:.12g}")
    for row, rhs in zip(A, lp.eq_rhs):
        lines.append(" ".join(f"{v:.12g}" for v in row) + f" == {rhs:.12g}")
    lines.append("nonneg " + "".join("1" if f else "0" for f in lp.nonneg_mask))
    return "\n".join(lines)


# --- HiGHS backend -----------------------------------------------------------


def _solve_highs(lp: LinearProgram) -> LpSolution:
    bounds = [(0, None) if nn else (None, None) for nn in lp.nonneg_mask]
    res = scipy.optimize.linprog(
        c=lp.objective,
        A_ub=lp.ineq_matrix if lp.ineq_matrix.shape[0] else None,
        b_ub=lp.ineq_rhs if lp.ineq_matrix.shape[0] else None,
        A_eq=lp.eq_matrix if lp.eq_matrix.shape[0] else None,
        b_eq=lp.eq_rhs if lp.eq_matrix.shape[0] else None,
        bounds=bounds,
        method="highs",
        options={
            "primal_feasibility_tolerance": 1e-9,
            "dual_feasibility_tolerance": 1e-9,
        },
    )
    if res.status == 2:
        return LpSolution(status=LpStatus.INFEASIBLE)
    if res.status == 3:
        return LpSolution(status=LpStatus.UNBOUNDED)
    if res.status != 0:
        raise CertificationError(f"linear solver did not converge: {res.message}")
    # scipy marginals are objective sensitivities to the rhs; our duals
    # enter the Lagrangian with the opposite sign.
    lam = -np.asarray(res.ineqlin.marginals) if lp.ineq_matrix.shape[0] else np.zeros(0)
    mu = -np.asarray(res.eqlin.marginals) if lp.eq_matrix.shape[0] else np.zeros(0)
    return LpSolution(
        status=LpStatus.OPTIMAL,
        primal=np.asarray(res.x, dtype=float),
        dual_ineq=np.maximum(lam, 0.0),
        dual_eq=mu,
        objective_value=float(lp.objective @ res.x),
    )


# --- two-phase simplex backend ----------------------------------------------


def _solve_simplex(lp: LinearProgram) -> LpSolution:
    n = lp.n_vars
    G = lp.ineq_matrix.toarray() if sp.issparse(lp.ineq_matrix) else np.asarray(lp.ineq_matrix, dtype=float)
    A = lp.eq_matrix.toarray() if sp.issparse(lp.eq_matrix) else np.asarray(lp.eq_matrix, dtype=float)
    h, b = lp.ineq_rhs, lp.eq_rhs
    m1, m2 = G.shape[0], A.shape[0]
    m = m1 + m2

    # Split free variables into positive/negative parts.
    split: list[tuple[int, float]] = []
    for j in range(n):
        split.append((j, 1.0))
        if not lp.nonneg_mask[j]:
            split.append((j, -1.0))
    n_std = len(split)

    stacked = np.vstack([G, A]) if m else np.zeros((0, n))
    rhs = np.concatenate([h, b])

    if m == 0:
        return _solve_unconstrained(lp)

    body = np.empty((m, n_std))
    c_std = np.empty(n_std)
    for k, (j, s) in enumerate(split):
        body[:, k] = s * stacked[:, j]
        c_std[k] = s * lp.objective[j]

    slacks = np.zeros((m, m1))
    slacks[:m1, :] = np.eye(m1)
    table = np.hstack([body, slacks])
    cost = np.concatenate([c_std, np.zeros(m1)])

    sigma = np.where(rhs < 0, -1.0, 1.0)
    table *= sigma[:, None]
    rhs = rhs * sigma
    frozen = table.copy()  # pre-pivot matrix, used to recover duals

    # Phase 1: artificials wherever a slack cannot start basic.
    n_cols = n_std + m1
    basis = np.empty(m, dtype=int)
    art_rows = []
    for i in range(m):
        if i < m1 and sigma[i] > 0:
            basis[i] = n_std + i
        else:
            art_rows.append(i)
    art_cols = {}
    if art_rows:
        art = np.zeros((m, len(art_rows)))
        for k, i in enumerate(art_rows):
            art[i, k] = 1.0
            art_cols[n_cols + k] = i
            basis[i] = n_cols + k
        table = np.hstack([table, art])
    T = np.hstack([table, rhs[:, None]])

    if art_rows:
        cost1 = np.zeros(T.shape[1] - 1)
        cost1[n_cols:] = 1.0
        status = _pivot_loop(T, basis, cost1)
        if status != "optimal":
            raise CertificationError("phase-1 simplex failed to terminate")
        if float(cost1[basis] @ T[:, -1]) > FEAS_TOL:
            return LpSolution(status=LpStatus.INFEASIBLE)
        keep = _drive_out_artificials(T, basis, n_cols)
    else:
        keep = list(range(m))

    T = np.hstack([T[keep, :n_cols], T[keep, -1:]])
    basis = basis[keep]
    frozen = frozen[keep]
    kept_sigma = sigma[keep]
    kept_rows = keep

    status = _pivot_loop(T, basis, cost)
    if status == "unbounded":
        return LpSolution(status=LpStatus.UNBOUNDED)
    if status != "optimal":
        raise CertificationError("phase-2 simplex failed to terminate")

    x_std = np.zeros(n_cols)
    x_std[basis] = T[:, -1]
    x = np.zeros(n)
    for k, (j, s) in enumerate(split):
        x[j] += s * x_std[k]

    # Duals from the final basis of the untouched standard-form matrix.
    B = frozen[:, basis]
    try:
        y_kept = np.linalg.solve(B.T, cost[basis])
    except np.linalg.LinAlgError:
        y_kept, *_ = np.linalg.lstsq(B.T, cost[basis], rcond=None)
    y = np.zeros(m)
    for idx, row in enumerate(kept_rows):
        y[row] = kept_sigma[idx] * y_kept[idx]
    lam = np.maximum(-y[:m1], 0.0)
    mu = -y[m1:]

    return LpSolution(
        status=LpStatus.OPTIMAL,
        primal=x,
        dual_ineq=lam,
        dual_eq=mu,
        objective_value=float(lp.objective @ x),
    )


def _solve_unconstrained(lp: LinearProgram) -> LpSolution:
    c = lp.objective
    if np.any(c[lp.nonneg_mask] < -PIVOT_TOL) or np.any(np.abs(c[~lp.nonneg_mask]) > PIVOT_TOL):
        return LpSolution(status=LpStatus.UNBOUNDED)
    x = np.zeros(lp.n_vars)
    return LpSolution(
        status=LpStatus.OPTIMAL,
        primal=x,
        dual_ineq=np.zeros(0),
        dual_eq=np.zeros(0),
        objective_value=0.0,
    )


def _pivot_loop(T: np.ndarray, basis: np.ndarray, cost: np.ndarray) -> str:
    """Bland-rule pivoting until optimal or unbounded. Mutates T, basis."""
    m = T.shape[0]
    for _ in range(_MAX_PIVOTS):
        reduced = cost - cost[basis] @ T[:, :-1]
        reduced[basis] = 0.0
        entering = -1
        for j in range(reduced.size):
            if reduced[j] < -PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            return "optimal"

        col = T[:, entering]
        best_theta, leaving = None, -1
        for i in range(m):
            if col[i] > PIVOT_TOL:
                theta = max(T[i, -1], 0.0) / col[i]
                if (
                    best_theta is None
                    or theta < best_theta - PIVOT_TOL
                    or (abs(theta - best_theta) <= PIVOT_TOL and basis[i] < basis[leaving])
                ):
                    best_theta, leaving = theta, i
        if leaving < 0:
            return "unbounded"

        pivot = T[leaving, entering]
        T[leaving, :] /= pivot
        for i in range(m):
            if i != leaving and abs(T[i, entering]) > 1e-14:
                T[i, :] -= T[i, entering] * T[leaving, :]
        basis[leaving] = entering
    return "stalled"


def _drive_out_artificials(T: np.ndarray, basis: np.ndarray, n_cols: int) -> list[int]:
    """Pivot artificial variables out of the basis; rows that cannot be
    repaired are redundant and dropped. Returns surviving row indices."""
    m = T.shape[0]
    keep = []
    for i in range(m):
        if basis[i] < n_cols:
            keep.append(i)
            continue
        entering = -1
        for j in range(n_cols):
            if abs(T[i, j]) > PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            continue  # redundant row
        pivot = T[i, entering]
        T[i, :] /= pivot
        for k in range(m):
            if k != i and abs(T[k, entering]) > 1e-14:
                T[k, :] -= T[k, entering] * T[i, :]
        basis[i] = entering
        keep.append(i)
    return keep
