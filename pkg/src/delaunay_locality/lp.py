"""Dense two-phase simplex method and the LP-based point-location front ends.

The solver works on a full tableau and pivots with Bland's lowest-index rule,
so it terminates on degenerate problems and breaks ties between optimal
bases deterministically. Basic solutions are returned with exact zeros in the
nonbasic positions.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._validation import check_matrix, check_vector
from .exceptions import InvalidInputError
from .geometry import VertexSet, as_dictionary
from .report import SolveReport

TOL_LP = 1e-9
TOL_ACTIVE = 1e-7

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration-limit"


@dataclass
class LinearProgram:
    """``min cost @ x`` s.t. ``eq_lhs @ x == eq_rhs``, ``ineq_lhs @ x <= ineq_rhs``.

    Variables flagged in ``nonneg_mask`` are constrained to be >= 0; the rest
    are free.
    """

    cost: np.ndarray
    eq_lhs: Optional[np.ndarray] = None
    eq_rhs: Optional[np.ndarray] = None
    ineq_lhs: Optional[np.ndarray] = None
    ineq_rhs: Optional[np.ndarray] = None
    nonneg_mask: Optional[np.ndarray] = None

    def __post_init__(self):
        self.cost = check_vector(self.cost, name="cost")
        m = self.cost.size
        self.eq_lhs, self.eq_rhs = self._pair(self.eq_lhs, self.eq_rhs, m, "eq")
        self.ineq_lhs, self.ineq_rhs = self._pair(self.ineq_lhs, self.ineq_rhs, m, "ineq")
        if self.nonneg_mask is None:
            self.nonneg_mask = np.ones(m, dtype=bool)
        self.nonneg_mask = np.asarray(self.nonneg_mask, dtype=bool)
        if self.nonneg_mask.shape != (m,):
            raise InvalidInputError("nonneg_mask must have one entry per variable")

    @staticmethod
    def _pair(lhs, rhs, m, name):
        if lhs is None:
            return np.zeros((0, m)), np.zeros(0)
        lhs = check_matrix(lhs, shape=(None, m), name=f"{name}_lhs")
        rhs = check_vector(rhs, lhs.shape[0], name=f"{name}_rhs")
        return lhs, rhs


@dataclass
class LpSolution:
    x: np.ndarray
    objective: float
    status: str
    active_set: VertexSet
    iterations: int
    eq_duals: np.ndarray = field(default=None, repr=False)
    ineq_duals: np.ndarray = field(default=None, repr=False)
    duality_gap: float = np.nan
    dual_infeasibility: float = np.nan
    basis: tuple = field(default=(), repr=False)


class _Tableau:
    """Standard-form tableau ``A x = b, x >= 0`` with an explicit objective row."""

    def __init__(self, A, b, basis, tol):
        self.T = np.hstack([A, b[:, None]])
        self.basis = list(basis)
        self.tol = tol

    def pivot(self, r, j):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.basis[r] = j

    def run(self, cost, allowed, budget):
        """Primal simplex with Bland's rule on columns in ``allowed``.

        Returns ``(status, iterations)``.
        """
        T, tol = self.T, self.tol
        iters = 0
        while True:
            cb = cost[self.basis]
            reduced = cost - cb @ T[:, :-1]
            reduced[self.basis] = 0.0
            cand = np.flatnonzero(allowed & (reduced < -tol))
            if cand.size == 0:
                return OPTIMAL, iters
            if iters >= budget:
                return ITERATION_LIMIT, iters
            j = int(cand[0])
            colj = T[:, j]
            pos = np.flatnonzero(colj > tol)
            if pos.size == 0:
                return UNBOUNDED, iters
            ratios = T[pos, -1] / colj[pos]
            best = ratios.min()
            ties = pos[ratios <= best + tol * max(1.0, abs(best))]
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, j)
            iters += 1


def solve_lp(lp, tol=TOL_LP, max_iter=None):
    """Solve a :class:`LinearProgram` with the two-phase simplex method.

    Parameters
    ----------
    lp : LinearProgram
    tol : float, default=1e-9
        Pivot, optimality and feasibility tolerance.
    max_iter : int, optional
        Pivot budget over both phases; defaults to ``50 * (m + p + q)``.

    Returns
    -------
    LpSolution
        ``status`` is one of ``optimal``, ``infeasible``, ``unbounded`` or
        ``iteration-limit``; on anything but ``optimal`` the point ``x`` is
        the last iterate and carries no guarantee.
    """
    m = lp.cost.size
    p, q = lp.eq_lhs.shape[0], lp.ineq_lhs.shape[0]
    if max_iter is None:
        max_iter = 50 * (m + p + q)

    # x = P x_std: nonnegative vars map to one column, free vars to (x+, x-)
    free = np.flatnonzero(~lp.nonneg_mask)
    P = np.hstack([np.eye(m), -np.eye(m)[:, free]])
    nv = P.shape[1]
    A = np.zeros((p + q, nv + q))
    A[:p, :nv] = lp.eq_lhs @ P
    A[p:, :nv] = lp.ineq_lhs @ P
    A[p:, nv:] = np.eye(q)
    b = np.concatenate([lp.eq_rhs, lp.ineq_rhs])
    c = np.concatenate([lp.cost @ P, np.zeros(q)])
    sign = np.where(b < 0, -1.0, 1.0)
    A *= sign[:, None]
    b = b * sign
    rows, ncol = A.shape

    # slacks of rows with b >= 0 start basic; the remaining rows get artificials
    basis = [-1] * rows
    for i in range(q):
        if sign[p + i] > 0:
            basis[p + i] = nv + i
    need = [r for r in range(rows) if basis[r] < 0]
    A_full = np.hstack([A, np.zeros((rows, len(need)))])
    for k, r in enumerate(need):
        A_full[r, ncol + k] = 1.0
        basis[r] = ncol + k
    tab = _Tableau(A_full, b, basis, tol)
    total = ncol + len(need)
    iters = 0

    if need:
        c1 = np.zeros(total)
        c1[ncol:] = 1.0
        status, it = tab.run(c1, np.ones(total, dtype=bool), max_iter)
        iters += it
        if status == ITERATION_LIMIT:
            return _finish(lp, P, tab, A, b, c, sign, ITERATION_LIMIT, iters, tol, list(range(rows)))
        infeas = float(tab.T[:, -1] @ (np.asarray(tab.basis) >= ncol))
        if infeas > tol * max(1.0, float(np.abs(b).max(initial=0.0))):
            return _finish(lp, P, tab, A, b, c, sign, INFEASIBLE, iters, tol, list(range(rows)))
        # drive artificials out of the basis; rows where that fails are redundant
        keep = []
        for r in range(rows):
            if tab.basis[r] >= ncol:
                cand = np.flatnonzero(np.abs(tab.T[r, :ncol]) > tol)
                if cand.size:
                    tab.pivot(r, int(cand[0]))
                    keep.append(r)
            else:
                keep.append(r)
        tab.T = np.hstack([tab.T[keep, :ncol], tab.T[keep, -1:]])
        tab.basis = [tab.basis[r] for r in keep]
        kept_rows = keep
    else:
        kept_rows = list(range(rows))
        tab.T = np.hstack([tab.T[:, :ncol], tab.T[:, -1:]])

    status, it = tab.run(c, np.ones(ncol, dtype=bool), max(max_iter - iters, 0))
    iters += it
    return _finish(lp, P, tab, A, b, c, sign, status, iters, tol, kept_rows)


def _finish(lp, P, tab, A, b, c, sign, status, iters, tol, kept_rows):
    ncol = A.shape[1]
    basis = [j for j in tab.basis]
    x_std = np.zeros(ncol)
    real = [(r, j) for r, j in enumerate(basis) if j < ncol]
    if status == OPTIMAL:
        # recompute the basic values from the original data to shed pivoting error
        rows_idx = [kept_rows[r] for r, _ in real]
        cols = [j for _, j in real]
        B = A[np.ix_(rows_idx, cols)]
        xb = np.linalg.solve(B, b[rows_idx])
        x_std[cols] = np.where(np.abs(xb) <= tol * max(1.0, np.abs(xb).max()), 0.0, xb)
        x_std = np.maximum(x_std, 0.0)
    else:
        for r, j in real:
            x_std[j] = max(tab.T[r, -1], 0.0)
    nv = P.shape[1]
    x = P @ x_std[:nv]
    sol = LpSolution(
        x=x,
        objective=float(lp.cost @ x),
        status=status,
        active_set=(),
        iterations=iters,
        basis=tuple(basis),
    )
    q = lp.ineq_lhs.shape[0]
    if q:
        slack = lp.ineq_rhs - lp.ineq_lhs @ x
        tight = np.abs(slack) <= TOL_ACTIVE * (1.0 + np.abs(lp.ineq_rhs))
        sol.active_set = tuple(int(i) for i in np.flatnonzero(tight))
    if status == OPTIMAL:
        rows_idx = [kept_rows[r] for r, _ in real]
        cols = [j for _, j in real]
        B = A[np.ix_(rows_idx, cols)]
        y_std = np.zeros(A.shape[0])
        y_std[rows_idx] = np.linalg.solve(B.T, c[cols])
        reduced = c - A.T @ y_std
        sol.dual_infeasibility = float(max(0.0, -reduced.min(initial=0.0)))
        sol.duality_gap = float(abs(c @ x_std - b @ y_std))
        y = y_std * sign
        p = lp.eq_lhs.shape[0]
        sol.eq_duals = y[:p]
        sol.ineq_duals = y[p:]
    return sol


def solve_exact_E(X, y, tol=TOL_LP, max_iter=None):
    """Minimize locality subject to exact reconstruction ``Xw = y`` over the simplex.

    A basic optimal solution is returned, so at most ``d + 1`` weights are
    nonzero. Outside the convex hull the LP is infeasible and the report's
    status says so.
    """
    X = as_dictionary(X)
    y = X.check_query(y)
    cost = X.sq_dists(y)
    lp = LinearProgram(
        cost=cost,
        eq_lhs=np.vstack([X.points, np.ones((1, X.n))]),
        eq_rhs=np.append(y, 1.0),
    )
    sol = solve_lp(lp, tol=tol, max_iter=max_iter)
    w = sol.x
    r = X.points @ w - y
    fit = float(r @ r)
    return SolveReport(
        w=w,
        objective=float(cost @ w),
        fit=fit,
        locality=float(cost @ w),
        rho=None,
        iters=sol.iterations,
        status=sol.status,
        residuals={
            "primal": float(np.sqrt(fit) + abs(w.sum() - 1.0)),
            "dual": sol.dual_infeasibility,
            "gap": sol.duality_gap,
        },
    )


@dataclass
class ChlpResult:
    vertex_set: VertexSet
    status: str
    degenerate: bool = False
    solution: Optional[LpSolution] = field(default=None, repr=False)

    @property
    def outside_hull(self):
        return self.status == UNBOUNDED


def chlp_locate(X, y, tol=TOL_LP, max_iter=None):
    """Containing Delaunay simplex from the lifted convex-hull LP.

    Solves ``min -c @ y - z`` s.t. ``x_i @ c + z <= |x_i|^2`` over free
    ``(c, z)`` and returns the atoms whose constraints are tight. An
    unbounded LP means ``y`` lies outside the hull; more than ``d + 1``
    tight constraints flags a cospherical (degenerate) configuration.
    """
    X = as_dictionary(X)
    y = X.check_query(y)
    d, n = X.d, X.n
    lp = LinearProgram(
        cost=-np.append(y, 1.0),
        ineq_lhs=np.hstack([X.rows, np.ones((n, 1))]),
        ineq_rhs=X.sq_norms.copy(),
        nonneg_mask=np.zeros(d + 1, dtype=bool),
    )
    sol = solve_lp(lp, tol=tol, max_iter=max_iter)
    if sol.status != OPTIMAL:
        return ChlpResult(vertex_set=(), status=sol.status, solution=sol)
    S = sol.active_set
    return ChlpResult(vertex_set=S, status=OPTIMAL, degenerate=len(S) > d + 1, solution=sol)
