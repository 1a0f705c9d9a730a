"""Primal-dual interior-point solver for the locality-regularized least squares problem.

The problem ``min_{w in simplex} 1/2 ||Xw - y||^2 + rho * sum_i w_i ||x_i - y||^2``
is solved in its QP form::

    min 1/2 w^T X^T X w + w^T (rho c - X^T y)   s.t.  1^T w = 1,  w >= 0

with ``c_i = ||x_i - y||^2``. For ``0 < rho < 1`` the objective is divided by
``rho`` before solving, so that the reduced costs separating atoms inside and
outside the optimal support are O(1) and the complementarity tolerance
translates directly into how close to zero the off-support weights get. The
minimizer is unchanged by the scaling; reported residuals refer to the
scaled problem (``SolveReport.objective_scale``).
"""

import time

import numpy as np

from ._validation import check_scalar
from .exceptions import InvalidInputError
from .geometry import as_dictionary
from .kkt import KktRhs, kkt_reduced_solve
from .report import SolveReport

STEP_FRACTION = 0.995


def _max_step(v, dv):
    neg = dv < 0
    if not neg.any():
        return np.inf
    return float(np.min(-v[neg] / dv[neg]))


def objective_scale(rho):
    return 1.0 / rho if 0.0 < rho < 1.0 else 1.0


def kkt_residuals(X, y, rho, w, lam, z, scale):
    """Primal, dual and complementarity residuals of an iterate (scaled problem)."""
    P = X.points
    c = X.sq_dists(y)
    q = scale * (rho * c - P.T @ y)
    Hw = scale * (P.T @ (P @ w))
    r_d = Hw + q + lam - z
    return {
        "primal": float(abs(w.sum() - 1.0)),
        "dual": float(np.max(np.abs(r_d)) / (1.0 + max(np.max(np.abs(q)), np.max(np.abs(Hw))))),
        "gap": float(w @ z),
    }


def solve_relaxed_R(X, y, rho, tol=1e-9, max_iter=100):
    """Solve the locality-regularized least squares problem.

    Parameters
    ----------
    X : Dictionary
    y : array-like of shape (d,)
    rho : float
        Locality weight, ``rho >= 0``; ``rho = 0`` is the projection onto
        the convex hull.
    tol : float, default=1e-9
        Bound on the primal residual, the relative dual residual and the
        complementarity gap ``w @ z``.
    max_iter : int, default=100

    Returns
    -------
    SolveReport
        ``w`` is the final interior iterate (all entries strictly positive);
        status is ``optimal`` or ``iteration-limit``.
    """
    X = as_dictionary(X)
    y = X.check_query(y)
    check_scalar(rho, "rho", min_val=0.0)
    check_scalar(tol, "tol", min_val=0.0, include_min=False)
    check_scalar(max_iter, "max_iter", min_val=1, integer=True)
    rho = float(rho)
    n = X.n
    P = X.points
    c = X.sq_dists(y)
    scale = objective_scale(rho)
    Ps = np.sqrt(scale) * P
    q = scale * (rho * c - P.T @ y)
    qmax = float(np.max(np.abs(q)))

    w = np.full(n, 1.0 / n)
    z = np.ones(n)
    lam = 0.0
    status = "iteration-limit"
    fallbacks = 0
    it = 0
    res = {}
    t0 = time.perf_counter()
    while True:
        Hw = Ps.T @ (Ps @ w)
        r_d = Hw + q + lam - z
        r_p = w.sum() - 1.0
        gap = float(w @ z)
        res = {
            "primal": float(abs(r_p)),
            "dual": float(np.max(np.abs(r_d)) / (1.0 + max(qmax, float(np.max(np.abs(Hw)))))),
            "gap": gap,
        }
        if res["primal"] <= tol and res["dual"] <= tol and gap <= tol:
            status = "optimal"
            break
        if it >= max_iter:
            break
        mu = gap / n
        D = -w / z

        aff = kkt_reduced_solve(Ps, D, KktRhs(-r_d, -r_p, w), backward=True)
        fallbacks += aff.fallback
        a_aff = min(1.0, _max_step(w, aff.u_w), _max_step(z, aff.u_z))
        mu_aff = float((w + a_aff * aff.u_w) @ (z + a_aff * aff.u_z)) / n
        sigma = (mu_aff / mu) ** 3 if mu > 0 else 0.0

        r_c = w * z + aff.u_w * aff.u_z - sigma * mu
        step = kkt_reduced_solve(Ps, D, KktRhs(-r_d, -r_p, r_c / z), backward=True)
        fallbacks += step.fallback
        alpha = min(1.0, STEP_FRACTION * _max_step(w, step.u_w),
                    STEP_FRACTION * _max_step(z, step.u_z))
        if res["primal"] <= tol and res["dual"] <= tol:
            # once feasible the gap along the step is gap + b a + c a^2 with
            # c = u_w^T H u_w >= 0, and a full Mehrotra step can overshoot its
            # minimum and cycle; do not step past it
            b = float(w @ step.u_z + z @ step.u_w)
            quad = float(step.u_w @ step.u_z)
            if b < 0 < quad:
                alpha = min(alpha, -b / (2.0 * quad))
        w = w + alpha * step.u_w
        z = z + alpha * step.u_z
        lam += alpha * step.u_y
        it += 1
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(z))):
            raise InvalidInputError("interior-point iterate became non-finite")
    elapsed = time.perf_counter() - t0

    r = P @ w - y
    fit = float(r @ r)
    loc = float(c @ w)
    return SolveReport(
        w=w,
        objective=0.5 * fit + rho * loc,
        fit=fit,
        locality=loc,
        rho=rho,
        iters=it,
        status=status,
        residuals=res,
        kkt_fallbacks=fallbacks,
        dual_eq=lam,
        dual_ineq=z,
        objective_scale=scale,
        iter_seconds=elapsed / max(it, 1),
    )


def project_onto_hull(X, y, tol=1e-9, max_iter=100):
    """Weights whose combination is the Euclidean projection of ``y`` onto the hull."""
    return solve_relaxed_R(X, y, 0.0, tol=tol, max_iter=max_iter)
