"""Newton systems of the simplex-constrained QP.

Both solvers target the 3-block system::

    [ X^T X   1   -I ] [u_w]   [b_w]
    [ 1^T     0    0 ] [u_y] = [b_y]
    [ -I      0    D ] [u_z]   [b_z]

with ``D`` diagonal. :func:`kkt_direct_solve` assembles it densely and is
only used as a correctness oracle. :func:`kkt_reduced_solve` eliminates
``u_z`` and ``u_y`` and changes variables to ``v = X u_w``, leaving a
system of order ``d + 1`` plus the number of atoms kept explicit (at most
``4 (d + 1)``); ``X^T X`` is never formed, so a solve costs ``O(n d^2 + d^3)``.

The interior-point solver uses ``D = -diag(w / z)``; the elimination itself
only needs ``D`` entrywise nonzero.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_vector
from .exceptions import InvalidInputError, SingularKKTError
from .geometry import Dictionary


@dataclass
class KktRhs:
    b_w: np.ndarray
    b_y: float
    b_z: np.ndarray

    def as_vector(self):
        return np.concatenate([self.b_w, [self.b_y], self.b_z])


@dataclass
class KktSolution:
    u_w: np.ndarray
    u_y: float
    u_z: np.ndarray
    fallback: bool = False

    def as_vector(self):
        return np.concatenate([self.u_w, [self.u_y], self.u_z])


def _points(X):
    return X.points if isinstance(X, Dictionary) else np.asarray(X, dtype=float)


def _check(X, D, rhs):
    P = _points(X)
    n = P.shape[1]
    D = check_vector(D, n, name="D")
    if np.any(D == 0.0):
        raise InvalidInputError("D must have nonzero diagonal entries")
    if len(rhs.b_w) != n or len(rhs.b_z) != n:
        raise InvalidInputError("right-hand side blocks do not match n")
    return P, D


def assemble_kkt(X, D):
    """The full ``(2n+1) x (2n+1)`` KKT matrix."""
    P = _points(X)
    n = P.shape[1]
    K = np.zeros((2 * n + 1, 2 * n + 1))
    K[:n, :n] = P.T @ P
    K[:n, n] = 1.0
    K[n, :n] = 1.0
    K[:n, n + 1:] = -np.eye(n)
    K[n + 1:, :n] = -np.eye(n)
    K[n + 1:, n + 1:] = np.diag(D)
    return K


def kkt_residual(X, D, rhs, sol):
    """Residual ``K u - b`` evaluated blockwise without forming ``X^T X``."""
    P = _points(X)
    r_w = P.T @ (P @ sol.u_w) + sol.u_y - sol.u_z - rhs.b_w
    r_y = np.sum(sol.u_w) - rhs.b_y
    r_z = -sol.u_w + D * sol.u_z - rhs.b_z
    return np.concatenate([r_w, [r_y], r_z])


def kkt_direct_solve(X, D, rhs):
    """Dense LU solve of the assembled KKT system (oracle use only)."""
    P, D = _check(X, D, rhs)
    n = P.shape[1]
    K = assemble_kkt(P, D)
    try:
        u = np.linalg.solve(K, rhs.as_vector())
    except np.linalg.LinAlgError as exc:
        raise SingularKKTError(str(exc)) from None
    if not np.all(np.isfinite(u)):
        raise SingularKKTError("KKT solve produced non-finite values")
    return KktSolution(u_w=u[:n], u_y=float(u[n]), u_z=u[n + 1:])


def _reduced(P, D, b_w, b_y, b_z, max_kept=None):
    d, n = P.shape
    # u_z = (u_w + b_z) / D turns the first block into
    # (X^T X - 1/D) u_w + u_y 1 = r. Atoms whose |D| is small relative to
    # their squared norm are eliminated with t = X u_w as the new unknown;
    # the few with large |D| (the current support in the interior-point
    # method) stay explicit, which avoids the cancellation in D (X^T t - g)
    # that a full elimination suffers when |D| spans many orders of magnitude.
    E = -D
    theta = 1.0 / E
    big = np.abs(E) * (1.0 + np.einsum("ij,ij->j", P, P)) > 1.0
    if max_kept is None:
        max_kept = 4 * (d + 1)
    if big.sum() > max_kept:
        big[:] = False
        big[np.argsort(-np.abs(E))[:max_kept]] = True
    B = np.flatnonzero(big)
    N = np.flatnonzero(~big)
    r = b_w + b_z / D
    PB, PN, EN = P[:, B], P[:, N], E[N]
    a = PN @ EN
    k = len(B)
    K = np.empty((k + d + 1, k + d + 1))
    K[:k, :k] = np.diag(theta[B])
    K[:k, k:k + d] = PB.T
    K[:k, -1] = 1.0
    K[k:k + d, :k] = PB
    K[k:k + d, k:k + d] = -(np.eye(d) + (PN * EN) @ PN.T)
    K[k:k + d, -1] = -a
    K[-1, :k] = 1.0
    K[-1, k:k + d] = -a
    K[-1, -1] = -EN.sum()
    rhs = np.concatenate([r[B], -(PN @ (EN * r[N])), [b_y - EN @ r[N]]])
    sol = np.linalg.solve(K, rhs)
    t, u_y = sol[k:k + d], float(sol[-1])
    u_w = np.empty(n)
    u_w[B] = sol[:k]
    u_w[N] = EN * (r[N] - PN.T @ t - u_y)
    u_z = (u_w + b_z) / D
    return u_w, u_y, u_z


def _magnitude(P, D, sol):
    """Norm of ``|K| |u|`` (with ``|X^T X u_w|`` standing in for ``|X^T X| |u_w|``)."""
    m_w = np.abs(P.T @ (P @ sol.u_w)) + abs(sol.u_y) + np.abs(sol.u_z)
    m_y = np.sum(np.abs(sol.u_w))
    m_z = np.abs(sol.u_w) + np.abs(D * sol.u_z)
    return float(np.sqrt(m_w @ m_w + m_y * m_y + m_z @ m_z))


def kkt_reduced_solve(X, D, rhs, rtol=1e-8, refine=1, backward=False):
    """Solve the KKT system through the small reduced system.

    Every solve is certified against the full-system residual (computed in
    ``O(nd)``): it must satisfy ``||K u - b|| <= rtol * ||b||``, or with
    ``backward=True`` the normwise backward-error test
    ``||K u - b|| <= rtol * (||b|| + || |K| |u| ||)``. If the reduced matrix
    is singular or the test still fails after ``refine`` rounds of iterative
    refinement, the dense solver is used instead and ``fallback`` is set on
    the result.
    """
    P, D = _check(X, D, rhs)
    n = P.shape[1]
    bnorm = np.linalg.norm(rhs.as_vector())
    if bnorm == 0.0:
        return KktSolution(np.zeros(n), 0.0, np.zeros(n))

    def accepted(sol):
        res = kkt_residual(P, D, rhs, sol)
        if not np.all(np.isfinite(res)):
            raise np.linalg.LinAlgError("non-finite reduced solution")
        bound = bnorm + (_magnitude(P, D, sol) if backward else 0.0)
        return np.linalg.norm(res) <= rtol * bound, res

    try:
        sol = KktSolution(*_reduced(P, D, rhs.b_w, rhs.b_y, rhs.b_z))
        for _ in range(refine):
            ok, res = accepted(sol)
            if ok:
                return sol
            du_w, du_y, du_z = _reduced(P, D, -res[:n], -res[n], -res[n + 1:])
            sol = KktSolution(sol.u_w + du_w, sol.u_y + du_y, sol.u_z + du_z)
        if accepted(sol)[0]:
            return sol
    except np.linalg.LinAlgError:
        pass
    sol = kkt_direct_solve(P, D, rhs)
    sol.fallback = True
    return sol
