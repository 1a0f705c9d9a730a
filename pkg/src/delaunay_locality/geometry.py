"""Dictionary/weight types and closed-form geometric quantities.

Conventions
-----------
A dictionary holds ``n`` atoms in ``R^d``. Internally the points are stored
column-wise as a ``(d, n)`` matrix ``points`` (column ``i`` is atom ``x_i``);
:meth:`Dictionary.from_rows` accepts the row-per-atom layout used by the file
formats and by scikit-learn style arrays.
"""

import itertools
from dataclasses import dataclass
from math import comb
from typing import Optional, Tuple

import numpy as np

from ._validation import check_matrix, check_scalar, check_vector
from .exceptions import (
    DegenerateSimplexError,
    InvalidInputError,
    NotInteriorError,
    ResourceLimitError,
)

TOL_GEOM = 1e-9
TOL_FEAS = 1e-8
TOL_LIN = 1e-9

VertexSet = Tuple[int, ...]


def vertex_set(indices, n=None) -> VertexSet:
    """Normalize ``indices`` into a sorted, duplicate-free tuple of ints."""
    idx = sorted(int(i) for i in indices)
    if len(set(idx)) != len(idx):
        raise InvalidInputError(f"duplicate indices in vertex set {idx}")
    if n is not None and idx and (idx[0] < 0 or idx[-1] >= n):
        raise InvalidInputError(f"vertex set {idx} out of range for n={n}")
    return tuple(idx)


class Dictionary:
    """Immutable set of ``n`` distinct atoms in ``R^d``.

    Parameters
    ----------
    points : array-like of shape (d, n)
        Column ``i`` is atom ``x_i``.
    tol_geom : float, default=1e-9
        Relative tolerance for cocircularity and degeneracy tests. The
        absolute tolerance is ``tol_geom * scale``, where ``scale`` is the
        diagonal of the bounding box of the atoms.
    """

    def __init__(self, points, tol_geom=TOL_GEOM):
        pts = check_matrix(points, name="points")
        d, n = pts.shape
        if d < 1 or n < 1:
            raise InvalidInputError(f"dictionary needs d >= 1 and n >= 1, got {pts.shape}")
        if n > 1:
            uniq = np.unique(pts.T, axis=0)
            if uniq.shape[0] != n:
                raise InvalidInputError("dictionary contains duplicate atoms")
        pts = pts.copy()
        pts.setflags(write=False)
        self._points = pts
        self._rows = pts.T
        sq = np.einsum("ij,ij->j", pts, pts)
        sq.setflags(write=False)
        self._sq_norms = sq
        self.tol_geom = float(tol_geom)
        extent = pts.max(axis=1) - pts.min(axis=1)
        self.scale = float(max(np.linalg.norm(extent), np.finfo(float).tiny))

    @classmethod
    def from_rows(cls, atoms, tol_geom=TOL_GEOM):
        """Build from an ``(n, d)`` array whose row ``i`` is atom ``x_i``."""
        return cls(check_matrix(atoms, name="atoms").T, tol_geom=tol_geom)

    @property
    def points(self):
        return self._points

    @property
    def rows(self):
        """``(n, d)`` view with one atom per row."""
        return self._rows

    @property
    def sq_norms(self):
        return self._sq_norms

    @property
    def d(self):
        return self._points.shape[0]

    @property
    def n(self):
        return self._points.shape[1]

    @property
    def atol(self):
        """Absolute geometric tolerance."""
        return self.tol_geom * self.scale

    def check_query(self, y, name="y"):
        return check_vector(y, self.d, name=name)

    def sq_dists(self, y):
        """Squared distances ``||x_i - y||^2`` from the cached norms."""
        y = self.check_query(y)
        return np.maximum(self._sq_norms - 2.0 * (y @ self._points) + y @ y, 0.0)

    def __repr__(self):
        return f"Dictionary(d={self.d}, n={self.n})"


def as_dictionary(X):
    """Accept a :class:`Dictionary` or a ``(d, n)`` array."""
    if isinstance(X, Dictionary):
        return X
    return Dictionary(X)


@dataclass(frozen=True)
class SimplexWeights:
    """A length-``n`` weight vector on the probability simplex (up to ``tol_feas``)."""

    w: np.ndarray
    tol_feas: float = TOL_FEAS

    def __post_init__(self):
        w = check_vector(self.w, name="w")
        if w.size == 0:
            raise InvalidInputError("weights must be non-empty")
        if w.min() < -self.tol_feas or abs(w.sum() - 1.0) > self.tol_feas:
            raise InvalidInputError(
                f"weights are not on the simplex (min={w.min():.3g}, sum={w.sum():.17g})"
            )
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    def projected(self):
        """Clamp negatives to zero and renormalize onto the simplex."""
        w = np.clip(self.w, 0.0, None)
        return w / w.sum()

    def __len__(self):
        return self.w.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.w, dtype=dtype)


def _as_weights(w, n):
    sw = w if isinstance(w, SimplexWeights) else SimplexWeights(w)
    if len(sw) != n:
        raise InvalidInputError(f"weights have length {len(sw)}, expected {n}")
    return sw.projected()


@dataclass(frozen=True)
class Circumsphere:
    center: np.ndarray
    radius: float


@dataclass(frozen=True)
class BarycentricSystem:
    """The local dictionary stacked over a row of ones, with its conditioning."""

    B: np.ndarray
    sigma_min: float
    sigma_max: float


@dataclass(frozen=True)
class GeneralPositionReport:
    in_general_position: bool
    witness: Optional[VertexSet] = None
    affine_deficient: bool = False


def locality(X, w, y):
    """Weighted spread ``sum_i w_i ||x_i - y||^2`` of a representation."""
    X = as_dictionary(X)
    w = _as_weights(w, X.n)
    return float(w @ X.sq_dists(y))


def locality_gap_constant(X, y):
    """``max_i ||x_i - y||^2 - min_i ||x_i - y||^2``."""
    X = as_dictionary(X)
    sq = X.sq_dists(y)
    return float(sq.max() - sq.min())


def _check_simplex_vertices(vertices):
    V = check_matrix(vertices, name="vertices")
    k, d = V.shape
    if k != d + 1:
        raise InvalidInputError(f"need d+1={d + 1} vertices in R^{d}, got {k}")
    return V


def circumsphere(vertices, tol_geom=TOL_GEOM):
    """Circumscribing hypersphere of ``d+1`` points given as rows.

    Raises
    ------
    DegenerateSimplexError
        If the points are affinely dependent within ``tol_geom`` (relative to
        the longest edge).
    """
    V = _check_simplex_vertices(vertices)
    E = V[1:] - V[0]
    scale = max(float(np.max(np.linalg.norm(E, axis=1))), np.finfo(float).tiny)
    svals = np.linalg.svd(E, compute_uv=False)
    if svals[-1] <= tol_geom * scale:
        raise DegenerateSimplexError("vertices are affinely dependent")
    # centred form of 2(x_i - x_0)^T c = |x_i|^2 - |x_0|^2
    u = np.linalg.solve(E, 0.5 * np.einsum("ij,ij->i", E, E))
    return Circumsphere(center=V[0] + u, radius=float(np.linalg.norm(u)))


def _circumspheres_batch(rows, combos, atol):
    """Circumspheres of many vertex subsets at once.

    Returns ``(centers, radii, valid)``; entries with ``valid == False`` are
    affinely dependent and their centre/radius are NaN.
    """
    V = rows[combos]
    E = V[:, 1:, :] - V[:, :1, :]
    rhs = 0.5 * np.einsum("kij,kij->ki", E, E)
    smin = np.linalg.svd(E, compute_uv=False)[:, -1]
    valid = smin > atol
    centers = np.full((len(combos), rows.shape[1]), np.nan)
    radii = np.full(len(combos), np.nan)
    if valid.any():
        u = np.linalg.solve(E[valid], rhs[valid][..., None])[..., 0]
        centers[valid] = V[valid, 0, :] + u
        radii[valid] = np.linalg.norm(u, axis=1)
    return centers, radii, valid


def iter_subsets(n, k, chunk=20000):
    """Yield ``(m, k)`` integer arrays covering all k-subsets of range(n) in lexicographic order."""
    it = itertools.combinations(range(n), k)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.asarray(block, dtype=np.intp)


def barycentric_system(X, S):
    X = as_dictionary(X)
    S = vertex_set(S, X.n)
    if len(S) != X.d + 1:
        raise InvalidInputError(f"simplex needs d+1={X.d + 1} vertices, got {len(S)}")
    B = np.vstack([X.points[:, S], np.ones(len(S))])
    svals = np.linalg.svd(B, compute_uv=False)
    return BarycentricSystem(B=B, sigma_min=float(svals[-1]), sigma_max=float(svals[0]))


def barycentric(X, S, y):
    """Barycentric coordinates of ``y`` with respect to simplex ``S``.

    Coordinates are ordered like the sorted vertex set and may be negative
    when ``y`` lies outside the simplex.
    """
    X = as_dictionary(X)
    y = X.check_query(y)
    system = barycentric_system(X, S)
    if system.sigma_min <= X.tol_geom * system.sigma_max:
        raise DegenerateSimplexError(f"simplex {tuple(S)} is degenerate")
    return np.linalg.solve(system.B, np.append(y, 1.0))


def general_position_check(X, max_subsets=2_000_000):
    """Exhaustively test that no d+2 atoms are cospherical and the hull is full dimensional.

    Desk-scale only: visits every (d+1)-subset.
    """
    X = as_dictionary(X)
    d, n = X.d, X.n
    centred = X.rows - X.rows.mean(axis=0)
    svals = np.linalg.svd(centred, compute_uv=False) if n > 1 else np.zeros(1)
    rank = int(np.sum(svals > X.atol)) if svals.size else 0
    if n < d + 1 or rank < d:
        return GeneralPositionReport(False, None, affine_deficient=True)
    total = comb(n, d + 1)
    if total > max_subsets:
        raise ResourceLimitError(f"{total} subsets exceed the budget of {max_subsets}")
    rows = X.rows
    for combos in iter_subsets(n, d + 1):
        centers, radii, valid = _circumspheres_batch(rows, combos, X.atol)
        if not valid.any():
            continue
        c = centers[valid]
        dist = np.sqrt(np.maximum(
            X.sq_norms[None, :] - 2.0 * c @ X.points + np.einsum("ij,ij->i", c, c)[:, None],
            0.0,
        ))
        on = np.abs(dist - radii[valid][:, None]) <= X.atol
        sub = combos[valid]
        on[np.arange(len(sub))[:, None], sub] = False
        hits = np.flatnonzero(on.any(axis=1))
        if hits.size:
            k = hits[0]
            j = int(np.flatnonzero(on[k])[0])
            return GeneralPositionReport(False, vertex_set(list(sub[k]) + [j]))
    return GeneralPositionReport(True, None)


def project_onto_simplex_hull(vertices, y, tol=1e-12, max_iter=None):
    """Closest point of ``conv(vertices)`` to ``y`` by a primal active-set method.

    Parameters
    ----------
    vertices : ndarray of shape (k, d)
        Affinely independent points (k <= d + 1).
    y : ndarray of shape (d,)

    Returns
    -------
    alpha : ndarray of shape (k,)
        Convex weights of the closest point.
    sq_dist : float
        Squared distance from ``y`` to the hull.
    """
    V = np.asarray(vertices, dtype=float)
    y = np.asarray(y, dtype=float)
    k = V.shape[0]
    max_iter = max_iter or 10 * (k + 1)
    sq = np.einsum("ij,ij->i", V - y, V - y)
    start = int(np.argmin(sq))
    alpha = np.zeros(k)
    alpha[start] = 1.0
    free = [start]
    scale = max(1.0, float(np.max(np.abs(V))), float(np.max(np.abs(y))))
    for _ in range(max_iter):
        P = np.array(sorted(free))
        base = V[P[0]]
        if P.size > 1:
            A = (V[P[1:]] - base).T
            gamma = np.linalg.lstsq(A, y - base, rcond=None)[0]
            beta = np.concatenate([[1.0 - gamma.sum()], gamma])
        else:
            beta = np.ones(1)
        if np.all(beta > tol):
            alpha[:] = 0.0
            alpha[P] = beta
            point = alpha @ V
            grad = V @ (point - y)
            nu = -grad[P].mean()
            mult = grad + nu
            mult[P] = 0.0
            j = int(np.argmin(mult))
            if mult[j] >= -tol * scale * scale:
                break
            free.append(j)
        else:
            cur = alpha[P]
            blocking = beta <= tol
            steps = cur[blocking] / (cur[blocking] - beta[blocking])
            t = float(np.min(steps))
            alpha[P] = cur + t * (beta - cur)
            drop = P[blocking][np.argmin(steps)]
            alpha[drop] = 0.0
            free = [int(i) for i in P if alpha[i] > tol and i != drop]
            if not free:
                free = [int(P[~blocking][0])] if (~blocking).any() else [start]
    alpha = np.clip(alpha, 0.0, None)
    alpha /= alpha.sum()
    r = alpha @ V - y
    return alpha, float(r @ r)


def boundary_distance(X, S, y):
    """Squared distance from an interior point ``y`` to the boundary of simplex ``S``."""
    X = as_dictionary(X)
    S = vertex_set(S, X.n)
    y = X.check_query(y)
    coords = barycentric(X, S, y)
    if np.any(coords <= 0.0):
        raise NotInteriorError(
            f"y is not strictly inside simplex {S} (barycentric {coords})"
        )
    V = X.rows[list(S)]
    best = np.inf
    for drop in range(len(S)):
        facet = np.delete(V, drop, axis=0)
        best = min(best, project_onto_simplex_hull(facet, y)[1])
    return float(best)


def sample_simplex_weights(n, rng=None):
    """Uniform sample from the probability simplex via normalized exponential spacings."""
    check_scalar(n, "n", min_val=1, integer=True)
    rng = np.random.default_rng(rng)
    e = rng.standard_exponential(n)
    return e / e.sum()
