"""Brute-force Delaunay triangulation via the empty-circumsphere property.

This is the slow, trusted ground truth that every other point-location
method is checked against. It visits all ``C(n, d+1)`` vertex subsets, so it
is only meant for small dictionaries.
"""

from dataclasses import dataclass, field
from math import comb
from typing import List

import numpy as np

from .exceptions import DegenerateInputError, ResourceLimitError
from .geometry import (
    Circumsphere,
    VertexSet,
    _circumspheres_batch,
    as_dictionary,
    circumsphere,
    iter_subsets,
    vertex_set,
)

TOL_LOC = 1e-9
MAX_SUBSETS = 1_000_000


@dataclass
class DelaunayComplex:
    """All empty-sphere simplices of a dictionary.

    ``unique`` is False when some empty sphere has an extra atom on its
    surface; the simplex list is then overcomplete (every admissible
    triangulation's simplices are included).
    """

    simplices: List[VertexSet]
    spheres: List[Circumsphere]
    unique: bool
    _bary: np.ndarray = field(default=None, repr=False, compare=False)

    def to_json(self):
        return {"unique": bool(self.unique), "simplices": [list(s) for s in self.simplices]}


def _affine_rank(X):
    centred = X.rows - X.rows.mean(axis=0)
    svals = np.linalg.svd(centred, compute_uv=False)
    return int(np.sum(svals > X.atol))


def enumerate_delaunay(X, max_subsets=MAX_SUBSETS):
    """Enumerate every (d+1)-subset whose circumsphere has no atom strictly inside.

    Parameters
    ----------
    X : Dictionary
    max_subsets : int, default=1_000_000
        Enumeration budget. The default covers ``n <= 40`` for ``d <= 4``.

    Raises
    ------
    ResourceLimitError
        When ``C(n, d+1)`` exceeds ``max_subsets``.
    DegenerateInputError
        When the atoms do not span ``R^d``.
    """
    X = as_dictionary(X)
    d, n = X.d, X.n
    if n < d + 1 or _affine_rank(X) < d:
        raise DegenerateInputError("affine hull of the dictionary is not d-dimensional")
    total = comb(n, d + 1)
    if total > max_subsets:
        raise ResourceLimitError(
            f"C({n},{d + 1}) = {total} subsets exceed the budget of {max_subsets}"
        )
    atol = X.atol
    simplices, spheres = [], []
    unique = True
    for combos in iter_subsets(n, d + 1):
        centers, radii, valid = _circumspheres_batch(X.rows, combos, atol)
        if not valid.any():
            continue
        combos, centers, radii = combos[valid], centers[valid], radii[valid]
        dist = np.sqrt(np.maximum(
            X.sq_norms[None, :] - 2.0 * centers @ X.points
            + np.einsum("ij,ij->i", centers, centers)[:, None],
            0.0,
        ))
        gap = dist - radii[:, None]
        rows = np.arange(len(combos))[:, None]
        gap[rows, combos] = np.inf
        empty = ~np.any(gap < -atol, axis=1)
        if not empty.any():
            continue
        if np.any(np.abs(gap[empty]) <= atol):
            unique = False
        for k in np.flatnonzero(empty):
            simplices.append(tuple(int(i) for i in combos[k]))
            spheres.append(Circumsphere(center=centers[k].copy(), radius=float(radii[k])))
    return DelaunayComplex(simplices=simplices, spheres=spheres, unique=unique)


def _barycentric_batch(dt, X):
    if dt._bary is None:
        S = np.asarray(dt.simplices, dtype=np.intp).reshape(-1, X.d + 1)
        B = np.concatenate([X.points[:, S].transpose(1, 0, 2),
                            np.ones((len(S), 1, X.d + 1))], axis=1)
        dt._bary = np.linalg.inv(B) if len(S) else np.zeros((0, X.d + 1, X.d + 1))
    return dt._bary


def locate_simplex(dt, X, y, tol_loc=TOL_LOC):
    """Every simplex of ``dt`` containing ``y`` (all barycentric coordinates >= -tol_loc).

    An empty list means ``y`` is outside the hull. Points on shared faces are
    reported once per incident simplex.
    """
    X = as_dictionary(X)
    y = X.check_query(y)
    if not dt.simplices:
        return []
    inv = _barycentric_batch(dt, X)
    coords = inv @ np.append(y, 1.0)
    hit = np.all(coords >= -tol_loc, axis=1)
    return [dt.simplices[k] for k in np.flatnonzero(hit)]


def is_delaunay_simplex(X, S):
    """True iff every atom outside ``S`` lies strictly outside its circumsphere."""
    X = as_dictionary(X)
    S = vertex_set(S, X.n)
    sphere = circumsphere(X.rows[list(S)], tol_geom=X.tol_geom)
    others = np.setdiff1d(np.arange(X.n), S)
    if others.size == 0:
        return True
    dist = np.linalg.norm(X.rows[others] - sphere.center, axis=1)
    return bool(np.all(dist >= sphere.radius + X.atol))
