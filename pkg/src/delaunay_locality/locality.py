"""Support extraction, the identification bounds, solution paths and simplex identification."""

import json
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ._validation import check_scalar, check_vector
from .exceptions import (
    DegenerateInputError,
    DegenerateSimplexError,
    InvalidInputError,
    LocalityError,
    NotApplicableError,
    NotInteriorError,
    ResourceLimitError,
)
from .geometry import (
    VertexSet,
    as_dictionary,
    barycentric,
    barycentric_system,
    boundary_distance,
    locality_gap_constant,
    vertex_set,
)
from .lp import OPTIMAL, chlp_locate, solve_exact_E
from .oracle import MAX_SUBSETS, enumerate_delaunay, is_delaunay_simplex, locate_simplex
from .qp import solve_relaxed_R
from .report import SolveReport

SCHEMA = "v1"
THRESHOLD = 1e-6
FALLBACK_RHO = 1e-7
METHODS = ("relaxed", "exact", "chlp", "oracle")
OUTSIDE_HULL = "outside-hull"


def support(w, threshold=THRESHOLD) -> VertexSet:
    """Sorted indices of the weights strictly above ``threshold``."""
    check_scalar(threshold, "threshold", min_val=0.0, max_val=1.0,
                 include_min=False, include_max=False)
    w = check_vector(np.asarray(w), name="w")
    return tuple(int(i) for i in np.flatnonzero(w > threshold))


def jaccard(a, b):
    """Jaccard index of two index sets; two empty sets score 1."""
    a, b = set(a), set(b)
    union = a | b
    if not union:
        return 1.0
    return len(a & b) / len(union)


@dataclass(frozen=True)
class RhoBound:
    """Locality weight below which the relaxed support is the containing simplex.

    ``rho_star = d_Sy / C`` where ``d_Sy`` is the squared distance from the
    query to the boundary of ``simplex`` and ``C`` the locality gap constant.
    """

    rho_star: float
    simplex: VertexSet
    C: float
    d_Sy: float


def _locate_for_bound(X, y, dt, max_subsets):
    if dt is None:
        try:
            dt = enumerate_delaunay(X, max_subsets=max_subsets)
        except ResourceLimitError:
            dt = None
    if dt is not None:
        if not dt.unique:
            raise NotApplicableError("dictionary is not in general position",
                                     finding=dt.simplices)
        hits = locate_simplex(dt, X, y)
        if not hits:
            raise NotApplicableError("query lies outside the convex hull", finding=[])
        if len(hits) > 1:
            raise NotApplicableError("query lies on a face shared by several simplices",
                                     finding=hits)
        return hits[0]
    # too many atoms to enumerate: take the exact-LP support and certify it
    # with the empty-sphere test
    rep = solve_exact_E(X, y)
    if rep.status != OPTIMAL:
        raise NotApplicableError("query lies outside the convex hull", finding=[])
    S = tuple(int(i) for i in np.flatnonzero(rep.w > 0.0))
    if len(S) != X.d + 1 or not is_delaunay_simplex(X, S):
        raise NotApplicableError("could not certify a containing Delaunay simplex",
                                 finding=[S])
    return S


def rho_bound(X, y, dt=None, max_subsets=MAX_SUBSETS) -> RhoBound:
    """Sufficient locality weight for the relaxed problem to identify the simplex.

    Parameters
    ----------
    X : Dictionary
    y : array-like of shape (d,)
        Must lie strictly inside one Delaunay simplex.
    dt : DelaunayComplex, optional
        Precomputed triangulation; enumerated when omitted and affordable.
        Beyond ``max_subsets`` the containing simplex is taken from the exact
        LP and certified with the empty-circumsphere test.

    Raises
    ------
    NotApplicableError
        When ``y`` is outside the hull, on a shared face, or the dictionary is
        not in general position. ``finding`` holds the located simplices.
    """
    X = as_dictionary(X)
    y = X.check_query(y)
    S = _locate_for_bound(X, y, dt, max_subsets)
    try:
        d_sy = boundary_distance(X, S, y)
    except (NotInteriorError, DegenerateSimplexError) as exc:
        raise NotApplicableError(str(exc), finding=[S]) from None
    C = locality_gap_constant(X, y)
    if d_sy <= 0.0 or C <= 0.0:
        raise NotApplicableError("query is on the boundary of its simplex", finding=[S])
    return RhoBound(rho_star=d_sy / C, simplex=S, C=C, d_Sy=d_sy)


def stability_bound(X, S, rho, eps, C_y, C_yt):
    """Upper bound on ``||w_rho - w~_rho||`` for two queries ``eps`` apart in simplex ``S``.

    Equals ``(sqrt(rho) (sqrt(C_y) + sqrt(C_yt)) + eps) / sigma_min(B)`` where
    ``B`` stacks the vertices of ``S`` over a row of ones. Valid when both
    queries share ``S`` and ``rho`` is below both of their identification
    bounds; checking that is left to the caller.
    """
    X = as_dictionary(X)
    for name, val in (("rho", rho), ("eps", eps), ("C_y", C_y), ("C_yt", C_yt)):
        check_scalar(val, name, min_val=0.0)
    system = barycentric_system(X, S)
    if system.sigma_min <= X.tol_geom * system.sigma_max:
        raise DegenerateSimplexError(f"simplex {vertex_set(S)} is degenerate")
    return float((np.sqrt(rho) * (np.sqrt(C_y) + np.sqrt(C_yt)) + eps) / system.sigma_min)


@dataclass
class PathEntry:
    rho: float
    report: Optional[SolveReport]
    support: VertexSet = ()
    residual_norm: Optional[float] = None
    error: Optional[str] = None

    def to_dict(self):
        out = {"rho": self.rho, "support": list(self.support),
               "residual_norm": self.residual_norm, "error": self.error}
        if self.report is not None:
            out.update(w=[float(v) for v in self.report.w], status=self.report.status,
                       iters=self.report.iters)
        return out


@dataclass
class SolutionPath:
    """Relaxed solutions over a strictly decreasing grid of locality weights."""

    entries: List[PathEntry]
    threshold: float = THRESHOLD

    @property
    def rhos(self):
        return np.array([e.rho for e in self.entries])

    def weights(self):
        """``(len(grid), n)`` array of weights; rows of failed entries are NaN."""
        n = next((e.report.w.size for e in self.entries if e.report is not None), 0)
        out = np.full((len(self.entries), n), np.nan)
        for k, e in enumerate(self.entries):
            if e.report is not None:
                out[k] = e.report.w
        return out

    def to_dict(self):
        return {"schema": SCHEMA, "threshold": self.threshold,
                "entries": [e.to_dict() for e in self.entries]}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def check_rho_grid(rho_grid):
    grid = check_vector(rho_grid, name="rho_grid")
    if grid.size == 0:
        raise InvalidInputError("rho_grid must be non-empty")
    if np.any(grid <= 0):
        raise InvalidInputError("rho_grid entries must be positive")
    if np.any(np.diff(grid) >= 0):
        raise InvalidInputError("rho_grid must be strictly decreasing")
    return grid


def solution_path(X, y, rho_grid, threshold=THRESHOLD, tol=1e-9, max_iter=100):
    """Solve the relaxed problem independently for every weight on the grid.

    Solver failures are recorded on the entry instead of aborting the path.
    """
    X = as_dictionary(X)
    y = X.check_query(y)
    grid = check_rho_grid(rho_grid)
    entries = []
    for rho in grid:
        rho = float(rho)
        try:
            rep = solve_relaxed_R(X, y, rho, tol=tol, max_iter=max_iter)
        except LocalityError as exc:
            entries.append(PathEntry(rho=rho, report=None, error=str(exc)))
            continue
        entries.append(PathEntry(
            rho=rho,
            report=rep,
            support=support(rep.w, threshold),
            residual_norm=float(np.sqrt(rep.fit)),
            error=None if rep.ok else rep.status,
        ))
    return SolutionPath(entries=entries, threshold=threshold)


@dataclass
class IdentificationResult:
    """Outcome of locating the simplex of a query with one method.

    ``support`` is empty when the method reports the query outside the hull.
    ``agrees_with_oracle`` is only filled in when verification was requested.
    """

    method: str
    status: str
    support: VertexSet
    weights: Optional[np.ndarray] = None
    rho: Optional[float] = None
    agrees_with_oracle: Optional[bool] = None
    oracle_simplices: Optional[List[VertexSet]] = None
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "method": self.method,
            "status": self.status,
            "support": list(self.support),
            "weights": None if self.weights is None else [float(v) for v in self.weights],
            "rho": self.rho,
            "agrees_with_oracle": self.agrees_with_oracle,
            "oracle_simplices": (None if self.oracle_simplices is None
                                 else [list(s) for s in self.oracle_simplices]),
            "details": self.details,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def default_rho(X, y, dt=None, max_subsets=MAX_SUBSETS):
    """Half the identification bound when it can be computed, else ``1e-7``."""
    try:
        return 0.5 * rho_bound(X, y, dt=dt, max_subsets=max_subsets).rho_star
    except (NotApplicableError, DegenerateInputError):
        return FALLBACK_RHO


def _oracle_face(simplices):
    face = set(simplices[0])
    for s in simplices[1:]:
        face &= set(s)
    return tuple(sorted(face))


def _agrees(result, X, y, dt):
    hits = locate_simplex(dt, X, y)
    result.oracle_simplices = hits
    S = set(result.support)
    if not hits:
        if result.method != "relaxed":
            return result.status == OUTSIDE_HULL
        # outside the hull the relaxed support lives on the simplex whose
        # face carries the projection of y
        proj = X.points @ solve_relaxed_R(X, y, 0.0).w
        hits = locate_simplex(dt, X, proj, tol_loc=1e-7)
        return bool(S) and any(S <= set(h) for h in hits)
    if len(hits) == 1:
        return S == set(hits[0])
    return S == set(_oracle_face(hits))


def identify(X, y, method="relaxed", rho=None, threshold=THRESHOLD, verify=False,
             dt=None, tol=1e-9, max_iter=100, max_subsets=MAX_SUBSETS):
    """Identify the Delaunay simplex containing ``y``.

    Parameters
    ----------
    X : Dictionary
    y : array-like of shape (d,)
    method : {"relaxed", "exact", "chlp", "oracle"}, default="relaxed"
        ``relaxed`` thresholds the weights of the locality-regularized least
        squares solution, ``exact`` those of the exact locality LP, ``chlp``
        reads the tight constraints of the lifted hull LP, and ``oracle``
        runs the brute-force triangulation.
    rho : float, optional
        Locality weight for ``relaxed``. Defaults to :func:`default_rho`.
    threshold : float, default=1e-6
        Weights above it form the support.
    verify : bool, default=False
        Also run the oracle and fill ``agrees_with_oracle``. Methods never
        fall back on one another; verification only compares.
    dt : DelaunayComplex, optional
        Reused by the oracle, the default ``rho`` and verification.

    Returns
    -------
    IdentificationResult
    """
    X = as_dictionary(X)
    y = X.check_query(y)
    if method not in METHODS:
        raise InvalidInputError(f"method must be one of {METHODS}, got {method!r}")
    if (verify or method == "oracle") and dt is None:
        dt = enumerate_delaunay(X, max_subsets=max_subsets)

    if method == "relaxed":
        if rho is None:
            rho = default_rho(X, y, dt=dt, max_subsets=max_subsets)
        check_scalar(rho, "rho", min_val=0.0)
        rep = solve_relaxed_R(X, y, rho, tol=tol, max_iter=max_iter)
        result = IdentificationResult(
            method=method, status=rep.status, support=support(rep.w, threshold),
            weights=rep.w, rho=float(rho),
            details={"iters": rep.iters, "fit": rep.fit, "locality": rep.locality,
                     "kkt_fallbacks": rep.kkt_fallbacks},
        )
    elif method == "exact":
        rep = solve_exact_E(X, y, max_iter=None)
        if rep.status == OPTIMAL:
            result = IdentificationResult(method=method, status=rep.status,
                                          support=support(rep.w, threshold), weights=rep.w,
                                          details={"iters": rep.iters,
                                                   "locality": rep.locality})
        else:
            status = OUTSIDE_HULL if rep.status == "infeasible" else rep.status
            result = IdentificationResult(method=method, status=status, support=())
    elif method == "chlp":
        res = chlp_locate(X, y)
        status = OUTSIDE_HULL if res.outside_hull else res.status
        result = IdentificationResult(method=method, status=status, support=res.vertex_set,
                                      details={"degenerate": res.degenerate})
    else:
        hits = locate_simplex(dt, X, y)
        if hits:
            face = _oracle_face(hits)
            w = np.zeros(X.n)
            w[list(hits[0])] = np.clip(barycentric(X, hits[0], y), 0.0, None)
            w /= w.sum()
            result = IdentificationResult(method=method, status=OPTIMAL, support=face,
                                          weights=w, oracle_simplices=hits,
                                          details={"unique": dt.unique})
        else:
            result = IdentificationResult(method=method, status=OUTSIDE_HULL, support=(),
                                          oracle_simplices=[])
    if verify:
        result.agrees_with_oracle = bool(_agrees(result, X, y, dt))
    return result
