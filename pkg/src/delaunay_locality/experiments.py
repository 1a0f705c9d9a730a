"""Desk-scale experiment drivers behind the ``dl`` command.

Every driver is deterministic for a fixed :class:`ExperimentConfig`: query
``i`` draws its randomness from ``SeedSequence([seed, i])``, so results do
not depend on how queries are scheduled. Only timing columns vary between
runs.
"""

import time
from dataclasses import dataclass, field, replace
from math import comb
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ._validation import check_scalar
from .exceptions import (
    DegenerateInputError,
    InvalidInputError,
    LocalityError,
    NotApplicableError,
)
from .geometry import Dictionary, as_dictionary, sample_simplex_weights
from .locality import FALLBACK_RHO, jaccard, rho_bound, solution_path, support
from .lp import OPTIMAL, chlp_locate, solve_exact_E
from .oracle import MAX_SUBSETS, enumerate_delaunay, locate_simplex
from .qp import solve_relaxed_R

PROFILE_QUERIES = {"ci": 500, "full": 10000}
BENCH_QUERIES = 50
MAX_N = 20000
MAX_D = 64
MAX_QUERIES = 100000
BENCH_METHODS = ("relaxed", "exact", "chlp")


@dataclass
class ExperimentConfig:
    """Parameters shared by the experiment drivers.

    The locality grid is ``rho_base ** k`` for ``k`` from ``k_max`` down to
    ``k_min``. ``num_queries`` defaults to the profile size (500 for ``ci``,
    10000 for ``full``).
    """

    seed: int = 0
    n: int = 10
    d: int = 2
    num_queries: Optional[int] = None
    rho_base: float = 2.0
    k_min: int = -32
    k_max: int = 2
    threshold: float = 1e-6
    tol: float = 1e-9
    max_iter: int = 100
    normalize: bool = True
    profile: str = "ci"
    methods: Tuple[str, ...] = BENCH_METHODS
    rho: Optional[float] = None
    bench_sizes: Sequence[Tuple[int, int]] = ((100, 5), (400, 5), (1600, 5))
    bench_queries: int = BENCH_QUERIES
    cell_timeout: Optional[float] = None
    max_subsets: int = MAX_SUBSETS

    def __post_init__(self):
        if self.profile not in PROFILE_QUERIES:
            raise InvalidInputError(f"profile must be one of {sorted(PROFILE_QUERIES)}")
        if self.num_queries is None:
            self.num_queries = PROFILE_QUERIES[self.profile]
        check_scalar(self.seed, "seed", min_val=0, integer=True)
        check_scalar(self.n, "n", min_val=1, max_val=MAX_N, integer=True)
        check_scalar(self.d, "d", min_val=1, max_val=MAX_D, integer=True)
        check_scalar(self.num_queries, "num_queries", min_val=1, max_val=MAX_QUERIES,
                     integer=True)
        check_scalar(self.rho_base, "rho_base", min_val=1.0, include_min=False)
        check_scalar(self.k_min, "k_min", integer=True)
        check_scalar(self.k_max, "k_max", min_val=self.k_min, integer=True)
        check_scalar(self.threshold, "threshold", min_val=0.0, max_val=1.0,
                     include_min=False, include_max=False)
        bad = set(self.methods) - set(BENCH_METHODS)
        if bad:
            raise InvalidInputError(f"unknown methods {sorted(bad)}")
        self.methods = tuple(self.methods)

    @property
    def exponents(self):
        return np.arange(self.k_max, self.k_min - 1, -1)

    @property
    def rho_grid(self):
        return float(self.rho_base) ** self.exponents.astype(float)


def query_rng(seed, i):
    return np.random.default_rng(np.random.SeedSequence([seed, i]))


def gen_dictionary(n, d, seed, normalize=True):
    """Uniform samples from the unit hypercube, optionally centred and scaled.

    With ``normalize`` the atoms are centred about their mean and divided by
    the largest atom norm, so the farthest atom has norm 1.
    """
    check_scalar(d, "d", min_val=1, integer=True)
    check_scalar(n, "n", min_val=d + 1, integer=True)
    check_scalar(seed, "seed", min_val=0, integer=True)
    rows = np.random.default_rng(seed).random((n, d))
    if normalize:
        rows -= rows.mean(axis=0)
        rows /= np.max(np.linalg.norm(rows, axis=1))
    return Dictionary.from_rows(rows)


def sample_from_hull(X, m, seed):
    """``m`` queries ``X w`` with ``w`` uniform on the simplex, shape ``(m, d)``."""
    X = as_dictionary(X)
    check_scalar(m, "m", min_val=1, integer=True)
    W = np.vstack([sample_simplex_weights(X.n, query_rng(seed, i)) for i in range(m)])
    return W @ X.rows


def _triangulation(X, max_subsets=MAX_SUBSETS):
    if comb(X.n, X.d + 1) > max_subsets:
        return None
    return enumerate_delaunay(X, max_subsets=max_subsets)


def _queries(cfg, X, queries):
    if queries is None:
        return sample_from_hull(X, cfg.num_queries, cfg.seed)
    return np.atleast_2d(np.asarray(queries, dtype=float))


def _dictionary(cfg, X):
    return gen_dictionary(cfg.n, cfg.d, cfg.seed, cfg.normalize) if X is None else as_dictionary(X)


@dataclass
class Skip:
    index: int
    reason: str


@dataclass
class BoundComparison:
    """Per-query theoretical and empirical identification thresholds."""

    header: List[str]
    rows: List[list]
    skips: List[Skip]

    @property
    def theory(self):
        return np.array([r[-4] for r in self.rows])

    @property
    def empirical(self):
        return np.array([r[-3] for r in self.rows])


def largest_identifying_rho(X, y, simplex, cfg):
    """Largest grid weight whose relaxed support equals ``simplex`` (scan from the top)."""
    target = tuple(simplex)
    for k, rho in zip(cfg.exponents, cfg.rho_grid):
        rep = solve_relaxed_R(X, y, float(rho), tol=cfg.tol, max_iter=cfg.max_iter)
        if support(rep.w, cfg.threshold) == target:
            return int(k), float(rho)
    return None, None


def exp_bound_comparison(cfg, X=None, queries=None):
    """Compare the identification bound with the largest grid weight that works.

    Rows hold the query coordinates, ``log10`` of both weights, the grid
    exponent found and whether the bound held (empirical >= theory). Queries
    where the bound is not applicable (on a face, outside the hull) are
    skipped with the reason.
    """
    X = _dictionary(cfg, X)
    Y = _queries(cfg, X, queries)
    dt = _triangulation(X, cfg.max_subsets)
    header = [f"y{j}" for j in range(X.d)] + [
        "log10_rho_theory", "log10_rho_empirical", "k_empirical", "bound_holds"]
    rows, skips = [], []
    for i, y in enumerate(Y):
        try:
            rb = rho_bound(X, y, dt=dt, max_subsets=cfg.max_subsets)
        except (NotApplicableError, DegenerateInputError) as exc:
            skips.append(Skip(i, str(exc)))
            continue
        k, rho_emp = largest_identifying_rho(X, y, rb.simplex, cfg)
        log_emp = np.log10(rho_emp) if rho_emp is not None else float("nan")
        holds = rho_emp is not None and rho_emp >= rb.rho_star
        rows.append(list(map(float, y)) + [float(np.log10(rb.rho_star)), float(log_emp),
                                           "" if k is None else k, bool(holds)])
    return BoundComparison(header=header, rows=rows, skips=skips)


@dataclass
class SupportAccuracy:
    header: List[str]
    rows: List[list]
    rho_star: np.ndarray
    failures: List[Skip] = field(default_factory=list)


def exp_support_accuracy(cfg, X=None, queries=None):
    """Mean ``||w_e - w_rho||_1`` and support Jaccard index per grid weight.

    ``w_e`` is the exact-LP solution. ``rho_star`` holds the per-query
    identification bound (NaN where it is not applicable), so callers can
    restrict statements to weights below all of them.
    """
    X = _dictionary(cfg, X)
    Y = _queries(cfg, X, queries)
    dt = _triangulation(X, cfg.max_subsets)
    grid = cfg.rho_grid
    l1 = np.zeros((len(Y), len(grid)))
    jac = np.zeros_like(l1)
    ok = np.zeros_like(l1, dtype=bool)
    rho_star = np.full(len(Y), np.nan)
    failures = []
    for i, y in enumerate(Y):
        try:
            rho_star[i] = rho_bound(X, y, dt=dt, max_subsets=cfg.max_subsets).rho_star
        except (NotApplicableError, DegenerateInputError):
            pass
        ex = solve_exact_E(X, y)
        if ex.status != OPTIMAL:
            failures.append(Skip(i, f"exact LP: {ex.status}"))
            continue
        s_e = support(ex.w, cfg.threshold)
        for j, rho in enumerate(grid):
            try:
                rep = solve_relaxed_R(X, y, float(rho), tol=cfg.tol, max_iter=cfg.max_iter)
            except LocalityError as exc:
                failures.append(Skip(i, f"rho={rho:.17g}: {exc}"))
                continue
            l1[i, j] = np.abs(ex.w - rep.w).sum()
            jac[i, j] = jaccard(support(rep.w, cfg.threshold), s_e)
            ok[i, j] = True
    rows = []
    for j, rho in enumerate(grid):
        m = ok[:, j]
        rows.append([float(rho),
                     float(l1[m, j].mean()) if m.any() else float("nan"),
                     float(jac[m, j].mean()) if m.any() else float("nan"),
                     int(m.sum())])
    return SupportAccuracy(header=["rho", "mean_l1_diff", "mean_jaccard", "n_queries"],
                           rows=rows, rho_star=rho_star, failures=failures)


@dataclass
class BenchRecord:
    """Timing and correctness of one method on one ``(n, d)`` cell.

    ``correctness`` is the fraction of queries whose identified vertex set
    matches the oracle, or None where the oracle is too expensive.
    ``iter_time_mean`` is the mean time per interior-point iteration
    (relaxed method only).
    """

    method: str
    n: int
    d: int
    wall_time_mean: float
    wall_time_std: float
    correctness: Optional[float]
    iter_time_mean: Optional[float] = None
    num_queries: int = 0
    timed_out: bool = False

    FIELDS = ("method", "n", "d", "wall_time_mean", "wall_time_std", "correctness",
              "iter_time_mean", "num_queries", "timed_out")

    def as_row(self):
        return [getattr(self, f) for f in self.FIELDS]


def _run_method(method, X, y, rho, cfg):
    """Time one solve; returns (seconds, vertex set, seconds per iteration)."""
    t0 = time.perf_counter()
    if method == "relaxed":
        rep = solve_relaxed_R(X, y, rho, tol=cfg.tol, max_iter=cfg.max_iter)
        elapsed = time.perf_counter() - t0
        return elapsed, support(rep.w, cfg.threshold), rep.iter_seconds
    if method == "exact":
        rep = solve_exact_E(X, y)
        elapsed = time.perf_counter() - t0
        return elapsed, support(rep.w, cfg.threshold) if rep.ok else (), None
    res = chlp_locate(X, y)
    elapsed = time.perf_counter() - t0
    return elapsed, res.vertex_set, None


def exp_scaling(cfg):
    """Wall time per method over the ``(n, d)`` cells of ``cfg.bench_sizes``."""
    rho = FALLBACK_RHO if cfg.rho is None else cfg.rho
    records = []
    for n, d in cfg.bench_sizes:
        X = gen_dictionary(n, d, cfg.seed, cfg.normalize)
        Y = sample_from_hull(X, cfg.bench_queries, cfg.seed)
        dt = _triangulation(X, cfg.max_subsets)
        truth = None
        if dt is not None:
            truth = []
            for y in Y:
                hits = locate_simplex(dt, X, y)
                truth.append(tuple(hits[0]) if len(hits) == 1 else None)
        for method in cfg.methods:
            times, iter_times, correct = [], [], []
            timed_out = False
            start = time.perf_counter()
            for q, y in enumerate(Y):
                if cfg.cell_timeout is not None and time.perf_counter() - start > cfg.cell_timeout:
                    timed_out = True
                    break
                elapsed, S, per_iter = _run_method(method, X, y, rho, cfg)
                times.append(elapsed)
                if per_iter is not None:
                    iter_times.append(per_iter)
                if truth is not None and truth[q] is not None:
                    correct.append(S == truth[q])
            records.append(BenchRecord(
                method=method, n=n, d=d,
                wall_time_mean=float(np.mean(times)) if times else float("nan"),
                wall_time_std=float(np.std(times)) if times else float("nan"),
                correctness=float(np.mean(correct)) if correct else None,
                iter_time_mean=float(np.mean(iter_times)) if iter_times else None,
                num_queries=len(times),
                timed_out=timed_out,
            ))
    return records


def power_law_exponent(sizes, times):
    """Least-squares slope of ``log(times)`` against ``log(sizes)``."""
    return float(np.polyfit(np.log(sizes), np.log(times), 1)[0])


def exp_solution_path(cfg, X=None, queries=None):
    """Solution path data per query, ready for coefficient-versus-weight plots."""
    X = _dictionary(cfg, X)
    Y = _queries(cfg, X, queries)
    dt = _triangulation(X, cfg.max_subsets)
    out = []
    for i, y in enumerate(Y):
        path = solution_path(X, y, cfg.rho_grid, threshold=cfg.threshold, tol=cfg.tol,
                             max_iter=cfg.max_iter)
        hits = locate_simplex(dt, X, y) if dt is not None else None
        record = {"index": i, "y": [float(v) for v in y],
                  "oracle_simplices": None if hits is None else [list(h) for h in hits]}
        record.update(path.to_dict())
        out.append(record)
    return out


def with_overrides(cfg, **kwargs):
    """Copy of ``cfg`` with the non-None keyword arguments applied."""
    return replace(cfg, **{k: v for k, v in kwargs.items() if v is not None})
