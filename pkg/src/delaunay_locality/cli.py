"""``dl``: command-line front end.

Exit codes: 0 success, 2 invalid input, 3 solver failure, 4 resource limit.
"""

import argparse
import json
import sys
from contextlib import contextmanager

import numpy as np

from .exceptions import (
    DegenerateInputError,
    InvalidInputError,
    LocalityError,
    NotApplicableError,
    ResourceLimitError,
)
from .experiments import (
    BenchRecord,
    ExperimentConfig,
    exp_bound_comparison,
    exp_scaling,
    exp_solution_path,
    exp_support_accuracy,
    gen_dictionary,
    sample_from_hull,
)
from .io import fmt, read_dictionary, read_points, write_csv, write_dictionary, write_points
from .locality import METHODS, identify, solution_path
from .oracle import MAX_SUBSETS, enumerate_delaunay

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3
EXIT_RESOURCE = 4


def parse_rho_grid(text):
    """``base:kmin:kmax`` -> (base, kmin, kmax)."""
    try:
        base, kmin, kmax = text.split(":")
        base, kmin, kmax = float(base), int(kmin), int(kmax)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected base:kmin:kmax, got {text!r}") from None
    if base <= 1.0 or kmin > kmax:
        raise argparse.ArgumentTypeError("need base > 1 and kmin <= kmax")
    return base, kmin, kmax


def parse_sizes(text):
    """``100x5,400x5`` -> [(100, 5), (400, 5)]."""
    try:
        return [tuple(int(v) for v in item.split("x")) for item in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NxD[,NxD...], got {text!r}") from None


def parse_point(text):
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_solver_flags(p):
    p.add_argument("--tol", type=float, default=1e-9, help="interior-point tolerance")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--threshold", type=float, default=1e-6,
                   help="weights above this form the support")


def _add_output_flags(p, default_format="json"):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=default_format)


def _add_experiment_flags(p, default_grid):
    p.add_argument("--in", dest="inp", help="dictionary file; generated when omitted")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--num-queries", type=int, help="overrides the profile size")
    p.add_argument("--profile", choices=("ci", "full"), default="ci",
                   help="ci runs 500 queries, full runs 10000")
    p.add_argument("--rho-grid", type=parse_rho_grid, default=default_grid,
                   metavar="BASE:KMIN:KMAX")
    p.add_argument("--no-normalize", action="store_true",
                   help="generated dictionary keeps raw unit-cube samples")
    _add_solver_flags(p)
    _add_output_flags(p, "csv")


def _add_query_flags(p):
    p.add_argument("--in", dest="inp", required=True, help="dictionary file (CSV or JSON)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--query", type=parse_point, help="one query as x0,x1,...")
    g.add_argument("--queries", help="file of queries, one per row")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dl", description="Local simplex representations and Delaunay simplex identification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random dictionary (and optionally queries)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-normalize", action="store_true",
                   help="keep raw unit-cube samples instead of centring and scaling")
    p.add_argument("--queries", type=int, default=0, help="also sample this many hull points")
    p.add_argument("--queries-out", help="file for the sampled queries")
    _add_output_flags(p, "csv")

    p = sub.add_parser("identify", help="identify the simplex containing each query")
    _add_query_flags(p)
    p.add_argument("--method", choices=METHODS, default="relaxed")
    p.add_argument("--rho", type=float, help="locality weight for the relaxed method")
    p.add_argument("--verify", action="store_true", help="compare against the oracle")
    _add_solver_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("path", help="solution path over a grid of locality weights")
    _add_query_flags(p)
    p.add_argument("--rho-grid", type=parse_rho_grid, default=(2.0, -32, 2),
                   metavar="BASE:KMIN:KMAX")
    _add_solver_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("bound-compare", help="theoretical vs empirical identification weights")
    _add_experiment_flags(p, (2.0, -32, 2))

    p = sub.add_parser("support-accuracy", help="relaxed vs exact supports over a grid")
    _add_experiment_flags(p, (1.5, -32, 19))

    p = sub.add_parser("bench", help="timing of the identification methods")
    p.add_argument("--sizes", type=parse_sizes, default=[(100, 5), (400, 5), (1600, 5)],
                   metavar="NxD[,NxD...]")
    p.add_argument("--method", action="append", choices=("relaxed", "exact", "chlp"),
                   help="repeatable; default all three")
    p.add_argument("--rho", type=float, help="locality weight for the relaxed method")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--num-queries", type=int, default=50)
    p.add_argument("--timeout", type=float, help="per-cell time budget in seconds")
    _add_solver_flags(p)
    _add_output_flags(p, "csv")

    p = sub.add_parser("oracle", help="brute-force Delaunay triangulation")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--max-subsets", type=int, default=MAX_SUBSETS)
    _add_output_flags(p)
    return parser


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit_json(args, obj):
    with _output(args.out) as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _emit_table(args, header, rows, extra=None):
    if args.format == "json":
        obj = {"schema": "v1", "rows": [dict(zip(header, r)) for r in rows]}
        obj.update(extra or {})
        _emit_json(args, obj)
        return
    with _output(args.out) as fh:
        write_csv(fh, header, rows)


def _load_queries(args, X):
    if args.query is not None:
        return X.check_query(args.query)[None, :]
    Y = read_points(args.queries)
    if Y.shape[1] != X.d:
        raise InvalidInputError(f"queries have {Y.shape[1]} coordinates, dictionary has {X.d}")
    return Y


def _config(args):
    base, kmin, kmax = args.rho_grid
    return ExperimentConfig(seed=args.seed, n=args.n, d=args.d,
                            num_queries=args.num_queries, rho_base=base, k_min=kmin,
                            k_max=kmax, threshold=args.threshold, tol=args.tol,
                            max_iter=args.max_iter, profile=args.profile,
                            normalize=not args.no_normalize)


def _experiment_dictionary(args):
    return read_dictionary(args.inp) if args.inp else None


def cmd_gen(args):
    X = gen_dictionary(args.n, args.d, args.seed, normalize=not args.no_normalize)
    if args.out is None:
        if args.format == "json":
            _emit_json(args, {"d": X.d, "n": X.n, "points": X.rows.tolist()})
        else:
            for row in X.rows:
                print(",".join(fmt(v) for v in row))
    else:
        write_dictionary(args.out, X, args.format)
    if args.queries:
        if not args.queries_out:
            raise InvalidInputError("--queries needs --queries-out")
        write_points(args.queries_out, sample_from_hull(X, args.queries, args.seed), args.format)
    return EXIT_OK


def cmd_identify(args):
    X = read_dictionary(args.inp)
    Y = _load_queries(args, X)
    dt = enumerate_delaunay(X) if args.verify else None
    results = [identify(X, y, args.method, rho=args.rho, threshold=args.threshold,
                        verify=args.verify, dt=dt, tol=args.tol, max_iter=args.max_iter)
               for y in Y]
    if args.format == "json":
        _emit_json(args, [r.to_dict() for r in results])
    else:
        header = ["index", "method", "status", "support", "rho", "agrees_with_oracle"]
        rows = [[i, r.method, r.status, r.support, r.rho, r.agrees_with_oracle]
                for i, r in enumerate(results)]
        _emit_table(args, header, rows)
    return EXIT_SOLVER if any(r.status == "iteration-limit" for r in results) else EXIT_OK


def cmd_path(args):
    X = read_dictionary(args.inp)
    Y = _load_queries(args, X)
    base, kmin, kmax = args.rho_grid
    if args.format == "json":
        cfg = ExperimentConfig(rho_base=base, k_min=kmin, k_max=kmax,
                               threshold=args.threshold, tol=args.tol, max_iter=args.max_iter)
        _emit_json(args, exp_solution_path(cfg, X=X, queries=Y))
        return EXIT_OK
    grid = base ** np.arange(kmax, kmin - 1, -1, dtype=float)
    n = X.n
    header = ["index", "rho", "residual_norm", "support"] + [f"w{j}" for j in range(n)]
    rows = []
    for i, y in enumerate(Y):
        path = solution_path(X, y, grid, threshold=args.threshold, tol=args.tol,
                             max_iter=args.max_iter)
        for e in path.entries:
            w = e.report.w if e.report is not None else [float("nan")] * n
            rows.append([i, e.rho, e.residual_norm, e.support] + [float(v) for v in w])
    _emit_table(args, header, rows)
    return EXIT_OK


def cmd_bound_compare(args):
    res = exp_bound_comparison(_config(args), X=_experiment_dictionary(args))
    skips = [{"index": s.index, "reason": s.reason} for s in res.skips]
    _emit_table(args, res.header, res.rows, extra={"skips": skips})
    if args.format == "csv" and skips:
        print(f"skipped {len(skips)} queries", file=sys.stderr)
    return EXIT_OK


def cmd_support_accuracy(args):
    res = exp_support_accuracy(_config(args), X=_experiment_dictionary(args))
    finite = res.rho_star[np.isfinite(res.rho_star)]
    extra = {"min_rho_star": float(finite.min()) if finite.size else None,
             "failures": [{"index": s.index, "reason": s.reason} for s in res.failures]}
    _emit_table(args, res.header, res.rows, extra=extra)
    return EXIT_OK


def cmd_bench(args):
    cfg = ExperimentConfig(seed=args.seed, methods=tuple(args.method or ("relaxed", "exact", "chlp")),
                           rho=args.rho, bench_sizes=args.sizes, bench_queries=args.num_queries,
                           cell_timeout=args.timeout, tol=args.tol, max_iter=args.max_iter,
                           threshold=args.threshold)
    records = exp_scaling(cfg)
    _emit_table(args, list(BenchRecord.FIELDS), [r.as_row() for r in records])
    return EXIT_OK


def cmd_oracle(args):
    X = read_dictionary(args.inp)
    dt = enumerate_delaunay(X, max_subsets=args.max_subsets)
    if args.format == "json":
        obj = {"schema": "v1"}
        obj.update(dt.to_json())
        _emit_json(args, obj)
    else:
        header = ["simplex", "center", "radius"]
        rows = [[s, [float(c) for c in sp.center], sp.radius]
                for s, sp in zip(dt.simplices, dt.spheres)]
        _emit_table(args, header, rows)
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "identify": cmd_identify,
    "path": cmd_path,
    "bound-compare": cmd_bound_compare,
    "support-accuracy": cmd_support_accuracy,
    "bench": cmd_bench,
    "oracle": cmd_oracle,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"dl: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InvalidInputError, NotApplicableError, DegenerateInputError) as exc:
        print(f"dl: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except LocalityError as exc:
        print(f"dl: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"dl: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
