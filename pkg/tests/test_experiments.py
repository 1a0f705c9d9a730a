import numpy as np
import pytest

from delaunay_locality import InvalidInputError, enumerate_delaunay, locate_simplex
from delaunay_locality.experiments import (
    ExperimentConfig,
    exp_bound_comparison,
    exp_scaling,
    exp_solution_path,
    exp_support_accuracy,
    gen_dictionary,
    power_law_exponent,
    sample_from_hull,
)


def test_gen_dictionary():
    X = gen_dictionary(10, 2, 7, True)
    assert np.max(np.linalg.norm(X.rows, axis=1)) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(X.rows.mean(0), 0, atol=1e-12)
    np.testing.assert_array_equal(X.points, gen_dictionary(10, 2, 7, True).points)
    with pytest.raises(InvalidInputError):
        gen_dictionary(2, 2, 0)


def test_sample_from_hull():
    X = gen_dictionary(10, 2, 1)
    Y = sample_from_hull(X, 30, 5)
    dt = enumerate_delaunay(X)
    assert all(locate_simplex(dt, X, y) for y in Y)
    np.testing.assert_array_equal(Y, sample_from_hull(X, 30, 5))
    # per-query seeding: a prefix does not depend on how many queries follow
    np.testing.assert_array_equal(Y[:10], sample_from_hull(X, 10, 5))
    with pytest.raises(InvalidInputError):
        sample_from_hull(X, 0, 5)


def test_config():
    cfg = ExperimentConfig()
    assert cfg.num_queries == 500
    assert ExperimentConfig(profile="full").num_queries == 10000
    assert cfg.rho_grid[0] == 4.0 and cfg.rho_grid[-1] == 2.0 ** -32
    with pytest.raises(InvalidInputError):
        ExperimentConfig(k_min=3, k_max=2)
    with pytest.raises(InvalidInputError):
        ExperimentConfig(methods=("oracle",))


def test_bound_comparison_accounting():
    cfg = ExperimentConfig(num_queries=25, seed=3)
    res = exp_bound_comparison(cfg)
    assert len(res.rows) + len(res.skips) == 25
    assert all(r[-1] for r in res.rows)
    assert np.all(res.empirical >= res.theory)
    # queries on a shared edge are skipped with a reason
    X = gen_dictionary(10, 2, 3)
    dt = enumerate_delaunay(X)
    s, t = dt.simplices[0], None
    for other in dt.simplices[1:]:
        if len(set(s) & set(other)) == 2:
            t = sorted(set(s) & set(other))
            break
    mid = X.rows[t].mean(0)
    res = exp_bound_comparison(cfg, X=X, queries=[mid])
    assert len(res.rows) == 0 and "face" in res.skips[0].reason


def test_deterministic_output():
    cfg = ExperimentConfig(num_queries=5, seed=9, k_min=-10)
    assert exp_bound_comparison(cfg).rows == exp_bound_comparison(cfg).rows


def test_support_accuracy():
    cfg = ExperimentConfig(num_queries=8, seed=2, rho_base=1.5, k_min=-20, k_max=5)
    res = exp_support_accuracy(cfg)
    assert len(res.rows) == 26
    for rho, l1, jac, count in res.rows:
        assert 0 <= l1 <= 2 and 0 <= jac <= 1 and count == 8
    small = [r for r in res.rows if r[0] <= np.nanmin(res.rho_star)]
    assert all(r[2] == 1.0 for r in small)
    l1 = [r[1] for r in res.rows if r[0] >= 1e-8]
    assert l1[-1] <= l1[0]


def test_scaling_records():
    cfg = ExperimentConfig(bench_sizes=((20, 2), (40, 2)), bench_queries=4)
    recs = exp_scaling(cfg)
    assert [(r.method, r.n) for r in recs] == [(m, n) for n in (20, 40)
                                              for m in ("relaxed", "exact", "chlp")]
    for r in recs:
        assert r.wall_time_mean >= 0 and 0 <= r.correctness <= 1
    assert recs[0].iter_time_mean > 0


def test_scaling_timeout():
    cfg = ExperimentConfig(bench_sizes=((20, 2),), bench_queries=4, cell_timeout=0.0,
                           methods=("exact",))
    rec = exp_scaling(cfg)[0]
    assert rec.timed_out and rec.num_queries <= 1


def test_power_law():
    assert power_law_exponent([1, 2, 4], [3, 6, 12]) == pytest.approx(1.0)


def test_solution_path_export():
    cfg = ExperimentConfig(num_queries=3, seed=1, k_min=-32, k_max=2)
    out = exp_solution_path(cfg)
    assert len(out) == 3
    X = gen_dictionary(10, 2, 1)
    for rec in out:
        entries = rec["entries"]
        nearest = int(np.argmin(X.sq_dists(rec["y"])))
        assert entries[0]["support"] == [nearest]
        assert entries[-1]["support"] == rec["oracle_simplices"][0]
        r = [e["residual_norm"] for e in entries]
        assert all(b <= a + 1e-8 for a, b in zip(r, r[1:]))
