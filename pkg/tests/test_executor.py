"""Work partitioning, tree reduction, and parallel-fill equivalence."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vegasplus import executor, maps, strat
from vegasplus.core import IntegratorConfig, fill_iteration
from vegasplus.errors import ContractViolationError
from vegasplus.integrands import lookup
from vegasplus.maps import MapWeights
from vegasplus.rng import StreamSet
from vegasplus.strat import CubeAccumulator


def test_partition_example():
    ranges = executor.partition_runs(10, 3)
    sizes = sorted(b - a for a, b in ranges)
    assert sizes == [3, 3, 4]
    assert ranges[0][0] == 0 and ranges[-1][1] == 10


def test_partition_singletons():
    assert executor.partition_runs(8, 8) == [(i, i + 1) for i in range(8)]


def test_partition_identity():
    assert executor.partition_runs(5, 1) == [(0, 5)]


@settings(deadline=None, max_examples=100)
@given(st.integers(0, 10 ** 6), st.integers(1, 64))
def test_partition_covers_and_balances(total, k):
    ranges = executor.partition_runs(total, k)
    assert len(ranges) == k
    assert ranges[0][0] == 0 and ranges[-1][1] == total
    sizes = [b - a for a, b in ranges]
    assert all(b == a2 for (_, b), (a2, _) in zip(ranges, ranges[1:]))
    assert max(sizes) - min(sizes) <= 1


def _int_buffers(n, fill):
    mw = MapWeights(2, 4)
    mw.w[:] = fill
    mw.counts[:] = fill
    acc = CubeAccumulator(n)
    acc.s1[:] = fill
    acc.s2[:] = 2 * fill
    acc.counts[:] = fill
    return mw, acc


def test_tree_reduce_identity():
    mw, acc = _int_buffers(3, 5)
    out_mw, out_acc = executor.tree_reduce([(mw, acc)])
    assert np.all(out_mw.w == 5) and np.all(out_acc.s1 == 5)


def test_tree_reduce_all_ones():
    bufs = [_int_buffers(3, 1) for _ in range(4)]
    mw, acc = executor.tree_reduce(bufs)
    assert np.all(mw.w == 4) and np.all(acc.counts == 4)


def test_tree_reduce_five_buffers_matches_flat_sum():
    # integer-valued buffers: tree order must reproduce the flat sum exactly
    vals = [1, 2, 4, 8, 16]
    bufs = [_int_buffers(6, v) for v in vals]
    mw, acc = executor.tree_reduce(bufs)
    assert np.all(mw.w == sum(vals))
    assert np.all(acc.s2 == 2 * sum(vals))


def test_tree_reduce_shape_mismatch():
    with pytest.raises(ContractViolationError):
        executor.tree_reduce([_int_buffers(3, 1), _int_buffers(4, 1)])
    with pytest.raises(ContractViolationError):
        executor.tree_reduce([])


def _setup(n_eval=20_000, seed=9, dims=4):
    spec = lookup("gaussian")
    vmap = maps.new_uniform(spec.dims, 32, spec.bounds)
    grid = strat.initial_grid(n_eval, spec.dims)
    plan = strat.build_run_plan(grid.n_h)
    return spec, vmap, grid, plan


def test_parallel_fill_single_worker_matches_sequential():
    spec, vmap, grid, plan = _setup()
    cfg = IntegratorConfig(n_eval=20_000, seed=9, workers=1, batch_size=1024)
    mw_p, acc_p = executor.parallel_fill(plan, vmap, grid, cfg, spec.evaluate_batch)
    streams = StreamSet(seed=9, count=1024)
    mw_s, acc_s = fill_iteration(plan, vmap, grid, streams, spec.evaluate_batch)
    np.testing.assert_array_equal(mw_p.w, mw_s.w)
    np.testing.assert_array_equal(acc_p.s1, acc_s.s1)
    np.testing.assert_array_equal(acc_p.counts, acc_s.counts)


def test_parallel_fill_worker_count_changes_only_rounding():
    spec, vmap, grid, plan = _setup()
    outs = []
    for workers in (1, 2, 4, 8):
        cfg = IntegratorConfig(n_eval=20_000, seed=9, workers=workers,
                               batch_size=1024)
        outs.append(executor.parallel_fill(plan, vmap, grid, cfg,
                                           spec.evaluate_batch))
    base_mw, base_acc = outs[0]
    for mw, acc in outs[1:]:
        np.testing.assert_array_equal(acc.counts, base_acc.counts)
        np.testing.assert_array_equal(mw.counts, base_mw.counts)
        np.testing.assert_allclose(acc.s1, base_acc.s1, rtol=1e-10)
        np.testing.assert_allclose(mw.w, base_mw.w, rtol=1e-10)


def test_parallel_fill_deterministic_repeat():
    spec, vmap, grid, plan = _setup()
    cfg = IntegratorConfig(n_eval=20_000, seed=9, workers=2, batch_size=1024)
    a = executor.parallel_fill(plan, vmap, grid, cfg, spec.evaluate_batch)
    b = executor.parallel_fill(plan, vmap, grid, cfg, spec.evaluate_batch)
    np.testing.assert_array_equal(a[1].s1, b[1].s1)
    np.testing.assert_array_equal(a[0].w, b[0].w)


def test_fill_counts_match_plan():
    spec, vmap, grid, plan = _setup()
    cfg = IntegratorConfig(n_eval=20_000, seed=1, workers=3, batch_size=512)
    _, acc = executor.parallel_fill(plan, vmap, grid, cfg, spec.evaluate_batch)
    np.testing.assert_array_equal(acc.counts, grid.n_h)
    assert acc.counts.sum() == plan.total


def test_fill_executes_random_plans_exactly():
    # counts per cube match the planned n_h for arbitrary plans
    rng = np.random.default_rng(77)
    spec = lookup("gaussian")
    vmap = maps.new_uniform(spec.dims, 16, spec.bounds)
    for trial in range(5):
        n_h = rng.integers(2, 9, size=16).astype(np.int64)
        grid = strat.StratGrid(dims=4, n_strat=2, n_h=n_h)
        plan = strat.build_run_plan(n_h)
        cfg = IntegratorConfig(n_eval=100, seed=trial, workers=2, batch_size=64)
        _, acc = executor.parallel_fill(plan, vmap, grid, cfg,
                                        spec.evaluate_batch)
        np.testing.assert_array_equal(acc.counts, n_h)


def test_fill_zero_integrand():
    _, vmap, grid, plan = _setup()
    cfg = IntegratorConfig(n_eval=20_000, seed=1, workers=2, batch_size=512)
    mw, acc = executor.parallel_fill(plan, vmap, grid, cfg,
                                     lambda x: np.zeros(len(x)))
    assert np.all(acc.s1 == 0.0) and np.all(acc.s2 == 0.0)
    assert np.all(mw.w == 0.0)
    np.testing.assert_array_equal(acc.counts, grid.n_h)


def test_empty_plan_gives_zero_buffers():
    _, vmap, grid, _ = _setup()
    plan = strat.RunPlan(np.zeros(grid.n_cubes + 1, dtype=np.int64))
    streams = StreamSet(seed=0, count=16)
    mw, acc = fill_iteration(plan, vmap, grid, streams,
                             lambda x: np.ones(len(x)))
    assert np.all(mw.w == 0.0) and np.all(acc.counts == 0)


def test_fill_is_chunk_size_independent(monkeypatch):
    # scratch chunking must not leak into results: accumulation is
    # sequential in run order within a shard
    spec, vmap, grid, plan = _setup()
    streams = StreamSet(seed=9, count=1024)
    monkeypatch.setattr(executor.kernels, "CHUNK_RUNS", 65536)
    big = executor.fill_shard(plan, vmap, grid, streams, spec.evaluate_batch,
                              0, plan.total)
    monkeypatch.setattr(executor.kernels, "CHUNK_RUNS", 997)
    small = executor.fill_shard(plan, vmap, grid, streams, spec.evaluate_batch,
                                0, plan.total)
    np.testing.assert_array_equal(big[0].w, small[0].w)
    np.testing.assert_array_equal(big[1].s1, small[1].s1)
    np.testing.assert_array_equal(big[1].s2, small[1].s2)


def test_integrand_error_propagates_and_cancels():
    spec, vmap, grid, plan = _setup()
    cfg = IntegratorConfig(n_eval=20_000, seed=1, workers=4, batch_size=512)
    calls = []

    def bad(x):
        calls.append(len(x))
        raise ValueError("boom")

    with pytest.raises(ValueError, match="boom"):
        executor.parallel_fill(plan, vmap, grid, cfg, bad)
    # cooperative cancellation: nowhere near one call per chunk per worker
    assert len(calls) <= 2 * cfg.workers
