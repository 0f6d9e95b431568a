"""Parallel fill: even work partitioning, private buffers, tree merge.

Runs are split into contiguous shards whose sizes differ by at most one;
each worker fills its shard into private map/cube buffers which are then
merged pairwise in a fixed binary-tree order.  Randomness is a function of
the global run index alone, so sample values do not depend on the worker
count; only floating-point summation order does.

Workers are threads: the sampling/accumulation kernels and numpy ufuncs
release the GIL, and thread-private buffers avoid any cross-process copies.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ContractViolationError, NonFiniteIntegrandError
from .maps import MapWeights, VegasMap
from .rng import StreamSet
from .strat import CubeAccumulator, RunPlan, StratGrid, run_to_cube


@dataclass(frozen=True)
class WorkerShard:
    """Contiguous run range [start, stop) owned by one worker."""

    worker_id: int
    start: int
    stop: int

    @property
    def size(self) -> int:
        return self.stop - self.start


def partition_runs(total: int, k: int) -> list[tuple[int, int]]:
    """k contiguous ranges covering [0, total), sizes floor or ceil of total/k.

    The first total % k ranges take the ceiling.
    """
    if total < 0:
        raise ContractViolationError(f"total must be >= 0, got {total}")
    if k < 1:
        raise ContractViolationError(f"k must be >= 1, got {k}")
    q, rem = divmod(total, k)
    ranges = []
    start = 0
    for i in range(k):
        size = q + (1 if i < rem else 0)
        ranges.append((start, start + size))
        start += size
    return ranges


def tree_reduce(buffers):
    """Merge accumulator sets pairwise, adjacent pairs left to right.

    ceil(log2 n) levels; the result does not depend on worker completion
    timing.  Buffers are (MapWeights, CubeAccumulator) pairs of identical
    shapes; the left-most buffer is reused as the destination.
    """
    bufs = list(buffers)
    if not bufs:
        raise ContractViolationError("tree_reduce needs at least one buffer")
    shape = (bufs[0][0].w.shape, bufs[0][1].n_cubes)
    for mw, acc in bufs[1:]:
        if (mw.w.shape, acc.n_cubes) != shape:
            raise ContractViolationError(
                f"buffer shape mismatch: {(mw.w.shape, acc.n_cubes)} != {shape}")
    while len(bufs) > 1:
        merged = []
        for i in range(0, len(bufs), 2):
            if i + 1 < len(bufs):
                bufs[i][0].iadd(bufs[i + 1][0])
                bufs[i][1].iadd(bufs[i + 1][1])
            merged.append(bufs[i])
        bufs = merged
    return bufs[0]


def fill_shard(plan: RunPlan, vmap: VegasMap, grid: StratGrid,
               streams: StreamSet, f_batch, start: int, stop: int,
               abort: threading.Event | None = None, run_base: int = 0):
    """Fill runs [start, stop) into fresh private buffers.

    f_batch maps an (n, d) array of domain points to n values.  run_base is
    the number of evaluations consumed by earlier iterations (keeps streams
    advancing).  The chunk size only bounds scratch memory: accumulation is
    sequential in run order, so the buffers are bit-identical for any
    chunking.
    """
    dims = vmap.dims
    mw = MapWeights(dims, vmap.n_intervals)
    acc = CubeAccumulator(grid.n_cubes)
    if stop <= start:
        return mw, acc
    chunk = kernels.CHUNK_RUNS
    x = np.empty((min(chunk, stop - start), dims), dtype=np.float64)
    jac = np.empty(x.shape[0], dtype=np.float64)
    idx = np.empty(x.shape, dtype=np.int64)
    cube = np.empty(x.shape[0], dtype=np.int64)
    seed = np.uint64(streams.seed)
    cube_cursor = run_to_cube(plan, start)
    for c0 in range(start, stop, chunk):
        if abort is not None and abort.is_set():
            return mw, acc
        n = min(chunk, stop - c0)
        kernels.sample_runs(seed, np.int64(streams.count), np.int64(run_base),
                            np.int64(c0), np.int64(n), plan.offsets,
                            np.int64(cube_cursor), vmap.edges,
                            np.int64(grid.n_strat),
                            x[:n], jac[:n], idx[:n], cube[:n])
        cube_cursor = int(cube[n - 1])
        vals = np.asarray(f_batch(x[:n]), dtype=np.float64).reshape(-1)
        if vals.shape[0] != n:
            raise ContractViolationError(
                f"batch integrand returned {vals.shape[0]} values for {n} points")
        finite = np.isfinite(vals)
        if not finite.all():
            i = int(np.argmin(finite))
            raise NonFiniteIntegrandError(x[i].copy(), float(vals[i]), c0 + i)
        jf = jac[:n] * vals
        kernels.accumulate(jf, idx[:n], cube[:n], mw.w, mw.counts,
                           acc.s1, acc.s2, acc.counts)
    return mw, acc


def parallel_fill(plan: RunPlan, vmap: VegasMap, grid: StratGrid, cfg, f_batch,
                  run_base: int = 0):
    """Fill the whole plan with cfg.workers threads and merge the buffers.

    Mathematically identical to a sequential fill over the same plan and
    streams; the randomness of run r depends only on (seed, run_base + r).
    Integrand errors propagate after outstanding work is cancelled.
    """
    workers = int(cfg.workers)
    if workers < 1:
        raise ContractViolationError(f"workers must be >= 1, got {workers}")
    streams = StreamSet(int(cfg.seed), int(cfg.batch_size))
    if workers == 1:
        return fill_shard(plan, vmap, grid, streams, f_batch, 0, plan.total,
                          run_base=run_base)
    shards = [WorkerShard(i, a, b)
              for i, (a, b) in enumerate(partition_runs(plan.total, workers))]
    abort = threading.Event()
    failures: dict[int, BaseException] = {}

    def work(shard: WorkerShard):
        try:
            return fill_shard(plan, vmap, grid, streams, f_batch,
                              shard.start, shard.stop, abort, run_base)
        except BaseException as exc:
            failures[shard.worker_id] = exc
            abort.set()
            return None

    with ThreadPoolExecutor(max_workers=workers) as pool:
        buffers = list(pool.map(work, shards))
    if failures:
        raise failures[min(failures)]
    return tree_reduce(buffers)
