"""Hot-path kernels for the fill phase.

Sampling and accumulation are compiled (numba, nogil) so worker threads
scale and per-evaluation cost stays small.  Everything here is driven per
contiguous run range; accumulation walks runs in ascending order, which
makes a shard's buffers bit-identical regardless of how the range is
chunked internally.

The kernel math must stay in lockstep with the reference implementations
in ``maps.transform`` and ``strat.cube_origin`` (same operations in the
same order); tests compare the two paths bitwise.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .rng import _philox_words

#: runs processed per kernel call (bounds scratch memory; has no effect on results)
CHUNK_RUNS = 65536

#: largest double below 1.0, guards the half-open sampling contract
_ONE_MINUS = np.nextafter(1.0, 0.0)

_INV_2_53 = 2.0 ** -53


def positions_per_run(dims: int) -> int:
    """Uniform positions consumed per evaluation: dims rounded up to even,
    so no 128-bit block straddles two evaluations."""
    return dims + (dims & 1)


@njit(cache=True, nogil=True)
def sample_runs(seed, batch_size, run_base, run_start, n, offsets, cube_start,
                edges, n_strat, x, jac, idx, cube):
    """Generate the points, Jacobians, and indices for runs
    [run_start, run_start + n).

    Runs are in plan order, so the owning cube is found by walking a cursor
    (cube_start must own run_start).  Randomness is keyed to the global
    evaluation index g = run_base + run (run_base counts evaluations done by
    earlier iterations, so streams advance across iterations): the stream
    slot is g % batch_size and the in-stream position derives from
    g // batch_size.
    """
    dims = edges.shape[0]
    ng = edges.shape[1] - 1
    ngf = np.float64(ng)
    stride = np.uint64(dims + (dims & 1))
    c = cube_start
    for i in range(n):
        run = run_start + i
        while offsets[c + 1] <= run:
            c += 1
        cube[i] = c
        g = run_base + run
        slot = np.uint64(g % batch_size)
        k = np.uint64(g // batch_size)
        base = k * stride
        rem = c
        jf = 1.0
        w1 = np.uint64(0)
        for j in range(dims):
            if j & 1 == 0:
                w0, w1 = _philox_words((base + np.uint64(j)) >> np.uint64(1),
                                       slot, seed)
                u = np.float64(w0 >> np.uint64(11)) * _INV_2_53
            else:
                u = np.float64(w1 >> np.uint64(11)) * _INV_2_53
            digit = rem % n_strat
            rem //= n_strat
            y = digit / n_strat + u / n_strat
            if y >= 1.0:
                y = _ONE_MINUS
            t = y * ngf
            iv = np.int64(t)
            if iv > ng - 1:
                iv = ng - 1
            frac = t - iv
            lo = edges[j, iv]
            dx = edges[j, iv + 1] - lo
            x[i, j] = lo + frac * dx
            jf *= ngf * dx
            idx[i, j] = iv
        jac[i] = jf


@njit(cache=True, nogil=True)
def accumulate(jf, idx, cube, map_w, map_counts, s1, s2, counts):
    """Fold a chunk of weighted samples into the shard-private buffers.

    Sequential in run order: deterministic for a fixed shard layout.
    """
    n = jf.shape[0]
    dims = idx.shape[1]
    for i in range(n):
        v = jf[i]
        w2 = v * v
        for j in range(dims):
            iv = idx[i, j]
            map_w[j, iv] += w2
            map_counts[j, iv] += 1
        h = cube[i]
        s1[h] += v
        s2[h] += w2
        counts[h] += 1
