"""Seeded, stream-splittable uniform random numbers.

Every draw is a pure function of ``(seed, stream_id, position)``: the
generator is a keyed counter permutation (Philox4x32-10), so jumping to an
arbitrary position is O(1) and two streams never share state.  This is what
makes integration results independent of how evaluations are distributed
over workers: the randomness of a given evaluation is pinned to its global
index, not to whichever thread happens to execute it.

One 128-bit Philox block yields two float64 draws (positions 2k and 2k+1).
Each double keeps 53 mantissa bits and lies in [0, 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ContractViolationError

# Philox4x32 round constants (Salmon et al., SC'11).
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_SH32 = np.uint64(32)
_ROUNDS = 10

#: float64 draws produced per 128-bit block
DRAWS_PER_BLOCK = 2

_INV_2_53 = 2.0 ** -53


@njit(cache=True, nogil=True)
def _philox_words(block, stream_id, seed):
    """10-round Philox4x32 of counter (block, stream_id) under key seed.

    Returns the 128-bit output as two 64-bit words.
    """
    c0 = block & _MASK32
    c1 = (block >> _SH32) & _MASK32
    c2 = stream_id & _MASK32
    c3 = (stream_id >> _SH32) & _MASK32
    k0 = seed & _MASK32
    k1 = (seed >> _SH32) & _MASK32
    for _ in range(_ROUNDS):
        p0 = _M0 * c0
        p1 = _M1 * c2
        n0 = (p1 >> _SH32) ^ c1 ^ k0
        n1 = p1 & _MASK32
        n2 = (p0 >> _SH32) ^ c3 ^ k1
        n3 = p0 & _MASK32
        c0, c1, c2, c3 = n0, n1, n2, n3
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return (c0 << _SH32) | c1, (c2 << _SH32) | c3


@njit(cache=True, nogil=True)
def uniform_at(seed, stream_id, position):
    """The uniform in [0, 1) at an absolute position of a stream."""
    w0, w1 = _philox_words(position >> np.uint64(1), stream_id, seed)
    w = w0 if position & np.uint64(1) == np.uint64(0) else w1
    return np.float64(w >> np.uint64(11)) * _INV_2_53


@njit(cache=True, nogil=True)
def _fill_uniforms(seed, stream_id, start, out):
    n = out.shape[0]
    i = 0
    pos = start
    # leading odd position, if any
    if pos & np.uint64(1) == np.uint64(1) and n > 0:
        out[0] = uniform_at(seed, stream_id, pos)
        i = 1
        pos += np.uint64(1)
    while i + 1 < n:
        w0, w1 = _philox_words(pos >> np.uint64(1), stream_id, seed)
        out[i] = np.float64(w0 >> np.uint64(11)) * _INV_2_53
        out[i + 1] = np.float64(w1 >> np.uint64(11)) * _INV_2_53
        i += 2
        pos += np.uint64(2)
    if i < n:
        out[i] = uniform_at(seed, stream_id, pos)


@dataclass
class RngStream:
    """A single uniform stream identified by (seed, stream_id).

    The counter is the only mutable state; draws at positions the counter
    walks through are identical to ``uniform_at`` at those positions.
    """

    seed: int
    stream_id: int
    counter: int = 0

    def next_uniform(self) -> float:
        u = float(uniform_at(np.uint64(self.seed), np.uint64(self.stream_id),
                             np.uint64(self.counter)))
        self.counter += 1
        return u

    def take(self, n: int) -> np.ndarray:
        """Draw the next n uniforms, advancing the counter by n."""
        out = np.empty(n, dtype=np.float64)
        _fill_uniforms(np.uint64(self.seed), np.uint64(self.stream_id),
                       np.uint64(self.counter), out)
        self.counter += n
        return out

    def jump_to(self, position: int) -> "RngStream":
        """O(1) jump: set the counter to an absolute position."""
        self.counter = int(position)
        return self


def make_stream(seed: int, stream_id: int) -> RngStream:
    """Create a stream with its counter at 0."""
    return RngStream(int(seed), int(stream_id))


@dataclass(frozen=True)
class StreamSet:
    """The batch of logical streams used by one integration run.

    There are ``count`` streams (one per logical batch slot); evaluation run
    ``r`` samples from stream ``r % count`` at positions derived from
    ``r // count``; slots, not workers, own the random sequence.
    """

    seed: int
    count: int

    def stream(self, slot: int) -> RngStream:
        if not 0 <= slot < self.count:
            raise ContractViolationError(f"slot {slot} outside [0, {self.count})")
        return make_stream(self.seed, slot)
