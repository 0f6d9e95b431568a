"""Adaptive stratification of unit y-space.

y-space is cut into ``n_strat`` equal strata per axis, giving
``n_strat**dims`` hypercubes of volume ``n_strat**-dims``.  Each iteration
plans a per-cube evaluation count ``n_h`` (at least 2, so the sample
variance is defined), redistributed between iterations proportionally to
the beta-damped per-cube spread of J*f.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError

#: default limit on the number of hypercubes (keeps memory bounded)
DEFAULT_CUBE_CAP = 1 << 20

#: smallest planned evaluation count per cube
MIN_EVALS_PER_CUBE = 2


def _iroot(x: int, d: int) -> int:
    """Largest n >= 1 with n**d <= x (exact, float estimate + correction)."""
    if x < 1:
        return 1
    n = max(1, int(x ** (1.0 / d)))
    while n > 1 and n ** d > x:
        n -= 1
    while (n + 1) ** d <= x:
        n += 1
    return n


def compute_n_strat(n_eval: int, dims: int, cube_cap: int = DEFAULT_CUBE_CAP) -> int:
    """Strata per dimension: the largest N with N**dims <= n_eval/2, capped.

    Exact integer arithmetic (no float-pow rounding); the cap keeps
    N**dims <= cube_cap.  Degenerates to 1 (a single cube, i.e. pure
    importance sampling) for tiny budgets or very high dimension.
    """
    if dims < 1:
        raise ContractViolationError(f"dims must be >= 1, got {dims}")
    return min(_iroot(n_eval // 2, dims), _iroot(cube_cap, dims))


@dataclass
class StratGrid:
    """Uniform hypercube partition plus per-cube adaptive state."""

    dims: int
    n_strat: int
    n_h: np.ndarray                 # planned evaluations per cube, int64
    d_h: np.ndarray = field(default=None)  # previous iteration's spread stat

    def __post_init__(self):
        if self.d_h is None:
            self.d_h = np.zeros(self.n_cubes, dtype=np.float64)
        if self.n_h.shape != (self.n_cubes,):
            raise ContractViolationError(
                f"n_h has shape {self.n_h.shape}, expected ({self.n_cubes},)")

    @property
    def n_cubes(self) -> int:
        return self.n_strat ** self.dims

    @property
    def cube_volume(self) -> float:
        return 1.0 / self.n_cubes


def initial_grid(n_eval: int, dims: int, cube_cap: int = DEFAULT_CUBE_CAP,
                 n_strat: int | None = None) -> StratGrid:
    """Grid with uniformly allocated evaluations (no spread stats yet)."""
    ns = int(n_strat) if n_strat is not None else compute_n_strat(n_eval, dims, cube_cap)
    if ns < 1:
        raise ContractViolationError(f"n_strat must be >= 1, got {ns}")
    if ns ** dims > cube_cap:
        raise ContractViolationError(
            f"n_strat={ns} gives {ns ** dims} cubes, above the cap {cube_cap}")
    n_cubes = ns ** dims
    n_h = update_evals_per_cube(np.zeros(n_cubes), 0.0, n_eval)
    return StratGrid(dims=dims, n_strat=ns, n_h=n_h)


def update_evals_per_cube(d_h: np.ndarray, beta: float, n_eval: int) -> np.ndarray:
    """Reallocate the evaluation budget across cubes.

    Shares are p_h = d_h**beta / sum(d_h**beta); a zero total or beta = 0
    falls back to uniform shares (classic non-adaptive stratification).
    Counts are max(2, ceil(n_eval * p_h)), so sum(n_h) >= n_eval and
    sum(n_h) <= n_eval + 2 * n_cubes.
    """
    d_h = np.asarray(d_h, dtype=np.float64)
    if np.any(d_h < 0):
        raise ContractViolationError("d_h entries must be nonnegative")
    if beta < 0:
        raise ContractViolationError(f"beta must be >= 0, got {beta}")
    n_cubes = d_h.shape[0]
    if beta == 0.0:
        p = np.full(n_cubes, 1.0 / n_cubes)
    else:
        dp = d_h ** beta
        total = dp.sum()
        if total > 0.0:
            p = dp / total
        else:
            p = np.full(n_cubes, 1.0 / n_cubes)
    n_h = np.ceil(n_eval * p).astype(np.int64)
    np.maximum(n_h, MIN_EVALS_PER_CUBE, out=n_h)
    return n_h


@dataclass(frozen=True)
class RunPlan:
    """Mapping from global evaluation index (run) to hypercube index."""

    offsets: np.ndarray   # int64, length n_cubes + 1, exclusive prefix sum

    @property
    def total(self) -> int:
        return int(self.offsets[-1])

    @property
    def n_cubes(self) -> int:
        return len(self.offsets) - 1


def build_run_plan(n_h: np.ndarray) -> RunPlan:
    """Exclusive prefix sum over n_h: run r belongs to cube h iff
    offsets[h] <= r < offsets[h+1]."""
    n_h = np.asarray(n_h, dtype=np.int64)
    offsets = np.zeros(len(n_h) + 1, dtype=np.int64)
    np.cumsum(n_h, out=offsets[1:])
    return RunPlan(offsets)


def run_to_cube(plan: RunPlan, r: int) -> int:
    """Cube owning run r (binary search over the plan offsets)."""
    if not 0 <= r < plan.total:
        raise ContractViolationError(f"run {r} outside [0, {plan.total})")
    return int(np.searchsorted(plan.offsets, r, side="right") - 1)


def cube_origin(h: int, n_strat: int, dims: int) -> np.ndarray:
    """Lower corner of cube h in y-space.

    h is decomposed in mixed radix base n_strat with dimension 0 as the
    least-significant digit; a point inside the cube is
    origin + u / n_strat for u uniform in [0,1)^dims.
    """
    if not 0 <= h < n_strat ** dims:
        raise ContractViolationError(f"cube {h} outside [0, {n_strat ** dims})")
    origin = np.empty(dims, dtype=np.float64)
    rem = h
    for j in range(dims):
        origin[j] = (rem % n_strat) / n_strat
        rem //= n_strat
    return origin


class CubeAccumulator:
    """Per-cube running sums over J*f: s1 = sum(jf), s2 = sum(jf^2), count."""

    def __init__(self, n_cubes: int):
        self.s1 = np.zeros(n_cubes, dtype=np.float64)
        self.s2 = np.zeros(n_cubes, dtype=np.float64)
        self.counts = np.zeros(n_cubes, dtype=np.int64)

    @property
    def n_cubes(self) -> int:
        return len(self.s1)

    def iadd(self, other: "CubeAccumulator") -> "CubeAccumulator":
        self.s1 += other.s1
        self.s2 += other.s2
        self.counts += other.counts
        return self


def compute_results(acc: CubeAccumulator, cube_volume: float):
    """Per-iteration estimate, variance, and the spread stat for reallocation.

    Per cube: mean = s1/count, rawvar = max(0, s2/count - mean^2),
    contribution V*mean with variance V^2*rawvar/count.  Returns
    (I_it, var_it, d_h) where d_h = sqrt(rawvar)*V is the sigma_h(Jf)
    statistic fed to update_evals_per_cube.

    The cube volume is constant, so it is factored out of the sums; this is
    what makes a constant integrand give I_it exactly (sum of exact per-cube
    means divided by the cube count).
    """
    if np.any(acc.counts < MIN_EVALS_PER_CUBE):
        bad = int(np.argmin(acc.counts))
        raise AssertionError(
            f"cube {bad} has {int(acc.counts[bad])} samples; "
            f"every cube needs >= {MIN_EVALS_PER_CUBE}")
    counts = acc.counts.astype(np.float64)
    means = acc.s1 / counts
    rawvar = acc.s2 / counts - means * means
    np.maximum(rawvar, 0.0, out=rawvar)
    n_cubes = acc.n_cubes
    i_it = float(np.sum(means) / n_cubes)
    var_it = float(np.sum(rawvar / counts) * cube_volume * cube_volume)
    d_h = np.sqrt(rawvar) * cube_volume
    return i_it, var_it, d_h
