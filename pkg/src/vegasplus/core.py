"""The full iteration loop: fill, adapt, estimate, combine.

Each iteration builds a run plan from the current per-cube allocation,
fills it (in parallel), recomputes the allocation from the per-cube spread,
refines the importance map from the accumulated weights, and records the
iteration's estimate and variance.  Iterations with index > skip are
combined by inverse-variance weighting into the final outcome.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import executor, maps, strat
from .errors import ContractViolationError, IntegrationError
from .rng import StreamSet

DEFAULT_MAX_IT = 20
DEFAULT_BATCH_SIZE = 1_048_576
DEFAULT_N_INTERVALS = 1024
DEFAULT_ALPHA = 0.5
DEFAULT_BETA = 0.75


@dataclass(frozen=True)
class IntegratorConfig:
    """Knobs of one integration run (defaults follow the library defaults)."""

    n_eval: int
    max_it: int = DEFAULT_MAX_IT
    skip: int = 0
    batch_size: int = DEFAULT_BATCH_SIZE
    n_intervals: int = DEFAULT_N_INTERVALS
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    seed: int = 0
    workers: int = 1
    cube_cap: int = strat.DEFAULT_CUBE_CAP
    n_strat: int | None = None

    def __post_init__(self):
        if self.n_eval < 4:
            raise ContractViolationError(f"n_eval must be >= 4, got {self.n_eval}")
        if not self.max_it > self.skip >= 0:
            raise ContractViolationError(
                f"need max_it > skip >= 0, got max_it={self.max_it} skip={self.skip}")
        if self.batch_size < 1:
            raise ContractViolationError(
                f"batch_size must be >= 1, got {self.batch_size}")
        if self.n_intervals < 2:
            raise ContractViolationError(
                f"n_intervals must be >= 2, got {self.n_intervals}")
        if self.alpha < 0 or self.beta < 0:
            raise ContractViolationError("alpha and beta must be >= 0")
        if self.workers < 1:
            raise ContractViolationError(f"workers must be >= 1, got {self.workers}")
        if self.cube_cap < 1:
            raise ContractViolationError(f"cube_cap must be >= 1, got {self.cube_cap}")


@dataclass(frozen=True)
class IterationResult:
    index: int          # 1-based
    estimate: float
    variance: float
    included: bool      # index > skip

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.variance))


@dataclass
class PhaseTimes:
    """Wall-clock seconds per algorithm phase."""

    init: float = 0.0
    map: float = 0.0
    fill: float = 0.0
    update: float = 0.0
    clear: float = 0.0

    def total(self) -> float:
        return self.init + self.map + self.fill + self.update + self.clear

    def percentages(self) -> dict[str, float]:
        tot = self.total()
        if tot <= 0.0:
            return {k: 0.0 for k in ("init", "map", "fill", "update", "clear")}
        return {
            "init": 100.0 * self.init / tot,
            "map": 100.0 * self.map / tot,
            "fill": 100.0 * self.fill / tot,
            "update": 100.0 * self.update / tot,
            "clear": 100.0 * self.clear / tot,
        }


@dataclass(frozen=True)
class IntegralOutcome:
    mean: float
    sigma: float
    chi2_dof: float
    iterations: tuple[IterationResult, ...]
    timing: PhaseTimes
    n_strat: int
    n_cubes: int
    evals_per_iteration: tuple[int, ...]

    def included(self) -> list[IterationResult]:
        return [r for r in self.iterations if r.included]


def combine_iterations(results):
    """Inverse-variance weighted combination of iteration results.

    Returns (mean, variance, chi2_dof).  A zero-variance result is exact:
    it short-circuits the combination (two exact results that disagree are
    an error).  The weighted sums are exact (math.fsum), so the outcome is
    bitwise permutation-invariant and immune to cancellation between
    iterations.
    """
    results = list(results)
    if not results:
        raise IntegrationError("no iteration results to combine")
    est = [float(r.estimate) for r in results]
    var = [float(r.variance) for r in results]
    if any(v < 0 for v in var):
        raise ContractViolationError("iteration variance must be >= 0")
    if 0.0 in var:
        vals = {e for e, v in zip(est, var) if v == 0.0}
        if len(vals) > 1:
            raise IntegrationError(
                f"conflicting exact estimates (sigma = 0): {sorted(vals)}")
        return vals.pop(), 0.0, 0.0
    if len(results) == 1:
        return est[0], var[0], 0.0
    w = [1.0 / v for v in var]
    wsum = math.fsum(w)
    mean = math.fsum(e * wi for e, wi in zip(est, w)) / wsum
    variance = 1.0 / wsum
    chi2_dof = math.fsum((e - mean) ** 2 * wi for e, wi in zip(est, w)) \
        / (len(results) - 1)
    return mean, variance, chi2_dof


def fill_iteration(plan, vmap, grid, streams: StreamSet, f_batch,
                   run_base: int = 0):
    """Sequential reference fill of the whole plan (one shard)."""
    return executor.fill_shard(plan, vmap, grid, streams, f_batch, 0,
                               plan.total, run_base=run_base)


def _as_batch(f, batched):
    if batched:
        return f

    def batch(x):
        return np.array([f(p) for p in x], dtype=np.float64)

    return batch


def integrate(f, bounds, config: IntegratorConfig | None = None, *,
              batched: bool = False, **overrides) -> IntegralOutcome:
    """Integrate f over the box given by bounds.

    Parameters
    ----------
    f : callable
        Point integrand d-vector -> real, or with ``batched=True`` an
        (n, d) -> (n,) array callable.  Must be finite on the closed box.
    bounds : sequence of (lo, hi)
        One pair per dimension.
    config : IntegratorConfig, optional
        Alternatively pass the fields as keyword overrides (n_eval=...).
    """
    if config is None:
        config = IntegratorConfig(**overrides)
    elif overrides:
        raise TypeError("pass either a config object or keyword overrides, not both")
    bounds = [(float(lo), float(hi)) for lo, hi in bounds]
    dims = len(bounds)
    timing = PhaseTimes()
    t0 = time.perf_counter()
    vmap = maps.new_uniform(dims, config.n_intervals, bounds)
    grid = strat.initial_grid(config.n_eval, dims, config.cube_cap, config.n_strat)
    streams = StreamSet(config.seed, config.batch_size)
    f_batch = _as_batch(f, batched)
    results: list[IterationResult] = []
    evals: list[int] = []
    timing.init = time.perf_counter() - t0

    plan = mw = acc = None
    run_base = 0
    for it in range(1, config.max_it + 1):
        t = time.perf_counter()
        plan = strat.build_run_plan(grid.n_h)
        timing.map += time.perf_counter() - t

        t = time.perf_counter()
        mw, acc = executor.parallel_fill(plan, vmap, grid, config, f_batch,
                                         run_base=run_base)
        run_base += plan.total
        timing.fill += time.perf_counter() - t

        t = time.perf_counter()
        i_it, var_it, d_h = strat.compute_results(acc, grid.cube_volume)
        grid.n_h = strat.update_evals_per_cube(d_h, config.beta, config.n_eval)
        grid.d_h = d_h
        damped = maps.smooth_and_damp(mw, config.alpha)
        vmap = maps.update_grid(vmap, damped)
        results.append(IterationResult(it, i_it, var_it, it > config.skip))
        evals.append(plan.total)
        timing.update += time.perf_counter() - t

    n_strat = grid.n_strat
    n_cubes = grid.n_cubes
    t = time.perf_counter()
    del plan, mw, acc, grid, vmap
    timing.clear = time.perf_counter() - t

    included = [r for r in results if r.included]
    mean, variance, chi2_dof = combine_iterations(included)
    return IntegralOutcome(
        mean=mean,
        sigma=float(np.sqrt(variance)),
        chi2_dof=chi2_dof,
        iterations=tuple(results),
        timing=timing,
        n_strat=n_strat,
        n_cubes=n_cubes,
        evals_per_iteration=tuple(evals),
    )
