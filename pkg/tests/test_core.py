"""Integration loop, iteration combination, skip semantics, error paths."""

import math

import numpy as np
import pytest

from vegasplus import IntegratorConfig, IterationResult, combine_iterations, integrate
from vegasplus.errors import (
    ContractViolationError,
    IntegrationError,
    NonFiniteIntegrandError,
)
from vegasplus.integrands import lookup


def const_one(x):
    return np.ones(len(x))


@pytest.mark.parametrize("kw", [
    dict(n_eval=3),
    dict(n_eval=100, max_it=5, skip=5),
    dict(n_eval=100, max_it=0),
    dict(n_eval=100, batch_size=0),
    dict(n_eval=100, n_intervals=1),
    dict(n_eval=100, alpha=-0.1),
    dict(n_eval=100, beta=-1.0),
    dict(n_eval=100, workers=0),
])
def test_config_validation(kw):
    with pytest.raises(ContractViolationError):
        IntegratorConfig(**kw)


def test_constant_integrand_exact():
    out = integrate(const_one, [(0, 1)] * 3, n_eval=500, max_it=4, seed=7,
                    batched=True)
    assert out.mean == 1.0
    assert out.sigma == 0.0


def test_constant_integrand_volume():
    out = integrate(const_one, [(0, 2), (-1, 1)], n_eval=400, max_it=3,
                    seed=1, batched=True)
    assert out.mean == pytest.approx(4.0, rel=1e-12)
    assert out.sigma == pytest.approx(0.0, abs=1e-12)


def test_combine_single_result():
    mean, var, chi2 = combine_iterations([IterationResult(1, 7.0, 2.0, True)])
    assert (mean, var, chi2) == (7.0, 2.0, 0.0)


def test_combine_two_results():
    mean, var, _ = combine_iterations([
        IterationResult(1, 1.0, 1.0, True),
        IterationResult(2, 3.0, 1.0, True),
    ])
    assert mean == pytest.approx(2.0)
    assert var == pytest.approx(0.5)


def test_combine_equal_variances_is_arithmetic_mean():
    vals = [2.0, 4.0, 9.0, 1.0]
    res = [IterationResult(i + 1, v, 0.3, True) for i, v in enumerate(vals)]
    mean, _, _ = combine_iterations(res)
    assert mean == pytest.approx(np.mean(vals), rel=1e-14)


def test_combine_permutation_invariant_bitwise():
    rng = np.random.default_rng(0)
    res = [IterationResult(i + 1, float(rng.normal()), float(rng.random() + 0.1),
                           True) for i in range(20)]
    base = combine_iterations(res)
    for seed in range(5):
        shuffled = list(res)
        np.random.default_rng(seed).shuffle(shuffled)
        assert combine_iterations(shuffled) == base


def test_combine_exact_short_circuit():
    res = [IterationResult(1, 5.0, 0.0, True), IterationResult(2, 5.1, 2.0, True)]
    mean, var, _ = combine_iterations(res)
    assert (mean, var) == (5.0, 0.0)


def test_combine_conflicting_exact_estimates():
    res = [IterationResult(1, 5.0, 0.0, True), IterationResult(2, 6.0, 0.0, True)]
    with pytest.raises(IntegrationError):
        combine_iterations(res)


def test_combine_empty():
    with pytest.raises(IntegrationError):
        combine_iterations([])


def test_combine_mean_bounded_and_variance_dominates():
    rng = np.random.default_rng(4)
    res = [IterationResult(i + 1, float(rng.normal(3.0)),
                           float(0.1 + rng.random()), True) for i in range(12)]
    mean, var, _ = combine_iterations(res)
    ests = [r.estimate for r in res]
    assert min(ests) <= mean <= max(ests)
    assert var <= min(r.variance for r in res)


def test_skip_semantics_excluded_iterations_are_inert():
    # same seed, same config except perturbed early iterations cannot happen
    # via integrate; verify at the combination level and via the outcome
    spec = lookup("sinexp")
    out = integrate(spec.evaluate_batch, spec.bounds, n_eval=20_000, max_it=6,
                    skip=2, seed=3, batched=True)
    assert [r.included for r in out.iterations] == [False, False, True, True,
                                                    True, True]
    included = [r for r in out.iterations if r.included]
    mean, var, chi2 = combine_iterations(included)
    assert (mean, math.sqrt(var), chi2) == (out.mean, out.sigma, out.chi2_dof)
    # perturbing the excluded results leaves the combination unchanged
    perturbed = [IterationResult(r.index, r.estimate * 100, r.variance * 9, False)
                 for r in out.iterations[:2]] + included
    assert combine_iterations([r for r in perturbed if r.included]) == \
        (mean, var, chi2)


def test_iteration_indices_are_one_based():
    out = integrate(const_one, [(0, 1)], n_eval=100, max_it=3, seed=0,
                    batched=True)
    assert [r.index for r in out.iterations] == [1, 2, 3]


def test_non_finite_integrand_diagnostic():
    def bad(x):
        v = np.ones(len(x))
        v[(x[:, 0] > 0.4) & (x[:, 0] < 0.6)] = np.nan
        return v

    with pytest.raises(NonFiniteIntegrandError) as err:
        integrate(bad, [(0, 1)] * 2, n_eval=5000, max_it=2, seed=0, batched=True)
    assert 0.4 < err.value.point[0] < 0.6
    assert math.isnan(err.value.value)


def test_pointwise_integrand_wrapper():
    out_point = integrate(lambda p: p[0] + p[1], [(0, 1)] * 2, n_eval=2000,
                          max_it=3, seed=5)
    out_batch = integrate(lambda x: x[:, 0] + x[:, 1], [(0, 1)] * 2,
                          n_eval=2000, max_it=3, seed=5, batched=True)
    assert out_point.mean == out_batch.mean
    assert out_point.sigma == out_batch.sigma


def test_config_object_and_overrides_are_exclusive():
    cfg = IntegratorConfig(n_eval=1000)
    with pytest.raises(TypeError):
        integrate(const_one, [(0, 1)], cfg, n_eval=2000, batched=True)


def test_phase_percentages_sum_to_100():
    out = integrate(const_one, [(0, 1)] * 3, n_eval=10_000, max_it=4, seed=2,
                    batched=True)
    assert sum(out.timing.percentages().values()) == pytest.approx(100.0, abs=0.1)


def test_closed_form_quick_checks():
    for name, truth in [("cosine", math.sin(1.0) ** 10), ("roos_arnold", 1.0)]:
        spec = lookup(name)
        out = integrate(spec.evaluate_batch, spec.bounds, n_eval=50_000,
                        max_it=8, skip=2, seed=11, batched=True, workers=2)
        assert abs(out.mean - truth) < 5 * out.sigma
        assert out.sigma > 0


def test_evals_per_iteration_reported():
    out = integrate(const_one, [(0, 1)] * 2, n_eval=1000, max_it=3, seed=0,
                    batched=True)
    assert len(out.evals_per_iteration) == 3
    assert all(e >= 1000 for e in out.evals_per_iteration)


def test_fill_single_stratum_matches_closed_form():
    # pure importance sampling (one cube), uniform map, linear 10D:
    # the sample mean lands within 5 standard errors of 5.0
    from vegasplus import maps, strat
    from vegasplus.core import fill_iteration
    from vegasplus.rng import StreamSet

    spec = lookup("linear")
    vmap = maps.new_uniform(10, 64, spec.bounds)
    grid = strat.initial_grid(100_000, 10, n_strat=1)
    plan = strat.build_run_plan(grid.n_h)
    assert plan.total == 100_000
    _, acc = fill_iteration(plan, vmap, grid, StreamSet(3, 4096),
                            spec.evaluate_batch)
    mean = acc.s1[0] / acc.counts[0]
    rawvar = acc.s2[0] / acc.counts[0] - mean * mean
    stderr = math.sqrt(rawvar / acc.counts[0])
    assert abs(mean - 5.0) < 5 * stderr


def test_integrate_concurrent_calls_are_independent():
    # independent configs may run on overlapping threads without interfering
    from concurrent.futures import ThreadPoolExecutor

    spec = lookup("sinexp")

    def one(seed):
        return integrate(spec.evaluate_batch, spec.bounds, n_eval=20_000,
                         max_it=4, seed=seed, batched=True, workers=2)

    serial = [one(s).mean for s in (1, 2, 3, 4)]
    with ThreadPoolExecutor(max_workers=4) as pool:
        threaded = [o.mean for o in pool.map(one, (1, 2, 3, 4))]
    assert threaded == serial
