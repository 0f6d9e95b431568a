"""Registry integrands: values, references, symmetries, oracles."""

import math

import numpy as np
import pytest
from scipy import integrate as sci_integrate
from scipy import special

from vegasplus import integrate
from vegasplus.integrands import (
    BENCHMARK_NAMES,
    UnknownIntegrandError,
    asian_option_batch,
    asian_option_reference,
    available,
    erfinv,
    lookup,
    oscillator_propagator,
    path_integral_batch,
    path_integral_lattice_exact,
)

RNG = np.random.default_rng(12345)


def test_registry_names():
    assert available() == sorted([
        "sinexp", "linear", "cosine", "exponential", "roos_arnold",
        "morokoff", "gaussian", "ridge", "asian_option", "path_integral"])


def test_unknown_name_lists_available():
    with pytest.raises(UnknownIntegrandError, match="roos_arnold"):
        lookup("nope")


def test_dimensions_and_domains():
    dims = {"sinexp": 2, "linear": 10, "cosine": 10, "exponential": 10,
            "roos_arnold": 10, "morokoff": 8, "gaussian": 4, "ridge": 4}
    for name, d in dims.items():
        spec = lookup(name)
        assert spec.dims == d
        assert spec.bounds == tuple((0.0, 1.0) for _ in range(d))


def test_fixed_integrands_reject_dim_override():
    with pytest.raises(ValueError):
        lookup("linear", dim=5)


def test_reference_values_closed_forms():
    assert lookup("linear").reference_value == 5.0
    assert lookup("morokoff").reference_value == 1.0
    assert lookup("roos_arnold").reference_value == 1.0
    assert lookup("gaussian").reference_value == 1.0
    assert lookup("sinexp").reference_value == pytest.approx(
        math.e - math.cos(1.0), rel=1e-15)
    assert lookup("cosine").reference_value == pytest.approx(
        math.sin(1.0) ** 10, rel=1e-15)


def test_exponential_reference_against_quadrature():
    axis, err = sci_integrate.quad(lambda t: math.exp(t * t), 0, 1,
                                   epsabs=1e-13, epsrel=1e-13)
    assert err < 1e-10
    assert lookup("exponential").reference_value == pytest.approx(
        axis ** 10, rel=1e-11)


def test_ridge_reference_against_quadrature():
    # independent oracle: per-center 1D quadrature instead of erf
    spec = lookup("ridge")
    centers = np.arange(1000) / 999.0
    total = 0.0
    for c in centers[::25]:     # spot-check a subsample exactly
        axis, _ = sci_integrate.quad(
            lambda t, c=c: math.exp(-100.0 * (t - c) ** 2), 0, 1,
            epsabs=1e-13, epsrel=1e-13)
        erf_axis = (math.sqrt(math.pi) / 20.0) * (
            special.erf(10 * (1 - c)) + special.erf(10 * c))
        assert axis == pytest.approx(erf_axis, rel=1e-10)
    # and the full sum through the same erf expression
    axis_all = (math.sqrt(math.pi) / 20.0) * (
        special.erf(10 * (1 - centers)) + special.erf(10 * centers))
    ref = 10000.0 / (math.pi ** 2 * 1000) * np.sum(axis_all ** 4)
    assert spec.reference_value == pytest.approx(ref, rel=1e-12)


def test_ridge_matches_dense_formula():
    spec = lookup("ridge")
    x = RNG.random((500, 4))
    centers = np.arange(1000) / 999.0
    dense = 10000.0 / (math.pi ** 2 * 1000) * np.exp(
        -100.0 * ((x[:, None, :] - centers[None, :, None]) ** 2).sum(-1)).sum(1)
    np.testing.assert_allclose(spec.evaluate_batch(x), dense, rtol=1e-12)


def test_ridge_coordinate_permutation_symmetry():
    spec = lookup("ridge")
    x = RNG.random((200, 4))
    perm = x[:, [2, 0, 3, 1]]
    np.testing.assert_array_equal(spec.evaluate_batch(x),
                                  spec.evaluate_batch(perm))


def test_roos_arnold_reflection_symmetry():
    spec = lookup("roos_arnold")
    x = RNG.random((200, 10))
    np.testing.assert_array_equal(spec.evaluate_batch(x),
                                  spec.evaluate_batch(1.0 - x))


def test_all_builtins_finite_on_million_points():
    for name in BENCHMARK_NAMES:
        spec = lookup(name)
        pts = np.random.default_rng(99).random((1_000_000, spec.dims))
        vals = spec.evaluate_batch(pts)
        assert np.isfinite(vals).all(), name
    for name in ("asian_option", "path_integral"):
        spec = lookup(name)
        lo = np.array([b[0] for b in spec.bounds])
        hi = np.array([b[1] for b in spec.bounds])
        pts = lo + (hi - lo) * np.random.default_rng(98).random(
            (1_000_000, spec.dims))
        vals = spec.evaluate_batch(pts)
        assert np.isfinite(vals).all(), name


# -- inverse error function -------------------------------------------------

def test_erfinv_against_scipy_oracle():
    y = np.linspace(-1 + 1e-12, 1 - 1e-12, 10_001)
    ours = erfinv(y)
    oracle = special.erfinv(y)
    assert np.max(np.abs(ours - oracle)) < 1e-9


def test_erfinv_scalar_and_roundtrip():
    assert erfinv(0.0) == 0.0
    y = RNG.uniform(-0.999999, 0.999999, 10_000)
    assert np.max(np.abs(special.erf(erfinv(y)) - y)) < 1e-14


# -- Asian option -----------------------------------------------------------

ASIAN_P = dict(s0=100.0, strike=100.0, rate=0.05, sigma=0.2, maturity=1.0)


def test_asian_symmetry_point():
    x = np.full((1, 16), 0.5)
    val = asian_option_batch(x, **ASIAN_P)
    s_avg = 100.0 * math.exp((0.05 - 0.02) * 1.0)
    assert val[0] == pytest.approx(
        math.exp(-0.05) * max(s_avg - 100.0, 0.0), rel=1e-12)


def test_asian_endpoint_clamping():
    x = np.zeros((2, 16))
    x[1] = 1.0
    vals = asian_option_batch(x, **ASIAN_P)
    assert np.isfinite(vals).all()


def test_asian_zero_strike_against_plain_mc():
    # K = 0: integrand is e^{-rT} S_avg; closed form vs plain MC at 1e7
    p = dict(ASIAN_P, strike=0.0)
    n, dims = 10_000_000, 16
    z = np.random.default_rng(7).standard_normal((n, dims)).sum(axis=1)
    vals = math.exp(-p["rate"]) * p["s0"] * np.exp(
        (p["rate"] - 0.5 * p["sigma"] ** 2) + p["sigma"] * z)
    mc, se = vals.mean(), vals.std(ddof=1) / math.sqrt(n)
    ref = asian_option_reference(n_averages=dims, **p)
    assert abs(mc - ref) < 3 * se
    assert ref == pytest.approx(
        p["s0"] * math.exp((dims - 1) * p["sigma"] ** 2 / 2.0), rel=1e-12)


def test_asian_reference_against_plain_mc():
    n, dims = 2_000_000, 16
    z = np.random.default_rng(8).standard_normal((n, dims)).sum(axis=1)
    s_avg = 100.0 * np.exp((0.05 - 0.02) + 0.2 * z)
    vals = math.exp(-0.05) * np.maximum(s_avg - 100.0, 0.0)
    mc, se = vals.mean(), vals.std(ddof=1) / math.sqrt(n)
    spec = lookup("asian_option")
    assert spec.dims == 16
    assert abs(mc - spec.reference_value) < 3 * se


def test_asian_default_spec():
    spec = lookup("asian_option")
    note_has_defaults = "100.0" in spec.note and "0.05" in spec.note
    assert note_has_defaults
    spec12 = lookup("asian_option", dim=12)
    assert spec12.dims == 12


# -- path integral ----------------------------------------------------------

def test_path_integral_degenerate_single_slice():
    val = path_integral_batch(np.empty((3, 0)), mass=1.0, total_time=2.0,
                              n_slices=1, x_end=0.7)
    a = 2.0
    expect = (1.0 / (2 * math.pi * a)) ** 0.5 * math.exp(-a * 0.7 ** 2 / 2.0)
    assert val == pytest.approx(expect, rel=1e-12)
    assert val.shape == (3,)


def test_path_integral_two_slices_against_quadrature():
    # N=2: one interior point, 1D integral done by adaptive quadrature
    m, t_total, x_end = 1.0, 1.0, 0.0
    a = t_total / 2

    def weight(x1):
        s = (m / (2 * a)) * ((x1 - x_end) ** 2 + (x_end - x1) ** 2) \
            + a * (x_end ** 2 + x1 ** 2) / 2.0
        return (m / (2 * math.pi * a)) * math.exp(-s)

    oracle, err = sci_integrate.quad(weight, -10, 10, epsabs=1e-12)
    assert err < 1e-9
    exact = path_integral_lattice_exact(m, t_total, 2, x_end)
    assert exact == pytest.approx(oracle, abs=1e-6)
    val = path_integral_batch(np.array([[0.3]]), mass=m, total_time=t_total,
                              n_slices=2, x_end=x_end)
    assert val[0] == pytest.approx(weight(0.3), rel=1e-12)


def test_path_integral_lattice_exact_against_grid_sum():
    # N=3: 2D Gaussian integral checked against a dense trapezoid grid
    m, t_total, x_end = 1.0, 1.5, 0.2
    g = np.linspace(-6, 6, 801)
    xx, yy = np.meshgrid(g, g, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    w = path_integral_batch(pts, mass=m, total_time=t_total, n_slices=3,
                            x_end=x_end).reshape(xx.shape)
    h = g[1] - g[0]
    grid_sum = float(np.trapezoid(np.trapezoid(w, dx=h, axis=1), dx=h))
    exact = path_integral_lattice_exact(m, t_total, 3, x_end)
    assert exact == pytest.approx(grid_sum, rel=1e-6)


def test_lattice_vs_continuum_discretization_band():
    # N=8, T=4 oscillator: lattice value within ~5% of the Mehler propagator
    lattice = path_integral_lattice_exact(1.0, 4.0, 8, 0.0)
    continuum = oscillator_propagator(1.0, 4.0, 0.0)
    assert abs(lattice / continuum - 1.0) < 0.05


def test_path_integral_full_integration_run():
    spec = lookup("path_integral")      # N=8 -> 7 interior dimensions
    assert spec.dims == 7
    out = integrate(spec.evaluate_batch, spec.bounds, n_eval=100_000,
                    max_it=10, skip=3, seed=21, batched=True, workers=2)
    assert abs(out.mean - spec.reference_value) < 5 * out.sigma
    assert out.sigma / spec.reference_value < 0.05


def test_path_integral_dim_override():
    spec = lookup("path_integral", dim=4)   # 4 interior points -> N=5
    assert spec.dims == 4
    assert spec.reference_value == pytest.approx(
        path_integral_lattice_exact(1.0, 4.0, 5, 0.0), rel=1e-12)
