"""Benchmark and application integrands.

The registry holds the eight standard test functions (unit-cube domains),
an Asian call option payoff in inverse-transformed coordinates, and the
Euclidean harmonic-oscillator lattice path-integral weight.  Every entry
carries a reference value: a closed form where one exists, otherwise an
independent numerical oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit
from scipy.special import erf, erfc

from .errors import VegasError

CLAMP_EPS = 1e-12   # keeps inverse-erf arguments away from the singular endpoints


class UnknownIntegrandError(VegasError, LookupError):
    def __init__(self, name):
        super().__init__(
            f"unknown integrand {name!r}; available: {', '.join(sorted(_BUILDERS))}")


@dataclass(frozen=True)
class IntegrandSpec:
    name: str
    dims: int
    bounds: tuple[tuple[float, float], ...]
    evaluate_batch: Callable[[np.ndarray], np.ndarray]
    reference_value: float | None
    reference_method: str            # "closed form" or "oracle"
    note: str = ""

    def evaluate(self, point) -> float:
        p = np.asarray(point, dtype=np.float64)
        return float(self.evaluate_batch(p[None, :])[0])


# ---------------------------------------------------------------------------
# inverse error function: rational approximation for the normal quantile
# (Acklam) refined by one Newton step in erf space.

_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def _ndtri_approx(p: np.ndarray) -> np.ndarray:
    # standard normal quantile, ~1.2e-9 relative (central + tail rationals)
    out = np.empty_like(p)
    lo = p < _P_LOW
    hi = p > 1.0 - _P_LOW
    mid = ~(lo | hi)

    q = p[mid] - 0.5
    r = q * q
    out[mid] = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r
                + _A[5]) * q / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r
                                 + _B[4]) * r + 1.0)
    q = np.sqrt(-2.0 * np.log(p[lo]))
    out[lo] = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q
               + _C[5]) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    q = np.sqrt(-2.0 * np.log(1.0 - p[hi]))
    out[hi] = -(((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q
                + _C[5]) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    return out


_SQRT_PI_OVER_2 = math.sqrt(math.pi) / 2.0


def erfinv(y):
    """Inverse of erf on (-1, 1), accurate to a few ulp.

    Rational initial guess plus one Newton step.  The residual is formed as
    (1 - |y|) - erfc(z), which stays accurate in the tails where erf(z) - y
    would cancel; the sign is restored by symmetry.  Defined for |y| < 1
    (callers clamp their arguments away from the endpoints).
    """
    y = np.asarray(y, dtype=np.float64)
    scalar = y.ndim == 0
    y2 = np.atleast_1d(y)
    ya = np.abs(y2)
    z = _ndtri_approx((ya + 1.0) * 0.5) * (1.0 / math.sqrt(2.0))
    z += (erfc(z) - (1.0 - ya)) * _SQRT_PI_OVER_2 * np.exp(z * z)
    z = np.copysign(z, y2)
    return float(z[0]) if scalar else z


# ---------------------------------------------------------------------------
# test functions (unit-cube domains)

def _sinexp(x):
    return np.sin(x[:, 0]) + np.exp(x[:, 1])


def _linear(x):
    return x.sum(axis=1)


def _cosine(x):
    return np.cos(x).prod(axis=1)


def _exponential(x):
    return np.exp((x * x).sum(axis=1))


def _roos_arnold(x):
    return np.abs(4.0 * x - 2.0).prod(axis=1)


def _morokoff(x):
    d = x.shape[1]
    return (1.0 + 1.0 / d) ** d * (x ** (1.0 / d)).prod(axis=1)


GAUSSIAN_MU = 0.5
GAUSSIAN_SIGMA = 0.01


def _gaussian(x):
    d = x.shape[1]
    norm = (2.0 * math.pi * GAUSSIAN_SIGMA ** 2) ** (-d / 2.0)
    r2 = ((x - GAUSSIAN_MU) ** 2).sum(axis=1)
    return norm * np.exp(-r2 / (2.0 * GAUSSIAN_SIGMA ** 2))


RIDGE_N = 1000
_RIDGE_CENTERS = np.arange(RIDGE_N) / (RIDGE_N - 1.0)
_RIDGE_COEF = 10000.0 / (math.pi ** 2 * RIDGE_N)

# The sum over centers factorizes exactly:
#   100 sum_j (x_j - c)^2 = 100 (s2 - s1^2/4) + 400 (c - s1/4)^2   (d = 4)
# so only centers within |c - s1/4| <= sqrt(46/400) contribute above double
# precision (dropped terms are < e^-46 of the leading one, and the nearest
# center is always within half a spacing of s1/4 in [0, 1]).
_RIDGE_WINDOW = math.sqrt(46.0 / 400.0)


@njit(cache=True, nogil=True)
def _ridge_kernel(s1, s2, out):
    n_cent = RIDGE_N
    spacing = n_cent - 1.0
    for p in range(s1.shape[0]):
        mu = 0.25 * s1[p]
        q0 = s2[p] - mu * s1[p]
        lo = int(math.ceil((mu - _RIDGE_WINDOW) * spacing))
        hi = int(math.floor((mu + _RIDGE_WINDOW) * spacing))
        if lo < 0:
            lo = 0
        if hi > n_cent - 1:
            hi = n_cent - 1
        acc = 0.0
        for i in range(lo, hi + 1):
            dc = i / spacing - mu
            acc += math.exp(-400.0 * dc * dc)
        out[p] = _RIDGE_COEF * math.exp(-100.0 * q0) * acc


def _ridge(x):
    # coordinate sums run in sorted order so a coordinate permutation gives
    # bitwise-identical values (the function is symmetric)
    xs = np.sort(x, axis=1)
    s1 = np.ascontiguousarray(xs.sum(axis=1))
    s2 = np.ascontiguousarray((xs * xs).sum(axis=1))
    out = np.empty(x.shape[0])
    _ridge_kernel(s1, s2, out)
    return out


def _ridge_reference(dims: int) -> float:
    # each term factorizes into per-axis Gaussian integrals over [0, 1]:
    # integral of exp(-100 (t - c)^2) dt = (sqrt(pi)/20) (erf(10(1-c)) + erf(10c))
    c = _RIDGE_CENTERS
    axis = _SQRT_PI_OVER_2 / 10.0 * (erf(10.0 * (1.0 - c)) + erf(10.0 * c))
    return float(_RIDGE_COEF * np.sum(axis ** dims))


# ---------------------------------------------------------------------------
# Asian call option

ASIAN_DEFAULTS = dict(s0=100.0, strike=100.0, rate=0.05, sigma=0.2,
                      maturity=1.0, n_averages=16)


def asian_option_batch(x, s0, strike, rate, sigma, maturity):
    """Discounted Asian call payoff on inverse-transformed uniforms.

    The average price is s0 * exp((r - sigma^2/2) T + sigma sqrt(T) * sum_i
    sqrt(2) erfinv(2 x_i - 1)); coordinates are clamped to
    [CLAMP_EPS, 1 - CLAMP_EPS] before inversion.
    """
    xc = np.clip(x, CLAMP_EPS, 1.0 - CLAMP_EPS)
    z = erfinv(2.0 * xc - 1.0).sum(axis=1) * math.sqrt(2.0)
    drift = (rate - 0.5 * sigma * sigma) * maturity
    s_avg = s0 * np.exp(drift + sigma * math.sqrt(maturity) * z)
    return math.exp(-rate * maturity) * np.maximum(s_avg - strike, 0.0)


def asian_option_reference(s0, strike, rate, sigma, maturity, n_averages):
    """Closed-form price of the integral: the exponent is lognormal with
    effective volatility sigma * sqrt(n * T), so the value is a
    Black-Scholes-type expectation."""
    m = (rate - 0.5 * sigma * sigma) * maturity
    s = sigma * math.sqrt(maturity * n_averages)
    if strike <= 0.0:
        return math.exp(-rate * maturity) * (
            s0 * math.exp(m + 0.5 * s * s) - strike)
    d2 = (m + math.log(s0 / strike)) / s
    d1 = d2 + s
    phi = lambda t: 0.5 * (1.0 + math.erf(t / math.sqrt(2.0)))
    return math.exp(-rate * maturity) * (
        s0 * math.exp(m + 0.5 * s * s) * phi(d1) - strike * phi(d2))


# ---------------------------------------------------------------------------
# harmonic-oscillator lattice path integral

PATH_DEFAULTS = dict(mass=1.0, total_time=4.0, n_slices=8, x_end=0.0)
PATH_BOX_HALF_WIDTH = 5.0    # covers >10 sigma of the m=omega=1 ground state


def path_integral_batch(x, mass, total_time, n_slices, x_end):
    """A * exp(-S_lat) over the interior points of the discretized path.

    S_lat sums m/(2a) (x_{j+1}-x_j)^2 + a V(x_j) over j = 0..N-1 with
    V(x) = x^2/2, fixed endpoints x_0 = x_N = x_end, a = T/N, and
    A = (m / (2 pi a))^{N/2}.
    """
    n_pts = x.shape[0]
    if x.shape[1] != n_slices - 1:
        raise ValueError(
            f"expected {n_slices - 1} interior points, got {x.shape[1]}")
    a = total_time / n_slices
    full = np.empty((n_pts, n_slices + 1))
    full[:, 0] = x_end
    full[:, -1] = x_end
    full[:, 1:-1] = x
    kinetic = (mass / (2.0 * a)) * (np.diff(full, axis=1) ** 2).sum(axis=1)
    potential = 0.5 * a * (full[:, :n_slices] ** 2).sum(axis=1)
    amp = (mass / (2.0 * math.pi * a)) ** (n_slices / 2.0)
    return amp * np.exp(-(kinetic + potential))


def path_integral_lattice_exact(mass, total_time, n_slices, x_end):
    """Exact value of the lattice integral (the action is quadratic in the
    interior points, so the Gaussian integral has a determinant form).

    Independent oracle for tests; distinct from the continuum propagator by
    the O(a^2) discretization error.
    """
    n_int = n_slices - 1
    a = total_time / n_slices
    amp = (mass / (2.0 * math.pi * a)) ** (n_slices / 2.0)
    const = mass / a * x_end ** 2 + 0.5 * a * x_end ** 2
    if n_int == 0:
        return amp * math.exp(-const)
    h = np.zeros((n_int, n_int))
    np.fill_diagonal(h, 2.0 * mass / a + a)
    ii = np.arange(n_int - 1)
    h[ii, ii + 1] = -mass / a
    h[ii + 1, ii] = -mass / a
    b = np.zeros(n_int)
    b[0] -= mass / a * x_end
    b[-1] -= mass / a * x_end
    # S = 0.5 x^T H x + b.x + const  ->  integral = e^{-S_min} (2pi)^{k/2}/sqrt(det H)
    sol = np.linalg.solve(h, b)
    s_min = const - 0.5 * float(b @ sol)
    sign, logdet = np.linalg.slogdet(h)
    assert sign > 0
    return float(amp * math.exp(-s_min)
                 * (2.0 * math.pi) ** (n_int / 2.0) * math.exp(-0.5 * logdet))


def oscillator_propagator(omega, total_time, x_end, mass=1.0):
    """Continuum Euclidean propagator <x|e^{-HT}|x> of the oscillator."""
    wt = omega * total_time
    return math.sqrt(mass * omega / (2.0 * math.pi * math.sinh(wt))) * math.exp(
        -mass * omega * x_end ** 2 * math.tanh(wt / 2.0))


# ---------------------------------------------------------------------------
# registry

def _unit_box(d):
    return tuple((0.0, 1.0) for _ in range(d))


def _spec_sinexp():
    return IntegrandSpec(
        "sinexp", 2, _unit_box(2), _sinexp,
        reference_value=math.e - math.cos(1.0),
        reference_method="closed form")


def _spec_linear():
    return IntegrandSpec(
        "linear", 10, _unit_box(10), _linear,
        reference_value=5.0, reference_method="closed form",
        note="d/2")


def _spec_cosine():
    return IntegrandSpec(
        "cosine", 10, _unit_box(10), _cosine,
        reference_value=math.sin(1.0) ** 10,
        reference_method="closed form", note="sin(1)^d")


def _spec_exponential():
    from scipy.integrate import quad
    axis, _ = quad(lambda t: math.exp(t * t), 0.0, 1.0, epsabs=1e-12, epsrel=1e-12)
    return IntegrandSpec(
        "exponential", 10, _unit_box(10), _exponential,
        reference_value=axis ** 10,
        reference_method="oracle", note="1D quadrature, raised to d")


def _spec_roos_arnold():
    return IntegrandSpec(
        "roos_arnold", 10, _unit_box(10), _roos_arnold,
        reference_value=1.0, reference_method="closed form")


def _spec_morokoff():
    return IntegrandSpec(
        "morokoff", 8, _unit_box(8), _morokoff,
        reference_value=1.0, reference_method="closed form",
        note="(1+1/d)^d (d/(d+1))^d = 1")


def _spec_gaussian():
    return IntegrandSpec(
        "gaussian", 4, _unit_box(4), _gaussian,
        reference_value=1.0, reference_method="closed form",
        note="erf(0.5/(sigma sqrt(2)))^d = 1 to machine precision")


def _spec_ridge():
    return IntegrandSpec(
        "ridge", 4, _unit_box(4), _ridge,
        reference_value=_ridge_reference(4),
        reference_method="closed form",
        note="sum of per-axis erf products")


def _spec_asian_option(dim=None, **params):
    p = dict(ASIAN_DEFAULTS)
    if dim is not None:
        p["n_averages"] = int(dim)
    p.update(params)
    n = int(p.pop("n_averages"))
    ref = asian_option_reference(n_averages=n, **p)

    def batch(x, _p=p):
        return asian_option_batch(x, **_p)

    return IntegrandSpec(
        "asian_option", n, _unit_box(n), batch,
        reference_value=ref, reference_method="closed form",
        note=f"params {dict(p, n_averages=n)}")


def _spec_path_integral(dim=None, **params):
    p = dict(PATH_DEFAULTS)
    if dim is not None:
        p["n_slices"] = int(dim) + 1
    p.update(params)
    n_slices = int(p["n_slices"])
    dims = n_slices - 1
    half = float(p.pop("box_half_width", PATH_BOX_HALF_WIDTH))
    ref = path_integral_lattice_exact(p["mass"], p["total_time"],
                                      n_slices, p["x_end"])

    def batch(x, _p=p):
        return path_integral_batch(x, **_p)

    return IntegrandSpec(
        "path_integral", dims,
        tuple((-half, half) for _ in range(dims)), batch,
        reference_value=ref, reference_method="oracle",
        note=f"lattice Gaussian determinant; params {p}")


_BUILDERS = {
    "sinexp": _spec_sinexp,
    "linear": _spec_linear,
    "cosine": _spec_cosine,
    "exponential": _spec_exponential,
    "roos_arnold": _spec_roos_arnold,
    "morokoff": _spec_morokoff,
    "gaussian": _spec_gaussian,
    "ridge": _spec_ridge,
    "asian_option": _spec_asian_option,
    "path_integral": _spec_path_integral,
}

#: the Table-of-eight benchmark functions, in their conventional order
BENCHMARK_NAMES = ("sinexp", "linear", "cosine", "exponential",
                   "roos_arnold", "morokoff", "gaussian", "ridge")


def available() -> list[str]:
    return sorted(_BUILDERS)


def lookup(name: str, dim: int | None = None, **params) -> IntegrandSpec:
    """Fetch a registered integrand.

    dim and extra params apply only to the variable-size entries
    (asian_option: number of averaging dates; path_integral: number of
    interior lattice points).
    """
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownIntegrandError(name) from None
    if name in ("asian_option", "path_integral"):
        return builder(dim=dim, **params)
    if dim is not None or params:
        raise ValueError(f"integrand {name!r} has fixed dimension and parameters")
    return builder()
