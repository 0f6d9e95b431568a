"""Per-axis importance-sampling maps.

A map is a piecewise-linear change of variables from unit y-space onto the
integration box: each axis is cut into ``n_intervals`` intervals whose
widths adapt over iterations, concentrating samples where the weighted
integrand is large.  The Jacobian of the transform at y is the product over
axes of ``n_intervals * width(interval containing y_j)``.

Refinement works on accumulated per-interval weights: count-average,
neighbor smoothing, normalization, damping by the exponent ``alpha``, then
equal-share redistribution of interval boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, InvalidDomainError

# Entries below this are treated as exactly zero when damping (the damping
# expression takes log of the entry).
_DAMP_FLOOR = 1e-30


@dataclass(frozen=True)
class VegasMap:
    """Adaptive per-dimension grid realizing the importance-sampling transform.

    edges has shape (dims, n_intervals + 1); row j spans [a_j, b_j] with
    strictly increasing entries.
    """

    edges: np.ndarray

    @property
    def dims(self) -> int:
        return self.edges.shape[0]

    @property
    def n_intervals(self) -> int:
        return self.edges.shape[1] - 1

    @property
    def bounds(self) -> list[tuple[float, float]]:
        return [(float(e[0]), float(e[-1])) for e in self.edges]

    def widths(self) -> np.ndarray:
        return np.diff(self.edges, axis=1)


class MapWeights:
    """Per-interval accumulators feeding grid refinement.

    ``w[j, i]`` sums (J*f)^2 over samples that landed in interval i of
    dimension j this iteration; ``counts`` tracks how many did.
    """

    def __init__(self, dims: int, n_intervals: int):
        self.w = np.zeros((dims, n_intervals), dtype=np.float64)
        self.counts = np.zeros((dims, n_intervals), dtype=np.int64)

    def iadd(self, other: "MapWeights") -> "MapWeights":
        self.w += other.w
        self.counts += other.counts
        return self


def new_uniform(dims: int, n_intervals: int, bounds) -> VegasMap:
    """Uniformly spaced map: the affine transform lo + y*(hi - lo)."""
    if dims < 1:
        raise InvalidDomainError(f"dims must be >= 1, got {dims}")
    if n_intervals < 2:
        raise InvalidDomainError(f"n_intervals must be >= 2, got {n_intervals}")
    bounds = list(bounds)
    if len(bounds) != dims:
        raise InvalidDomainError(f"expected {dims} bounds, got {len(bounds)}")
    edges = np.empty((dims, n_intervals + 1), dtype=np.float64)
    for j, (lo, hi) in enumerate(bounds):
        lo = float(lo)
        hi = float(hi)
        if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
            raise InvalidDomainError(f"bad bounds for dimension {j}: ({lo}, {hi})")
        edges[j] = np.linspace(lo, hi, n_intervals + 1)
        edges[j, 0] = lo
        edges[j, -1] = hi
    return VegasMap(edges)


def transform(vmap: VegasMap, y):
    """Map points from unit y-space into the domain box.

    Parameters
    ----------
    y : array (d,) or (n, d), entries in [0, 1)

    Returns
    -------
    x : same shape as y, points inside the box
    jac : scalar or (n,), the positive transform Jacobian at y
    idx : int64 array, per-dimension interval indices
    """
    y = np.asarray(y, dtype=np.float64)
    single = y.ndim == 1
    y2 = y[None, :] if single else y
    if y2.shape[1] != vmap.dims:
        raise ContractViolationError(
            f"point dimension {y2.shape[1]} != map dims {vmap.dims}")
    if np.any(y2 < 0.0) or np.any(y2 >= 1.0):
        raise ContractViolationError("y outside [0, 1)")
    ng = vmap.n_intervals
    n = y2.shape[0]
    x = np.empty_like(y2)
    idx = np.empty((n, vmap.dims), dtype=np.int64)
    jac = np.ones(n, dtype=np.float64)
    ngf = float(ng)
    for j in range(vmap.dims):
        t = y2[:, j] * ngf
        iv = t.astype(np.int64)
        # t can round up to ng when y is the largest double below 1
        np.minimum(iv, ng - 1, out=iv)
        frac = t - iv
        e = vmap.edges[j]
        lo = e[iv]
        dx = e[iv + 1] - lo
        x[:, j] = lo + frac * dx
        jac *= ngf * dx
        idx[:, j] = iv
    if single:
        return x[0], float(jac[0]), idx[0]
    return x, jac, idx


def inverse_transform(vmap: VegasMap, x):
    """Recover y from x (inverse of the piecewise-linear map)."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x2 = x[None, :] if single else x
    ng = vmap.n_intervals
    y = np.empty_like(x2)
    for j in range(vmap.dims):
        e = vmap.edges[j]
        iv = np.searchsorted(e, x2[:, j], side="right") - 1
        np.clip(iv, 0, ng - 1, out=iv)
        y[:, j] = (iv + (x2[:, j] - e[iv]) / (e[iv + 1] - e[iv])) / ng
    return y[0] if single else y


def accumulate_map_weight(acc: MapWeights, idx, jf: float) -> MapWeights:
    """Record one weighted sample: accumulator gains (jf)^2, count gains 1."""
    idx = np.asarray(idx)
    w2 = float(jf) * float(jf)
    for j in range(acc.w.shape[0]):
        acc.w[j, idx[j]] += w2
        acc.counts[j, idx[j]] += 1
    return acc


def smooth_and_damp(acc: MapWeights, alpha: float) -> np.ndarray:
    """Turn raw accumulators into damped refinement weights.

    Per dimension: count-average each interval (empty intervals get 0),
    smooth with the (1,6,1)/8 kernel ((7,1)/8 at the boundaries), normalize
    to unit sum, then damp each entry d -> ((d-1)/ln d)**alpha with the
    continuous limit values at d=0 and d=1.  A dimension whose weights are
    all zero yields an all-zero row (the grid update skips it).
    """
    if alpha < 0:
        raise ContractViolationError(f"alpha must be >= 0, got {alpha}")
    dims, ng = acc.w.shape
    out = np.zeros((dims, ng), dtype=np.float64)
    for j in range(dims):
        d = np.zeros(ng, dtype=np.float64)
        hit = acc.counts[j] > 0
        d[hit] = acc.w[j, hit] / acc.counts[j, hit]
        if not d.any():
            continue
        sm = np.empty_like(d)
        sm[0] = (7.0 * d[0] + d[1]) / 8.0
        sm[-1] = (d[-2] + 7.0 * d[-1]) / 8.0
        sm[1:-1] = (d[:-2] + 6.0 * d[1:-1] + d[2:]) / 8.0
        total = sm.sum()
        if total <= 0.0:
            continue
        sm /= total
        out[j] = _damp(sm, alpha)
    return out


def _damp(d: np.ndarray, alpha: float) -> np.ndarray:
    res = np.zeros_like(d)
    one = np.abs(d - 1.0) < 1e-15
    pos = (d >= _DAMP_FLOOR) & ~one
    with np.errstate(divide="ignore", invalid="ignore"):
        base = (d[pos] - 1.0) / np.log(d[pos])
        res[pos] = base ** alpha
    res[one] = 1.0
    return res


def update_grid(vmap: VegasMap, damped: np.ndarray) -> VegasMap:
    """Move interval boundaries so each interval holds an equal weight share.

    Weight is taken as uniformly distributed within each old interval, so
    new edges are placed by linear interpolation.  Endpoints stay fixed;
    dimensions are independent.  A dimension with all-zero damped weights
    keeps its edges.
    """
    damped = np.asarray(damped, dtype=np.float64)
    if damped.shape != (vmap.dims, vmap.n_intervals):
        raise ContractViolationError(
            f"damped weights shape {damped.shape} != {(vmap.dims, vmap.n_intervals)}")
    if np.any(damped < 0):
        raise ContractViolationError("damped weights must be nonnegative")
    ng = vmap.n_intervals
    new_edges = vmap.edges.copy()
    for j in range(vmap.dims):
        w = damped[j]
        total = w.sum()
        if total <= 0.0:
            continue
        e = vmap.edges[j]
        cum = np.concatenate(([0.0], np.cumsum(w)))
        delta = total / ng
        goals = np.arange(1, ng, dtype=np.float64) * delta
        # interval containing each goal: first iv with cum[iv+1] >= goal
        iv = np.searchsorted(cum[1:], goals, side="left")
        frac = (goals - cum[iv]) / w[iv]
        new_edges[j, 1:-1] = e[iv] + frac * (e[iv + 1] - e[iv])
        if not np.all(np.diff(new_edges[j]) > 0.0):
            raise AssertionError(
                f"grid update lost strict monotonicity in dimension {j}")
    return VegasMap(new_edges)
