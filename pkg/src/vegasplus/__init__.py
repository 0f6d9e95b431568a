"""Parallel adaptive Monte Carlo integration.

Adaptive importance sampling (per-axis piecewise-linear maps) composed with
adaptive stratified sampling (per-hypercube evaluation reallocation), with
deterministic counter-based randomness and thread-parallel fill.

Quick start::

    import numpy as np
    from vegasplus import integrate

    def f(x):                       # batched: (n, d) -> (n,)
        return np.cos(x).prod(axis=1)

    out = integrate(f, [(0, 1)] * 10, n_eval=100_000, seed=1, batched=True)
    print(out.mean, "+-", out.sigma)
"""

from .core import (
    IntegralOutcome,
    IntegratorConfig,
    IterationResult,
    PhaseTimes,
    combine_iterations,
    integrate,
)
from .errors import (
    ContractViolationError,
    IntegrationError,
    InvalidDomainError,
    NonFiniteIntegrandError,
    VegasError,
)
from .integrands import IntegrandSpec, UnknownIntegrandError, available, lookup

__version__ = "0.1.0"

__all__ = [
    "IntegralOutcome",
    "IntegratorConfig",
    "IterationResult",
    "PhaseTimes",
    "combine_iterations",
    "integrate",
    "IntegrandSpec",
    "UnknownIntegrandError",
    "available",
    "lookup",
    "VegasError",
    "InvalidDomainError",
    "ContractViolationError",
    "NonFiniteIntegrandError",
    "IntegrationError",
    "__version__",
]
