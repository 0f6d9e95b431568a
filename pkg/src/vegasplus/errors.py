"""Exception types shared across the package."""

from __future__ import annotations


class VegasError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDomainError(VegasError, ValueError):
    """Integration bounds are inverted, non-finite, or otherwise unusable."""


class ContractViolationError(VegasError, ValueError):
    """An argument violated a documented precondition (e.g. y outside [0,1))."""


class NonFiniteIntegrandError(VegasError):
    """The integrand returned a non-finite value.

    Carries the offending point so the caller can debug the integrand.
    """

    def __init__(self, point, value, run_index=None):
        self.point = point
        self.value = value
        self.run_index = run_index
        where = f" (run {run_index})" if run_index is not None else ""
        super().__init__(
            f"integrand returned non-finite value {value!r} at point "
            f"{list(point)}{where}"
        )


class IntegrationError(VegasError):
    """Integration could not produce a result (e.g. no included iterations,
    or conflicting exact estimates during combination)."""
