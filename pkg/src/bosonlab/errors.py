"""Error taxonomy shared across the package.

Three failure classes, kept distinct so callers (and the CLI) can map them
to exit codes: bad arguments vs. out-of-range math vs. work that is simply
too large to run exactly.
"""

from __future__ import annotations

__all__ = ["BosonLabError", "ContractViolation", "DomainError", "CapacityError"]


class BosonLabError(Exception):
    """Base class for all package-specific errors."""


class ContractViolation(BosonLabError, ValueError):
    """An argument violates a documented precondition (shape, dtype, range)."""


class DomainError(BosonLabError, ValueError):
    """Inputs are well-formed but outside the mathematical domain of the operation."""


class CapacityError(BosonLabError, RuntimeError):
    """The request is exact-computation-infeasible (exponential cost guard)."""
