"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class QuadratureError(RuntimeError):
    """Numerical integration did not reach the requested tolerance."""

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message if achieved is None else f"{message} (achieved error {achieved:.3e})")
        self.achieved = achieved


class InvariantViolation(RuntimeError):
    """A physical or structural invariant failed beyond its tolerance."""
