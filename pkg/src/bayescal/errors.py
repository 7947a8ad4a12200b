"""Semantic exceptions and warnings shared across the package."""

from __future__ import annotations


class BayescalError(Exception):
    """Base class for errors raised by this package."""


class DomainError(BayescalError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SpecValidationError(BayescalError, ValueError):
    """A design specification violates its invariants.

    Carries the full list of violations, each prefixed with the offending
    field path (e.g. ``rule.c: threshold must lie in (0,1)``).
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class CalibrationError(BayescalError, RuntimeError):
    """Calibration preconditions failed (e.g. non-monotone target metric)."""


class PrecisionWarning(UserWarning):
    """Numerical result may be less accurate than its contract promises."""
