"""Exception types shared across the toolkit."""

from __future__ import annotations


class VolcastError(Exception):
    """Base class for all toolkit errors."""


class CsvParseError(VolcastError):
    """A CSV row could not be parsed. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(VolcastError):
    """Input data violates a structural invariant (bad price, duplicate date, ...)."""


class InsufficientDataError(VolcastError):
    """The series is too short for the requested computation."""


class DegenerateSeriesError(VolcastError):
    """The series has zero dispersion where positive dispersion is required."""


class DateRangeError(VolcastError):
    """A date argument falls outside the series date range."""


class EstimationError(VolcastError):
    """Model estimation failed (e.g. non-stationary or non-invertible optimum)."""


class ConvergenceError(EstimationError):
    """The optimizer did not converge. ``best`` holds the best fit found so far."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class NumericError(VolcastError):
    """A recursion produced a non-finite or non-positive intermediate value."""


class AlignmentError(VolcastError):
    """Two dated series share no common dates."""
