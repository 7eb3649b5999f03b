"""Exception types raised by the audit library.

The hierarchy separates three failure families so callers (and the CLI's
exit codes) can distinguish bad input from data that cannot support an
estimate from statistics that failed to stabilize under resampling.
"""

from __future__ import annotations


class AuditError(Exception):
    """Base class for all library-specific errors."""


class EmptyFitError(AuditError):
    """Weighted regression received no positive weight."""


class DegenerateClassError(AuditError):
    """A confusion table has no ground-truth positives or no negatives."""


class DegenerateRateError(AuditError):
    """An observed error rate of exactly 0 or 1 reached the SDT inversion."""


class UndefinedCostRatioError(AuditError):
    """An implied threshold of 0 or 1 has no finite positive cost ratio."""


class InsufficientDataError(AuditError):
    """Too few records in the estimation window.

    Parameters
    ----------
    message : str
    diagnostics : dict, optional
        Window diagnostics (threshold, halfwidth, record counts).
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class UnstableStatisticError(AuditError):
    """The bootstrapped statistic was undefined on too many replicates."""

    def __init__(self, message: str, failure_fraction: float):
        super().__init__(message)
        self.failure_fraction = float(failure_fraction)


class IngestError(AuditError):
    """Input file missing, malformed, or over the rejection cap."""


class AuditWarning(UserWarning):
    """Non-fatal anomalies (e.g. anti-correlated labels giving d' < 0)."""
