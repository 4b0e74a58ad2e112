"""Custom exceptions and warnings for kdsim."""

from __future__ import annotations


class KdsimError(Exception):
    """Base exception for all kdsim errors."""


class ConfigError(KdsimError, ValueError):
    """Raised when a configuration is invalid, incomplete or has unknown keys."""


class NonFiniteResultError(ConfigError):
    """Raised when a derived quantity overflows or underflows."""


class GridSupportError(KdsimError):
    """Raised when a momentum grid cannot hold or resolve a wavepacket."""


class FockTruncationError(KdsimError):
    """Raised when the cavity Fock truncation is breached during propagation."""


class PreconditionError(KdsimError, ValueError):
    """Raised when an operation is called outside its stated preconditions."""


class ToleranceError(KdsimError):
    """Raised when a verification identity misses its tolerance."""


class ReportWriteError(KdsimError):
    """Raised when a report file cannot be written."""


class RegimeWarning(UserWarning):
    """Emitted when an approximation is used near or outside its validity regime."""
