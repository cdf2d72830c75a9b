"""Toolkit error types."""

from __future__ import annotations

from typing import Any


class HspError(Exception):
    """Base exception for toolkit errors."""


class DomainError(HspError, ValueError):
    """Raised when an operation's precondition does not hold."""


class UnsupportedPlanError(DomainError):
    """Raised when an odd-QFT plan is requested outside the auto-planned range (odd N >= 13, 0 < epsilon <= sqrt 2)."""


class ConfigError(HspError, ValueError):
    """Raised for malformed descriptors or sweep configs."""


class InvariantError(HspError):
    """Raised when a structural invariant checked at build time fails."""


class CapabilityError(HspError):
    """Raised when a request exceeds a desk-scale capability cap."""

    def __init__(self, what: str, requested: int, limit: int):
        self.what = what
        self.requested = requested
        self.limit = limit
        super().__init__(f"{what} too large: {requested} exceeds limit of {limit}")


class TermExplosionError(CapabilityError):
    """Raised when the EHK product-term count passes its cap."""

    def __init__(self, requested: int, limit: int, partial: Any = None):
        self.partial = partial
        super().__init__("EHK term count", requested, limit)


class BoundViolationError(HspError):
    """Raised when an asserted quantitative bound fails."""

    def __init__(self, name: str, observed: float, bound: float):
        self.name = name
        self.observed = observed
        self.bound = bound
        super().__init__(f"Bound violated: {name} observed {observed:.6g} against bound {bound:.6g}")


class RetryExhaustedError(HspError):
    """Raised when a randomized procedure fails on every allowed attempt."""

    def __init__(self, what: str, attempts: int):
        self.what = what
        self.attempts = attempts
        super().__init__(f"{what} failed after {attempts} attempts")
