"""Tests for toolkit error types."""

from __future__ import annotations

import pytest

from hsp_cli.services.hsp_errors import (
    BoundViolationError,
    CapabilityError,
    ConfigError,
    DomainError,
    HspError,
    InvariantError,
    RetryExhaustedError,
    TermExplosionError,
    UnsupportedPlanError,
)

pytestmark = pytest.mark.unit


class TestHierarchy:
    """Test the exception hierarchy."""

    @pytest.mark.parametrize(
        "cls", [DomainError, UnsupportedPlanError, ConfigError, InvariantError, CapabilityError, TermExplosionError]
    )
    def test_all_are_hsp_errors(self, cls):
        """Test every error derives from HspError."""
        assert issubclass(cls, HspError)

    def test_value_errors(self):
        """Test precondition and config errors are ValueErrors."""
        assert issubclass(DomainError, ValueError)
        assert issubclass(ConfigError, ValueError)
        assert issubclass(UnsupportedPlanError, DomainError)
        assert not issubclass(InvariantError, ValueError)


class TestAttributes:
    """Test structured error payloads."""

    def test_capability(self):
        """Test what, requested and limit."""
        error = CapabilityError("Dense matrix order", 8192, 4096)
        assert (error.what, error.requested, error.limit) == ("Dense matrix order", 8192, 4096)
        assert str(error) == "Dense matrix order too large: 8192 exceeds limit of 4096"

    def test_term_explosion(self):
        """Test the partial result rides along."""
        error = TermExplosionError(70_000, 65_536, partial={"steps": 3})
        assert isinstance(error, CapabilityError)
        assert error.partial == {"steps": 3}
        assert "EHK term count" in str(error)

    def test_bound_violation(self):
        """Test the observed value and bound."""
        error = BoundViolationError("gcd", 0.4, 0.5)
        assert (error.name, error.observed, error.bound) == ("gcd", 0.4, 0.5)
        assert str(error) == "Bound violated: gcd observed 0.4 against bound 0.5"

    def test_retry_exhausted(self):
        """Test the attempt count."""
        error = RetryExhaustedError("Order finding", 5)
        assert error.attempts == 5
        assert str(error) == "Order finding failed after 5 attempts"
