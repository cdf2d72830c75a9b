"""Simulation and verification engine for hsp-cli."""

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
from hsp_cli.services.logfire_service import configure_logfire
from hsp_cli.services.models import ExperimentConfig, RunReport, TrialReport

__all__ = [
    "BoundViolationError",
    "CapabilityError",
    "ConfigError",
    "configure_logfire",
    "DomainError",
    "ExperimentConfig",
    "HspError",
    "InvariantError",
    "RetryExhaustedError",
    "RunReport",
    "TermExplosionError",
    "TrialReport",
    "UnsupportedPlanError",
]
