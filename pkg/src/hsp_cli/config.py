"""Type-safe toolkit configuration using pydantic-settings."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Annotated

from pydantic import AfterValidator, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)

MIN_MEANINGFUL_TRIALS = 1000


def warn_if_loose_tolerance(value: float) -> float:
    """Warn if a numeric tolerance is looser than the checks assume.

    Args:
        value: The tolerance to validate

    Returns:
        The validated tolerance
    """
    if value <= 0:
        raise ValueError(f"Tolerance must be positive, got {value}")
    if value > 1e-6:
        logger.warning(f"Tolerance {value} is loose; bound checks may pass vacuously.")
    return value


# Type alias for validated tolerances
Tolerance = Annotated[float, AfterValidator(warn_if_loose_tolerance)]


class HspSettings(BaseSettings):
    """Toolkit configuration with automatic validation from environment variables and .env file."""

    model_config = SettingsConfigDict(
        env_prefix="HSP_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",  # Ignore unknown env vars
    )

    # ==========================================================================
    # Reports
    # ==========================================================================
    output_dir: Path = Field(
        default=Path("reports"),
        description="Default directory for JSON and CSV reports",
    )

    default_trials: int = Field(
        default=100_000,
        ge=1,
        description="Monte-Carlo trial count used by the bound checks",
    )

    # ==========================================================================
    # Numerics
    # ==========================================================================
    norm_tolerance: Tolerance = Field(
        default=1e-9,
        description="Tolerance for state normalization and norm preservation",
    )

    unitary_tolerance: Tolerance = Field(
        default=1e-12,
        description="Tolerance for unitarity of explicit gate matrices",
    )

    # ==========================================================================
    # Capability caps
    # ==========================================================================
    max_dense_order: int = Field(
        default=4096,
        ge=1,
        description="Largest group order for dense F_G, translation and phase operators",
    )

    max_diagnostic_amplitudes: int = Field(
        default=2**24,
        ge=1,
        description="Largest N*M for the odd-QFT diagnostic vectors",
    )

    max_ehk_terms: int = Field(
        default=2**16,
        ge=1,
        description="Largest product-term count in the EHK measurement cascade",
    )

    max_brute_force_vertices: int = Field(
        default=9,
        ge=1,
        description="Largest graph handled by permutation-enumeration isomorphism",
    )

    max_perm_oracle_vertices: int = Field(
        default=6,
        ge=1,
        description="Largest graph for the full-table S_n coset oracle",
    )

    @field_validator("default_trials")
    @classmethod
    def warn_few_trials(cls, v: int) -> int:
        """Warn if the trial count is too small for 3-sigma slack to mean anything."""
        if v < MIN_MEANINGFUL_TRIALS:
            logger.warning(f"HSP_DEFAULT_TRIALS={v} is below {MIN_MEANINGFUL_TRIALS}; Monte-Carlo margins are noisy")
        return v


# Global settings instance - loaded once at import time
settings = HspSettings()
