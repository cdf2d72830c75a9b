"""Report models shared by the bound checks, the CLI and the sweep driver."""

from __future__ import annotations

import math
from collections.abc import Iterable
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from hsp_cli import __version__
from hsp_cli.services.hsp_errors import BoundViolationError

# Monte-Carlo slack, in standard errors
SIGMA_SLACK = 3.0


class TrialReport(BaseModel):
    """Outcome of a Monte-Carlo check against an analytic probability bound.

    ``kind`` says which side the bound sits on: ``"upper"`` when the empirical
    probability must stay below it (Chernoff failure rate), ``"lower"`` when it
    must stay above (gcd and generation success).
    """

    model_config = ConfigDict(frozen=True)

    name: str
    trials: int = Field(ge=0)
    successes: int = Field(ge=0)
    bound: float
    kind: str = Field(default="lower", pattern="^(lower|upper)$")
    seed: int | None = None
    params: dict[str, Any] = Field(default_factory=dict)
    exact: float | None = None

    @model_validator(mode="after")
    def _successes_within_trials(self) -> TrialReport:
        if self.successes > self.trials:
            raise ValueError(f"successes ({self.successes}) exceed trials ({self.trials})")
        return self

    @computed_field  # type: ignore[prop-decorator]
    @property
    def empirical(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @computed_field  # type: ignore[prop-decorator]
    @property
    def sigma(self) -> float:
        if not self.trials:
            return 0.0
        p = self.empirical
        return math.sqrt(p * (1 - p) / self.trials)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def margin(self) -> float:
        """Signed distance to the bound; positive means the bound holds outright."""
        if self.kind == "upper":
            return self.bound - self.empirical
        return self.empirical - self.bound

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passes(self) -> bool:
        # sigma is zero at p = 0 or 1, so one binomial step of slack is kept as a floor
        slack = max(SIGMA_SLACK * self.sigma, 1 / self.trials if self.trials else 0.0)
        return self.margin >= -slack

    @classmethod
    def from_outcomes(cls, name: str, outcomes: Iterable[bool | None], bound: float, **fields: Any) -> TrialReport:
        """Tally per-run success flags; runs with no known answer (None) are left out."""
        decided = [bool(o) for o in outcomes if o is not None]
        return cls(name=name, trials=len(decided), successes=sum(decided), bound=bound, **fields)

    def verify(self) -> None:
        if not self.passes:
            raise BoundViolationError(self.name, self.empirical, self.bound)


class ExperimentConfig(BaseModel):
    """One experiment: a target operation, its parameters and where the report goes."""

    model_config = ConfigDict(extra="forbid")

    experiment: str = Field(min_length=1)
    params: dict[str, int | float | str | None] = Field(default_factory=dict)
    seed: int | None = None
    output: Path | None = None
    repetitions: int = Field(default=1, ge=1)


class RunReport(BaseModel):
    """A config echo, the per-repetition results and their aggregate."""

    config: ExperimentConfig
    results: list[dict[str, Any]] = Field(default_factory=list)
    aggregate: dict[str, Any] = Field(default_factory=dict)
    version: str = __version__
    wall_clock: float = Field(default=0.0, exclude=True)

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)
