"""
Run Manifest Models

Validated description of one command-line run and its per-campaign failures.
"""

from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from app.models.fit import ModelKind
from app.models.recommendation import Strategy


class Command(str, Enum):
    FIT = "fit"
    RECOMMEND = "recommend"
    COMPARE = "compare"
    SIMULATE = "simulate"


class RunManifest(BaseModel):
    """
    Everything a command needs, checked before any work starts.

    `simulate` needs no input file; every other command does.
    """
    command: Command
    input_path: Optional[Path] = None
    output_path: Path
    config_path: Optional[Path] = None
    budget: Optional[float] = None
    strategy: Strategy = Strategy.INFLECTION
    models: List[ModelKind] = Field(default_factory=lambda: [ModelKind.SIGMOID])
    seed: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check_command(self) -> "RunManifest":
        if self.command is not Command.SIMULATE and not self.input_path:
            raise ValueError(f"--input is required for {self.command.value}")
        if not str(self.output_path).strip():
            raise ValueError("--output must not be empty")
        if self.command is Command.RECOMMEND:
            if self.budget is None:
                raise ValueError("--budget is required for recommend")
            if self.budget <= 0:
                raise ValueError(f"--budget must be > 0, got {self.budget}")
        elif self.budget is not None:
            raise ValueError(f"--budget only applies to recommend, not {self.command.value}")
        return self


class CampaignError(BaseModel):
    """A per-campaign failure reported in a command's `errors` array."""
    campaign_id: str
    error: str = Field(..., description="Error class name")
    message: str
