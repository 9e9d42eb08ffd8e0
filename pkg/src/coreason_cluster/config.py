# Copyright (c) 2025 CoReason, Inc.
#
# This software is proprietary and dual-licensed.
# Licensed under the Prosperity Public License 3.0 (the "License").
# A copy of the license is available at https://prosperitylicense.com/versions/3.0.0
# For details, see the LICENSE file.
# Commercial use beyond a 30-day trial requires a separate license.
#
# Source Code: https://github.com/CoReason-AI/coreason_cluster

"""
Engine configuration.
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self


class EngineConfig(BaseModel):
    """Tunable limits shared by the explorer, group analyzer and formula verifier."""

    model_config = ConfigDict(frozen=True)

    max_terms: int = Field(default=20_000, ge=1, description="Term-count cap for a single cluster variable")
    cap: int = Field(default=1_000_000, ge=1, description="Exchange graph node cap")
    symbolic_max_rank: int = Field(default=6, ge=1, description="Largest rank explored with symbolic keys by default")
    trials: int = Field(default=100, ge=1, description="Random frozen rows drawn per formula check")
    rng_seed: int = Field(default=0, ge=0, description="Seed of the splittable trial generator")
    beta_min: int = Field(default=-9, description="Smallest frozen-row entry drawn in trials")
    beta_max: int = Field(default=9, description="Largest frozen-row entry drawn in trials")
    orbit_limit: int = Field(default=200, ge=1, description="Tau steps tried before an orbit is declared open")

    @model_validator(mode="after")
    def _check_beta_range(self) -> Self:
        if self.beta_min > self.beta_max:
            raise ValueError(f"beta_min ({self.beta_min}) exceeds beta_max ({self.beta_max})")
        return self
