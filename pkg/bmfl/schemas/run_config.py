"""
Run configuration schema - one validated bundle per CLI invocation.
"""
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

Subcommand = Literal["ground", "sweep", "hartree", "curve", "localize", "definetti", "gibbs", "byk", "verify"]


class RunConfig(BaseModel):
    """Validated command-line arguments."""

    model_config = ConfigDict(extra="ignore")

    subcommand: Subcommand
    model: Optional[Path] = Field(None, description="Model file")
    measure: Optional[Path] = Field(None, description="Measure file")
    n: Optional[int] = Field(None, ge=0, description="Particle count")
    n_schedule: list[int] = Field(default_factory=list, description="Increasing particle counts")
    k: list[int] = Field(default_factory=lambda: [1, 2], description="Reduced density matrix orders")
    mass: float = Field(default=1.0, gt=0.0, le=1.0)
    restarts: Optional[int] = Field(None, gt=0)
    grid: int = Field(default=20, gt=0, description="Interior points of the mass grid")
    lambda_grid: int = Field(default=20, gt=0)
    beta: list[float] = Field(default_factory=lambda: [1.0])
    sites: list[int] = Field(default_factory=list, description="1-based localization sites")
    f: str = Field(default="lambda")
    match_n: Optional[int] = Field(None, ge=0)
    seed: int = Field(default=0, ge=0)
    output: Optional[Path] = None
    format: Literal["csv", "json"] = "csv"
    dim_cap: Optional[int] = Field(None, gt=0)
    max_iterations: Optional[int] = Field(None, gt=0)

    @field_validator("n_schedule")
    @classmethod
    def validate_increasing(cls, v):
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("schedule must be strictly increasing")
        if any(n < 1 for n in v):
            raise ValueError("schedule entries must be positive")
        return v

    @field_validator("beta")
    @classmethod
    def validate_beta(cls, v):
        if any(b <= 0 for b in v):
            raise ValueError("inverse temperatures must be positive")
        return v

    @field_validator("sites")
    @classmethod
    def validate_sites(cls, v):
        if any(s < 1 for s in v):
            raise ValueError("sites are 1-based")
        return v

    @property
    def schedule_key(self) -> str:
        if self.n_schedule:
            return ",".join(str(n) for n in self.n_schedule)
        return "" if self.n is None else str(self.n)
