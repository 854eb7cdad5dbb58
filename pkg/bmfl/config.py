"""
Application configuration using Pydantic Settings.
"""
import logging

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Laboratory settings."""

    model_config = SettingsConfigDict(
        env_prefix="BMFL_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    # Application
    APP_NAME: str = "Bosonic Mean-Field Lab"
    APP_VERSION: str = "0.1.0"

    # Capacity
    DIM_CAP: int = Field(default=2_000_000, description="Largest symmetric-space dimension")
    GIBBS_DIM_CAP: int = Field(default=4096, description="Largest dimension for full spectra")

    # Eigensolver
    DENSE_EIGEN_THRESHOLD: int = 512
    EIGEN_MAX_ITERATIONS: int = 10_000
    EIGEN_RESIDUAL_TOL: float = 1e-9

    # Hartree minimization
    HARTREE_RESTARTS: int = 16
    HARTREE_MAX_ITERATIONS: int = 20_000
    HARTREE_TOLERANCE: float = 1e-9
    HARTREE_GRID_RESOLUTION: float = 1e-3

    # Work queue
    WORKERS: int = 1

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"

    @field_validator(
        "DIM_CAP",
        "GIBBS_DIM_CAP",
        "DENSE_EIGEN_THRESHOLD",
        "EIGEN_MAX_ITERATIONS",
        "HARTREE_RESTARTS",
        "HARTREE_MAX_ITERATIONS",
        "WORKERS",
    )
    @classmethod
    def validate_positive_int(cls, v):
        if v <= 0:
            raise ValueError(f"must be positive, got {v}")
        return v

    @field_validator("EIGEN_RESIDUAL_TOL", "HARTREE_TOLERANCE", "HARTREE_GRID_RESOLUTION")
    @classmethod
    def validate_positive_float(cls, v):
        if not v > 0:
            raise ValueError(f"must be positive, got {v}")
        return v

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def validate_log_level(cls, v):
        """Accept any standard logging level name, case-insensitive."""
        level = str(v).upper()
        if level not in logging.getLevelNamesMapping():
            raise ValueError(f"unknown log level '{v}'")
        return level


# Global settings instance
settings = Settings()
