"""Application configuration using pydantic-settings."""

from enum import Enum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from flowwidth.app.constants import AnalysisDefaults


class Settings(BaseSettings):
    """Process settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="FLOWWIDTH_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    # Application
    environment: str = "development"
    log_level: str = "WARNING"


class OutputFormat(str, Enum):
    TEXT = "text"
    RECORDS = "records"


class AnalysisConfig(BaseModel):
    """Options of a single analysis run, assembled from command-line flags."""

    model_config = ConfigDict(frozen=True)

    input_path: Path | None = Field(None, description="File being analyzed")
    command: str = Field("analyze", description="Subcommand that owns this run")
    horizon: int = Field(AnalysisDefaults.HORIZON, ge=0, description="Horizon k")
    n_max: int = Field(AnalysisDefaults.N_MAX, ge=0, description="Largest length in width tables")
    strategy_budget: int = Field(
        AnalysisDefaults.STRATEGY_BUDGET, gt=0, description="Strategies enumerated per side"
    )
    state_budget: int = Field(
        AnalysisDefaults.STATE_BUDGET, gt=0, description="Subset states during determinization"
    )
    time_budget: float = Field(
        AnalysisDefaults.TIME_BUDGET_SECONDS, gt=0, description="Seconds for fit-gate widths"
    )
    fit_max_length: int = Field(
        AnalysisDefaults.FIT_MAX_LENGTH,
        ge=AnalysisDefaults.FIT_MIN_LENGTH,
        description="Longest length evaluated by the fit gate",
    )
    enumeration_cap: int = Field(
        AnalysisDefaults.ENUMERATION_CAP, gt=0, description="Words enumerated by brute force"
    )
    workers: int = Field(AnalysisDefaults.WORKERS, ge=1, description="Worker threads")
    output_format: OutputFormat = OutputFormat.TEXT
    seed: int = AnalysisDefaults.SEED


# Global settings instance
settings = Settings()
