"""
Configuration module for lambdagent.
Handles environment variables and runtime defaults.
"""

from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime settings loaded from LAMBDAGENT_* environment variables or a .env file."""

    model_config = SettingsConfigDict(
        env_prefix="LAMBDAGENT_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # External oracle (OpenAI-compatible endpoint or Azure OpenAI deployment)
    oracle_endpoint: Optional[str] = None
    oracle_api_key: Optional[str] = None
    oracle_api_version: str = "2024-02-01"
    oracle_deployment_name: Optional[str] = None
    oracle_timeout: float = Field(default=30.0, description="Seconds per oracle request")

    # Compiler defaults
    default_model: str = "gpt-4o-mini"
    default_max_steps: int = Field(default=10, ge=0, description="Bound used when a loop omits maxSteps")

    # Evaluation
    default_seed: int = 0
    summary_max_chars: int = Field(default=512, ge=1)

    # Batch lint
    lint_workers: int = Field(default=4, ge=1)

    log_level: str = "WARNING"

    @field_validator("default_max_steps", "default_seed", "summary_max_chars", "lint_workers", mode="before")
    @classmethod
    def parse_int(cls, v):
        """Parse integers, handling comments in the value."""
        if isinstance(v, str):
            v = v.split("#")[0].strip()
            return int(v)
        return v

    @field_validator("oracle_timeout", mode="before")
    @classmethod
    def parse_timeout(cls, v):
        if isinstance(v, str):
            return float(v.split("#")[0].strip())
        return v

    @field_validator("log_level", mode="before")
    @classmethod
    def parse_log_level(cls, v):
        """Normalize log level names; accept the common aliases."""
        if isinstance(v, str):
            v = v.split("#")[0].strip().upper()
            if v in ("WARN",):
                return "WARNING"
            if v in ("TRUE", "1", "YES", "ON"):
                return "DEBUG"
        return v

    @property
    def oracle_configured(self) -> bool:
        return bool(self.oracle_endpoint and self.oracle_api_key)


# Global settings instance
settings = Settings()
