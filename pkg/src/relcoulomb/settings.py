"""
Runtime settings, read from the environment and an optional .env file
"""
import logging
from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)

CHECKS_FILE = Path(__file__).parent / "config" / "checks.yaml"


class Settings(BaseSettings):
    """Defaults for every command; CLI flags take precedence"""

    model_config = SettingsConfigDict(
        env_prefix="RELCOULOMB_",
        env_file=".env",
        extra="ignore",
    )

    log_level: str = "INFO"
    alpha_z: float = Field(default=0.2, ge=0.0)
    seed: int = 20050101
    workers: int = Field(default=1, ge=1)
    samples: int = Field(default=100_000, ge=1)
    abs_tol: float = Field(default=1e-12, gt=0.0)
    rel_tol: float = Field(default=1e-10, gt=0.0)
    max_subdivisions: int = Field(default=200, ge=1)
    output_dir: Path = Path("output")
    checks_file: Path = CHECKS_FILE


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Load settings once per process"""
    settings = Settings()
    logger.debug(f"Loaded settings: {settings.model_dump()}")
    return settings
