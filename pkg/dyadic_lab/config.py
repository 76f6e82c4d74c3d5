"""
Process Settings and Logging Setup
"""

import os
import logging
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()

APP_NAME = os.getenv("APP_NAME", "dyadic-lab")


class Settings(BaseSettings):
    """Environment-level knobs; experiment parameters live in the JSON config."""

    model_config = SettingsConfigDict(env_prefix="DYADIC_LAB_", extra="ignore")

    threads: int = Field(default=1, ge=1)
    log_level: str = os.getenv("LOG_LEVEL", "INFO")


@lru_cache()
def get_settings() -> Settings:
    """Get the cached settings instance."""
    return Settings()


logging.basicConfig(
    level=getattr(logging, os.getenv("DYADIC_LAB_LOG_LEVEL", os.getenv("LOG_LEVEL", "INFO")).upper(), logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=[logging.StreamHandler()],
)

logger = logging.getLogger(__name__)
logger.debug(f"Configuration loaded for {APP_NAME}")
