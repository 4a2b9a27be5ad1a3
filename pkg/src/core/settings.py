from __future__ import annotations

from pydantic_settings import BaseSettings, SettingsConfigDict

from src import consts


class Settings(BaseSettings):
    """Application settings read from ``DISPERSION_LAB_*`` environment variables or a ``.env`` file."""

    environment: str = "local"
    seed: int = consts.reproducibility.SEED
    log_level: str = "INFO"

    model_config = SettingsConfigDict(
        env_prefix="DISPERSION_LAB_",
        env_file=consts.directories.ROOT_DIR / ".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        extra="ignore",
    )


def current_settings() -> Settings:
    return Settings()
