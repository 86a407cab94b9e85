"""
Bid Curve Configuration

Loads settings from the environment, a .env file and an optional TOML file.
"""

from functools import lru_cache
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Type, Union

from pydantic import BaseModel, Field
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    TomlConfigSettingsSource,
)

from app.errors import RunIoError
from app.models.fit import FitConfig, ModelKind
from app.models.market import MarketConfig
from app.models.recommendation import Strategy


class RecommendSettings(BaseModel):
    """Budget search settings."""
    strategy: Strategy = Field(default=Strategy.INFLECTION)
    cost_step: float = Field(default=0.001, gt=0, description="Cost lattice step")
    budget_rtol: float = Field(default=1e-3, gt=0, description="Relative tolerance of 'spend ~ budget'")


class CompareSettings(BaseModel):
    """Model comparison harness settings."""
    models: List[ModelKind] = Field(default_factory=lambda: list(ModelKind))
    holdout: Literal["current", "all"] = Field(default="current")
    min_points: int = Field(default=5, ge=3)


class Settings(BaseSettings):
    """Engine settings loaded from environment variables and the config file."""

    # Config file path (BIDCURVE_CONFIG)
    config: Optional[Path] = Field(default=None)

    # Sections
    fit: FitConfig = Field(default_factory=FitConfig)
    simgen: MarketConfig = Field(default_factory=MarketConfig)
    recommend: RecommendSettings = Field(default_factory=RecommendSettings)
    compare: CompareSettings = Field(default_factory=CompareSettings)

    # Runs
    n_campaigns: int = Field(default=3, ge=1, description="Campaigns emitted by simulate")
    workers: int = Field(default=1, ge=1, description="Campaigns processed concurrently")
    money_decimals: int = Field(default=3, ge=0)

    # Logging
    log_level: str = Field(default="INFO")

    model_config = SettingsConfigDict(
        env_prefix="BIDCURVE_",
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        return (
            init_settings,
            env_settings,
            dotenv_settings,
            TomlConfigSettingsSource(settings_cls),
        )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


def load_settings(config_path: Optional[Union[str, Path]] = None) -> Settings:
    """
    Build settings bound to a config file.

    The explicit path wins; otherwise BIDCURVE_CONFIG (or `config` in .env)
    names the file. Without either, only environment and defaults apply.
    """
    path = Path(config_path) if config_path else Settings().config
    if path is None:
        return Settings()
    if not path.is_file():
        raise RunIoError(f"config file not found: {path}")

    class FileSettings(Settings):
        model_config = SettingsConfigDict(toml_file=path)

    return FileSettings(config=path)
