# essence_kit/config.py
from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

BASE = Path(__file__).resolve().parent.parent


class Settings(BaseSettings):
    """Runtime knobs; every field can be set as ESSENCE_KIT_<FIELD> or in .env."""

    model_config = SettingsConfigDict(
        env_prefix="ESSENCE_KIT_", env_file=".env", extra="ignore"
    )

    log_dir: Path = Field(Path("~/EssenceKit/logs"), description="Rotating log directory")
    log_level: str = Field("INFO", pattern=r"^(DEBUG|INFO|WARNING|ERROR)$")
    node_budget: int = Field(2_000_000, ge=1, description="Cap-search node budget")
    threads: int = Field(1, ge=1, le=64)
    max_cap_arcs: int = Field(5, ge=1, description="Cap arcs per subdisk polygon")
    max_l_touches: int = Field(2, ge=0)
    seed: int = 0
    cors_origins: list[str] = Field(
        ["http://localhost:8000", "http://127.0.0.1:8000"],
        description="Browser origins allowed to call the report service",
    )
    fixtures_dir: Path = BASE / "data" / "fixtures"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
