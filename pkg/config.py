from pathlib import Path
from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    solver: str = "glucose4"
    solver_path: str | None = None
    seed: int = 0
    solver_timeout: float | None = None
    total_timeout: float | None = None
    size_bound: int = 4
    horizon: int = 8
    max_iterations: int = 10_000
    oracle_max_size: int = 3
    amo_encoding: Literal["pairwise", "seqcounter"] = "pairwise"
    debug: bool = False
    dump_dir: Path | None = None
    jobs: int = 1
    log_level: str = "INFO"
    host: str = "0.0.0.0"
    port: int = 8000
    allowed_origins: list[str] = ["*"]

    model_config = SettingsConfigDict(env_prefix="OCC_", env_file=".env")


settings = Settings()
