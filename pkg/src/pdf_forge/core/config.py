from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import List, Optional, Literal


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="PDF_FORGE_", env_file=".env", extra="ignore")

    app_name: str = "PDF Forge"
    debug: bool = False
    api_prefix: str = "/api/v1"

    # Logging settings
    log_level: str = "INFO"
    log_file: Optional[str] = None  # "./logs/pdf_forge.log"

    # Storage settings
    storage_backend: Literal["local"] = "local"
    artifacts_path: str = "./artifacts/"

    # Scoring calibration
    # An explicit artifact wins over the bundled table and the cached desk calibration
    calibration_path: Optional[str] = None
    # Desk calibrations stay in memory unless a cache directory is given
    calibration_cache_dir: Optional[str] = None
    calibration_seed: int = 20190101
    calibration_sizes: List[int] = [256, 512, 1024, 2048, 4096]
    calibration_trials: int = 10000

    # Quadrature: "linear" uses M = 200 + 0.005 N, "clamped" uses min(max(0.005 N, 200), 1500)
    grid_rule: Literal["linear", "clamped"] = "linear"

    default_seed: int = 1

    # CORS settings
    allowed_origins: List[str] = ["http://localhost:3000", "http://127.0.0.1:3000"]


settings = Settings()
