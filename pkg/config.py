import os

from dotenv import load_dotenv
from pydantic_settings import BaseSettings

load_dotenv(override=False)
class Settings(BaseSettings):
    # Parallelism
    RANCHER_THREADS: int = os.cpu_count() or 1
    RANCHER_SEED: int = 0

    # Sampling
    RANCHER_CHECKPOINTS_PER_DECADE: int = 25
    RANCHER_FULL_RECORD_LIMIT: int = 10_000

    # Geometry
    RANCHER_EPS_GEOM: float = 1e-12

    # Investor
    RANCHER_BLOWUP_LIMIT: float = 1e300

    # Drift survey
    RANCHER_DRIFT_C: float = 1.0 / 6.0
    RANCHER_DRIFT_DSTAR: float = 30.0
    RANCHER_DRIFT_EPSILON: float = 0.1
    RANCHER_DRIFT_M: int = 64
    RANCHER_DRIFT_MIN_BIN: int = 10_000
    RANCHER_DRIFT_BURN_IN: int = 1_000

    # Logging
    RANCHER_LOG_LEVEL: str = "INFO"
    RANCHER_LOG_FILE: str | None = None

    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"

app_settings = Settings()
