from pathlib import Path

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    zero_samples: int = 20
    zero_tolerance: float = 1e-9
    witness_floor: float = 1e-6
    sample_low: float = 0.5
    sample_high: float = 2.0
    max_redraws: int = 5
    standin_degree: int = 4
    seed: int = 20130417
    fixtures_dir: Path = Path(__file__).resolve().parent.parent / "src" / "catalog" / "fixtures"
    log_level: str = "INFO"
    default_cfl: float = 0.4
    singular_guard: float = 1e-3
    blowup_limit: float = 1e6
    exact_drift: float = 1e-13
    cors_origins: list[str] = []

    class Config:
        env_file = ".env"
        env_prefix = "CCL_"
        extra = "allow"

settings = Settings()
