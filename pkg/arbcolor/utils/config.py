from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="ARBCOLOR_", env_file=".env", extra="ignore")

    # Sweep worker budget
    workers: int = 4

    # Simulator step cap for a single run
    round_limit: int = 100_000

    # auto-dispatch picks high-arb when alpha >= dispatch_threshold * log2(n)
    dispatch_threshold: float = 40.0

    # Phase degree claims are only asserted above chernoff_guard * ln(n)
    chernoff_guard: float = 40.0

    # CONGEST budget is ceil(congest_constant * log2(n)) bits
    congest_constant: float = 4.0

    # exact_arboricity_bruteforce refuses graphs larger than this
    bruteforce_limit: int = 16

    log_level: str = "INFO"


_settings = None


def get_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next get_settings() re-reads the environment"""
    global _settings
    _settings = None
