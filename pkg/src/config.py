"""Configuration management for the co-allocation solver."""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Platform defaults (ZCU102-like: 4 cores, 15 bandwidth / 16 cache partitions)
    cores: int = 4
    bandwidth_partitions: int = 15
    cache_partitions: int = 16

    # Solver Configuration
    gamma: int = 1000
    threads: int = 1
    partial_demand_rel_tol: float = 1e-12

    # Oracle search-space guard
    oracle_max_tasks: int = 8
    oracle_max_cores: int = 3
    oracle_max_bandwidth: int = 5
    oracle_max_cache: int = 5

    # Generator Configuration
    period_min: float = 10.0
    period_max: float = 1000.0

    # Profile loading
    normalization_warn_fraction: float = 0.01

    # Application Configuration
    log_level: str = "INFO"

    model_config = SettingsConfigDict(
        env_prefix="MMO_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )


# Global settings instance
settings = Settings()
