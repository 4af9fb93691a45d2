"""
Configuración de blockmass
"""
from pydantic_settings import BaseSettings
from pydantic import Field
from typing import List
from functools import lru_cache


class Settings(BaseSettings):
    """Settings de la librería, la CLI y el servicio HTTP"""

    # App
    app_name: str = "blockmass"
    app_version: str = "1.0.0"
    debug: bool = False
    environment: str = "production"
    log_level: str = "INFO"
    log_format: str = Field(default="json", pattern="^(json|console)$")

    # Enumeration cap: b^l may not exceed this (BLOCKMASS_CAP)
    cap: int = Field(default=2**24, ge=1)

    # Closed forms grow in degree linearly with k
    kmax: int = Field(default=64, ge=0)

    # Fixed-point fractional bits used by enclosures
    precision_bits: int = Field(default=128, ge=8)

    # Worker threads for enclosure reductions
    threads: int = Field(default=1, ge=1)

    # HTTP
    cors_origins: List[str] = Field(
        default=[
            "http://localhost:3000",
            "http://localhost:8000",
        ]
    )
    rate_limit_per_minute: int = 60
    heavy_rate_limit: str = "10/minute"

    class Config:
        env_prefix = "BLOCKMASS_"
        env_file = ".env"
        case_sensitive = False


@lru_cache()
def get_settings() -> Settings:
    """
    Get settings singleton
    """
    return Settings()
