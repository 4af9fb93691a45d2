"""
Dependencias compartidas por las rutas
"""
from fastapi import Query
from slowapi import Limiter
from slowapi.util import get_remote_address

from blockmass.words import Block
from config.settings import get_settings

settings = get_settings()

# Rate Limiter
limiter = Limiter(
    key_func=get_remote_address,
    default_limits=[f"{settings.rate_limit_per_minute}/minute"]
)


def block_param(
    base: int = Query(..., ge=2, description="Base b"),
    block: str = Query(..., min_length=1, description="Digits of w, comma-separated when b > 10"),
) -> Block:
    """Parse (base, block) query parameters; bad digits raise InvalidInputError."""
    return Block.parse(block, base)
