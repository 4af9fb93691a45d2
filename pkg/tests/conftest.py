import itertools

import pytest

from blockmass.words import Block
from config.logging import configure_logging
from config.settings import Settings, get_settings


@pytest.fixture(autouse=True, scope="session")
def quiet_logging():
    configure_logging(Settings(log_level="WARNING"))


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def block(text: str, base: int) -> Block:
    return Block.parse(text, base)


# every block with |w| <= 3 over bases 2 and 3
SMALL_BLOCKS = [
    (base, "".join(str(d) for d in digits))
    for base in (2, 3)
    for p in (1, 2, 3)
    for digits in itertools.product(range(base), repeat=p)
]
DECIMAL_BLOCKS = [(10, "9"), (10, "42"), (10, "942"), (10, "09")]
BATTERY = SMALL_BLOCKS + DECIMAL_BLOCKS
