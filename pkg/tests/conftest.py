import pathlib

import pytest

from euclidstats.cache import Cache

CACHE_DIR = pathlib.Path(__file__).parent / "_cache"


@pytest.fixture(scope="session")
def cache() -> Cache:
    """Persistent on-disk cache so repeated runs skip the heavy enumerations."""
    CACHE_DIR.mkdir(exist_ok=True)
    return Cache(CACHE_DIR)
