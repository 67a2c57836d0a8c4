import random

import pytest

from essence_kit.config import get_settings
from essence_kit.generators import load_fixture


@pytest.fixture(scope="session")
def settings():
    return get_settings()


@pytest.fixture(scope="session")
def fixture(settings):
    """Load a named diagram from data/fixtures (or a generated one)."""
    cache = {}

    def load(name: str):
        if name not in cache:
            cache[name] = load_fixture(name, settings)
        return cache[name]

    return load


@pytest.fixture
def trefoil(fixture):
    return fixture("trefoil")


@pytest.fixture
def rng():
    return random.Random(20240601)
