"""Shared test fixtures."""

import numpy as np
import pytest

from dyadic_lab.config import get_settings
from dyadic_lab.core.types import CellFunction, GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def spec_1d():
    return GridSpec(1, 5)


@pytest.fixture
def spec_2d():
    return GridSpec(2, 3)


@pytest.fixture
def random_function(rng):
    """Factory for seeded Gaussian cell functions."""

    def make(spec: GridSpec) -> CellFunction:
        return CellFunction(spec, rng.normal(size=spec.cells))

    return make


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
