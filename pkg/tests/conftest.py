"""Configuration for pinskerbounds tests (using pytest)."""

import numpy as np
import pytest

from pinskerbounds.utils import QUAD_TOL_ENV_VAR


@pytest.fixture
def rng():
    """A seeded generator, fresh for every test."""
    return np.random.default_rng(20240417)


@pytest.fixture(autouse=True)
def quad_tolerance_env(monkeypatch):
    """Pin the quadrature tolerance so that an outer environment cannot
    change the results.
    """
    monkeypatch.setenv(QUAD_TOL_ENV_VAR, "1e-10")
