"""
Shared pytest fixtures for glupoly
"""

import copy

import pytest

from src.core.catalog import catalog
from src.core.config_manager import config


@pytest.fixture(autouse=True)
def restore_config():
    """CLI flags write overrides into the global configuration; undo them after each test"""
    saved = copy.deepcopy(config.config)
    yield
    config.config = saved


@pytest.fixture
def sierpinski():
    return catalog("sierpinski")


@pytest.fixture
def hanoi():
    return catalog("hanoi")


@pytest.fixture
def chebyshev():
    return catalog("chebyshev")


@pytest.fixture
def chebyshev_tripod():
    return catalog("chebyshev-tripod")


@pytest.fixture
def spod_star():
    return catalog("spod-star")


@pytest.fixture
def degenerate():
    return catalog("degenerate-demo")
