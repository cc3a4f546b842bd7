from __future__ import annotations

from pathlib import Path

import pytest

import helpers

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def mind1():
    return helpers.mind1()


@pytest.fixture
def mind2():
    return helpers.mind2()


@pytest.fixture
def diamond():
    return helpers.diamond()


@pytest.fixture
def star():
    return helpers.star()


@pytest.fixture
def star_scenario():
    return helpers.star_scenario()


@pytest.fixture
def arithmetic_scenario():
    return helpers.arithmetic_scenario()


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
