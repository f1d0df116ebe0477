import pytest

from .support import FIXTURE_NAMES, fixture_lmc


@pytest.fixture(scope="session")
def ex2():
    return fixture_lmc("ex2")


@pytest.fixture(scope="session")
def noform():
    return fixture_lmc("noform")


@pytest.fixture(scope="session")
def rady5():
    return fixture_lmc("rady5")


@pytest.fixture(scope="session")
def walk():
    return fixture_lmc("random-walk")


@pytest.fixture(scope="session")
def finite_fixtures():
    return {name: fixture_lmc(name) for name in FIXTURE_NAMES}
