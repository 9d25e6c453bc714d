import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
GOLDEN = pathlib.Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture(scope="session")
def golden_dir() -> pathlib.Path:
    return GOLDEN


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


@pytest.fixture(scope="session")
def fig1a_text() -> str:
    return fixture_text("fig1a.sqpn")


@pytest.fixture(scope="session")
def fig5_text() -> str:
    return fixture_text("fig5.sqpn")


@pytest.fixture(scope="session")
def fig6_text() -> str:
    return fixture_text("fig6.sqpn")


@pytest.fixture(scope="session")
def fig6_partial_text() -> str:
    return fixture_text("fig6_partial.sqpn")
