from pathlib import Path

import pytest

from hptdyn import hptio

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "hptdyn" / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


@pytest.fixture
def pd_table():
    return hptio.load_hpt(fixture_path("pd.json"))


@pytest.fixture
def bos_table():
    return hptio.load_hpt(fixture_path("bos.json"))


@pytest.fixture
def wolfpack_table():
    return hptio.load_hpt(fixture_path("wolfpack.json"))


@pytest.fixture
def starcraft_table():
    return hptio.load_hpt(fixture_path("starcraft.json"))
