import pytest

from qcbf import NcSyndromeTable, random_code


@pytest.fixture(scope="session")
def small_code():
    return random_code(101, 9, seed=7)


@pytest.fixture(scope="session")
def small_table(small_code):
    return NcSyndromeTable.build(small_code)


@pytest.fixture(scope="session")
def toy_code():
    """r=2003, v=15: the largest of the toy parameter sets."""
    return random_code(2003, 15, seed=1)


@pytest.fixture(scope="session")
def toy_table(toy_code):
    return NcSyndromeTable.build(toy_code)
