import pytest

from expwell import build_spectrum, find_zeros


@pytest.fixture(scope="session")
def table_g1():
    return find_zeros(1.0, 41)


@pytest.fixture(scope="session")
def lines_g1(table_g1):
    from expwell.zeros import ZeroTable

    return build_spectrum(ZeroTable(1.0, table_g1.entries[:16]))
