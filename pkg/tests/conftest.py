import pytest

from crmc import make_scheme, gauss_nodes


@pytest.fixture(scope="session")
def scheme_r2():
    return make_scheme(2)


@pytest.fixture(scope="session")
def scheme_r3():
    return make_scheme(3)


@pytest.fixture(scope="session")
def scheme_r4():
    return make_scheme(4)


@pytest.fixture(scope="session")
def scheme_r2_gauss():
    return make_scheme(2, gauss_nodes(2))


@pytest.fixture(scope="session")
def scheme_r1():
    return make_scheme(1)
