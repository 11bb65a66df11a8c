import pytest

from cubebound.document import bundled


@pytest.fixture(scope="session")
def docs():
    return bundled()


@pytest.fixture(scope="session")
def tiered(docs):
    return {n: d.payload for n, d in docs.items() if d.kind == "tiered"}


@pytest.fixture(scope="session")
def finite(docs):
    return {n: d.payload for n, d in docs.items() if d.kind == "finite"}


@pytest.fixture(scope="session")
def cones(docs):
    return {n: d.payload for n, d in docs.items() if d.kind == "cone"}
