import os

import pytest

from b0lab import catalog

DATA = os.path.join(os.path.dirname(__file__), "data")


def load_fixture(name):
    with open(os.path.join(DATA, name)) as fh:
        return catalog.parse_pcp(fh.read())


@pytest.fixture(scope="session")
def catalog3():
    """The 24 built-in groups at p=3, shared so per-group caches persist."""
    return catalog.catalog_groups(3)


@pytest.fixture(scope="session")
def catalog5():
    return catalog.catalog_groups(5)


@pytest.fixture(scope="session")
def heis27():
    return load_fixture("heis27.pcp")


@pytest.fixture(scope="session")
def m27():
    return load_fixture("m27.pcp")


@pytest.fixture(scope="session")
def order81_ingested():
    return [load_fixture(n) for n in ("c3wrc3.pcp", "m81.pcp", "c9sdc9.pcp", "heis27xc3.pcp")]


@pytest.fixture(scope="session")
def small_abelian3():
    """All abelian types of order dividing 3^4."""
    parts = [
        (1,),
        (2,),
        (1, 1),
        (3,),
        (2, 1),
        (1, 1, 1),
        (4,),
        (3, 1),
        (2, 2),
        (2, 1, 1),
        (1, 1, 1, 1),
    ]
    return [catalog.abelian_presentation(q, 3) for q in parts]

