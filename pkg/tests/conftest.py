import random

import pytest

from nilsolve import catalog


@pytest.fixture(scope="session")
def heis():
    return catalog.heisenberg()


@pytest.fixture(scope="session")
def torsion():
    return catalog.torsion_heisenberg()


@pytest.fixture(scope="session")
def line():
    return catalog.integers()


@pytest.fixture(scope="session")
def dihedral():
    return catalog.infinite_dihedral()


@pytest.fixture(scope="session")
def heis_c2():
    return catalog.heisenberg_c2()


@pytest.fixture()
def rng():
    return random.Random(0xC0FFEE)
