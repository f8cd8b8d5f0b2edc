import pytest

from mdlq.labeling import build_labeling
from mdlq.lattices import get_lattice
from mdlq.sublattices import design_sublattice

_cache = {}


def design(lat_name, n, params=None):
    """Session-cached labeling designs; building big ones is not free."""
    key = (lat_name, n, params)
    if key not in _cache:
        sub = design_sublattice(lat_name, index=n, params=params)
        _cache[key] = build_labeling(sub)
    return _cache[key]


@pytest.fixture(scope="session")
def a2():
    return get_lattice("A2")


@pytest.fixture(scope="session")
def z1():
    return get_lattice("Z1")


@pytest.fixture(scope="session")
def z2():
    return get_lattice("Z2")


@pytest.fixture(scope="session")
def lab31():
    """Optimal design for the hexagonal lattice, N=31, in the u = 5 - w frame."""
    return design("A2", 31, params=(5, -1))
