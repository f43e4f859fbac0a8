import functools

import pytest

from orbitlimits.cohomology import Cohomology
from orbitlimits.fusion import realize
from orbitlimits.library import SYSTEMS, named_group


@functools.lru_cache(maxsize=None)
def system(name):
    group, p = SYSTEMS[name]
    return realize(named_group(group), p, name=name)


@functools.lru_cache(maxsize=None)
def cohomology(name, jmax=None):
    fs = system(name)
    return Cohomology(fs.S, fs.p, jmax if jmax is not None else max(fs.p - 1, 1))


@pytest.fixture
def fs_of():
    return system


@pytest.fixture
def coh_of():
    return cohomology
