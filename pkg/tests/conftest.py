import functools

import pytest
from hypothesis import HealthCheck, settings

from qds.constructors import quaternion_ch, standard_hopf
from qds.corep import extract_irreps
from qds.dsfamily import analyze_blocks

settings.register_profile(
    "qds", deadline=None, max_examples=30,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("qds")


@functools.lru_cache(maxsize=None)
def hopf(name: str, variant: str = "functions"):
    h = standard_hopf(name, variant)
    h.get_antipode()
    return h


@functools.lru_cache(maxsize=None)
def dual_decomposition(name: str, variant: str = "functions"):
    return extract_irreps(hopf(name, variant), seed=0)


@functools.lru_cache(maxsize=None)
def blocks(name: str, variant: str = "functions"):
    h = hopf(name, variant)
    return analyze_blocks(h, 0, None, dual_decomposition(name, variant))


@functools.lru_cache(maxsize=None)
def graded_ch():
    return quaternion_ch()


@pytest.fixture
def ch():
    return graded_ch().hopf
