import functools

import pytest

from ridgekit.orthobasis import build_basis
from ridgekit.quadrature import build_ball_rule


@functools.lru_cache(maxsize=None)
def cached_rule(d, exactness):
    return build_ball_rule(d, exactness)


@functools.lru_cache(maxsize=None)
def cached_basis(d, max_degree, exactness=None):
    if exactness is None:
        exactness = 2 * max_degree + 2
    return build_basis(d, max_degree, cached_rule(d, exactness))


@pytest.fixture(scope="session")
def rule_factory():
    return cached_rule


@pytest.fixture(scope="session")
def basis_factory():
    return cached_basis
