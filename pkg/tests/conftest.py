"""Shared fixtures: one seeded generator per test plus Hermitian factories."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


@pytest.fixture
def make_hermitian(rng):
    def factory(n, scale=1.0):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return scale * (a + a.conj().T) / 2.0

    return factory


@pytest.fixture
def make_psd(rng):
    def factory(n, rank=None):
        r = n if rank is None else rank
        low = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
        return low @ low.conj().T

    return factory


@pytest.fixture
def unit_vector(rng):
    def factory(n):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return v / np.linalg.norm(v)

    return factory
