import numpy as np
import pytest

from qdivstat.random_ops import random_density, random_hermitian, random_traceless


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def rand_state(rng, dim, min_eig=0.05):
    return random_density(dim, rng, min_eig=min_eig).mat


def rand_herm(rng, dim, scale=1.0):
    return random_hermitian(dim, rng, scale).mat


def rand_direction(rng, dim, scale=1.0):
    return random_traceless(dim, rng, scale).mat
