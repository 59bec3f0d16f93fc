import os

import numpy as np
import pytest

import hclocal as hc

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "data")


def i4_values():
    """The 4-point instance with two heavy pairs: w(1,2)=w(3,4)=3, rest 1."""
    v = np.ones((4, 4))
    np.fill_diagonal(v, 0.0)
    v[0, 1] = v[1, 0] = 3.0
    v[2, 3] = v[3, 2] = 3.0
    return v


@pytest.fixture
def i4():
    return hc.SimilarityMatrix(i4_values())


@pytest.fixture
def unit4():
    return hc.SimilarityMatrix(np.ones((4, 4)))


def random_sim(n, rng, low=0.0, high=1.0):
    v = rng.uniform(low, high, (n, n))
    v = (v + v.T) / 2.0
    np.fill_diagonal(v, 0.0)
    return hc.SimilarityMatrix(v)


def dataset_path(name):
    return os.path.abspath(os.path.join(DATA_DIR, name))


def require_dataset(name):
    path = dataset_path(name)
    if not os.path.exists(path):
        pytest.skip(
            f"fixture {name} not present under data/ (offline sandbox cannot "
            f"bundle it); run scripts/fetch_uci_data.py to create it")
    return path
