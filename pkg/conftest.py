# File: conftest.py
# Shared pytest fixtures; puts the repository root on sys.path

import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.abspath(__file__))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.algebra import random_domain_matrix  # noqa: E402


@pytest.fixture
def rng():
    """Seeded generator, fresh for every test"""
    return np.random.default_rng(20240917)


@pytest.fixture
def domain_matrix(rng):
    """Factory for random points of the domain with amplitudes below max_amplitude"""
    def make(modes, max_amplitude=0.9):
        return random_domain_matrix(modes, rng, max_amplitude)
    return make


@pytest.fixture
def output_dir(tmp_path):
    return str(tmp_path / "output")
