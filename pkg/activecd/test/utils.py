"""
Helper functions that are only used in tests.
"""
import os
from io import open

import numpy as np

from activecd.model import complex_gaussian, sample_covariance


def fixture_path(path):
    return os.path.join(os.path.dirname(__file__), "fixtures", path)


def slurp_fixture(path):
    return open(fixture_path(path), encoding='utf8').read()


def random_problem(seq_len=8, num_coords=20, num_antennas=32,
                   noise_var=0.0813, seed=0):
    """
    Small random detection problem: a sequence matrix, a sample covariance
    drawn from a sparse gamma, and the noise floor.

    @return: Tuple (sequences, sigma_hat, noise_var).
    """
    rng = np.random.default_rng(seed)
    sequences = complex_gaussian(rng, (seq_len, num_coords), 1.0 / seq_len)
    active = rng.choice(num_coords, size=max(1, num_coords // 5),
                        replace=False)
    powers = rng.uniform(0.5, 2.0, size=active.size)
    channels = complex_gaussian(rng, (active.size, num_antennas))
    received = (sequences[:, active] @ (np.sqrt(powers)[:, np.newaxis]
                                        * channels)
                + complex_gaussian(rng, (seq_len, num_antennas), noise_var))
    return sequences, sample_covariance(received), noise_var


def scalar_problem():
    """
    One coordinate, L = 1, q = 1, noise 1, Sigma_hat = 3. The minimizer is
    gamma = 2 with F = log 3 + 1.
    """
    return (np.ones((1, 1), dtype=complex), np.full((1, 1), 3.0 + 0j), 1.0)
