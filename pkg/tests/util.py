"""Shared scenario builders for the test suite."""

import numpy as np

from gnepower import Scenario, check_uniqueness
from gnepower.netgen import NetworkGeometry, rayleigh_gains

LN2 = np.log(2.0)


def two_user(cross: float, noise: float = 1.0, target: float = LN2,
             num_subchannels: int = 1) -> Scenario:
    """Symmetric two-user instance: unit direct gains, equal cross gains."""
    n = num_subchannels
    gain = np.zeros((2, 2, n))
    gain[0, 0, :] = gain[1, 1, :] = 1.0
    gain[0, 1, :] = gain[1, 0, :] = cross
    return Scenario(gain=gain, noise=np.full((2, n), noise),
                    rate_target=np.array([target, target]))


def single_user(direct, noise, target: float) -> Scenario:
    direct = np.atleast_1d(np.asarray(direct, dtype=float))
    noise = np.atleast_1d(np.asarray(noise, dtype=float))
    return Scenario(gain=direct.reshape(1, 1, -1),
                    noise=noise.reshape(1, -1),
                    rate_target=np.array([target]))


def random_scenario(rng: np.random.Generator, num_users: int, num_subchannels: int,
                    cross_scale: float, target_lo: float = 0.3,
                    target_hi: float = 1.2) -> Scenario:
    """Random instance with cross gains uniform on [0, cross_scale]."""
    q, n = num_users, num_subchannels
    gain = rng.uniform(0.0, 1.0, (q, q, n)) * cross_scale
    gain[np.arange(q), np.arange(q), :] = rng.uniform(0.5, 2.0, (q, n))
    noise = rng.uniform(0.5, 2.0, (q, n))
    target = rng.uniform(target_lo, target_hi, q)
    return Scenario(gain=gain, noise=noise, rate_target=target)


def random_unique_scenario(rng: np.random.Generator, max_users: int = 5,
                           max_subchannels: int = 8,
                           coupling: float = 0.05) -> Scenario:
    """Rejection-sample until the uniqueness certificate passes."""
    while True:
        q = int(rng.integers(2, max_users + 1))
        n = int(rng.integers(2, max_subchannels + 1))
        scn = random_scenario(rng, q, n, coupling / (q - 1))
        if check_uniqueness(scn):
            return scn


def random_z_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Z-matrix with uniform positive diagonal / nonpositive off-diagonal,
    scaled so P and non-P outcomes both occur often."""
    m = -rng.uniform(0.0, 1.5 / max(dim - 1, 1), (dim, dim))
    m[np.arange(dim), np.arange(dim)] = rng.uniform(0.3, 1.5, dim)
    return m


def ten_user_scenario(seed: int, cross_distance: float = 40.0,
                      num_taps: int = 6, num_subchannels: int = 32,
                      base_rate: float = 1.0) -> Scenario:
    """Ten-link ensemble for the convergence comparison: unit own distances,
    equal cross distances, Rayleigh multipath, two service classes."""
    q = 10
    dist = np.full((q, q), float(cross_distance))
    np.fill_diagonal(dist, 1.0)
    geom = NetworkGeometry(tx_positions=np.zeros((q, 2)),
                           rx_positions=np.zeros((q, 2)),
                           distance=dist, gamma=2.5)
    gains = rayleigh_gains(geom, num_taps, num_subchannels, seed)
    noise = np.ones((q, num_subchannels))
    target = np.where(np.arange(q) % 2 == 0, base_rate, 0.5 * base_rate)
    return Scenario(gain=gains, noise=noise, rate_target=target)
