import numpy as np
import pytest

from mubchan.channels import axis_channel


def random_cp_lambda(rng, d: int) -> np.ndarray:
    """Rejection-sample a CP multiplier vector from [-1, 1]^(d+1)."""
    while True:
        lam = rng.uniform(-1, 1, d + 1)
        if axis_channel(d, lam, checked=False).is_cp():
            return lam


def random_cp_channel(rng, d: int):
    return axis_channel(d, random_cp_lambda(rng, d))


def random_density(rng, d: int, rank: int | None = None) -> np.ndarray:
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_pure(rng, d: int) -> np.ndarray:
    z = rng.normal(size=d) + 1j * rng.normal(size=d)
    return z / np.linalg.norm(z)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
