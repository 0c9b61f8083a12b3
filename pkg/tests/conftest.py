import numpy as np
import pytest

from cohnorm import _kernels


def random_hermitian(rng, n, scale=1.0):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (g + g.conj().T) / 2.0


def random_trace_zero(rng, n, scale=1.0):
    h = random_hermitian(rng, n, scale)
    return h - np.trace(h) / n * np.eye(n)


def random_unitary(rng, n):
    """Unitary from a random Hermitian exponential, diagonalized by the package solver."""
    h = random_hermitian(rng, n)
    w, v = _kernels.eigh_descending(h)
    u = v @ np.diag(np.exp(1j * w)) @ v.conj().T
    assert np.abs(u.conj().T @ u - np.eye(n)).max() < 1e-10
    return u


def random_density_matrix(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
