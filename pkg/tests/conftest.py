import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

BELL = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


@pytest.fixture
def bell_projector():
    return np.outer(BELL, BELL.conj())


def random_hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def random_unitary(rng, d):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, d, rank=None):
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


seeds = st.integers(min_value=0, max_value=2**32 - 1)
small_dims = st.integers(min_value=2, max_value=4)
finite = st.floats(min_value=-3, max_value=3, allow_nan=False, allow_infinity=False)


def complex_arrays(shape):
    return arrays(np.float64, shape, elements=finite).map(lambda x: x.astype(complex))
