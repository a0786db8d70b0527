"""Dense complex matrix helpers.

Every operator in the package is a plain square ``numpy`` array of dtype
``complex128``. Eigendecompositions are delegated to LAPACK (``numpy.linalg.eigh``)
after an explicit Hermiticity check.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NotHermitian

HERMITIAN_RTOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite square complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def hermiticity_defect(h: np.ndarray) -> float:
    """Relative Frobenius distance between ``h`` and its adjoint."""
    scale = max(np.linalg.norm(h), 1.0)
    return float(np.linalg.norm(h - dagger(h)) / scale)


def is_hermitian(h, rtol: float = HERMITIAN_RTOL) -> bool:
    return hermiticity_defect(as_matrix(h)) <= rtol


def hermitian_part(h, rtol: float = HERMITIAN_RTOL, name: str = "matrix") -> np.ndarray:
    """Return (h + h†)/2, raising NotHermitian if ``h`` is too far from Hermitian."""
    h = as_matrix(h)
    defect = hermiticity_defect(h)
    if defect > rtol:
        raise NotHermitian(f"{name} is not Hermitian (relative defect {defect:.3e})")
    return 0.5 * (h + dagger(h))


def herm_eig(h, rtol: float = HERMITIAN_RTOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    values, vectors = np.linalg.eigh(hermitian_part(h, rtol))
    return EigenDecomposition(values, vectors)


def propagator(h, t: float) -> np.ndarray:
    """exp(-i h t) for Hermitian ``h`` (hbar = 1)."""
    values, vectors = herm_eig(h)
    return (vectors * np.exp(-1j * values * t)) @ dagger(vectors)


def trace_norm(a) -> float:
    """Tr sqrt(a† a), the sum of singular values."""
    return float(np.sum(np.linalg.svd(as_matrix(a), compute_uv=False)))
