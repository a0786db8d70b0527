"""Gibbs states and thermal product initial conditions (k_B = 1)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NegativeTemperature
from .hilbert import CompositeSpace
from .operators import dagger, herm_eig

INFINITE = math.inf


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    space: CompositeSpace

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.total, self.space.total):
            raise DimensionMismatch(
                f"matrix of shape {m.shape} does not act on space {self.space.dims}"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.space.total

    def check(self, herm_tol: float = 1e-12, trace_tol: float = 1e-12,
              psd_tol: float = 1e-10) -> None:
        """Raise ValueError unless Hermitian, unit trace and positive semidefinite."""
        m = self.matrix
        if np.linalg.norm(m - dagger(m)) > herm_tol * max(1.0, np.linalg.norm(m)):
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1) > trace_tol:
            raise ValueError(f"density matrix trace is {tr}")
        lo = np.linalg.eigvalsh(0.5 * (m + dagger(m)))[0]
        if lo < -psd_tol:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")


def boltzmann_populations(energies: Sequence[float], temperature: float) -> np.ndarray:
    """Normalised Boltzmann weights of the given levels.

    Energies are shifted by their minimum before exponentiation. ``temperature=0``
    spreads the weight uniformly over the (numerically) degenerate ground level;
    ``temperature=math.inf`` gives the uniform distribution.
    """
    e = np.asarray(energies, dtype=float)
    if temperature < 0 or math.isnan(temperature):
        raise NegativeTemperature(f"temperature must be >= 0, got {temperature}")
    if math.isinf(temperature):
        return np.full(e.shape, 1.0 / e.size)
    shifted = e - e.min()
    if temperature == 0:
        tol = 1e-12 * max(1.0, float(np.max(np.abs(e))))
        w = (shifted <= tol).astype(float)
    else:
        w = np.exp(-shifted / temperature)
    return w / w.sum()


def gibbs(h, temperature: float, space: CompositeSpace | None = None) -> DensityMatrix:
    """Thermal state exp(-h/T)/Z of a Hermitian ``h``."""
    values, vectors = herm_eig(h)
    p = boltzmann_populations(values, temperature)
    matrix = (vectors * p) @ dagger(vectors)
    return DensityMatrix(matrix, space or CompositeSpace((len(values),)))


def product_state(parts: Sequence[DensityMatrix]) -> DensityMatrix:
    if len(parts) < 2:
        raise ValueError("product_state needs at least two factors")
    matrix = reduce(np.kron, [p.matrix for p in parts])
    dims = tuple(d for p in parts for d in p.space.dims)
    return DensityMatrix(matrix, CompositeSpace(dims))
