"""Hamiltonians for direct (A⊗B) and common-bath (A⊗B⊗C) coupling models.

All local Hamiltonians are diagonal in the local energy basis, ordered by
ascending energy, so "level 1" of a subsystem is always index 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, DimensionTooSmall
from .hilbert import CompositeSpace, embed
from .operators import SIGMA_X, SIGMA_Y, as_matrix, hermitian_part
from .thermal import DensityMatrix, gibbs, product_state

PRESETS = (
    "two-spin",
    "fourlevel-a",
    "fourlevel-b",
    "slow-spins-fast-bath",
    "fast-spins-slow-bath",
)

# default coupling strength for each preset (the value used in the matching figure)
PRESET_GAMMA = {
    "two-spin": 0.01,
    "fourlevel-a": 0.05,
    "fourlevel-b": 0.05,
    "slow-spins-fast-bath": 0.1,
    "fast-spins-slow-bath": 0.5,
}


def tridiagonal_coupling(dim: int) -> np.ndarray:
    """Real symmetric matrix with ones on the first off-diagonals."""
    if dim < 2:
        raise DimensionTooSmall(f"tridiagonal coupling needs dim >= 2, got {dim}")
    off = np.ones(dim - 1)
    return (np.diag(off, 1) + np.diag(off, -1)).astype(complex)


def _spectrum(values, name: str) -> np.ndarray:
    e = np.asarray(values, dtype=float)
    if e.ndim != 1 or e.size < 2:
        raise DimensionTooSmall(f"{name} needs at least two levels")
    if not np.all(np.isfinite(e)):
        raise ValueError(f"{name} has non-finite energies")
    if np.any(np.diff(e) <= 0):
        raise ValueError(f"{name} must be strictly ascending (nondegenerate)")
    return e


def _coupling_op(v, dim: int, name: str) -> np.ndarray:
    v = hermitian_part(as_matrix(v), name=name)
    if v.shape[0] != dim:
        raise DimensionMismatch(f"{name} has dimension {v.shape[0]}, expected {dim}")
    return v


@dataclass(frozen=True, eq=False)
class Coupling:
    """One term weight · V_a ⊗ V_b of the interaction; its strength is gamma·weight."""

    weight: float
    v_a: np.ndarray
    v_b: np.ndarray


@dataclass(frozen=True, eq=False)
class DirectModel:
    spectrum_a: np.ndarray
    spectrum_b: np.ndarray
    couplings: tuple[Coupling, ...]
    gamma: float = 1.0
    name: str = "custom"

    def __post_init__(self):
        ea = _spectrum(self.spectrum_a, "spectrum_a")
        eb = _spectrum(self.spectrum_b, "spectrum_b")
        terms = tuple(
            Coupling(float(c.weight),
                     _coupling_op(c.v_a, ea.size, f"V_a[{i}]"),
                     _coupling_op(c.v_b, eb.size, f"V_b[{i}]"))
            for i, c in enumerate(self.couplings)
        )
        object.__setattr__(self, "spectrum_a", ea)
        object.__setattr__(self, "spectrum_b", eb)
        object.__setattr__(self, "couplings", terms)
        object.__setattr__(self, "gamma", float(self.gamma))

    kind = "direct"
    coupling_order = 1
    metric_slots = (0, 1)

    @property
    def space(self) -> CompositeSpace:
        return CompositeSpace((self.spectrum_a.size, self.spectrum_b.size))

    @property
    def strengths(self) -> list[float]:
        """The coupling constants γ_i of each term."""
        return [self.gamma * c.weight for c in self.couplings]

    def with_gamma(self, gamma: float) -> "DirectModel":
        return replace(self, gamma=float(gamma))

    def unperturbed_energies(self) -> np.ndarray:
        return np.add.outer(self.spectrum_a, self.spectrum_b).ravel()

    def coupling_operator(self) -> np.ndarray:
        n = self.space.total
        v = np.zeros((n, n), dtype=complex)
        for g, c in zip(self.strengths, self.couplings):
            v += g * np.kron(c.v_a, c.v_b)
        return v

    def initial_state(self, temperature: float) -> DensityMatrix:
        return product_state([
            gibbs(np.diag(self.spectrum_a), temperature),
            gibbs(np.diag(self.spectrum_b), temperature),
        ])

    @property
    def lowest_joint_gap(self) -> float:
        return float(self.spectrum_a[1] - self.spectrum_a[0]
                     + self.spectrum_b[1] - self.spectrum_b[0])


@dataclass(frozen=True, eq=False)
class IndirectModel:
    """Bath A coupled to two non-interacting systems B and C via γ V_a⊗(V_b⊗1 + 1⊗V_c)."""

    spectrum_a: np.ndarray
    spectrum_b: np.ndarray
    spectrum_c: np.ndarray
    gamma: float
    v_a: np.ndarray
    v_b: np.ndarray
    v_c: np.ndarray
    bath_temperature: float
    name: str = "custom"

    def __post_init__(self):
        ea = _spectrum(self.spectrum_a, "spectrum_a")
        eb = _spectrum(self.spectrum_b, "spectrum_b")
        ec = _spectrum(self.spectrum_c, "spectrum_c")
        object.__setattr__(self, "spectrum_a", ea)
        object.__setattr__(self, "spectrum_b", eb)
        object.__setattr__(self, "spectrum_c", ec)
        object.__setattr__(self, "v_a", _coupling_op(self.v_a, ea.size, "V_a"))
        object.__setattr__(self, "v_b", _coupling_op(self.v_b, eb.size, "V_b"))
        object.__setattr__(self, "v_c", _coupling_op(self.v_c, ec.size, "V_c"))
        object.__setattr__(self, "gamma", float(self.gamma))
        if self.bath_temperature < 0:
            raise ValueError("bath temperature must be >= 0")

    kind = "indirect"
    coupling_order = 2
    metric_slots = (1, 2)

    @property
    def space(self) -> CompositeSpace:
        return CompositeSpace((self.spectrum_a.size, self.spectrum_b.size,
                               self.spectrum_c.size))

    @property
    def omega_b(self) -> float:
        return float(self.spectrum_b[1] - self.spectrum_b[0])

    @property
    def omega_c(self) -> float:
        return float(self.spectrum_c[1] - self.spectrum_c[0])

    @property
    def lowest_joint_gap(self) -> float:
        return self.omega_b + self.omega_c

    def with_gamma(self, gamma: float) -> "IndirectModel":
        return replace(self, gamma=float(gamma))

    def unperturbed_energies(self) -> np.ndarray:
        return reduce(np.add.outer, (self.spectrum_a, self.spectrum_b, self.spectrum_c)).ravel()

    def coupling_operator(self) -> np.ndarray:
        s = self.space
        v_bc = embed(self.v_b, 0, s.subspace((1, 2))) + embed(self.v_c, 1, s.subspace((1, 2)))
        return self.gamma * np.kron(self.v_a, v_bc)

    def initial_state(self, temperature: float) -> DensityMatrix:
        return product_state([
            gibbs(np.diag(self.spectrum_a), self.bath_temperature),
            gibbs(np.diag(self.spectrum_b), temperature),
            gibbs(np.diag(self.spectrum_c), temperature),
        ])


Model = DirectModel | IndirectModel


def build_direct(model: DirectModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (H, V_total, H_total) with H = H_a⊗1 + 1⊗H_b and V_total = Σ γ_i V_a^i⊗V_b^i."""
    h = np.diag(model.unperturbed_energies()).astype(complex)
    v = model.coupling_operator()
    return h, v, h + v


def build_indirect(model: IndirectModel) -> tuple[np.ndarray, np.ndarray]:
    """Return (H, H_total) on A⊗B⊗C."""
    h = np.diag(model.unperturbed_energies()).astype(complex)
    return h, h + model.coupling_operator()


def build(model: Model) -> tuple[np.ndarray, np.ndarray]:
    """(H, H_total) for either topology."""
    h = np.diag(model.unperturbed_energies()).astype(complex)
    return h, h + model.coupling_operator()


def preset(name: str, gamma: float | None = None, omega: float = 1.0,
           bath_coupling: str = "tridiagonal") -> Model:
    """Expand one of the named figure setups into a model.

    ``bath_coupling="identity"`` reproduces the literal V_a = 1 reading of the
    common-bath setups (a purely local coupling that never entangles B and C).
    """
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    g = PRESET_GAMMA[name] if gamma is None else float(gamma)

    if name == "two-spin":
        # σx⊗σx − σy⊗σy; both operators keep their form in the ascending-energy basis
        return DirectModel(
            spectrum_a=0.5 * omega * np.array([-1.0, 1.0]),
            spectrum_b=0.5 * omega * (math.sqrt(2) - 1) * np.array([-1.0, 1.0]),
            couplings=(Coupling(1.0, SIGMA_X, SIGMA_X), Coupling(-1.0, SIGMA_Y, SIGMA_Y)),
            gamma=g, name=name,
        )
    if name in ("fourlevel-a", "fourlevel-b"):
        ea = np.array([1.0, 5.0, 8.0, 10.0] if name == "fourlevel-a" else [1.0, 3.0, 7.0, 13.0])
        v = tridiagonal_coupling(4)
        return DirectModel(omega * ea, omega * np.sqrt(ea), (Coupling(1.0, v, v),),
                           gamma=g, name=name)

    if bath_coupling == "tridiagonal":
        v_a = tridiagonal_coupling(4)
    elif bath_coupling == "identity":
        v_a = np.eye(4, dtype=complex)
    else:
        raise ValueError(f"bath_coupling must be 'tridiagonal' or 'identity', got {bath_coupling!r}")
    pm = np.array([-1.0, 1.0])
    if name == "slow-spins-fast-bath":
        return IndirectModel(
            spectrum_a=omega * np.array([0.0, 10.0, 20.0, 30.0]),
            spectrum_b=0.5 * omega * pm,
            spectrum_c=0.5 * omega * math.sqrt(2) * pm,
            gamma=g, v_a=v_a, v_b=SIGMA_X, v_c=SIGMA_X,
            bath_temperature=5.0 * omega, name=name,
        )
    return IndirectModel(
        spectrum_a=omega * np.array([0.0, 1.0, 2.0, 3.0]),
        spectrum_b=5.0 * omega * pm,
        spectrum_c=5.0 * omega * math.sqrt(2) * pm,
        gamma=g, v_a=v_a, v_b=SIGMA_X, v_c=SIGMA_X,
        bath_temperature=0.01 * omega, name=name,
    )
