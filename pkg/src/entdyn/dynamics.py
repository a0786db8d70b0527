"""Exact unitary propagation of density matrices, plus the first-order state.

Propagation diagonalises H_total once; each sample then costs two matrix
products in the eigenbasis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DimensionMismatch, ResonantDenominator
from .models import Model, build
from .operators import as_matrix, dagger, herm_eig
from .thermal import DensityMatrix

RESONANCE_TOL = 1e-9
SAMPLES_PER_PERIOD = 20
DEFAULT_PERIODS = 20


@dataclass(frozen=True)
class TimeGrid:
    t_end: float
    steps: int

    def __post_init__(self):
        if not self.t_end > 0 or not math.isfinite(self.t_end):
            raise ValueError(f"t_end must be positive and finite, got {self.t_end}")
        if int(self.steps) < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "t_end", float(self.t_end))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.steps + 1) * (self.t_end / self.steps)


@dataclass(frozen=True, eq=False)
class Trajectory:
    grid: TimeGrid
    states: tuple[DensityMatrix, ...]


def coupled_frequencies(model: Model, order: int | None = None) -> np.ndarray:
    """Distinct nonzero |E_p - E_q| over unperturbed levels linked by V (or V² at order 2)."""
    order = model.coupling_order if order is None else order
    e = model.unperturbed_energies()
    v = model.with_gamma(1.0).coupling_operator()
    linked = np.abs(v) > 1e-12
    if order >= 2:
        linked |= np.abs(v @ v) > 1e-12
    diffs = np.abs(np.subtract.outer(e, e))[linked]
    diffs = diffs[diffs > RESONANCE_TOL]
    return np.unique(np.round(diffs, 12))


def default_grid(model: Model, multiplier: float = 1.0,
                 periods: int = DEFAULT_PERIODS,
                 samples_per_period: int = SAMPLES_PER_PERIOD) -> TimeGrid:
    """Horizon of ``periods`` slowest coupled oscillations, sampling the fastest
    one ``samples_per_period`` times per period; both scaled by ``multiplier``."""
    freqs = coupled_frequencies(model)
    if freqs.size == 0:
        freqs = np.array([1.0])
    t_end = multiplier * periods * 2 * math.pi / freqs.min()
    steps = math.ceil(t_end * freqs.max() / (2 * math.pi) * samples_per_period)
    return TimeGrid(t_end, max(steps, 1))


class Propagator:
    """Caches the eigendecomposition of H_total for repeated propagation."""

    def __init__(self, h_total):
        self.h_total = as_matrix(h_total)
        self.energies, self.vectors = herm_eig(self.h_total)

    @property
    def dim(self) -> int:
        return self.energies.size

    def unitary(self, t: float) -> np.ndarray:
        return (self.vectors * np.exp(-1j * self.energies * t)) @ dagger(self.vectors)

    def evolve(self, rho0, t: float) -> np.ndarray:
        return next(self.evolve_many(rho0, np.array([t]), chunk=1))[0]

    def evolve_many(self, rho0, times, chunk: int = 1024) -> Iterator[np.ndarray]:
        """Yield stacks of ρ(t) = U ρ0 U† for consecutive chunks of ``times``."""
        rho0 = np.asarray(rho0, dtype=complex)
        if rho0.shape != (self.dim, self.dim):
            raise DimensionMismatch(
                f"state of shape {rho0.shape} does not match Hamiltonian of dim {self.dim}"
            )
        w = self.vectors
        rho_eig = dagger(w) @ rho0 @ w
        gaps = np.subtract.outer(self.energies, self.energies)
        times = np.asarray(times, dtype=float)
        for start in range(0, times.size, chunk):
            ts = times[start:start + chunk]
            phases = np.exp(-1j * gaps[None, :, :] * ts[:, None, None])
            yield w @ (rho_eig * phases) @ dagger(w)


def evolve(h_total, rho0: DensityMatrix, t: float) -> DensityMatrix:
    """Schrödinger-picture ρ(t) = U ρ0 U† with U = exp(-i H_total t)."""
    return DensityMatrix(Propagator(h_total).evolve(rho0.matrix, t), rho0.space)


def trajectory(h_total, rho0: DensityMatrix, grid: TimeGrid) -> Trajectory:
    prop = Propagator(h_total)
    states = [DensityMatrix(m, rho0.space)
              for block in prop.evolve_many(rho0.matrix, grid.times)
              for m in block]
    return Trajectory(grid, tuple(states))


def to_interaction_picture(energies, rho, t: float) -> np.ndarray:
    """e^{iHt} ρ e^{-iHt} for diagonal H with the given (flat) energies."""
    e = np.asarray(energies, dtype=float)
    return np.asarray(rho) * np.exp(1j * np.subtract.outer(e, e) * t)


def phase_integral(delta, t: float):
    """(e^{-iΔt} - 1)/Δ, with the Δ → 0 limit -i t."""
    delta = np.asarray(delta, dtype=float)
    small = np.abs(delta) < RESONANCE_TOL
    safe = np.where(small, 1.0, delta)
    return np.where(small, -1j * t, (np.exp(-1j * safe * t) - 1) / safe)


def first_order_correction(energies, v, populations, t: float) -> np.ndarray:
    """-i ∫_0^t [V_I(t'), ρ(0)] dt' for diagonal ρ(0) with the given populations.

    ``v`` already carries the coupling constants. Raises ResonantDenominator if
    two distinct coupled levels are degenerate with unequal populations.
    """
    e = np.asarray(energies, dtype=float)
    p = np.asarray(populations, dtype=float)
    v = np.asarray(v, dtype=complex)
    omega = np.subtract.outer(e, e)
    dp = np.subtract.outer(p, p)
    coupled = (np.abs(v) > 0) & ~np.eye(e.size, dtype=bool)
    resonant = coupled & (np.abs(omega) < RESONANCE_TOL)
    if np.any(resonant):
        p_idx, q_idx = np.argwhere(resonant)[0]
        raise ResonantDenominator(
            f"levels {p_idx} and {q_idx} are coupled but degenerate (|Δ| < {RESONANCE_TOL})"
        )
    # ρ1[p,q] = V[p,q] (P_p - P_q) (e^{iω t} - 1)/ω  with ω = E_p - E_q
    return v * dp * np.conj(phase_integral(omega, t))


def first_order_state(model, temperature: float, t: float) -> np.ndarray:
    """Interaction-picture state to first order in the coupling.

    Hermitian with unit trace but not necessarily positive.
    """
    rho0 = model.initial_state(temperature).matrix
    p = np.real(np.diag(rho0))
    return rho0 + first_order_correction(model.unperturbed_energies(),
                                         model.coupling_operator(), p, t)


def exact_interaction_state(model, temperature: float, t: float) -> np.ndarray:
    """Exact ρ'(t) = e^{iHt} U(t) ρ(0) U(t)† e^{-iHt}."""
    _, h_total = build(model)
    rho_t = Propagator(h_total).evolve(model.initial_state(temperature).matrix, t)
    return to_interaction_picture(model.unperturbed_energies(), rho_t, t)
