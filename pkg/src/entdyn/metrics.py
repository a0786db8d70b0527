"""Peres-Horodecki diagnostics: PT spectrum, negativity and the horizon verdict."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Propagator, TimeGrid, Trajectory
from .hilbert import Bipartition, CompositeSpace, partial_trace, partial_transpose
from .models import Model, build
from .thermal import DensityMatrix

DEFAULT_THRESHOLD = 1e-10
NEGATIVITY_FLOOR = 1e-13


@dataclass(frozen=True)
class PTVerdict:
    min_eig_over_time: float
    time_of_min: float
    entangled: bool
    threshold: float
    mean_negativity: float = 0.0


def _bipartite(rho: DensityMatrix, part: Bipartition | None) -> Bipartition:
    return Bipartition.first(rho.space.n) if part is None else part


def pt_spectrum(rho: DensityMatrix, part: Bipartition | None = None,
                side: str = "left") -> np.ndarray:
    pt = partial_transpose(rho.matrix, rho.space, _bipartite(rho, part), side)
    return np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))


def min_pt_eig(rho: DensityMatrix, part: Bipartition | None = None,
               side: str = "left") -> float:
    return float(pt_spectrum(rho, part, side)[0])


def _negativity_from_spectrum(eigs: np.ndarray) -> np.ndarray:
    neg = -np.sum(np.minimum(eigs, 0.0), axis=-1)
    return np.where(neg < NEGATIVITY_FLOOR, 0.0, neg)


def negativity(rho: DensityMatrix, part: Bipartition | None = None) -> float:
    """(‖ρ^{T}‖₁ - 1)/2, i.e. the magnitude of the summed negative PT eigenvalues."""
    return float(_negativity_from_spectrum(pt_spectrum(rho, part)))


def reduce_state(rho: DensityMatrix, keep) -> DensityMatrix:
    keep = sorted(keep)
    if keep == list(range(rho.space.n)):
        return rho
    return DensityMatrix(partial_trace(rho.matrix, rho.space, keep),
                         rho.space.subspace(keep))


def time_averaged_negativity(traj: Trajectory, part: Bipartition | None = None,
                             keep=None) -> float:
    """Mean negativity over all samples; ``keep`` first reduces each state."""
    if not traj.states:
        raise ValueError("empty trajectory")
    values = []
    for rho in traj.states:
        if keep is not None:
            rho = reduce_state(rho, keep)
        values.append(negativity(rho, part))
    return float(np.mean(values))


def pt_series(model: Model, temperature: float, grid: TimeGrid,
              propagator: Propagator | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Minimal PT eigenvalue and negativity at every grid sample.

    Direct models use the A|B split; common-bath models first trace out the bath
    and use the B|C split.
    """
    if propagator is None:
        propagator = Propagator(build(model)[1])
    space = model.space
    slots = model.metric_slots
    reduced = space.subspace(slots)
    part = Bipartition.first(reduced.n)
    rho0 = model.initial_state(temperature).matrix
    mins, negs = [], []
    for block in propagator.evolve_many(rho0, grid.times):
        if reduced.n != space.n:
            block = partial_trace(block, space, slots)
        pt = partial_transpose(block, reduced, part)
        eigs = np.linalg.eigvalsh(pt)
        mins.append(eigs[:, 0])
        negs.append(_negativity_from_spectrum(eigs))
    return np.concatenate(mins), np.concatenate(negs)


def verdict_from_series(times: np.ndarray, mins: np.ndarray, negs: np.ndarray,
                        threshold: float = DEFAULT_THRESHOLD) -> PTVerdict:
    k = int(np.argmin(mins))
    lo = float(mins[k])
    return PTVerdict(lo, float(times[k]), lo < -threshold, threshold, float(np.mean(negs)))


def entangles_within_horizon(model: Model, temperature: float, grid: TimeGrid,
                             threshold: float = DEFAULT_THRESHOLD,
                             propagator: Propagator | None = None) -> PTVerdict:
    """Scan the exact trajectory and report its most negative PT eigenvalue."""
    mins, negs = pt_series(model, temperature, grid, propagator)
    return verdict_from_series(grid.times, mins, negs, threshold)
