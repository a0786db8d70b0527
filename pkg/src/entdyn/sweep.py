"""Brute-force critical temperatures, phase diagrams and negativity curves.

Grid points are independent tasks run on a thread pool (numpy releases the GIL
inside the heavy kernels). Results are always re-sorted, so the pool width
never changes the output.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .dynamics import Propagator, TimeGrid, default_grid
from .errors import BracketFailure
from .metrics import DEFAULT_THRESHOLD, PTVerdict, entangles_within_horizon
from .models import DirectModel, Model, build
from .perturbative import CouplingTooLarge, tlb, tuc_star

DEFAULT_TOL = 1e-3
COARSE_POINTS = 16
MAX_DOUBLINGS = 3


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    T: float
    horizon: float
    min_pt_eig: float
    neg_avg: float
    entangled: bool

    @property
    def verdict(self) -> str:
        return "entangled" if self.entangled else "ppt"


@dataclass(frozen=True)
class CriticalTemperatureResult:
    gamma: float
    T_uc_numeric: float
    T_lc_numeric: float
    monotone: bool
    tol: float
    rows: tuple[SweepRow, ...] = ()


@dataclass(frozen=True)
class BoundaryRow:
    gamma: float
    T_uc_numeric: float
    T_lc_numeric: float
    monotone: bool
    T_lb: float
    log_argument: float
    error: str = ""


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    boundaries: list[BoundaryRow] = field(default_factory=list)
    annotations: dict[str, float] = field(default_factory=dict)


def worker_count(workers: int | None = None) -> int:
    """Pool width: explicit value, else CPU count, capped by ENTDYN_THREADS."""
    n = workers or os.cpu_count() or 1
    cap = os.environ.get("ENTDYN_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def _map(fn: Callable, items: Sequence, workers: int | None) -> list:
    n = worker_count(workers)
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _sorted_rows(rows: Iterable[SweepRow]) -> list[SweepRow]:
    unique = {(r.gamma, r.T): r for r in rows}
    return [unique[k] for k in sorted(unique)]


class _Evaluator:
    """Verdicts for one model at fixed γ, sharing a single H_total diagonalisation."""

    def __init__(self, model: Model, grid: TimeGrid, threshold: float):
        self.model = model
        self.grid = grid
        self.threshold = threshold
        self.propagator = Propagator(build(model)[1])
        self.rows: list[SweepRow] = []

    def verdict(self, temperature: float) -> PTVerdict:
        return entangles_within_horizon(self.model, temperature, self.grid,
                                        self.threshold, self.propagator)

    def row(self, temperature: float) -> SweepRow:
        v = self.verdict(temperature)
        r = SweepRow(self.model.gamma, float(temperature), self.grid.t_end,
                     v.min_eig_over_time, v.mean_negativity, v.entangled)
        self.rows.append(r)
        return r


def default_bracket(model: Model) -> tuple[float, float]:
    de = model.lowest_joint_gap
    return 0.02 * de, de


def find_critical_T(model: Model, gamma: float | None = None, grid: TimeGrid | None = None,
                    T_lo: float | None = None, T_hi: float | None = None,
                    tol: float = DEFAULT_TOL, threshold: float = DEFAULT_THRESHOLD,
                    horizon_multiplier: float = 1.0,
                    workers: int | None = 1) -> CriticalTemperatureResult:
    """Locate the entangled/PPT boundary in temperature by scan plus bisection.

    A coarse scan over [T_lo, T_hi] finds every verdict change; the first and
    last changes are bisected to ``tol``. ``T_uc_numeric`` is the largest
    temperature found entangled, ``T_lc_numeric`` the smallest found PPT.
    """
    if gamma is not None:
        model = model.with_gamma(gamma)
    grid = grid or default_grid(model, horizon_multiplier)
    lo_default, hi_default = default_bracket(model)
    lo = lo_default if T_lo is None else float(T_lo)
    hi = hi_default if T_hi is None else float(T_hi)
    ev = _Evaluator(model, grid, threshold)

    for _ in range(MAX_DOUBLINGS + 1):
        if ev.row(lo).entangled:
            break
        lo /= 2
    else:
        raise BracketFailure(f"no entanglement found down to T = {2 * lo:.4g} (γ = {model.gamma})",
                             _sorted_rows(ev.rows))
    for _ in range(MAX_DOUBLINGS + 1):
        if not ev.row(hi).entangled:
            break
        hi *= 2
    else:
        raise BracketFailure(f"still entangled at T = {hi / 2:.4g} (γ = {model.gamma})",
                             _sorted_rows(ev.rows))

    temps = np.linspace(lo, hi, COARSE_POINTS)
    scan = _map(ev.row, list(temps), workers)
    flags = [r.entangled for r in scan]
    changes = [i for i in range(len(flags) - 1) if flags[i] != flags[i + 1]]
    if not changes:
        raise BracketFailure(f"no verdict change in [{lo:.4g}, {hi:.4g}] (γ = {model.gamma})",
                             _sorted_rows(ev.rows))

    def bisect(i: int) -> tuple[float, float]:
        a, b = temps[i], temps[i + 1]
        while b - a > tol:
            mid = 0.5 * (a + b)
            if ev.row(mid).entangled:
                a = mid
            else:
                b = mid
        return float(a), float(b)

    down = [i for i in changes if flags[i] and not flags[i + 1]]
    first, last = down[0], down[-1]
    lc_bracket = bisect(first)
    uc_bracket = lc_bracket if last == first else bisect(last)
    return CriticalTemperatureResult(
        gamma=model.gamma,
        T_uc_numeric=uc_bracket[0],
        T_lc_numeric=lc_bracket[1],
        monotone=len(changes) == 1,
        tol=tol,
        rows=tuple(_sorted_rows(ev.rows)),
    )


def _boundary(model: Model, crit: CriticalTemperatureResult | None, error: str = "") -> BoundaryRow:
    pred = tlb(model)
    t_lb = pred.value if pred.defined else math.nan
    if crit is None:
        return BoundaryRow(model.gamma, math.nan, math.nan, False, t_lb, pred.log_argument, error)
    return BoundaryRow(model.gamma, crit.T_uc_numeric, crit.T_lc_numeric, crit.monotone,
                       t_lb, pred.log_argument)


def phase_diagram(model: Model, gammas: Sequence[float],
                  T_range: tuple[float, float] | None = None,
                  grid: TimeGrid | None = None, tol: float = DEFAULT_TOL,
                  threshold: float = DEFAULT_THRESHOLD, horizon_multiplier: float = 1.0,
                  workers: int | None = None) -> SweepResult:
    """Critical temperature for each γ, alongside the applicable lower-bound formula.

    A BracketFailure at one γ is recorded in its boundary row, not raised.
    """
    gammas = [float(g) for g in gammas]
    if any(g <= 0 for g in gammas) or gammas != sorted(gammas):
        raise ValueError("gamma values must be positive and ascending")
    lo, hi = T_range if T_range is not None else (None, None)

    def task(g: float):
        m = model.with_gamma(g)
        try:
            crit = find_critical_T(m, None, grid, lo, hi, tol, threshold,
                                   horizon_multiplier, workers=1)
        except BracketFailure as exc:
            return list(exc.rows), _boundary(m, None, str(exc))
        return list(crit.rows), _boundary(m, crit)

    result = SweepResult()
    for rows, boundary in _map(task, gammas, workers):
        result.rows.extend(rows)
        result.boundaries.append(boundary)
    result.rows = _sorted_rows(result.rows)
    return result


def negativity_curve(model: Model, T_values: Sequence[float], grid: TimeGrid | None = None,
                     threshold: float = DEFAULT_THRESHOLD, horizon_multiplier: float = 1.0,
                     annotate: bool = True, tol: float = DEFAULT_TOL,
                     workers: int | None = None) -> SweepResult:
    """Time-averaged negativity at each temperature.

    With ``annotate`` the result also carries T_lb, the numeric T_uc and, for
    direct models, T_uc*.
    """
    temps = [float(t) for t in T_values]
    if temps != sorted(temps):
        raise ValueError("temperatures must be ascending")
    grid = grid or default_grid(model, horizon_multiplier)
    ev = _Evaluator(model, grid, threshold)
    result = SweepResult(rows=_sorted_rows(_map(ev.row, temps, workers)))
    if annotate:
        pred = tlb(model)
        if pred.defined:
            result.annotations["T_lb"] = pred.value
        if isinstance(model, DirectModel):
            try:
                result.annotations["T_uc_star"] = tuc_star(model)
            except CouplingTooLarge:
                pass
        try:
            crit = find_critical_T(model, grid=grid, tol=tol, threshold=threshold,
                                   workers=workers)
            result.annotations["T_uc_numeric"] = crit.T_uc_numeric
            result.annotations["T_lc_numeric"] = crit.T_lc_numeric
        except BracketFailure:
            pass
    return result
