"""Entanglement generation between weakly coupled quantum systems at finite temperature.

Exact propagation, partial-transpose metrics, perturbative lower-bound
temperatures and brute-force critical-temperature sweeps.
"""

from .dynamics import Propagator, TimeGrid, Trajectory, default_grid, evolve, trajectory
from .errors import *  # noqa: F401,F403
from .hilbert import Bipartition, CompositeSpace, embed, partial_trace, partial_transpose
from .metrics import PTVerdict, entangles_within_horizon, min_pt_eig, negativity, pt_spectrum
from .models import Coupling, DirectModel, IndirectModel, build, preset, PRESETS
from .operators import commutator, dagger, herm_eig, kron
from .perturbative import (effective_pt_4x4, first_order_M, ratio_bound, s_range, tlb,
                           tlb_direct, tlb_fast_slow, tlb_slow_fast, tuc_star)
from .sweep import SweepResult, SweepRow, find_critical_T, negativity_curve, phase_diagram
from .thermal import INFINITE, DensityMatrix, gibbs, product_state

__version__ = "0.1.0"
