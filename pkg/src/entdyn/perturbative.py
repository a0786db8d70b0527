"""Closed-form perturbative predictions for interaction-induced entanglement.

Conventions: level indices are 0-based (index 0 is the ground level of each
subsystem), energies are in units with hbar = k_B = 1, and bath transition
frequencies are signed, ω_mn = E_m - E_n.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize

from .dynamics import RESONANCE_TOL, first_order_state, phase_integral
from .errors import CouplingTooLarge, NonpositiveX, ResonantDenominator, TimescaleViolation
from .hilbert import partial_transpose
from .models import DirectModel, IndirectModel, Model
from .thermal import boltzmann_populations

# Lower end of the range of S(t) = sin(a t)[sin(b t) + sin(c t) - sin((a+b+c) t)],
# as produced by s_range() and rounded to 6 decimals.
S_MIN = -1.6875


@dataclass(frozen=True)
class GapTable:
    lowest: float
    table: np.ndarray
    max: float


@dataclass(frozen=True)
class TlbResult:
    """Lower-bound temperature; ``value`` is None when the formula does not apply.

    ``log_argument`` is the quantity inside the logarithm; the formula is valid
    only for 0 < log_argument < 1.
    """

    value: float | None
    log_argument: float
    case: str

    @property
    def defined(self) -> bool:
        return self.value is not None


class EffectivePT(NamedTuple):
    matrix: np.ndarray
    lambda_minus: float
    lambda_plus: float


class SRange(NamedTuple):
    min: float
    max: float


def _tlb(scale: float, log_argument: float, case: str) -> TlbResult:
    if not 0 < log_argument < 1:
        return TlbResult(None, float(log_argument), case)
    return TlbResult(-scale / (2 * math.log(log_argument)), float(log_argument), case)


def gap_table(model: DirectModel) -> GapTable:
    """Joint gaps E_a^{i+1}-E_a^i + E_b^{j+1}-E_b^j."""
    table = np.add.outer(np.diff(model.spectrum_a), np.diff(model.spectrum_b))
    return GapTable(float(table[0, 0]), table, float(table.max()))


def _populations(model: DirectModel, temperature: float) -> tuple[np.ndarray, np.ndarray]:
    return (boltzmann_populations(model.spectrum_a, temperature),
            boltzmann_populations(model.spectrum_b, temperature))


def first_order_M(model: DirectModel, temperature: float, t: float,
                  i: int, k: int, j: int, l: int) -> complex:
    """⟨ik| ρ(t)^{T_a} - ρ(0) |jl⟩ to first order in the coupling.

    γ (P_il - P_jk) ⟨j|V_a|i⟩⟨k|V_b|l⟩ (e^{-iΔt} - 1)/Δ summed over coupling terms,
    with Δ = E_a^i - E_a^j + E_b^l - E_b^k.
    """
    ea, eb = model.spectrum_a, model.spectrum_b
    pa, pb = _populations(model, temperature)
    dp = pa[i] * pb[l] - pa[j] * pb[k]
    amp = sum(g * c.v_a[j, i] * c.v_b[k, l] for g, c in zip(model.strengths, model.couplings))
    if amp == 0:
        return 0j
    delta = ea[i] - ea[j] + eb[l] - eb[k]
    if abs(delta) < RESONANCE_TOL:
        raise ResonantDenominator(f"resonant transition in M[{i}{k},{j}{l}] (Δ = {delta:.3e})")
    return complex(amp * dp * phase_integral(delta, t))


def first_order_pt_correction(model: DirectModel, temperature: float, t: float) -> np.ndarray:
    """The full matrix M = ρ1(t)^{T_a} - ρ(0) in the product energy basis."""
    rho1 = first_order_state(model, temperature, t)
    rho0 = model.initial_state(temperature).matrix
    return partial_transpose(rho1 - rho0, model.space)


def effective_pt_4x4(model: DirectModel, temperature: float, t: float) -> EffectivePT:
    """Effective PT matrix on the levels (11, 12, 21, 22) and the eigenvalues λ∓
    of its (12, 21) block."""
    pa, pb = _populations(model, temperature)
    p11, p12, p21, p22 = pa[0] * pb[0], pa[0] * pb[1], pa[1] * pb[0], pa[1] * pb[1]
    m1122 = first_order_M(model, temperature, t, 0, 0, 1, 1)
    m1221 = first_order_M(model, temperature, t, 0, 1, 1, 0)
    mat = np.array([
        [p11, 0, 0, m1122],
        [0, p12, m1221, 0],
        [0, np.conj(m1221), p21, 0],
        [np.conj(m1122), 0, 0, p22],
    ], dtype=complex)
    s = p12 + p21
    root = math.sqrt(s * s - 4 * (p12 * p21 - abs(m1221) ** 2))
    return EffectivePT(mat, (s - root) / 2, (s + root) / 2)


def _direct_effective_coupling(model: DirectModel) -> float:
    return abs(sum(g * c.v_a[1, 0] * c.v_b[1, 0]
                   for g, c in zip(model.strengths, model.couplings)))


def lambda_minus_amplitude(model: DirectModel, temperature: float) -> float:
    """λ₋ of the (12, 21) block with |M_12,21| replaced by its low-temperature
    amplitude (2/ΔE₁₁)|Σγ_i⟨2|V_a^i|1⟩⟨2|V_b^i|1⟩| P_11."""
    pa, pb = _populations(model, temperature)
    p11, p12, p21 = pa[0] * pb[0], pa[0] * pb[1], pa[1] * pb[0]
    amp = 2 * _direct_effective_coupling(model) / model.lowest_joint_gap * p11
    s = p12 + p21
    return (s - math.sqrt((p12 - p21) ** 2 + 4 * amp * amp)) / 2


def tlb_direct(model: DirectModel) -> TlbResult:
    """Lower-bound temperature for directly coupled systems."""
    de = model.lowest_joint_gap
    return _tlb(de, 2 * _direct_effective_coupling(model) / de, "direct")


def ratio_bound(x: float, gamma: float) -> float:
    """Upper bound (1/x)(γ/x)^{1/x} on the ratio of secondary to leading negative
    PT eigenvalues, in units where ΔE₁₁ = 1."""
    xs = np.asarray(x, dtype=float)
    if not np.all(xs > 0):
        raise NonpositiveX(f"x must be positive, got {x}")
    out = (1 / xs) * (gamma / xs) ** (1 / xs)
    return float(out) if out.ndim == 0 else out


def tuc_star(model: DirectModel, gamma: float | None = None) -> float:
    """Order-of-magnitude upper critical temperature from the largest joint gap."""
    g = model.gamma if gamma is None else float(gamma)
    de_max = gap_table(model).max
    if not 0 < g < de_max:
        raise CouplingTooLarge(f"need 0 < γ < ΔE_max = {de_max:.6g}, got {g}")
    return -de_max / (2 * math.log(g / de_max))


def _bath_transitions(model: IndirectModel, convention: str = "signed"):
    """(p_n |⟨m|V_a|n⟩|², ω_mn) for every coupled bath pair m != n."""
    e = model.spectrum_a
    p = boltzmann_populations(e, model.bath_temperature)
    weights, omegas = [], []
    for m in range(e.size):
        for n in range(e.size):
            w = abs(model.v_a[m, n]) ** 2
            if m == n or w == 0:
                continue
            om = e[m] - e[n]
            weights.append(p[n] * w)
            omegas.append(abs(om) if convention == "absolute" else om)
    return np.array(weights), np.array(omegas)


def timescale_ratio(model: IndirectModel) -> float:
    """Smallest coupled bath gap over the largest system gap (>1 for a fast bath)."""
    _, om = _bath_transitions(model)
    if om.size == 0:
        # a bath coupling without off-diagonal elements never changes the bath state
        return math.inf
    return float(np.min(np.abs(om)) / max(model.omega_b, model.omega_c))


def _check_fast_bath(model: IndirectModel) -> None:
    r = timescale_ratio(model)
    if r < 5:
        warnings.warn(f"bath/system timescale ratio {r:.3g} < 5: fast-bath formulas "
                      "are unreliable", TimescaleViolation, stacklevel=3)
    elif r < 10:
        warnings.warn(f"bath/system timescale ratio {r:.3g} < 10", TimescaleViolation,
                      stacklevel=3)


def second_order_M_fast_bath(model: IndirectModel, t: float) -> tuple[float, float, complex]:
    """Leading-order (in ω_{b,c}/ω^a_mn) second-order elements M_12,12, M_21,21, M_12,21
    of the reduced B⊗C partial transpose, per unit ground population P_11.

    With 0-based indices these are the (1,1), (2,2) and (1,2) entries of the
    4×4 partial transpose.
    """
    _check_fast_bath(model)
    w, om = _bath_transitions(model)
    g2 = model.gamma ** 2
    wb, wc = model.omega_b, model.omega_c
    m1212 = 4 * g2 * abs(model.v_c[0, 1]) ** 2 * np.sum(w * np.sin((om + wc) * t / 2) ** 2 / om ** 2)
    m2121 = 4 * g2 * abs(model.v_b[0, 1]) ** 2 * np.sum(w * np.sin((om + wb) * t / 2) ** 2 / om ** 2)
    # phase chosen to agree with ⟨01|ρ_bc(t)^{T_b}|10⟩ from exact propagation
    m1221 = (2 * g2 * np.conj(model.v_b[1, 0] * model.v_c[1, 0]) * np.sum(w / om)
             * (np.exp(1j * (wb + wc) * t) - 1) / (wb + wc))
    return float(m1212), float(m2121), complex(m1221)


def bath_sum(model: IndirectModel, convention: str = "signed") -> float:
    """Σ_{m,n} p_n |⟨m|V_a|n⟩|² / ω_mn."""
    w, om = _bath_transitions(model, convention)
    return float(np.sum(w / om))


def tlb_slow_fast(model: IndirectModel, convention: str = "signed") -> TlbResult:
    """Lower-bound temperature for two slow systems sharing a fast bath."""
    wbc = model.omega_b + model.omega_c
    total = abs(bath_sum(model, convention))
    if total < 1e-14:
        # infinite bath temperature (or a symmetric bath): no coherence at this order
        total = 0.0
    arg = 4 * model.gamma ** 2 * abs(model.v_b[1, 0] * model.v_c[1, 0]) / wbc * total
    return _tlb(wbc, arg, "slow-fast")


def tlb_fast_slow(model: IndirectModel, s: float = S_MIN) -> TlbResult:
    """Lower-bound temperature for two fast systems sharing a slow bath at T = 0.

    Independent of the bath spectrum."""
    wb, wc = model.omega_b, model.omega_c
    arg = (2 * model.gamma ** 2 * math.sqrt(abs(s)) * abs(model.v_a[1, 0]) ** 2
           * abs(model.v_c[0, 1]) * abs(model.v_b[0, 1]) / (wb * wc))
    return _tlb(wb + wc, arg, "fast-slow")


def tlb(model: Model) -> TlbResult:
    """The lower-bound formula that applies to ``model``."""
    if isinstance(model, DirectModel):
        return tlb_direct(model)
    if timescale_ratio(model) >= 1:
        return tlb_slow_fast(model)
    return tlb_fast_slow(model)


def s_function(t, freqs: Sequence[float] = (1.0, math.sqrt(2), math.sqrt(3))):
    a, b, c = freqs
    t = np.asarray(t, dtype=float)
    return np.sin(a * t) * (np.sin(b * t) + np.sin(c * t) - np.sin((a + b + c) * t))


def _s_phases(x: np.ndarray) -> float:
    a, b, c = x
    return math.sin(a) * (math.sin(b) + math.sin(c) - math.sin(a + b + c))


def s_range(sample_count: int = 1_000_000,
            freqs: Sequence[float] = (1.0, math.sqrt(2), math.sqrt(3)),
            dt: float = 0.1, refine: int = 16) -> SRange:
    """Range of S over a dense time sweep with incommensurate frequencies.

    The best ``refine`` samples at each end seed a local search in which the
    three phases vary independently (incommensurate frequencies make the orbit
    dense on the torus).
    """
    t = np.arange(int(sample_count)) * dt
    s = s_function(t, freqs)
    freqs = np.asarray(freqs, dtype=float)
    out = []
    for sign in (1.0, -1.0):
        order = np.argsort(sign * s)[:refine]
        best = float(np.min(sign * s))
        for k in order:
            res = minimize(lambda x: sign * _s_phases(x), freqs * t[k], method="BFGS",
                           options={"gtol": 1e-12})
            best = min(best, float(res.fun))
        out.append(sign * best)
    return SRange(out[0], out[1])
