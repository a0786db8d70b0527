import dataclasses
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from entdyn.dynamics import exact_interaction_state, first_order_correction
from entdyn.errors import (CouplingTooLarge, NonpositiveX, ResonantDenominator,
                           TimescaleViolation)
from entdyn.hilbert import CompositeSpace, partial_trace, partial_transpose
from entdyn.models import Coupling, DirectModel, preset
from entdyn.operators import SIGMA_X, SIGMA_Z
from entdyn.perturbative import (S_MIN, bath_sum, effective_pt_4x4, first_order_M,
                                 first_order_pt_correction, gap_table, lambda_minus_amplitude,
                                 ratio_bound, s_function, s_range, second_order_M_fast_bath,
                                 timescale_ratio, tlb, tlb_direct, tlb_fast_slow, tlb_slow_fast,
                                 tuc_star)
from entdyn.thermal import INFINITE, boltzmann_populations


def quiet(fn, *args, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TimescaleViolation)
        return fn(*args, **kw)


def test_gap_table():
    g = gap_table(preset("fourlevel-b"))
    assert g.lowest == pytest.approx(2.73205, abs=1e-5)
    assert g.max == pytest.approx(6 + math.sqrt(13) - math.sqrt(7), abs=1e-12)
    assert g.max == pytest.approx(6.9598, abs=1e-4)
    assert np.all(g.table > 0)


def test_first_order_M_diagonal_vanishes():
    m = preset("fourlevel-a")
    for i, k in [(0, 0), (1, 2), (3, 3)]:
        assert first_order_M(m, 0.4, 1.1, i, k, i, k) == 0


def test_first_order_M_two_spin_amplitude():
    g = 0.01
    m = preset("two-spin", g)
    peak = math.pi / m.lowest_joint_gap
    assert abs(first_order_M(m, 0.0, peak, 0, 1, 1, 0)) == pytest.approx(2 * math.sqrt(2) * g)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["fourlevel-a", "fourlevel-b", "two-spin"]),
       st.floats(0.0, 3.0), st.floats(0.0, 30.0), st.floats(0.001, 0.1))
def test_first_order_M_matches_first_order_state(name, temperature, t, gamma):
    m = preset(name, gamma)
    corr = first_order_pt_correction(m, temperature, t)
    n = m.spectrum_b.size
    for i, k, j, l in [(0, 1, 1, 0), (0, 0, 1, 1), (1, 2, 2, 1) if n > 2 else (1, 0, 0, 1)]:
        assert first_order_M(m, temperature, t, i, k, j, l) == pytest.approx(
            corr[i * n + k, j * n + l], abs=1e-12)


def test_first_order_M_resonance():
    m = DirectModel([0.0, 1.0], [0.0, 1.0], (Coupling(1.0, SIGMA_X, SIGMA_X),), gamma=0.1)
    with pytest.raises(ResonantDenominator):
        first_order_M(m, 0.5, 1.0, 0, 0, 1, 1)
    assert first_order_M(m, 0.5, 1.0, 0, 1, 1, 0) != 0


def test_effective_pt_without_coupling():
    m = preset("fourlevel-a", 0.0)
    pa = boltzmann_populations(m.spectrum_a, 0.5)
    pb = boltzmann_populations(m.spectrum_b, 0.5)
    e = effective_pt_4x4(m, 0.5, 1.0)
    p = [pa[0] * pb[0], pa[0] * pb[1], pa[1] * pb[0], pa[1] * pb[1]]
    assert np.allclose(e.matrix, np.diag(p))
    assert e.lambda_minus == pytest.approx(min(p[1], p[2]))


def test_effective_pt_two_spin_is_the_full_matrix():
    m = preset("two-spin", 0.02)
    peak = math.pi / m.lowest_joint_gap
    for temperature, t in [(0.1, peak), (0.2, 0.7 * peak), (0.0, 3 * peak)]:
        e = effective_pt_4x4(m, temperature, t)
        full = m.initial_state(temperature).matrix + first_order_pt_correction(m, temperature, t)
        assert np.allclose(e.matrix, full, atol=1e-14)
        assert e.lambda_minus < 0
        assert e.lambda_minus == pytest.approx(np.linalg.eigvalsh(full)[0], abs=1e-10)


def test_effective_pt_fourlevel_a_against_exact():
    m = preset("fourlevel-a")
    t = math.pi / m.lowest_joint_gap
    gaps = []
    for g in (0.05, 0.025):
        mm = m.with_gamma(g)
        lam = effective_pt_4x4(mm, 0.3, t).lambda_minus
        exact = np.linalg.eigvalsh(partial_transpose(exact_interaction_state(mm, 0.3, t),
                                                     mm.space))[0]
        assert lam < 0
        gaps.append(abs(lam - exact))
    assert 3 <= gaps[0] / gaps[1] <= 6


def test_negative_eigenvalue_condition():
    m = preset("fourlevel-b", 0.05)
    t = math.pi / m.lowest_joint_gap
    for temperature in (0.1, 0.3, 0.6, 1.0):
        e = effective_pt_4x4(m, temperature, t)
        p12, p21, m1221 = e.matrix[1, 1].real, e.matrix[2, 2].real, e.matrix[1, 2]
        assert (e.lambda_minus < 0) == (p12 * p21 < abs(m1221) ** 2)


def test_tlb_direct_examples():
    r = tlb_direct(preset("two-spin", 0.01))
    assert r.case == "direct"
    assert r.log_argument == pytest.approx(2 * math.sqrt(2) * 0.01)
    assert r.value == pytest.approx(-math.sqrt(2) / (2 * math.log(2 * math.sqrt(2) * 0.01)))
    assert r.value == pytest.approx(0.1983, abs=1e-4)
    a = tlb_direct(preset("fourlevel-a"))
    assert a.value == pytest.approx(-5.23607 / (2 * math.log(0.1 / 5.23607)), rel=1e-5)
    assert a.value == pytest.approx(0.661, abs=1e-3)


def test_tlb_direct_undefined_cases():
    zz = DirectModel([0, 1], [0, 1.4], (Coupling(1.0, SIGMA_Z, SIGMA_Z),), gamma=0.01)
    assert not tlb_direct(zz).defined
    strong = tlb_direct(preset("two-spin", 1.0))
    assert not strong.defined and strong.log_argument > 1


def test_lambda_minus_changes_sign_at_tlb():
    for name in ("two-spin", "fourlevel-a", "fourlevel-b"):
        m = preset(name)
        t_lb = tlb_direct(m).value
        assert lambda_minus_amplitude(m, 0.99 * t_lb) < 0 < lambda_minus_amplitude(m, 1.01 * t_lb)


def test_ratio_bound_examples():
    assert ratio_bound(1.0, 0.037) == pytest.approx(0.037)
    assert ratio_bound(2.0, 0.05) == pytest.approx(0.5 * math.sqrt(0.025))
    assert ratio_bound(2.0, 0.05) == pytest.approx(0.0790, abs=1e-4)
    with pytest.raises(NonpositiveX):
        ratio_bound(0.0, 0.1)


def _ratio_bound_local_max(gamma):
    # stationary point of ln f = -ln x + (ln γ - ln x)/x:  ln x - x = 1 + ln γ
    x = brentq(lambda x: math.log(x) - x - 1 - math.log(gamma), 1.0, 200.0)
    return x, ratio_bound(x, gamma)


@pytest.mark.parametrize("gamma", [1e-4, 1e-3, 1e-2, 1e-1])
def test_ratio_bound_local_maximum_matches_grid_search(gamma):
    x = np.linspace(1.0, 50.0, 400001)[1:]
    f = ratio_bound(x, gamma)
    x_star, f_star = _ratio_bound_local_max(gamma)
    assert x[np.argmax(f)] == pytest.approx(x_star, abs=1e-3)
    assert f.max() == pytest.approx(f_star, rel=1e-9)


@pytest.mark.parametrize("gamma", [1e-4, 1e-3, 1e-2, 1e-1])
def test_ratio_bound_local_maximum_stated_range(gamma):
    x_star, f_star = _ratio_bound_local_max(gamma)
    assert 2 <= round(x_star) <= 10
    assert 0.04 <= f_star <= 0.1


def test_tuc_star():
    assert tuc_star(preset("fourlevel-b")) == pytest.approx(0.705, abs=1e-3)
    a = preset("fourlevel-a")
    assert gap_table(a).max == pytest.approx(gap_table(a).lowest)
    assert tuc_star(a) == pytest.approx(0.563, abs=1e-3)
    values = [tuc_star(a, g) for g in (0.05, 0.01, 1e-3, 1e-5, 1e-9)]
    assert all(x > y for x, y in zip(values, values[1:]))
    assert values[-1] < 0.15
    with pytest.raises(CouplingTooLarge):
        tuc_star(a, 6.0)


def test_secular_matrix_traceless_at_zero_temperature():
    for name in ("two-spin", "fourlevel-a", "fourlevel-b"):
        m = preset(name)
        corr = first_order_pt_correction(m, 0.0, 0.9)
        zero_block = np.real(np.diag(m.initial_state(0.0).matrix)) == 0
        assert abs(np.trace(corr[np.ix_(zero_block, zero_block)])) < 1e-15


@pytest.mark.parametrize("name", ["two-spin", "fourlevel-a", "slow-spins-fast-bath",
                                  "fast-spins-slow-bath"])
def test_tlb_increasing_in_gamma(name):
    m = preset(name)
    values = []
    for g in np.logspace(-3, 0, 25):
        r = quiet(tlb, m.with_gamma(g))
        if r.defined:
            values.append(r.value)
    assert len(values) > 5
    assert all(x < y for x, y in zip(values, values[1:]))


def test_second_order_M_at_zero_time():
    m = preset("slow-spins-fast-bath", 0.1)
    assert quiet(second_order_M_fast_bath, m, 0.0) == (0.0, 0.0, 0j)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 100.0))
def test_second_order_diagonal_elements_nonnegative(t):
    a, b, c = quiet(second_order_M_fast_bath, preset("slow-spins-fast-bath", 0.1), t)
    assert isinstance(a, float) and isinstance(b, float)
    assert a >= 0 and b >= 0


def _scaled_bath(model, k):
    return dataclasses.replace(model, spectrum_a=model.spectrum_a * k,
                               bath_temperature=model.bath_temperature * k)


def test_second_order_M_against_exact_reduced_state():
    base = preset("slow-spins-fast-bath", 0.02)
    for k in (1, 2, 4, 8):
        m = _scaled_bath(base, k)
        t = math.pi / (m.omega_b + m.omega_c)
        _, _, c = quiet(second_order_M_fast_bath, m, t)
        rho = exact_interaction_state(m, 0.0, t)
        pt = partial_transpose(partial_trace(rho, m.space, (1, 2)), CompositeSpace((2, 2)))
        assert abs(pt[1, 2] - c) / abs(c) < 1.5 / timescale_ratio(m)


def test_slow_fast_lambda_minus_is_minus_abs_M():
    base = preset("slow-spins-fast-bath", 0.1)
    for k in (1, 2, 4, 8):
        m = _scaled_bath(base, k)
        a, b, c = quiet(second_order_M_fast_bath, m, math.pi / (m.omega_b + m.omega_c))
        lam = (a + b) / 2 - math.sqrt(((a - b) / 2) ** 2 + abs(c) ** 2)
        assert abs(lam + abs(c)) / abs(c) < 3 / timescale_ratio(m)


def test_first_order_reduced_correction_vanishes():
    for name in ("slow-spins-fast-bath", "fast-spins-slow-bath"):
        m = preset(name, 0.1)
        rho0 = m.initial_state(0.4).matrix
        corr = first_order_correction(m.unperturbed_energies(), m.coupling_operator(),
                                      np.real(np.diag(rho0)), 1.7)
        assert np.abs(partial_trace(corr, m.space, (1, 2))).max() < 1e-12


def test_timescale_warnings():
    slow = preset("slow-spins-fast-bath", 0.1)
    assert timescale_ratio(slow) == pytest.approx(10 / math.sqrt(2))
    with pytest.warns(TimescaleViolation, match="< 10"):
        second_order_M_fast_bath(slow, 1.0)
    with pytest.warns(TimescaleViolation, match="unreliable"):
        second_order_M_fast_bath(_scaled_bath(slow, 0.5), 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        second_order_M_fast_bath(_scaled_bath(slow, 2.0), 1.0)


def test_bath_sum_telescopes():
    m = preset("slow-spins-fast-bath")
    p = boltzmann_populations(m.spectrum_a, m.bath_temperature)
    assert bath_sum(m) == pytest.approx((p[0] - p[3]) / 10, rel=1e-12)
    assert bath_sum(m, "absolute") > bath_sum(m)


def test_tlb_slow_fast_example():
    m = preset("slow-spins-fast-bath", 0.1)
    r = tlb_slow_fast(m)
    p = boltzmann_populations(m.spectrum_a, 5.0)
    wbc = 1 + math.sqrt(2)
    arg = 4 * 0.01 / wbc * (p[0] - p[3]) / 10
    assert r.log_argument == pytest.approx(arg, rel=1e-12)
    assert r.value == pytest.approx(0.184, abs=1e-3)
    assert tlb(m) == r
    values = [tlb_slow_fast(m.with_gamma(g)).value for g in (1e-2, 1e-4, 1e-8, 1e-16, 1e-64)]
    assert all(x > y for x, y in zip(values, values[1:]))
    assert values[-1] < 0.01


def test_tlb_slow_fast_undefined_at_infinite_bath_temperature():
    m = dataclasses.replace(preset("slow-spins-fast-bath", 0.1), bath_temperature=INFINITE)
    assert not tlb_slow_fast(m).defined


def test_tlb_slow_fast_continuous_in_spin_gaps():
    m = preset("slow-spins-fast-bath", 0.3)
    values = []
    for s in np.linspace(1.0, 2.0, 11):
        mm = dataclasses.replace(m, spectrum_b=m.spectrum_b * s, spectrum_c=m.spectrum_c * s)
        values.append(tlb_slow_fast(mm).value)
    steps = np.abs(np.diff(values))
    assert steps.max() < 0.05 * max(values)


def test_s_function_range_and_stored_constant():
    r = s_range(100_000)
    assert r.max == pytest.approx(3.0, abs=1e-6)
    assert r.min == pytest.approx(-27 / 16, abs=1e-6)
    assert S_MIN == pytest.approx(round(r.min, 6))
    t = np.random.default_rng(0).uniform(0, 1e5, 200_000)
    s = s_function(t)
    assert s.min() >= r.min - 1e-6 and s.max() <= r.max + 1e-6


def test_tlb_fast_slow_example():
    m = preset("fast-spins-slow-bath", 0.5)
    r = tlb_fast_slow(m)
    wb, wc = 10.0, 10 * math.sqrt(2)
    arg = 2 * 0.25 * math.sqrt(abs(S_MIN)) / (wb * wc)
    assert r.log_argument == pytest.approx(arg)
    assert r.value == pytest.approx(-(wb + wc) / (2 * math.log(arg)))
    assert r.value == pytest.approx(2.24, abs=0.01)
    assert tlb(m) == r


def test_tlb_fast_slow_independent_of_bath_spectrum():
    m = preset("fast-spins-slow-bath", 0.5)
    other = dataclasses.replace(m, spectrum_a=np.array([0.0, 0.3, 1.1, 1.5]))
    assert tlb_fast_slow(other).value == tlb_fast_slow(m).value
    assert tlb_fast_slow(m.with_gamma(1e-8)).value < 0.5
