"""Acceptance criteria 1-9.

Each test prints one ``PASS``/``FAIL`` line (visible without ``-s``) and then
asserts. Tolerances are pinned below and are not relaxed when a check fails.
"""

import math
import os
import subprocess
import sys
import time
import warnings
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st

from entdyn.dynamics import default_grid, evolve, exact_interaction_state, first_order_state
from entdyn.errors import TimescaleViolation
from entdyn.hilbert import CompositeSpace, partial_transpose
from entdyn.metrics import negativity, pt_series, pt_spectrum
from entdyn.models import preset
from entdyn.perturbative import (s_range, tlb_direct, tlb_fast_slow, tlb_slow_fast,
                                 tuc_star)
from entdyn.sweep import find_critical_T, negativity_curve
from entdyn.thermal import INFINITE, DensityMatrix, product_state
from conftest import random_density, random_hermitian, random_unitary

# criterion 1
S_SAMPLES = 1_000_000
S_MAX, S_MAX_TOL = 3.000, 0.001
S_MIN, S_MIN_TOL = -1.6834, 0.001
S_RUNTIME = 30.0
# criterion 2
C2_GAMMAS = (0.01, 0.03, 0.1)
C2_REL = 0.10
C2_TOL = 1e-4
C2_RUNTIME = 60.0
# criteria 3 and 4
C34_GAMMA = 0.05
C3_QUIET = 1e-4
C3_COLD = 1e-3
C3_TEMPS = np.linspace(0.05, 1.2, 24)
C3_INTERIOR = 16
C4_REL = 0.30
C34_RUNTIME = 300.0
# criterion 5
C5_GAMMAS = (0.1, 0.3, 1.0)
C5_REL = 0.15
C5_TOL = 1e-3
C5_HORIZON_SHIFT = 5 * C5_TOL
C5_RUNTIME = 300.0
# criterion 6
C6_GAMMAS = (0.3, 0.5, 1.0)
C6_REL = 0.20
C6_RUNTIME = 300.0
# criterion 7
C7_GAMMAS = (0.05, 0.025)
C7_RATIO = (3.0, 6.0)
# criterion 8
C8_TOL = 1e-10
C8_PRODUCT_TOL = 1e-12
C8_BATH_NEG = 1e-8


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")


def test_criterion_1_s_range(capsys):
    t0 = time.perf_counter()
    r = s_range(S_SAMPLES)
    elapsed = time.perf_counter() - t0
    ok_max = abs(r.max - S_MAX) <= S_MAX_TOL
    ok_min = abs(r.min - S_MIN) <= S_MIN_TOL
    ok = ok_max and ok_min and elapsed < S_RUNTIME
    report(capsys, 1, ok, f"S range max={r.max:.6f} (want {S_MAX}±{S_MAX_TOL}), "
                          f"min={r.min:.6f} (want {S_MIN}±{S_MIN_TOL}), {elapsed:.1f}s")
    assert ok_max
    assert ok_min, f"min {r.min:.6f} outside {S_MIN}±{S_MIN_TOL}"
    assert elapsed < S_RUNTIME


def test_criterion_2_two_spin_boundary(capsys):
    t0 = time.perf_counter()
    lines, ok = [], True
    for g in C2_GAMMAS:
        m = preset("two-spin", g)
        r = find_critical_T(m, tol=C2_TOL)
        t_lb = tlb_direct(m).value
        rel = abs(r.T_uc_numeric - t_lb) / t_lb
        gap = abs(r.T_lc_numeric - r.T_uc_numeric)
        ok &= rel <= C2_REL and gap <= 2 * C2_TOL
        lines.append(f"γ={g}: T_uc={r.T_uc_numeric:.5f} T_lc={r.T_lc_numeric:.5f} "
                     f"T_lb={t_lb:.5f} rel={rel:.4f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < C2_RUNTIME
    report(capsys, 2, ok, "; ".join(lines) + f"; {elapsed:.1f}s")
    assert ok


def _gap_between_bounds(name):
    m = preset(name, C34_GAMMA)
    res = negativity_curve(m, C3_TEMPS, annotate=True)
    t_lb = res.annotations["T_lb"]
    t_uc = res.annotations["T_uc_numeric"]
    # the figure grid plus a dense interior sweep of the gap itself
    interior = negativity_curve(m, np.linspace(t_lb, t_uc, C3_INTERIOR + 2)[1:-1],
                                annotate=False).rows
    inside = [r for r in res.rows if t_lb < r.T < t_uc] + interior
    worst = max((r.neg_avg for r in inside), default=0.0)
    cold = negativity_curve(m, [0.5 * t_lb], annotate=False).rows[0].neg_avg
    return m, t_lb, t_uc, inside, worst, cold


def test_criterion_3_and_4_four_level_curves(capsys):
    t0 = time.perf_counter()
    ok3, parts = True, []
    t_uc_b = None
    for name in ("fourlevel-a", "fourlevel-b"):
        m, t_lb, t_uc, inside, worst, cold = _gap_between_bounds(name)
        ok3 &= bool(inside) and worst < C3_QUIET and cold > C3_COLD
        parts.append(f"{name}: {len(inside)} samples in ({t_lb:.3f}, {t_uc:.3f}) "
                     f"max⟨N⟩={worst:.2e}, ⟨N⟩(T_lb/2)={cold:.2e}")
        if name == "fourlevel-b":
            t_uc_b, star = t_uc, tuc_star(m)
    elapsed = time.perf_counter() - t0
    ok3 &= elapsed < C34_RUNTIME
    rel4 = abs(t_uc_b - star) / star
    ok4 = rel4 <= C4_REL and elapsed < C34_RUNTIME
    report(capsys, 3, ok3, "; ".join(parts) + f"; {elapsed:.1f}s")
    report(capsys, 4, ok4, f"fourlevel-b T_uc={t_uc_b:.4f} vs T_uc*={star:.4f}, "
                           f"rel={rel4:.3f} (limit {C4_REL})")
    assert ok3
    assert ok4


def test_criterion_5_slow_spins_fast_bath(capsys):
    t0 = time.perf_counter()
    ok, parts = True, []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TimescaleViolation)
        for g in C5_GAMMAS:
            m = preset("slow-spins-fast-bath", g)
            r = find_critical_T(m, tol=C5_TOL)
            longer = find_critical_T(m, tol=C5_TOL, horizon_multiplier=2.0)
            t_lb = tlb_slow_fast(m).value
            rel = abs(r.T_uc_numeric - t_lb) / t_lb
            shift = abs(longer.T_uc_numeric - r.T_uc_numeric)
            ok &= rel <= C5_REL and shift < C5_HORIZON_SHIFT
            parts.append(f"γ={g}: T_uc={r.T_uc_numeric:.4f} T_lb={t_lb:.4f} rel={rel:.3f} "
                         f"2×horizon shift={shift:.1e}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < C5_RUNTIME
    report(capsys, 5, ok, "; ".join(parts) + f"; {elapsed:.1f}s")
    assert ok


def test_criterion_6_fast_spins_slow_bath(capsys):
    t0 = time.perf_counter()
    ok, parts = True, []
    for g in C6_GAMMAS:
        m = preset("fast-spins-slow-bath", g)
        r = find_critical_T(m)
        t_lb = tlb_fast_slow(m).value
        rel = abs(r.T_uc_numeric - t_lb) / t_lb
        ok &= rel <= C6_REL
        parts.append(f"γ={g}: T_uc={r.T_uc_numeric:.4f} T_lb={t_lb:.4f} rel={rel:.3f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < C6_RUNTIME
    report(capsys, 6, ok, "; ".join(parts) + f"; {elapsed:.1f}s")
    assert ok


def test_criterion_7_first_order_residual(capsys):
    m = preset("fourlevel-a")
    t = math.pi / m.lowest_joint_gap
    temperature = 0.3
    res = []
    for g in C7_GAMMAS:
        mm = m.with_gamma(g)
        res.append(np.linalg.norm(exact_interaction_state(mm, temperature, t)
                                  - first_order_state(mm, temperature, t)))
    ratio = res[0] / res[1]
    ok = C7_RATIO[0] <= ratio <= C7_RATIO[1]
    report(capsys, 7, ok, f"residual {res[0]:.3e} → {res[1]:.3e}, ratio {ratio:.3f} "
                          f"(want {C7_RATIO[0]}-{C7_RATIO[1]})")
    assert ok


dims = st.integers(2, 4)
seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(seeds, dims, dims)
def _pt_invariances(seed, da, db):
    rng = np.random.default_rng(seed)
    space = CompositeSpace((da, db))
    rho = DensityMatrix(random_density(rng, da * db, rank=int(rng.integers(1, 3))), space)
    left, right = pt_spectrum(rho, side="left"), pt_spectrum(rho, side="right")
    assert np.max(np.abs(left - right)) < C8_TOL
    u = np.kron(random_unitary(rng, da), random_unitary(rng, db))
    rotated = pt_spectrum(DensityMatrix(u @ rho.matrix @ u.conj().T, space))
    assert np.max(np.abs(left - rotated)) < C8_TOL
    m = rng.normal(size=(da * db,) * 2) + 1j * rng.normal(size=(da * db,) * 2)
    assert np.array_equal(partial_transpose(partial_transpose(m, space), space), m)


@settings(max_examples=60, deadline=None)
@given(seeds, dims, dims)
def _product_negativity(seed, da, db):
    rng = np.random.default_rng(seed)
    rho = product_state([DensityMatrix(random_density(rng, da), CompositeSpace((da,))),
                         DensityMatrix(random_density(rng, db), CompositeSpace((db,)))])
    assert negativity(rho) < C8_PRODUCT_TOL


@settings(max_examples=60, deadline=None)
@given(seeds, dims, dims, st.floats(0, 50))
def _unitary_conservation(seed, da, db, t):
    rng = np.random.default_rng(seed)
    d = da * db
    rho0 = DensityMatrix(random_density(rng, d, rank=int(rng.integers(1, d + 1))),
                         CompositeSpace((da, db)))
    rho = evolve(random_hermitian(rng, d), rho0, t).matrix
    assert abs(np.trace(rho) - 1) < C8_TOL
    assert np.max(np.abs(rho - rho.conj().T)) < C8_TOL
    purity0 = np.trace(rho0.matrix @ rho0.matrix).real
    assert abs(np.trace(rho @ rho).real - purity0) < C8_TOL


def _infinite_bath():
    base = preset("slow-spins-fast-bath", 0.1)
    m = type(base)(base.spectrum_a, base.spectrum_b, base.spectrum_c, base.gamma, base.v_a,
                   base.v_b, base.v_c, INFINITE)
    _, negs = pt_series(m, 0.0, default_grid(m))
    assert negs.max() < C8_BATH_NEG
    return negs.max()


def test_criterion_8_invariant_suites(capsys):
    checks = {
        "PT side and local-unitary invariance, involution": _pt_invariances,
        "product-state negativity": _product_negativity,
        "unitary conservation": _unitary_conservation,
        "infinite-bath B⊗C negativity": _infinite_bath,
    }
    failed = []
    for label, fn in checks.items():
        try:
            fn()
        except AssertionError as exc:
            failed.append(f"{label} ({exc.__class__.__name__})")
    ok = not failed
    report(capsys, 8, ok, "all invariant suites hold" if ok else "failed: " + ", ".join(failed))
    assert ok, failed


def _reproduce(out, threads):
    env = dict(os.environ, ENTDYN_THREADS=str(threads))
    subprocess.run([sys.executable, "-m", "entdyn", "reproduce", "fig1", "--out", str(out),
                    "--threads", "8", "--no-svg"], check=True, env=env,
                   stdout=subprocess.DEVNULL)
    return (Path(out) / "fig1.csv").read_bytes(), (Path(out) / "fig1.boundary.csv").read_bytes()


def test_criterion_9_determinism(capsys, tmp_path):
    first = _reproduce(tmp_path / "a", 8)
    second = _reproduce(tmp_path / "b", 8)
    serial = _reproduce(tmp_path / "c", 1)
    ok = first == second == serial
    report(capsys, 9, ok, f"fig1 CSV ({len(first[0])} bytes) identical across two runs and "
                          f"ENTDYN_THREADS=1 vs 8: {ok}")
    assert ok
