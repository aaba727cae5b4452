"""Acceptance gate: the ten primary criteria, one pass/fail line each.

Run with `pytest -v tests/test_acceptance.py` (add -s to see the printed
lines on passing runs; pytest shows them automatically on failures).
"""

import os
import time

import numpy as np
import pytest
from scipy.integrate import quad

from berryring import (
    CouplerParams,
    HalfCirclePath,
    IntegrationConfig,
    RingPath,
    StraightLinePath,
    TabulatedPath,
    adiabatic_alpha_fwhm,
    adjoint,
    bloch_of,
    broadened_transmission,
    calibrate_theta_t,
    eigenbasis,
    evolve,
    find_lambda_zeros,
    frenet_frames,
    fwhm,
    helix_curve,
    modulator_sweep,
    monodromy,
    pz_half_circle_large,
    pz_half_circle_small,
    pz_perturbative_planar,
    pz_straight_line,
    s_matrix,
    solid_angle,
    standard_ring,
    trajectory,
    transition_probability,
    transmission_critical,
)


def _report(num, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance] criterion {num:2d} {status}: {detail}")
    assert ok, f"criterion {num} {status}: {detail}"


@pytest.fixture(scope="module")
def default_sweep():
    """Full-resolution alpha sweep with the calibrated coupler, timed."""
    t0 = time.perf_counter()
    theta_t = calibrate_theta_t()
    coupler = CouplerParams(xi_c=1e-2, xi_l=1e-4, theta_t=theta_t)
    step = 2.5e-4
    alphas = np.arange(-0.15, 0.15 + step / 2, step)
    result = modulator_sweep(alphas, coupler=coupler, max_workers=os.cpu_count())
    elapsed = time.perf_counter() - t0
    return result, coupler, elapsed


def test_criterion_01_first_lambda_zero():
    t0 = time.perf_counter()
    zeros = find_lambda_zeros(count=1)
    elapsed = time.perf_counter() - t0
    lam1 = float(zeros[0])
    ok = abs(lam1 - 1.022) <= 5e-3 and elapsed < 60.0
    _report(1, ok, f"first p_z zero at {lam1:.6f} (1.022 +- 0.005), {elapsed:.1f} s")


def test_criterion_02_sweep_fwhm(default_sweep):
    result, coupler, elapsed = default_sweep

    def p11_of(alphas):
        return modulator_sweep(np.asarray(alphas), coupler=coupler).p11

    width = fwhm(result.alpha, result.p11, refine=p11_of)
    ok = abs(width - 5.1e-3) <= 0.2 * 5.1e-3 and elapsed < 120.0
    _report(2, ok, f"P11 dip FWHM {width:.4e} (5.1e-3 +- 20%), sweep {elapsed:.1f} s")


def test_criterion_03_adiabatic_width():
    width = adiabatic_alpha_fwhm(xi_c=1e-2, xi_l=1e-4)
    ok = abs(width - 1.7e-3) <= 0.1 * 1.7e-3
    _report(3, ok, f"adiabatic-regime width {width:.4e} (1.7e-3 +- 10%)")


def test_criterion_04_full_modulation(default_sweep):
    result, _, _ = default_sweep
    lo, hi = float(result.p11.min()), float(result.p11.max())
    ok = lo <= 0.05 and hi >= 0.95
    _report(4, ok, f"P11 range [{lo:.4f}, {hi:.5f}] (needs <= 0.05 and >= 0.95)")


def test_criterion_05_pi_phase_jump(default_sweep):
    result, _, _ = default_sweep
    i_minus = int(np.argmin(np.abs(result.alpha + 0.1)))
    i_plus = int(np.argmin(np.abs(result.alpha - 0.1)))
    jump11 = abs(result.arg_m11[i_plus] - result.arg_m11[i_minus])
    jump22 = abs(result.arg_m22[i_plus] - result.arg_m22[i_minus])
    ok = abs(jump11 - np.pi) <= 0.2 and abs(jump22 - np.pi) <= 0.2
    _report(5, ok, f"phase steps {jump11:.3f}, {jump22:.3f} rad (pi +- 0.2)")


def test_criterion_06_closed_form_zener():
    worst_large = 0.0
    for lam in (1.5, 2.0, 3.0):
        pert = pz_perturbative_planar(HalfCirclePath(lam=lam)).p_z
        worst_large = max(worst_large, abs(pert - pz_half_circle_large(lam)))
    worst_small = 0.0
    for lam in (0.2, 0.5, 0.8):
        numeric = transition_probability(HalfCirclePath(lam=lam)).p_z
        worst_small = max(worst_small, abs(numeric - pz_half_circle_small(lam)))
    ok = worst_large <= 0.02 and worst_small <= 0.05
    _report(
        6,
        ok,
        f"|pert - large form| <= {worst_large:.2e} (0.02), "
        f"|numeric - small form| <= {worst_small:.2e} (0.05)",
    )


def test_criterion_07_straight_line_law():
    worst = 0.0
    for delta in (0.5, 1.0):
        numeric = transition_probability(StraightLinePath(delta=delta)).p_z
        closed = pz_straight_line(delta)
        worst = max(worst, abs(numeric / closed - 1.0))
    ok = worst <= 0.30
    _report(7, ok, f"|M12|^2 vs exp(-pi delta/gamma): worst rel err {worst:.4f} (0.30)")


def test_criterion_08_broadening_closed_form():
    def oracle(vt, q, dvt):
        def integrand(u):
            return transmission_critical(vt + dvt * np.tan(u), q) / np.pi

        value, _ = quad(integrand, -np.pi / 2, np.pi / 2, limit=200)
        return value

    worst = 0.0
    for vt in np.linspace(-0.04, 0.04, 5):
        for q in (50.0, 100.0, 200.0, 400.0, 800.0):
            for dvt in (1e-3, 2e-3, 5e-3, 1e-2, 2e-2):
                closed = broadened_transmission(vt, q, dvt)
                worst = max(worst, abs(closed - oracle(vt, q, dvt)) / closed)
    floor_err = 0.0
    for q in (50.0, 200.0, 800.0):
        for dvt in (1e-3, 5e-3, 2e-2):
            floor = broadened_transmission(0.0, q, dvt)
            floor_err = max(floor_err, abs(floor - q * dvt / (1 + q * dvt)))
    ok = worst <= 1e-6 and floor_err <= 1e-9
    _report(
        8,
        ok,
        f"quadrature rel err {worst:.2e} (1e-6) on 5x5x5 grid, "
        f"dip-floor err {floor_err:.2e} (1e-9)",
    )


def test_criterion_09_structural_invariants():
    checks = {}

    ring = standard_ring(alpha=0.1)
    u = evolve(ring)
    checks["evolve unitary 1e-9"] = float(
        np.max(np.abs(adjoint(u) @ u - np.eye(2)))
    ) < 1e-9

    rng = np.random.default_rng(11)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(a)
    m_unitary = q * (np.diag(r) / np.abs(np.diag(r)))
    s = s_matrix(m_unitary, CouplerParams(xi_c=1e-2, xi_l=0.0, theta_t=0.4))
    checks["S unitary 1e-10"] = float(
        np.max(np.abs(adjoint(s) @ s - np.eye(2)))
    ) < 1e-10

    psi0 = eigenbasis(HalfCirclePath(lam=5.0).kappa_at(0.0).kappa)[:, 1]
    traj = trajectory(HalfCirclePath(lam=5.0), psi0, n_samples=101)
    norms = np.linalg.norm(traj.bloch, axis=1)
    checks["Bloch norm 1e-8"] = float(np.max(np.abs(norms - 1.0))) < 1e-8

    m = monodromy(standard_ring(alpha=0.07))
    checks["|M12|^2=|M21|^2 1e-9"] = (
        abs(abs(m[0, 1]) ** 2 - abs(m[1, 0]) ** 2) < 1e-9
    )

    path = StraightLinePath(delta=0.7)
    ref = evolve(path, config=IntegrationConfig(steps_per_unit=3200.0))
    errs = [
        np.max(np.abs(evolve(path, config=IntegrationConfig(steps_per_unit=spu)) - ref))
        for spu in (100.0, 200.0, 400.0)
    ]
    ratios = (errs[0] / errs[1], errs[1] / errs[2])
    checks["order ratio in [3.3, 4.8]"] = all(3.3 <= r <= 4.8 for r in ratios)

    th = np.linspace(-np.pi, np.pi, 4001)
    kap = np.column_stack([0.8 * np.cos(th), 0 * th, 0.8 * np.sin(th)])
    s_grid = np.linspace(0.0, 2 * np.pi * 0.8, 4001)
    circle = RingPath(segments=(TabulatedPath(s_nodes=s_grid, kappa_nodes=kap),))
    omega = solid_angle(circle)
    checks["solid angle 2 pi n 1e-3"] = abs(abs(omega) - 2 * np.pi) < 1e-3

    frames = frenet_frames(helix_curve(1.0, 0.5))
    curv = np.array([f.curvature for f in frames[5:-5]])
    tors = np.array([f.torsion for f in frames[5:-5]])
    checks["helix forms 1e-6"] = (
        float(np.max(np.abs(curv / 0.8 - 1))) < 1e-6
        and float(np.max(np.abs(tors / 0.4 - 1))) < 1e-6
    )

    failed = [name for name, good in checks.items() if not good]
    ok = not failed
    detail = "all 7 invariants hold" if ok else "failed: " + ", ".join(failed)
    _report(9, ok, detail)


def test_criterion_10_pole_to_pole_transport():
    path = HalfCirclePath(lam=1.022)
    lo, _ = path.domain
    basis = eigenbasis(path.kappa_at(lo).kappa)
    down = basis[:, 0] if bloch_of(basis[:, 0])[2] < 0 else basis[:, 1]
    final = evolve(path) @ down
    dist = float(np.linalg.norm(bloch_of(final) - np.array([0.0, 0.0, 1.0])))
    ok = dist <= 0.05
    _report(10, ok, f"final Bloch vector within {dist:.4f} of (0,0,+1) (0.05)")
