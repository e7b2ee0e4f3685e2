"""Acceptance criteria 1-10, each at its stated tolerance.

Every test prints a single ``CRITERION n: PASS|FAIL ...`` line to the
terminal (bypassing capture) before asserting.
"""

import time

import numpy as np
import pytest

from phwitness import states
from phwitness.cli import run_audit
from phwitness.linalg import QUBIT_QUBIT, QUBIT_QUTRIT
from phwitness.optimize import OptimizerConfig, maximize_i_ph
from phwitness.sampler import estimate_i_ph, sample_shots
from phwitness.unitaries import local_unitaries, random_settings
from phwitness.witness import (
    chsh_max,
    degree_of_entanglement,
    joint_probabilities,
    local_povms,
    probability_coefficients,
    werner_formula,
    x_operators,
    y_operator_path,
    y_triple,
)

DEFAULT = OptimizerConfig()


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {number}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail

    return emit


def batched_y(rho, params):
    """Probability-path Y triples for a batch of settings."""
    dims = rho.dims
    u, v = local_unitaries(params, dims)
    fa, fb = local_povms(dims)
    ra = u[:, None] @ fa.elements[None] @ np.swapaxes(u.conj(), -1, -2)[:, None]
    rb = v[:, None] @ fb.elements[None] @ np.swapaxes(v.conj(), -1, -2)[:, None]
    t = rho.matrix.reshape(dims.a, dims.b, dims.a, dims.b)
    p = np.real(np.einsum("xyXY,miXx,mjYy->mij", t, ra, rb))
    return np.einsum("kij,mij->mk", probability_coefficients(dims), p)


def test_criterion_01_werner_line(report):
    start = time.perf_counter()
    worst = 0.0
    for alpha in np.linspace(0, 1, 11):
        value = maximize_i_ph(states.werner(np.pi / 4, alpha), DEFAULT).best_value
        worst = max(worst, abs(value - (3 * alpha - 1) * (1 + alpha)))
    elapsed = time.perf_counter() - start
    report(1, worst <= 1e-3 and elapsed <= 60, f"max |numeric - (3a-1)(1+a)| = {worst:.2e}, {elapsed:.1f} s")


def test_criterion_02_werner_surface(report):
    start = time.perf_counter()
    thetas = np.linspace(0, np.pi, 9)
    alphas = np.linspace(0, 1, 9)
    dev = np.zeros((9, 9))
    sign_ok = True
    for i, theta in enumerate(thetas):
        for j, alpha in enumerate(alphas):
            value = maximize_i_ph(states.werner(theta, alpha), DEFAULT).best_value
            dev[i, j] = abs(value - werner_formula(theta, alpha))
            margin = (1 + 2 * abs(np.sin(2 * theta))) * alpha - 1
            if margin > 1e-9:
                sign_ok &= value > 0
            elif margin < -1e-9:
                sign_ok &= value < 0
    elapsed = time.perf_counter() - start
    bad = int(np.sum(dev > 1e-3))
    ok = bad == 0 and sign_ok and elapsed <= 300
    report(2, ok, f"{bad}/81 points off the surface formula by > 1e-3 (max {dev.max():.3f}); "
                  f"sign change across boundary {'holds' if sign_ok else 'fails'}; {elapsed:.1f} s")


def test_criterion_03_mems(report):
    start = time.perf_counter()
    worst = max(
        abs(maximize_i_ph(states.mems(g), DEFAULT).best_value - 4 * g * g) for g in np.linspace(0, 1, 6)
    )
    elapsed = time.perf_counter() - start
    report(3, worst <= 1e-3 and elapsed <= 60, f"max |numeric - 4g^2| = {worst:.2e}, {elapsed:.1f} s")


def test_criterion_04_chsh_blind_region(report):
    rho = states.werner(np.pi / 4, 0.6)
    chsh = chsh_max(rho)
    value = maximize_i_ph(rho, DEFAULT).best_value
    ok = abs(chsh - 1.2 * np.sqrt(2)) <= 1e-9 and chsh < 2 and abs(value - 1.28) <= 1e-3 and value > 0
    report(4, ok, f"chsh_max = {chsh:.6f} (< 2), i_ph_max = {value:.6f}")


def test_criterion_05_ppt_audit_two_qubits(report):
    start = time.perf_counter()
    rnd = run_audit(QUBIT_QUBIT, 500, 0, DEFAULT)
    sep = run_audit(QUBIT_QUBIT, 200, 1, DEFAULT, kind="separable", terms=4)
    elapsed = time.perf_counter() - start
    ok = (
        rnd["agreements"] == rnd["scored"]
        and sep["agreements"] == sep["scored"]
        and sep["false_positives"] == 0
        and elapsed <= 900
    )
    report(5, ok, f"random {rnd['agreements']}/{rnd['scored']} agree ({rnd['boundary_excluded']} in band), "
                  f"separable {sep['false_positives']} false positives, {elapsed:.0f} s")


def test_criterion_06_ppt_audit_qubit_qutrit(report):
    start = time.perf_counter()
    rnd = run_audit(QUBIT_QUTRIT, 200, 0, DEFAULT)
    elapsed = time.perf_counter() - start
    ok = rnd["agreements"] == rnd["scored"] and elapsed <= 1200
    report(6, ok, f"{rnd['agreements']}/{rnd['scored']} agree ({rnd['boundary_excluded']} in band), {elapsed:.0f} s")


def test_criterion_07_path_equivalence(report):
    worst = 0.0
    for dims in (QUBIT_QUBIT, QUBIT_QUTRIT):
        for k in range(100):
            rho = states.random_state(dims, 1000 + k)
            u, v = local_unitaries(random_settings(dims, (77, k)), dims)
            a = np.array(y_triple(rho, u, v).as_list())
            b = np.array(y_operator_path(rho, u, v).as_list())
            worst = max(worst, np.max(np.abs(a - b)))
    x = x_operators(QUBIT_QUBIT)
    resid = 0.0
    for xi in np.linspace(0, np.pi / 2, 9):
        phi = states.schmidt_vector(xi)
        rec = (np.sin(2 * xi) * x[0] - np.cos(2 * xi) * x[1] + x[2]) / 4
        resid = max(resid, np.max(np.abs(rec - np.outer(phi, phi.conj()))))
    report(7, worst <= 1e-10 and resid <= 1e-12, f"path discrepancy {worst:.1e}, reconstruction residual {resid:.1e}")


def test_criterion_08_separability_soundness(report):
    worst_i, worst_a = -np.inf, np.inf
    for dims in (QUBIT_QUBIT, QUBIT_QUTRIT):
        for s in range(200):
            rho = states.random_separable(dims, 4, s)
            params = np.array([random_settings(dims, (s, k)) for k in range(500)])
            y = batched_y(rho, params)
            worst_i = max(worst_i, np.max(y[:, 0] ** 2 + y[:, 1] ** 2 - y[:, 2] ** 2))
            worst_a = min(worst_a, np.min(y[:, 1] + y[:, 2]))
        # the a >= 0 property holds for entangled states too
        for s in range(50):
            rho = states.random_state(dims, 5000 + s)
            params = np.array([random_settings(dims, (s, k)) for k in range(100)])
            y = batched_y(rho, params)
            worst_a = min(worst_a, np.min(y[:, 1] + y[:, 2]))
    ok = worst_i <= 1e-9 and worst_a >= -1e-9
    report(8, ok, f"max i_ph on separable states {worst_i:.3e}, min a = Y2 + Y3 {worst_a:.3e}")


def test_criterion_09_finite_shots(report):
    bell = states.bell_state()
    u, v = maximize_i_ph(bell, DEFAULT).settings()
    table = joint_probabilities(bell, u, v)
    within = 0
    for seed in range(50):
        est = estimate_i_ph(sample_shots(table, 100_000, seed), seed=seed)
        within += abs(est.i_ph_hat - 4.0) <= 5 * est.std_error
    scaled = []
    for n in (1_000, 10_000, 100_000):
        errs = [estimate_i_ph(sample_shots(table, n, seed), resamples=2, seed=seed).i_ph_hat - 4.0 for seed in range(50)]
        scaled.append(np.sqrt(np.mean(np.square(errs))) * np.sqrt(n))
    ratio = max(scaled) / min(scaled)
    report(9, within == 50 and ratio <= 2.0, f"{within}/50 within 5 SE; RMS*sqrt(N) spread factor {ratio:.2f}")


def test_criterion_10_degree_of_entanglement(report):
    alphas = np.linspace(0, 1, 21)
    pe = np.array([degree_of_entanglement(maximize_i_ph(states.werner(np.pi / 4, a), DEFAULT).best_value) for a in alphas])
    conc = np.array([states.concurrence(states.werner(np.pi / 4, a)) for a in alphas])
    expected = np.maximum(0.0, (3 * alphas - 1) * (1 + alphas) / 4)
    monotone = bool(np.all(np.diff(pe) >= 0))
    err = float(np.max(np.abs(pe - expected)))
    order_ok = True
    for i in range(len(alphas)):
        for j in range(len(alphas)):
            if conc[i] < conc[j] - 1e-9:
                order_ok &= pe[i] < pe[j]
            elif abs(conc[i] - conc[j]) <= 1e-9:
                order_ok &= abs(pe[i] - pe[j]) <= 2.5e-4
    ok = monotone and err <= 2.5e-4 and order_ok
    report(10, ok, f"non-decreasing {monotone}, max error {err:.1e}, ordering matches concurrence {order_ok}")
