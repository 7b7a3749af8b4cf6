"""Acceptance criteria, each at its stated tolerance.

Every check prints one ``PASS`` or ``FAIL`` line as it runs; the full list is
repeated in the terminal summary.
"""
import time

import numpy as np
import pytest

from wireqfi.lattice import ModelParams, build_single_particle_hamiltonian, hamiltonian_derivative
from wireqfi.metrology import cfi, measure_in_basis, qfi_from_overlap, qfi_mixed
from wireqfi.probes import (
    current_basis_cfi,
    density_matrix_derivative,
    probe_gap,
    probe_qfi,
    probe_qfim,
    probe_state,
    sld_measurement,
)
from wireqfi.scaling import fit_gap_scaling, fit_power_law, thermal_window
from wireqfi.spectral import diagonalize, gibbs_state

RESULTS: list[str] = []

SIZES = [40, 60, 80, 100, 140, 200]
FIG1_POINTS = [(0.05, 0.1), (0.05, 0.9), (0.9, 0.9), (0.9, 0.05)]  # (B, alpha_z), alpha_y = alpha_z
FIG4_POINTS = [(0.05, 0.1), (0.9, 0.05), (0.9, 0.9), (0.05, 0.9)]  # (alpha_y, alpha_z)


def report(criterion: str, passed: bool, detail: str) -> bool:
    line = f"{'PASS' if passed else 'FAIL'}  criterion {criterion}: {detail}"
    RESULTS.append(line)
    print(line)
    return passed


def tied(L, a, B, **kw):
    return ModelParams(L=L, alpha_y=a, alpha_z=a, B=B, **kw)


def test_criterion_1_gap_scaling():
    start = time.perf_counter()
    mus = []
    for B, az in FIG1_POINTS:
        gaps = [probe_gap(tied(L, az, B), "ground") for L in SIZES]
        mus.append(fit_gap_scaling(SIZES, gaps).exponent)
    elapsed = time.perf_counter() - start
    ok = all(1.7 <= m <= 2.3 for m in mus) and elapsed < 60
    detail = ", ".join(f"(B={B}, az={az}) mu={m:.3f}" for (B, az), m in zip(FIG1_POINTS, mus))
    assert report("1 gap exponent mu in [1.7, 2.3], < 60 s", ok, f"{detail}; {elapsed:.1f} s")


def test_criterion_2_single_particle_qfi_scaling():
    start = time.perf_counter()
    fits = []
    for B, az in FIG1_POINTS:
        F = [probe_qfi(tied(L, az, B), "alpha").value for L in SIZES]
        fits.append(fit_power_law(SIZES, F))
    elapsed = time.perf_counter() - start
    ok = all(1.8 <= f.exponent <= 2.2 and f.r2 > 0.99 for f in fits) and elapsed < 60
    detail = ", ".join(f"(B={B}, az={az}) beta={f.exponent:.3f} r2={f.r2:.4f}" for (B, az), f in zip(FIG1_POINTS, fits))
    assert report("2 QFI exponent beta in [1.8, 2.2], r2 > 0.99, < 60 s", ok, f"{detail}; {elapsed:.1f} s")


def test_criterion_3_slater_qfi_scaling():
    start = time.perf_counter()
    Ls = [20, 40, 60, 80, 100]
    betas = []
    for az in (0.1, 0.5, 0.9):
        F = [probe_qfi(tied(L, az, 0.01), "alpha", "slater").value for L in Ls]
        betas.append(fit_power_law(Ls, F).exponent)
    elapsed = time.perf_counter() - start
    ok = all(1.8 <= b <= 2.2 for b in betas) and elapsed < 300
    detail = ", ".join(f"az={az} beta={b:.3f}" for az, b in zip((0.1, 0.5, 0.9), betas))
    assert report("3 Slater QFI exponent in [1.8, 2.2], < 5 min", ok, f"{detail}; {elapsed:.1f} s")


def test_criterion_4_slater_equals_exact_diagonalization():
    start = time.perf_counter()
    worst = 0.0
    for ay, az, B in [(0.5, 0.5, 0.01), (0.1, 0.1, 0.05), (0.9, 0.2, 0.3), (0.3, 0.8, 0.1)]:
        p = ModelParams(L=4, N=4, alpha_y=ay, alpha_z=az, B=B)
        for which in ("alpha", "alpha_z", "B"):
            s = probe_qfi(p, which, "slater").value
            ed = probe_qfi(p, which, "many-body").value
            worst = max(worst, abs(s / ed - 1))
    elapsed = time.perf_counter() - start
    ok = worst <= 5e-3 and elapsed < 10
    assert report("4 Slater vs ED (L=4, N=4) within 0.5%, < 10 s", ok, f"max relative deviation {worst:.2e}; {elapsed:.2f} s")


@pytest.fixture(scope="module")
def interacting():
    start = time.perf_counter()
    base = dict(L=6, alpha_y=0.1, alpha_z=0.1, B=0.01)
    Us = [-2.0, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0]
    Vs = np.linspace(0.0, 2.0, 9).tolist()
    FU = {U: probe_qfi(ModelParams(U=U, **base), "alpha", "many-body").value for U in Us}
    FV = [probe_qfi(ModelParams(V=V, **base), "alpha", "many-body").value for V in Vs]
    return FU, Vs, FV, time.perf_counter() - start


def test_criterion_5a_qfi_increases_with_repulsion(interacting):
    FU, _, _, elapsed = interacting
    pos = [FU[u] for u in sorted(FU) if u >= 0]
    ok = bool(np.all(np.diff(pos) > 0)) and elapsed < 600
    assert report("5a QFI increasing in U >= 0 (L=6), < 10 min", ok, f"F(U) = {np.round(pos, 4).tolist()}; {elapsed:.1f} s")


def test_criterion_5b_saturation(interacting):
    FU = interacting[0]
    ratio = FU[10.0] / FU[5.0]
    assert report("5b final-grid QFI within 10% of U=5", abs(ratio - 1) <= 0.1, f"F(U=10) / F(U=5) = {ratio:.4f}")


def test_criterion_5c_attractive_suppression(interacting):
    FU = interacting[0]
    ratio = FU[-2.0] / FU[0.0]
    assert report("5c QFI(U=-2) below 10% of QFI(U=0)", ratio < 0.1, f"F(U=-2) / F(U=0) = {ratio:.4f}")


def test_criterion_5d_qfi_decreases_with_v(interacting):
    _, Vs, FV, _ = interacting
    ok = bool(np.all(np.diff(FV) < 0))
    assert report("5d QFI decreasing in V on [0, 2]", ok, f"F(V) = {np.round(FV, 4).tolist()}")


@pytest.fixture(scope="module")
def thermal_curve():
    p0 = tied(100, 0.1, 0.01)
    gap = probe_gap(p0, "ground")
    ground = probe_qfi(p0, "alpha").value
    Ts = np.geomspace(gap / 100, 100 * gap, 41)
    F = np.array([probe_qfi(tied(100, 0.1, 0.01, T=T), "alpha", "thermal").value for T in Ts])
    return gap, ground, Ts, F


def test_criterion_6a_low_temperature_plateau(thermal_curve):
    gap, ground, Ts, F = thermal_curve
    low = Ts < gap / 3
    dev = np.abs(F[low] / ground - 1)
    worst_T = Ts[low][np.argmax(dev)]
    ok = bool(np.max(dev) <= 0.05)
    assert report(
        "6a thermal QFI within 5% of ground QFI for T < gap/3",
        ok,
        f"gap={gap:.4g}, max deviation {np.max(dev):.4f} at T = {worst_T / gap:.3f} gap",
    )


def test_criterion_6b_high_temperature_decay(thermal_curve):
    gap, _, Ts, F = thermal_curve
    Tw, Fw = thermal_window(Ts, F, gap, 3.0, 100.0)
    slope = -fit_power_law(Tw, Fw, expect_decay=True).exponent
    ok = -1.15 <= slope <= -0.85
    assert report("6b log-log slope -1 +- 0.15 on [3 gap, 100 gap]", ok, f"slope {slope:.4f} over {len(Tw)} points")


def test_criterion_7_qfim_scaling():
    exps, min_eig = {}, np.inf
    for ay, az in FIG4_POINTS:
        mats = [probe_qfim(ModelParams(L=L, alpha_y=ay, alpha_z=az, B=0.01), ["alpha_y", "alpha_z"]).value for L in SIZES]
        min_eig = min(min_eig, min(np.linalg.eigvalsh(m)[0] for m in mats))
        for name, (i, j) in {"zz": (1, 1), "yy": (0, 0), "yz": (0, 1)}.items():
            exps[(ay, az, name)] = fit_power_law(SIZES, [abs(m[i, j]) for m in mats]).exponent
    for ay, az in FIG4_POINTS:
        vals = {k[2]: v for k, v in exps.items() if k[:2] == (ay, az)}
        ok = all(1.6 <= v <= 2.2 for v in vals.values())
        report(f"7 QFIM exponents in [1.6, 2.2] at (ay, az) = ({ay}, {az})", ok, ", ".join(f"{k}={v:.3f}" for k, v in vals.items()))
    report("7 QFIM positive semidefinite to -1e-10", min_eig >= -1e-10, f"min eigenvalue {min_eig:.3e}")
    assert min_eig >= -1e-10 and all(1.6 <= v <= 2.2 for v in exps.values())


def pure_sld_cfi(p, which="alpha"):
    """CFI of the SLD eigenbasis for the ground state, drho from first-order perturbation theory."""
    spec = diagonalize(build_single_particle_hamiltonian(p))
    dH = hamiltonian_derivative(p, which).toarray()
    psi, E, V = spec.ground_state, spec.eigenvalues, spec.eigenvectors
    coeff = (V[:, 1:].conj().T @ (dH @ psi)) / (E[0] - E[1:])
    dpsi = V[:, 1:] @ coeff
    drho = np.outer(dpsi, psi.conj()) + np.outer(psi, dpsi.conj())
    M = sld_measurement(psi, drho)
    h = 1e-5 * max(1.0, abs(p.coupling(which)))

    def probs(delta):
        return measure_in_basis(diagonalize(build_single_particle_hamiltonian(p.shifted(which, delta))).ground_state, M)

    return cfi(probs(0.0), (probs(h) - probs(-h)) / (2 * h)).value


@pytest.fixture(scope="module")
def measurement_pairs():
    return []


def test_criterion_8a_current_basis(measurement_pairs):
    alphas = np.linspace(0.1, 1.0, 10)
    ratios = []
    for a in alphas:
        p = tied(100, a, 0.01)
        c, q = current_basis_cfi(p, "alpha").value, probe_qfi(p, "alpha").value
        measurement_pairs.append((c, q))
        ratios.append(c / q)
    ok = min(ratios) >= 0.95
    assert report("8a current-basis CFI >= 0.95 QFI (L=100, az in [0.1, 1])", ok, f"min ratio {min(ratios):.4f} at az = {alphas[int(np.argmin(ratios))]:.2f}")


def test_criterion_8b_sld_basis(measurement_pairs):
    ratios = []
    for a in (0.1, 0.4, 0.7, 1.0):
        p = tied(100, a, 0.01)
        c, q = pure_sld_cfi(p), probe_qfi(p, "alpha").value
        measurement_pairs.append((c, q))
        ratios.append(c / q)
    for a in (0.05, 0.5):
        p = tied(40, a, 0.01, T=0.01)
        state = probe_state(p, "thermal")
        drho, _ = density_matrix_derivative(p, "alpha")
        q = qfi_mixed(state, drho, trace_tol=1e-8).value
        c = current_basis_cfi(p, "alpha", "thermal", measurement=sld_measurement(state, drho)).value
        measurement_pairs.append((c, q))
        ratios.append(c / q)
    ok = min(ratios) >= 0.999
    assert report("8b SLD-basis CFI >= 0.999 QFI (ground L=100, thermal L=40)", ok, f"min ratio {min(ratios):.6f}")


def test_criterion_8c_thermal_gap(measurement_pairs):
    p = tied(100, 0.05, 0.01, T=0.01)
    c, q = current_basis_cfi(p, "alpha", "thermal").value, probe_qfi(p, "alpha", "thermal").value
    measurement_pairs.append((c, q))
    assert report("8c thermal CFI / QFI < 1 at T = 0.01, az = 0.05", c / q < 1, f"ratio {c / q:.4f}")


def test_criterion_9_properties(measurement_pairs, rng):
    failures = []
    # CFI never exceeds QFI on any pair computed above
    excess = max((c - q for c, q in measurement_pairs), default=-np.inf)
    if not excess <= 1e-8:
        failures.append(f"CFI - QFI = {excess:.2e}")
    # invariants on random instances
    for _ in range(20):
        L = int(rng.integers(2, 30))
        p = ModelParams(L=L, alpha_y=rng.uniform(-1, 1), alpha_z=rng.uniform(-1, 1), B=rng.uniform(0.05, 1))
        h = build_single_particle_hamiltonian(p).toarray()
        if np.max(np.abs(h - h.conj().T)) > 1e-12 * np.max(np.abs(h)):
            failures.append("Hamiltonian not Hermitian")
        spec = diagonalize(h)
        w = gibbs_state(spec, rng.uniform(0.01, 5)).weights
        if abs(w.sum() - 1) > 1e-12 or np.any(w < 0):
            failures.append("Gibbs weights not normalized")
        F = probe_qfim(p, ["alpha_y", "alpha_z", "B"]).value
        if np.linalg.eigvalsh(F)[0] < -1e-10 * max(1, np.max(np.abs(F))):
            failures.append("QFIM not PSD")
        # perturbation sum against the centred overlap oracle at delta = 1e-4
        d = 1e-4
        lo = diagonalize(build_single_particle_hamiltonian(p.shifted("alpha_z", -d / 2))).ground_state
        hi = diagonalize(build_single_particle_hamiltonian(p.shifted("alpha_z", d / 2))).ground_state
        oracle = qfi_from_overlap(lo, hi, d).value
        if abs(F[1, 1] / oracle - 1) > 1e-3:
            failures.append(f"perturbation sum vs overlap {F[1, 1]:.6g} vs {oracle:.6g}")
    # synthetic fit recovery
    L = np.array(SIZES, dtype=float)
    mu = fit_gap_scaling(L, 3.0 * L**-2.0 + 0.01).exponent
    beta = fit_power_law(L, 0.5 * L**1.9).exponent
    if abs(mu - 2.0) > 1e-6 or abs(beta - 1.9) > 1e-6:
        failures.append(f"fit recovery mu={mu:.9f}, beta={beta:.9f}")
    detail = "all properties hold" if not failures else "; ".join(dict.fromkeys(failures))
    assert report("9 property suites (CFI <= QFI, invariants, overlap oracle, fit recovery)", not failures, detail)
