"""Probe-level Fisher information for the wire.

Probe kinds:

* ``ground`` - single-particle ground state
* ``thermal`` - single-particle Gibbs state at ``p.T``
* ``slater`` - non-interacting Slater determinant with ``p.N`` filled orbitals
* ``many-body`` - ground state of the interacting Fock-sector Hamiltonian
* ``many-body-thermal`` - Gibbs state of the Fock-sector Hamiltonian
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .fock import FockBasis, build_many_body_hamiltonian, enumerate_basis, lift_one_body
from .lattice import ModelParams, Operator, build_current_operator, build_single_particle_hamiltonian, hamiltonian_derivative
from .metrology import (
    FisherResult,
    ProjectiveMeasurement,
    cfi,
    derivative_step,
    measure_in_basis,
    qfi_mixed,
    qfi_pure_ground,
    qfim_pure,
    slater_qfi,
    sld,
)
from .spectral import SpectralDecomposition, diagonalize, energy_gap, gibbs_state

PROBES = ("ground", "thermal", "slater", "many-body", "many-body-thermal")
MANY_BODY = ("many-body", "many-body-thermal")
THERMAL = ("thermal", "many-body-thermal")


def _check_probe(probe: str) -> None:
    if probe not in PROBES:
        raise ValueError(f"unknown probe {probe!r}; expected one of {PROBES}")


def probe_hamiltonian(p: ModelParams, probe: str, basis: FockBasis | None = None) -> Operator:
    _check_probe(probe)
    if probe in MANY_BODY:
        return build_many_body_hamiltonian(p, basis)
    return build_single_particle_hamiltonian(p)


def probe_derivative(p: ModelParams, which: str, probe: str, basis: FockBasis | None = None) -> Operator:
    dh = hamiltonian_derivative(p, which)
    if probe in MANY_BODY:
        return lift_one_body(basis or enumerate_basis(p.L, p.N), dh)
    return dh


def probe_spectrum(p: ModelParams, probe: str, basis: FockBasis | None = None) -> SpectralDecomposition:
    spec = diagonalize(probe_hamiltonian(p, probe, basis))
    if probe in THERMAL and spec.partial:
        raise ValueError("thermal probes need the full spectrum; the sector is too large")
    return spec


def probe_gap(p: ModelParams, probe: str, spec: SpectralDecomposition | None = None) -> float:
    spec = spec or probe_spectrum(p, probe)
    if probe == "slater":
        return energy_gap(spec, "many-body-free", filled=p.N)
    if probe in MANY_BODY:
        return energy_gap(spec, "many-body-full")
    return energy_gap(spec, "single-particle")


def probe_state(p: ModelParams, probe: str, spec: SpectralDecomposition | None = None):
    """State vector for pure probes, ThermalState for thermal ones."""
    if probe == "slater":
        raise ValueError("the Slater probe has no state vector in the single-particle space")
    spec = spec or probe_spectrum(p, probe)
    if probe in THERMAL:
        return gibbs_state(spec, p.T)
    return spec.ground_state


def central_difference(
    f: Callable[[float], np.ndarray], x: float, step: float, richardson: bool = False
) -> np.ndarray:
    """Central difference of ``f`` at ``x``; optional one-level Richardson extrapolation."""
    d = (f(x + step) - f(x - step)) / (2.0 * step)
    if not richardson:
        return d
    h = step / 2.0
    d_half = (f(x + h) - f(x - h)) / (2.0 * h)
    return (4.0 * d_half - d) / 3.0


def density_matrix_derivative(
    p: ModelParams, which: str, probe: str = "thermal", step: float | None = None, richardson: bool = False
) -> tuple[np.ndarray, float]:
    """Central-difference derivative of the probe's density matrix."""
    if probe not in THERMAL:
        raise ValueError(f"density-matrix derivatives are for thermal probes, got {probe!r}")
    step = derivative_step(p.coupling(which)) if step is None else step
    basis = enumerate_basis(p.L, p.N) if probe in MANY_BODY else None

    def rho(delta):
        q = p.shifted(which, delta)
        return probe_state(q, probe, probe_spectrum(q, probe, basis)).density_matrix()

    return central_difference(rho, 0.0, step, richardson), step


def probe_qfi(p: ModelParams, which: str, probe: str = "ground", step: float | None = None) -> FisherResult:
    _check_probe(probe)
    if probe == "slater":
        return slater_qfi_for(p, which, step)
    basis = enumerate_basis(p.L, p.N) if probe in MANY_BODY else None
    spec = probe_spectrum(p, probe, basis)
    if probe in THERMAL:
        drho, step = density_matrix_derivative(p, which, probe, step)
        return qfi_mixed(gibbs_state(spec, p.T), drho, step=step, trace_tol=1e-8)
    dh = probe_derivative(p, which, probe, basis)
    h = probe_hamiltonian(p, probe, basis) if spec.partial else None
    return qfi_pure_ground(spec, dh, hamiltonian=h)


def probe_qfim(p: ModelParams, which: Sequence[str], probe: str = "ground") -> FisherResult:
    if probe not in ("ground", "many-body"):
        raise ValueError(f"QFIM is implemented for pure probes (ground, many-body), got {probe!r}")
    basis = enumerate_basis(p.L, p.N) if probe in MANY_BODY else None
    spec = probe_spectrum(p, probe, basis)
    dhs = [probe_derivative(p, w, probe, basis) for w in which]
    h = probe_hamiltonian(p, probe, basis) if spec.partial else None
    return qfim_pure(spec, dhs, hamiltonian=h)


def slater_spectra(p: ModelParams, which: str, step: float):
    def spec(delta):
        return diagonalize(build_single_particle_hamiltonian(p.shifted(which, delta)))

    return spec(0.0), spec(step), spec(-step)


def slater_qfi_for(p: ModelParams, which: str, step: float | None = None) -> FisherResult:
    step = derivative_step(p.coupling(which)) if step is None else step
    return slater_qfi(*slater_spectra(p, which, step), N=p.N, step=step)


def current_measurement(p: ModelParams, probe: str, basis: FockBasis | None = None) -> ProjectiveMeasurement:
    current = build_current_operator(p.L)
    if probe in MANY_BODY:
        current = lift_one_body(basis or enumerate_basis(p.L, p.N), current)
    return ProjectiveMeasurement.from_observable(current)


def current_basis_cfi(
    p: ModelParams,
    which: str,
    probe: str = "ground",
    step: float | None = None,
    measurement: ProjectiveMeasurement | None = None,
) -> FisherResult:
    """CFI of measuring the particle current, resolved into its eigenspaces."""
    _check_probe(probe)
    if probe == "slater":
        raise ValueError("current-basis CFI is not defined for the Slater probe; use many-body")
    basis = enumerate_basis(p.L, p.N) if probe in MANY_BODY else None
    M = measurement or current_measurement(p, probe, basis)
    step = derivative_step(p.coupling(which)) if step is None else step

    def probs(delta):
        q = p.shifted(which, delta)
        return measure_in_basis(probe_state(q, probe, probe_spectrum(q, probe, basis)), M)

    dp = central_difference(probs, 0.0, step)
    return FisherResult(cfi(probs(0.0), dp).value, "classical", step=step, truncation=1e-12)


def sld_measurement(state, drho) -> ProjectiveMeasurement:
    """Eigenbasis of the symmetric logarithmic derivative as a measurement."""
    return ProjectiveMeasurement.from_observable(sld(state, drho, trace_tol=1e-8))
