"""Exact diagonalization and quantum Fisher information for Rashba quantum wires."""

__version__ = "0.1.0"

from .lattice import (
    ModelParams,
    Operator,
    build_current_operator,
    build_single_particle_hamiltonian,
    hamiltonian_derivative,
)
from .fock import FockBasis, build_interaction, build_many_body_hamiltonian, enumerate_basis, lift_one_body
from .spectral import SpectralDecomposition, ThermalState, diagonalize, energy_gap, gibbs_state
from .metrology import (
    FisherResult,
    ProjectiveMeasurement,
    cfi,
    measure_in_basis,
    qfi_mixed,
    qfi_pure_ground,
    qfim_pure,
    slater_qfi,
    sld,
)
from .probes import current_basis_cfi, probe_qfi, probe_qfim
from .scaling import ScalingFit, fit_gap_scaling, fit_power_law

__all__ = [
    "ModelParams", "Operator", "build_current_operator", "build_single_particle_hamiltonian",
    "hamiltonian_derivative", "FockBasis", "build_interaction", "build_many_body_hamiltonian",
    "enumerate_basis", "lift_one_body", "SpectralDecomposition", "ThermalState", "diagonalize",
    "energy_gap", "gibbs_state", "FisherResult", "ProjectiveMeasurement", "cfi", "current_basis_cfi",
    "measure_in_basis", "qfi_mixed", "qfi_pure_ground", "qfim_pure", "slater_qfi", "sld",
    "probe_qfi", "probe_qfim", "ScalingFit", "fit_gap_scaling", "fit_power_law",
]
