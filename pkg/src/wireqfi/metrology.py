"""Quantum and classical Fisher information.

Pure ground states use the first-order perturbation sum

    F = 4 * sum_{n>0} |<n|dH|0>|^2 / (E_n - E_0)^2

which is gauge invariant. Mixed states use the two-index spectral form
``2 |<m|drho|n>|^2 / (l_m + l_n)`` over pairs with ``l_m + l_n`` above a
floor.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .lattice import Operator, hermiticity_residual
from .spectral import SpectralDecomposition, ThermalState, degeneracy_threshold

MIXED_FLOOR = 1e-14
PROBABILITY_FLOOR = 1e-12
GROUPING_TOL = 1e-8
OVERLAP_STEP = 1e-4
PSD_TOL = 1e-10


class DegenerateGroundStateError(ValueError):
    pass


class LevelCrossingError(ValueError):
    pass


class BasisPathologyWarning(UserWarning):
    pass


def derivative_step(value: float) -> float:
    """Central-difference step for probability and density-matrix derivatives."""
    return 1e-5 * max(1.0, abs(value))


@dataclass(frozen=True, eq=False)
class FisherResult:
    value: float | np.ndarray
    method: str
    step: float | None = None
    truncation: float | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        v = self.value
        if np.ndim(v) == 0:
            v = float(v)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"Fisher information must be finite and >= 0, got {v}")
            object.__setattr__(self, "value", v)
            return
        v = np.asarray(v, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"Fisher matrix must be square, got shape {v.shape}")
        scale = max(1.0, float(np.max(np.abs(v))))
        if np.max(np.abs(v - v.T)) > 1e-12 * scale:
            raise ValueError("Fisher matrix is not symmetric")
        v = 0.5 * (v + v.T)
        if np.min(np.linalg.eigvalsh(v)) < -PSD_TOL * scale:
            raise ValueError("Fisher matrix is not positive semidefinite")
        object.__setattr__(self, "value", v)

    @property
    def is_matrix(self) -> bool:
        return isinstance(self.value, np.ndarray)

    def __float__(self) -> float:
        if self.is_matrix:
            raise TypeError("matrix-valued Fisher information has no scalar value")
        return self.value


def _matrix(op):
    return op.matrix if isinstance(op, Operator) else op


def _check_nondegenerate(spec: SpectralDecomposition) -> None:
    w = spec.eigenvalues
    if len(w) < 2:
        raise ValueError("need at least two levels")
    gap = w[1] - w[0]
    if gap <= degeneracy_threshold(float(w[0])):
        raise DegenerateGroundStateError(
            f"ground state is degenerate (gap {gap:.3e}); switch on a Zeeman field B "
            "large enough to split it"
        )


def _ground_response(spec: SpectralDecomposition, dH, hamiltonian=None) -> np.ndarray:
    """First-order state response to dH, in whatever basis fits the decomposition.

    Full spectra return the coefficients on excited levels, partial spectra
    solve (H - E0) x = -(1 - P0) dH |0> directly and return x.
    """
    dH = _matrix(dH)
    psi = spec.ground_state
    e0 = spec.ground_energy
    if not spec.partial:
        v = spec.eigenvectors
        m = v[:, 1:].conj().T @ (dH @ psi)
        return m / (e0 - spec.eigenvalues[1:])
    if hamiltonian is None:
        raise ValueError("a partial decomposition needs the Hamiltonian for the response solve")
    h = _matrix(hamiltonian)
    b = dH @ psi
    b = -(b - psi * np.vdot(psi, b))
    shift = max(1.0, float(spec.eigenvalues[-1] - e0))
    dim = len(psi)

    def matvec(x):
        return h @ x - e0 * x + shift * psi * np.vdot(psi, x)

    op = spla.LinearOperator((dim, dim), matvec=matvec, dtype=complex)
    # positive definite once the ground direction is shifted up
    x, info = spla.cg(op, b, rtol=1e-12, atol=0.0, maxiter=20 * dim)
    if info != 0:
        raise RuntimeError(f"response solve did not converge (info={info})")
    return x - psi * np.vdot(psi, x)


def qfi_pure_ground(spec: SpectralDecomposition, dH, hamiltonian=None) -> FisherResult:
    _check_nondegenerate(spec)
    c = _ground_response(spec, dH, hamiltonian)
    return FisherResult(4.0 * float(np.vdot(c, c).real), "perturbation-sum")


def qfim_pure(spec: SpectralDecomposition, dH_list: Sequence, hamiltonian=None) -> FisherResult:
    _check_nondegenerate(spec)
    c = np.column_stack([_ground_response(spec, dH, hamiltonian) for dH in dH_list])
    f = 4.0 * (c.conj().T @ c).real
    return FisherResult(0.5 * (f + f.T), "perturbation-sum")


def qfi_from_overlap(psi: np.ndarray, psi_shifted: np.ndarray, step: float = OVERLAP_STEP) -> FisherResult:
    """Fidelity-susceptibility estimate 8 (1 - |<psi(a)|psi(a + step)>|) / step**2."""
    overlap = abs(np.vdot(psi, psi_shifted))
    return FisherResult(max(0.0, 8.0 * (1.0 - overlap) / step**2), "finite-difference-state", step=step)


def _state_eigensystem(state) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(state, ThermalState):
        return state.weights, state.eigenvectors
    state = np.asarray(state)
    if state.ndim == 1:
        psi = state / np.linalg.norm(state)
        rho = np.outer(psi, psi.conj())
    else:
        rho = state
    lam, v = np.linalg.eigh(rho)
    return lam, v


def _check_drho(drho: np.ndarray, tol: float) -> np.ndarray:
    drho = np.asarray(_matrix(drho).toarray() if sp.issparse(_matrix(drho)) else _matrix(drho))
    res = hermiticity_residual(drho)
    if res > 1e-10:
        raise ValueError(f"drho is not Hermitian (relative residual {res:.3e})")
    trace = abs(np.trace(drho))
    scale = max(1.0, float(np.max(np.abs(drho))))
    if trace > tol * scale:
        raise ValueError(f"drho is not traceless (|Tr| = {trace:.3e})")
    return drho


def _eigenbasis_terms(state, drho, floor):
    lam, v = _state_eigensystem(state)
    d = v.conj().T @ drho @ v
    s = lam[:, None] + lam[None, :]
    keep = s > floor
    if not np.any(keep):
        raise ValueError(f"no eigenvalue pair above the floor {floor:g}")
    return lam, v, d, s, keep


def qfi_mixed(
    state,
    drho,
    floor: float = MIXED_FLOOR,
    step: float | None = None,
    trace_tol: float = 1e-10,
) -> FisherResult:
    """Mixed-state QFI of ``state`` (ThermalState, density matrix or pure vector)."""
    drho = _check_drho(drho, trace_tol)
    _, _, d, s, keep = _eigenbasis_terms(state, drho, floor)
    value = float(np.sum(2.0 * np.abs(d[keep]) ** 2 / s[keep]))
    return FisherResult(value, "mixed-spectral", step=step, truncation=floor)


def sld(state, drho, floor: float = MIXED_FLOOR, trace_tol: float = 1e-10) -> Operator:
    """Symmetric logarithmic derivative, zero on pairs below the floor."""
    drho = _check_drho(drho, trace_tol)
    _, v, d, s, keep = _eigenbasis_terms(state, drho, floor)
    ell = np.zeros_like(d)
    ell[keep] = 2.0 * d[keep] / s[keep]
    out = v @ ell @ v.conj().T
    return Operator(0.5 * (out + out.conj().T), hermitian=True)


def cfi(probabilities, derivatives, floor: float = PROBABILITY_FLOOR) -> FisherResult:
    """Classical Fisher information; ``derivatives`` of shape (K,) or (d, K)."""
    p = np.asarray(probabilities, dtype=float)
    dp = np.asarray(derivatives, dtype=float)
    if np.any(p < -floor):
        raise ValueError(f"negative probability {p.min():.3e}")
    if abs(p.sum() - 1.0) > 1e-10:
        raise ValueError(f"probabilities sum to {p.sum():.15g}, not 1")
    scalar = dp.ndim == 1
    dp = np.atleast_2d(dp)
    if dp.shape[1] != len(p):
        raise ValueError(f"{dp.shape[1]} derivatives for {len(p)} outcomes")
    keep = p > floor
    dropped = dp[:, ~keep]
    if dropped.size and np.max(np.abs(dropped)) > 1e-8:
        warnings.warn(
            "outcome below the probability floor has a nonzero derivative",
            BasisPathologyWarning,
            stacklevel=2,
        )
    g = dp[:, keep] / np.sqrt(p[keep])
    f = g @ g.T
    if scalar:
        return FisherResult(float(f[0, 0]), "classical", truncation=floor)
    return FisherResult(f, "classical", truncation=floor)


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Orthogonal projectors stored as orthonormal column blocks.

    ``vectors`` holds all columns side by side; ``outcome[c]`` is the
    outcome index of column ``c``. Projector ``k`` is ``V_k V_k^dagger``.
    """

    vectors: np.ndarray
    outcome: np.ndarray
    labels: tuple

    def __post_init__(self):
        w = self.vectors
        if w.shape[0] != w.shape[1]:
            raise ValueError("projectors must resolve the identity (need a complete set of columns)")
        err = np.max(np.abs(w.conj().T @ w - np.eye(w.shape[1])))
        if err > 1e-10:
            raise ValueError(f"measurement columns are not orthonormal (error {err:.3e})")
        if len(self.labels) != int(self.outcome.max()) + 1:
            raise ValueError("one label per outcome required")

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.labels)

    @property
    def projectors(self) -> list[np.ndarray]:
        out = []
        for k in range(self.n_outcomes):
            block = self.vectors[:, self.outcome == k]
            out.append(block @ block.conj().T)
        return out

    @classmethod
    def from_projectors(cls, projectors: Sequence[np.ndarray], labels=None) -> "ProjectiveMeasurement":
        cols, outcome = [], []
        for k, proj in enumerate(projectors):
            proj = np.asarray(proj)
            w, v = np.linalg.eigh(0.5 * (proj + proj.conj().T))
            if np.max(np.minimum(np.abs(w), np.abs(w - 1))) > 1e-10:
                raise ValueError(f"projector {k} is not idempotent")
            sel = v[:, w > 0.5]
            cols.append(sel)
            outcome += [k] * sel.shape[1]
        labels = tuple(range(len(projectors))) if labels is None else tuple(labels)
        return cls(np.hstack(cols), np.array(outcome), labels)

    @classmethod
    def from_observable(cls, observable, tol: float = GROUPING_TOL) -> "ProjectiveMeasurement":
        """Eigenspace projectors of a Hermitian observable, eigenvalues grouped within ``tol``."""
        m = _matrix(observable)
        dense = m.toarray() if sp.issparse(m) else np.asarray(m)
        w, v = np.linalg.eigh(dense)
        outcome = np.zeros(len(w), dtype=int)
        labels = [float(w[0])]
        start = w[0]
        for i in range(1, len(w)):
            if w[i] - start > tol:
                labels.append(float(w[i]))
                start = w[i]
            outcome[i] = len(labels) - 1
        return cls(v, outcome, tuple(labels))


def measure_in_basis(state, M: ProjectiveMeasurement) -> np.ndarray:
    """Outcome probabilities Tr(P_k rho) for a vector, density matrix or ThermalState."""
    if isinstance(state, ThermalState):
        if state.dim != M.dim:
            raise ValueError(f"state dimension {state.dim} does not match measurement {M.dim}")
        amp = np.abs(M.vectors.conj().T @ state.eigenvectors) ** 2
        per_column = amp @ state.weights
    else:
        state = np.asarray(state)
        if state.shape[0] != M.dim:
            raise ValueError(f"state dimension {state.shape[0]} does not match measurement {M.dim}")
        if state.ndim == 1:
            per_column = np.abs(M.vectors.conj().T @ state) ** 2 / np.vdot(state, state).real
        else:
            per_column = np.einsum("ic,ij,jc->c", M.vectors.conj(), state, M.vectors).real
    p = np.bincount(M.outcome, weights=per_column, minlength=M.n_outcomes)
    p = np.clip(p, 0.0, None)
    if abs(p.sum() - 1.0) > 1e-10:
        raise ValueError(f"probabilities sum to {p.sum():.15g}; state is not normalized")
    return p


def _align(reference: np.ndarray, shifted: np.ndarray) -> np.ndarray:
    overlap = np.sum(reference.conj() * shifted, axis=0)
    if np.min(np.abs(overlap)) < 0.9:
        raise LevelCrossingError(
            f"orbital overlap across the stencil dropped to {np.min(np.abs(overlap)):.3f}; "
            "a level crossing lies inside the step, use a smaller step"
        )
    return shifted * (np.abs(overlap) / overlap)


def slater_qfi(
    spec: SpectralDecomposition,
    spec_plus: SpectralDecomposition,
    spec_minus: SpectralDecomposition,
    N: int,
    step: float,
) -> FisherResult:
    """QFI of the Slater determinant filling the ``N`` lowest orbitals.

    Orbital derivatives come from a central difference; each shifted orbital
    is phase-aligned to its unshifted partner before differencing.
    """
    dim = spec.dim
    if not 0 <= N <= dim:
        raise ValueError(f"0 <= N <= {dim} required, got {N}")
    if N in (0, dim):
        return FisherResult(0.0, "slater", step=step)
    w = spec.eigenvalues
    if w[N] - w[N - 1] <= degeneracy_threshold(float(w[N - 1])):
        raise DegenerateGroundStateError(
            f"levels {N - 1} and {N} are degenerate; the filled manifold is ambiguous"
        )
    v = spec.eigenvectors[:, :N]
    plus = _align(v, spec_plus.eigenvectors[:, :N])
    minus = _align(v, spec_minus.eigenvectors[:, :N])
    dv = (plus - minus) / (2.0 * step)
    norm_sq = float(np.sum(np.abs(dv) ** 2))
    inside = float(np.sum(np.abs(v.conj().T @ dv) ** 2))
    value = 4.0 * (norm_sq - inside)
    if value < 0:
        if value < -1e-8 * max(1.0, 4.0 * norm_sq):
            raise ArithmeticError(f"Slater QFI came out negative ({value:.3e})")
        value = 0.0
    return FisherResult(value, "slater", step=step)
