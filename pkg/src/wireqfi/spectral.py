"""Eigendecompositions, energy gaps and Gibbs states."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .lattice import HERMITIAN_RTOL, Operator, hermiticity_residual

DENSE_THRESHOLD = 2000
DEFAULT_LOWEST_K = 8
DEGENERACY_RTOL = 1e-12


class DegeneracyWarning(UserWarning):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float = math.nan):
        super().__init__(message)
        self.residual = residual


def degeneracy_threshold(e0: float) -> float:
    return DEGENERACY_RTOL * max(1.0, abs(e0))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenvalues with eigenvectors as columns.

    ``partial`` marks an iterative decomposition holding only the lowest
    levels.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    partial: bool = False
    basis: object = None

    @property
    def dim(self) -> int:
        return self.eigenvectors.shape[0]

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def ground_state(self) -> np.ndarray:
        return self.eigenvectors[:, 0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True, eq=False)
class ThermalState:
    weights: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    temperature: float

    @property
    def dim(self) -> int:
        return self.eigenvectors.shape[0]

    def density_matrix(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.weights) @ v.conj().T


def _as_matrix(H):
    if isinstance(H, Operator):
        return H.matrix, H.basis
    return H, None


def diagonalize(
    H,
    k: int = DEFAULT_LOWEST_K,
    dense_threshold: int = DENSE_THRESHOLD,
    tol: float = 1e-10,
) -> SpectralDecomposition:
    """Full dense decomposition up to ``dense_threshold``, else the lowest ``k`` levels."""
    m, basis = _as_matrix(H)
    res = hermiticity_residual(m)
    if res > HERMITIAN_RTOL:
        raise ValueError(f"cannot diagonalize a non-Hermitian matrix (relative residual {res:.3e})")
    dim = m.shape[0]

    if dim <= dense_threshold:
        dense = m.toarray() if sp.issparse(m) else np.asarray(m)
        w, v = np.linalg.eigh(dense)
        return SpectralDecomposition(w, v, partial=False, basis=basis)

    k = min(k, dim - 1)
    # fixed start vector keeps the Lanczos path reproducible
    v0 = np.random.default_rng(0).standard_normal(dim).astype(complex)
    try:
        w, v = spla.eigsh(m, k=k, which="SA", v0=v0, tol=tol * 1e-2)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(f"Lanczos did not converge for {k} levels: {exc}") from exc
    order = np.argsort(w)
    w, v = w[order], v[:, order]
    residual = float(np.max(np.linalg.norm(m @ v - v * w, axis=0)))
    scale = max(1.0, float(np.max(np.abs(w))))
    if residual > 1e-8 * scale:
        raise ConvergenceError(f"Lanczos residual {residual:.3e} above tolerance", residual)
    return SpectralDecomposition(w, v, partial=True, basis=basis)


def energy_gap(
    spec: SpectralDecomposition,
    probe_kind: str = "single-particle",
    filled: int | None = None,
) -> float:
    """Gap above the probe's ground state.

    ``many-body-free`` reads the single-particle spectrum in ``spec`` and
    returns the distance between the last filled (``filled``-th) and the
    first empty level.
    """
    w = spec.eigenvalues
    if probe_kind in ("single-particle", "many-body-full"):
        if len(w) < 2:
            raise ValueError("need at least two levels for a gap")
        lo, hi = 0, 1
    elif probe_kind == "many-body-free":
        if filled is None or filled < 1:
            raise ValueError("many-body-free gap needs the number of filled levels")
        if len(w) < filled + 1:
            raise ValueError(f"need {filled + 1} levels, spectrum has {len(w)}")
        lo, hi = filled - 1, filled
    else:
        raise ValueError(f"unknown probe kind {probe_kind!r}")
    gap = max(0.0, float(w[hi] - w[lo]))
    if gap <= degeneracy_threshold(float(w[lo])):
        warnings.warn(
            f"degenerate levels (gap {gap:.3e}); add a symmetry-breaking Zeeman field B",
            DegeneracyWarning,
            stacklevel=2,
        )
    return gap


def gibbs_state(spec: SpectralDecomposition, T: float) -> ThermalState:
    if spec.partial:
        raise ValueError("Gibbs state needs the full spectrum, got a partial decomposition")
    if T < 0 or math.isnan(T):
        raise ValueError(f"T >= 0 required, got {T}")
    e = spec.eigenvalues
    shifted = e - e[0]
    if T == 0:
        weights = (shifted <= degeneracy_threshold(float(e[0]))).astype(float)
    elif math.isinf(T):
        weights = np.ones_like(e)
    else:
        weights = np.exp(-shifted / T)
    weights = weights / weights.sum()
    return ThermalState(weights, e, spec.eigenvectors, float(T))
