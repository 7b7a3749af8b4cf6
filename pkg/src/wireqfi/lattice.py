"""Single-particle tight-binding model of a Rashba wire.

Basis ordering is site-major, spin-minor: index ``2*j + s`` with ``s = 0``
for spin up and ``s = 1`` for spin down. Boundaries are open.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np
import scipy.sparse as sp

SINGLE_PARTICLE = "single-particle"

# Couplings that H depends on linearly. "alpha" is the uniform Rashba
# strength with alpha_y = alpha_z moved together; "dummy" is a parameter
# the Hamiltonian does not depend on.
COUPLINGS = ("alpha_y", "alpha_z", "alpha", "B", "t", "dummy")

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

HERMITIAN_RTOL = 1e-12

Basis = Union[str, tuple]
Matrix = Union[np.ndarray, sp.spmatrix, sp.sparray]


def hermiticity_residual(matrix: Matrix) -> float:
    """Max-norm of ``A - A^dagger`` relative to ``max(1, |A|_max)``."""
    if sp.issparse(matrix):
        diff = abs(matrix - matrix.conj().T)
        num = diff.max() if diff.nnz else 0.0
        scale = abs(matrix).max() if matrix.nnz else 0.0
    else:
        num = np.max(np.abs(matrix - matrix.conj().T)) if matrix.size else 0.0
        scale = np.max(np.abs(matrix)) if matrix.size else 0.0
    return float(num) / max(1.0, float(scale))


@dataclass(frozen=True, eq=False)
class Operator:
    """A dense or sparse matrix tagged with the basis it acts on.

    ``basis`` is ``"single-particle"`` or ``("fock", L, N)``. When
    ``hermitian`` is set the matrix is checked on construction.
    """

    matrix: Matrix
    basis: Basis = SINGLE_PARTICLE
    hermitian: bool = True

    def __post_init__(self):
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError(f"operator must be square, got shape {self.matrix.shape}")
        if self.hermitian:
            res = hermiticity_residual(self.matrix)
            if res > HERMITIAN_RTOL:
                raise ValueError(f"matrix is not Hermitian (relative residual {res:.3e})")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def toarray(self) -> np.ndarray:
        if self.is_sparse:
            return self.matrix.toarray()
        return np.asarray(self.matrix)


@dataclass(frozen=True)
class ModelParams:
    """Couplings, size, filling and temperature of the wire (units of t, k_B = 1).

    ``N`` defaults to half filling (``N = L``).
    """

    L: int = 2
    t: float = 1.0
    alpha_y: float = 0.0
    alpha_z: float = 0.0
    B: float = 0.0
    U: float = 0.0
    V: float = 0.0
    N: int | None = None
    T: float = 0.0
    boundary: str = field(default="open")

    def __post_init__(self):
        if isinstance(self.L, bool) or int(self.L) != self.L or self.L < 2:
            raise ValueError(f"L >= 2 required, got L={self.L}")
        object.__setattr__(self, "L", int(self.L))
        if self.N is None:
            object.__setattr__(self, "N", self.L)
        if int(self.N) != self.N or not 0 <= self.N <= 2 * self.L:
            raise ValueError(f"0 <= N <= 2L required, got N={self.N}, L={self.L}")
        object.__setattr__(self, "N", int(self.N))
        for name in ("t", "alpha_y", "alpha_z", "B", "U", "V", "T"):
            value = getattr(self, name)
            if not math.isfinite(float(value)):
                raise ValueError(f"coupling {name} must be finite, got {value}")
            object.__setattr__(self, name, float(value))
        if self.T < 0:
            raise ValueError(f"T >= 0 required, got T={self.T}")
        if self.boundary != "open":
            raise ValueError(f"only open boundaries are supported, got {self.boundary!r}")

    def shifted(self, which: str, delta: float) -> "ModelParams":
        """Copy with coupling ``which`` displaced by ``delta``."""
        if which == "alpha":
            return replace(self, alpha_y=self.alpha_y + delta, alpha_z=self.alpha_z + delta)
        if which == "dummy":
            return self
        if which not in COUPLINGS:
            raise ValueError(f"unknown coupling {which!r}; expected one of {COUPLINGS}")
        return replace(self, **{which: getattr(self, which) + delta})

    def coupling(self, which: str) -> float:
        if which == "alpha":
            return self.alpha_z
        if which == "dummy":
            return 0.0
        if which not in COUPLINGS:
            raise ValueError(f"unknown coupling {which!r}; expected one of {COUPLINGS}")
        return getattr(self, which)


def _bond_matrix(L: int, block: np.ndarray) -> np.ndarray:
    # block sits at rows of site j+1, columns of site j; reverse bond is its adjoint
    shift = np.eye(L, k=-1)
    fwd = np.kron(shift, block)
    return fwd + fwd.conj().T


def _assemble(L: int, t: float, alpha_y: float, alpha_z: float, B: float) -> np.ndarray:
    block = -t * ID2 + alpha_z * (-1j * SIGMA_Y) + alpha_y * (1j * SIGMA_Z)
    h = _bond_matrix(L, block)
    h += np.kron(np.eye(L), B * SIGMA_Z)
    return h


def build_single_particle_hamiltonian(p: ModelParams) -> Operator:
    """2L x 2L matrix of hopping + Rashba + Zeeman terms."""
    return Operator(_assemble(p.L, p.t, p.alpha_y, p.alpha_z, p.B))


def hamiltonian_derivative(p: ModelParams, which: str) -> Operator:
    """dH/d(which). H is linear in every coupling, so this ignores the coupling values."""
    L = p.L
    if which == "alpha_y":
        m = _assemble(L, 0.0, 1.0, 0.0, 0.0)
    elif which == "alpha_z":
        m = _assemble(L, 0.0, 0.0, 1.0, 0.0)
    elif which == "alpha":
        m = _assemble(L, 0.0, 1.0, 1.0, 0.0)
    elif which == "B":
        m = _assemble(L, 0.0, 0.0, 0.0, 1.0)
    elif which == "t":
        m = _assemble(L, 1.0, 0.0, 0.0, 0.0)
    elif which == "dummy":
        m = np.zeros((2 * L, 2 * L), dtype=complex)
    else:
        raise ValueError(f"unknown coupling {which!r}; expected one of {COUPLINGS}")
    return Operator(m)


def build_current_operator(L: int) -> Operator:
    """Particle current i * sum_j (c+_{j+1} c_j - c+_j c_{j+1}), spin diagonal."""
    if L < 2:
        raise ValueError(f"L >= 2 required, got L={L}")
    return Operator(_bond_matrix(L, 1j * ID2))
