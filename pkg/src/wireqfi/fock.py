"""Fixed particle-number fermionic sector and second-quantized operators.

Modes are the 2L single-particle orbitals in the lattice ordering. A basis
word is an integer whose bit ``p`` is the occupation of mode ``p``, so the
word ``0b000111`` has modes 0, 1 and 2 filled. ``c+_p`` acting on a word
picks up ``(-1)**(number of occupied modes with index < p)``.
"""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .lattice import ModelParams, Operator, build_single_particle_hamiltonian

DEFAULT_SECTOR_CAP = 200_000
SECTOR_CAP_ENV = "WIREQFI_SECTOR_CAP"


class SectorTooLargeError(ValueError):
    pass


def sector_cap() -> int:
    """Fock-sector size limit, overridable through ``WIREQFI_SECTOR_CAP``."""
    raw = os.environ.get(SECTOR_CAP_ENV)
    if raw is None:
        return DEFAULT_SECTOR_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"{SECTOR_CAP_ENV} must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError(f"{SECTOR_CAP_ENV} must be positive, got {cap}")
    return cap


def sector_dimension(L: int, N: int) -> int:
    return math.comb(2 * L, N)


@dataclass(frozen=True, eq=False)
class FockBasis:
    L: int
    N: int
    states: np.ndarray
    index_of: dict = field(repr=False)

    @property
    def n_modes(self) -> int:
        return 2 * self.L

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def tag(self) -> tuple:
        return ("fock", self.L, self.N)

    def word(self, i: int) -> str:
        """Occupation string of state ``i``, highest mode first."""
        return format(int(self.states[i]), f"0{self.n_modes}b")

    def lookup(self, words: np.ndarray) -> np.ndarray:
        """Vectorized ``index_of`` for arrays of words known to be in the sector."""
        return np.searchsorted(self.states, words)


def enumerate_basis(L: int, N: int, cap: int | None = None) -> FockBasis:
    if L < 1:
        raise ValueError(f"L >= 1 required, got {L}")
    if not 0 <= N <= 2 * L:
        raise ValueError(f"0 <= N <= 2L required, got N={N}, L={L}")
    cap = sector_cap() if cap is None else cap
    dim = sector_dimension(L, N)
    if dim > cap:
        raise SectorTooLargeError(
            f"sector C({2 * L},{N}) = {dim} exceeds the cap of {cap} states "
            f"(raise it with {SECTOR_CAP_ENV})"
        )
    words = [sum(1 << m for m in combo) for combo in itertools.combinations(range(2 * L), N)]
    states = np.array(sorted(words), dtype=np.int64)
    states.setflags(write=False)
    return FockBasis(L, N, states, {int(s): i for i, s in enumerate(states)})


def _count_below(words: np.ndarray, p: int) -> np.ndarray:
    return np.bitwise_count(words & ((1 << p) - 1)).astype(np.int64)


def lift_one_body(basis: FockBasis, h, hermitian: bool | None = None) -> Operator:
    """Sparse sector matrix of ``sum_pq h[p, q] c+_p c_q``.

    ``h`` may be an :class:`Operator` or a plain 2L x 2L array (for example
    a commutator, which is anti-Hermitian).
    """
    if isinstance(h, Operator):
        if hermitian is None:
            hermitian = h.hermitian
        h = h.toarray()
    h = np.asarray(h)
    if hermitian is None:
        hermitian = True
    if h.shape != (basis.n_modes, basis.n_modes):
        raise ValueError(f"one-body matrix shape {h.shape} does not match {basis.n_modes} modes")

    states = basis.states
    rows, cols, vals = [], [], []
    for p, q in zip(*np.nonzero(h)):
        p, q = int(p), int(q)
        has_q = (states >> q) & 1 == 1
        if p == q:
            sel = np.nonzero(has_q)[0]
            rows.append(sel)
            cols.append(sel)
            vals.append(np.full(len(sel), h[p, q], dtype=complex))
            continue
        sel = np.nonzero(has_q & ((states >> p) & 1 == 0))[0]
        src = states[sel]
        removed = src ^ (1 << q)
        parity = _count_below(src, q) + _count_below(removed, p)
        target = removed | (1 << p)
        rows.append(basis.lookup(target))
        cols.append(sel)
        vals.append(np.where(parity % 2 == 0, 1.0, -1.0) * h[p, q])

    if rows:
        r, c, v = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    else:
        r = c = np.zeros(0, dtype=np.int64)
        v = np.zeros(0, dtype=complex)
    m = sp.csr_matrix((v, (r, c)), shape=(basis.dim, basis.dim), dtype=complex)
    m.sum_duplicates()
    m.eliminate_zeros()
    return Operator(m, basis.tag, hermitian=hermitian)


def site_occupations(basis: FockBasis) -> tuple[np.ndarray, np.ndarray]:
    """Per-state spin-up and spin-down occupations, shape ``(dim, L)``."""
    sites = np.arange(basis.L)
    up = (basis.states[:, None] >> (2 * sites)) & 1
    down = (basis.states[:, None] >> (2 * sites + 1)) & 1
    return up, down


def build_interaction(basis: FockBasis, U: float, V: float) -> Operator:
    """Diagonal U * sum_j n_up n_down + V * sum_j n_j n_{j+1} (open chain)."""
    up, down = site_occupations(basis)
    n = up + down
    diag = U * np.sum(up * down, axis=1) + V * np.sum(n[:, :-1] * n[:, 1:], axis=1)
    m = sp.diags(diag.astype(complex), format="csr")
    m.eliminate_zeros()
    return Operator(m, basis.tag)


def build_many_body_hamiltonian(p: ModelParams, basis: FockBasis | None = None) -> Operator:
    if basis is None:
        basis = enumerate_basis(p.L, p.N)
    elif (basis.L, basis.N) != (p.L, p.N):
        raise ValueError(f"basis sector ({basis.L}, {basis.N}) does not match params ({p.L}, {p.N})")
    one_body = lift_one_body(basis, build_single_particle_hamiltonian(p))
    interaction = build_interaction(basis, p.U, p.V)
    m = (one_body.matrix + interaction.matrix).tocsr()
    m.eliminate_zeros()
    return Operator(m, basis.tag)
