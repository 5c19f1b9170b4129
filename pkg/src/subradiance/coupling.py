"""Generator of the M-excitation amplitude dynamics, dc/dt = A c.

``A[n, n] = -M/2`` and, when bare states ``n`` and ``m`` differ by one
excitation moved from site ``s2`` (in ``m``) to site ``s1`` (in ``n``),

    A[n, m] = (-F(s1, s2)/2 + i G(s1, s2)) * exp(-i k . (r_s1 - r_s2)).

All other entries vanish. The travelling phase of the absorbed photons is
kept in these off-diagonal factors rather than in the basis.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import DomainError
from .geometry import Lattice
from .hilbert import HilbertSpace, rank_many
from .kernel import kernel_matrices

SPARSE_THRESHOLD = 2000


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    matrix: np.ndarray
    space: HilbertSpace
    lattice: Lattice
    gauge_stripped: bool = False

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def nonzeros_per_row(self) -> int:
        """Structural off-diagonal count of every row, ``M (N - M)``."""
        return self.space.M * (self.space.N - self.space.M)

    @property
    def prefers_sparse(self) -> bool:
        return self.dim > SPARSE_THRESHOLD

    def as_sparse(self) -> sp.csr_matrix:
        return sp.csr_matrix(self.matrix)

    def to_csv(self, path) -> Path:
        """Write nonzero entries as ``row, col, re, im`` with 1-based indices."""
        path = Path(path)
        rows, cols = np.nonzero(self.matrix)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "col", "re", "im"])
            for r, c in zip(rows, cols):
                z = self.matrix[r, c]
                writer.writerow([r + 1, c + 1, f"{z.real:.12g}", f"{z.imag:.12g}"])
        return path


def pair_couplings(lat: Lattice) -> np.ndarray:
    """``K[a, b] = (-F_ab/2 + i G_ab) exp(-i k . (r_a - r_b))`` for a != b, 0-based."""
    F, G = kernel_matrices(lat)
    _, _, r_vec = lat.pair_geometry()
    K = (-0.5 * F + 1j * G) * np.exp(-1j * (r_vec @ lat.k_vec))
    np.fill_diagonal(K, 0.0)
    return K


def hopping_table(space: HilbertSpace):
    """All single-excitation hops of the space.

    Returns flat arrays ``(n, m, s1, s2)`` (0-based labels and sites) listing
    every ordered pair ``n < m`` of bare states connected by moving one
    excitation; ``s1`` is excited only in ``n`` and ``s2`` only in ``m``.
    """
    N, M = space.N, space.M
    cfg = space.configs  # (dim, M), 1-based
    dim = cfg.shape[0]
    occupied = np.zeros((dim, N + 1), dtype=bool)
    occupied[np.arange(dim)[:, None], cfg] = True

    ns, ms, s1s, s2s = [], [], [], []
    sites = np.arange(1, N + 1)
    for slot in range(M):
        # move the excitation in `slot` to every site b
        new = np.repeat(cfg[:, None, :], N, axis=1)  # (dim, N, M)
        new[:, :, slot] = sites[None, :]
        free = ~occupied[:, 1:]  # b must be unoccupied
        n_idx, b_idx = np.nonzero(free)
        moved = np.sort(new[n_idx, b_idx], axis=1)
        m_idx = rank_many(moved, N) - 1
        keep = m_idx > n_idx
        ns.append(n_idx[keep])
        ms.append(m_idx[keep])
        s1s.append(cfg[n_idx[keep], slot] - 1)
        s2s.append(b_idx[keep])
    return (np.concatenate(ns), np.concatenate(ms), np.concatenate(s1s), np.concatenate(s2s))


def assemble(space: HilbertSpace, lattice: Lattice) -> CouplingMatrix:
    """Dense coupling matrix of ``space`` on ``lattice``, in units of Gamma."""
    if space.N != lattice.N:
        raise DomainError(f"space has N={space.N} atoms but lattice has {lattice.N}")
    K = pair_couplings(lattice)
    n, m, s1, s2 = hopping_table(space)
    A = np.zeros((space.dim, space.dim), dtype=complex)
    A[n, m] = K[s1, s2]
    A[m, n] = K[s2, s1]
    np.fill_diagonal(A, -0.5 * space.M)
    return CouplingMatrix(A, space, lattice)


def travelling_phases(space: HilbertSpace, lattice: Lattice) -> np.ndarray:
    """``exp(-i k . R(n))`` with ``R(n)`` the summed position of the excited sites."""
    proj = lattice.positions @ lattice.k_vec  # (N,)
    return np.exp(-1j * proj[space.configs - 1].sum(axis=1))


def gauge_strip(A: CouplingMatrix) -> CouplingMatrix:
    """Remove the travelling-phase factors by a diagonal similarity.

    With ``D = diag(exp(-i k . R(n)))`` this returns ``D^-1 A D``, whose
    off-diagonals are the bare ``-F/2 + i G`` and hence complex symmetric.
    The spectrum is unchanged.
    """
    d = travelling_phases(A.space, A.lattice)
    B = (d.conj()[:, None] * A.matrix) * d[None, :]
    np.fill_diagonal(B, np.diag(A.matrix))
    return replace(A, matrix=B, gauge_stripped=True)
