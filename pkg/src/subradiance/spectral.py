"""Eigendecomposition of the coupling matrix.

The coupling matrix is not normal, so the left transformation is the matrix
inverse of the right eigenvectors rather than their adjoint. The decay
constant of mode ``l`` is ``-Re(2 lambda_l)``, the population decay rate in
units of Gamma.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from .coupling import CouplingMatrix
from .errors import DomainError, NumericalError

RESIDUAL_TOL = 1e-9
MAX_BASIS_COND = 1e10
SORT_KEYS = ("decay_ascending", "shift_ascending")


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    U: np.ndarray | None
    U_inv: np.ndarray | None
    order: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def decay_constants(self) -> np.ndarray:
        return -2.0 * self.eigenvalues.real

    @property
    def has_vectors(self) -> bool:
        return self.U is not None

    def to_csv(self, path) -> Path:
        """Write ``mode_index, re_2lambda_over_gamma, im_2lambda_over_gamma, decay_const``."""
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["mode_index", "re_2lambda_over_gamma", "im_2lambda_over_gamma", "decay_const"])
            for l, lam in enumerate(self.eigenvalues, start=1):
                writer.writerow([l, f"{2 * lam.real:.12g}", f"{2 * lam.imag:.12g}", f"{-2 * lam.real:.12g}"])
        return path


def diagonalize(A: CouplingMatrix | np.ndarray, vectors: bool = True, sort: str | None = "decay_ascending") -> Spectrum:
    """Full non-Hermitian eigendecomposition of ``A``.

    Parameters
    ----------
    A : CouplingMatrix or ndarray
    vectors : bool
        When False only eigenvalues are computed (much cheaper for large
        spaces); ``U`` and ``U_inv`` are then None.
    sort : str or None
        Presentation order passed to :func:`sort_modes`; None keeps the
        LAPACK order.

    Raises
    ------
    NumericalError
        If the eigen-residual, the inverse check or the eigenbasis
        conditioning exceeds tolerance.
    """
    mat = A.matrix if isinstance(A, CouplingMatrix) else np.asarray(A, dtype=complex)
    if not np.all(np.isfinite(mat)):
        raise DomainError("coupling matrix has non-finite entries")
    dim = mat.shape[0]
    if not vectors:
        lam = sla.eigvals(mat, overwrite_a=False, check_finite=False)
        spec = Spectrum(lam, None, None, np.arange(dim))
        return sort_modes(spec, sort) if sort else spec

    lam, U = sla.eig(mat, check_finite=False)
    U = U / np.linalg.norm(U, axis=0)[None, :]
    U_inv = sla.inv(U, check_finite=False)

    scale = max(np.abs(mat).max(), 1e-300)
    res = np.abs(mat @ U - U * lam[None, :]).max()
    if res > RESIDUAL_TOL * scale:
        raise NumericalError(f"eigen-residual {res:.3e} exceeds {RESIDUAL_TOL:g} * |A|max", residual=res)
    inv_res = np.abs(U_inv @ U - np.eye(dim)).max()
    # unit columns make |U_inv|max a cheap lower bound on cond(U)
    cond = np.abs(U_inv).max()
    if cond > MAX_BASIS_COND:
        raise NumericalError(f"eigenbasis condition >= {cond:.3e}; matrix is numerically defective", residual=cond)
    if inv_res > RESIDUAL_TOL:
        raise NumericalError(f"|U_inv U - I|max = {inv_res:.3e}; eigenbasis is numerically defective", residual=inv_res)

    spec = Spectrum(lam, U, U_inv, np.arange(dim))
    return sort_modes(spec, sort) if sort else spec


def sort_modes(spec: Spectrum, key: str = "decay_ascending") -> Spectrum:
    """Relabel modes by ascending decay constant or ascending frequency shift."""
    if key == "decay_ascending":
        perm = np.argsort(spec.decay_constants, kind="stable")
    elif key == "shift_ascending":
        perm = np.argsort(spec.eigenvalues.imag, kind="stable")
    else:
        raise DomainError(f"unknown sort key {key!r}; expected one of {SORT_KEYS}")
    return Spectrum(
        eigenvalues=spec.eigenvalues[perm],
        U=None if spec.U is None else spec.U[:, perm],
        U_inv=None if spec.U_inv is None else spec.U_inv[perm, :],
        order=spec.order[perm],
    )


def match_spectra(a, b, tol: float = 1e-8) -> float:
    """Greedy nearest-neighbour pairing of two eigenvalue multisets.

    Returns the largest pair distance relative to ``max(1, max|a|)``. Raises
    DomainError when the sets differ in size or any pair exceeds ``tol``.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != b.shape:
        raise DomainError(f"spectra differ in size: {a.size} vs {b.size}")
    scale = max(1.0, np.abs(a).max(initial=0.0))
    used = np.zeros(b.size, dtype=bool)
    worst = 0.0
    for z in a[np.argsort(np.abs(a))]:
        dists = np.where(used, np.inf, np.abs(b - z))
        j = int(np.argmin(dists))
        worst = max(worst, dists[j] / scale)
        used[j] = True
    if worst > tol:
        raise DomainError(f"spectra differ: worst relative mismatch {worst:.3e} > {tol:g}")
    return worst
