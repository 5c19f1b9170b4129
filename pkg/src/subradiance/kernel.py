"""Vacuum-mediated dipole-dipole couplings between two atoms.

``eval_f`` is the collective (cross) decay rate and ``eval_g`` the coherent
frequency shift, both in units of the single-atom rate Gamma = 1, as
functions of ``xi = |k| r`` and ``cos_dr = d_hat . r_hat``. Both accept
scalars or arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .geometry import Lattice

GAMMA = 1.0


def _check_xi(xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(~(xi > 0)):
        raise DomainError("xi must be strictly positive (coincident atoms have no pair kernel)")
    return xi


def eval_f(xi, cos_dr):
    """Pair decay rate F(xi, cos_dr)."""
    xi = _check_xi(xi)
    c2 = np.asarray(cos_dr, dtype=float) ** 2
    s, c = np.sin(xi), np.cos(xi)
    out = 1.5 * GAMMA * ((1.0 - c2) * s / xi + (1.0 - 3.0 * c2) * (c / xi**2 - s / xi**3))
    return out if out.ndim else float(out)


def eval_g(xi, cos_dr):
    """Pair frequency shift G(xi, cos_dr)."""
    xi = _check_xi(xi)
    c2 = np.asarray(cos_dr, dtype=float) ** 2
    s, c = np.sin(xi), np.cos(xi)
    out = 0.75 * GAMMA * (-(1.0 - c2) * c / xi + (1.0 - 3.0 * c2) * (s / xi**2 + c / xi**3))
    return out if out.ndim else float(out)


def kernel_matrices(lat: Lattice):
    """N x N matrices ``(F, G)`` for a lattice.

    The diagonal of ``F`` is the single-atom rate Gamma; the diagonal of ``G``
    is zero (self shifts are absorbed into the transition frequency).
    """
    xi, cos_dr, _ = lat.pair_geometry()
    N = lat.N
    F = np.full((N, N), GAMMA)
    G = np.zeros((N, N))
    off = ~np.eye(N, dtype=bool)
    F[off] = eval_f(xi[off], cos_dr[off])
    G[off] = eval_g(xi[off], cos_dr[off])
    return F, G
