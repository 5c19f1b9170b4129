"""Atom positions for rectangular arrays.

Lengths are in units of the transition wavelength, so |k| = 2*pi. Sites are
labelled 1..N, running first along x, then y, then z.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

K_MAG = 2.0 * np.pi

X_HAT = (1.0, 0.0, 0.0)
Z_HAT = (0.0, 0.0, 1.0)


def _unit(vec, name: str) -> np.ndarray:
    v = np.asarray(vec, dtype=float).reshape(3)
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm == 0.0:
        raise DomainError(f"{name} must be a nonzero finite 3-vector, got {vec!r}")
    return v / norm


@dataclass(frozen=True, eq=False)
class Lattice:
    positions: np.ndarray
    d_hat: np.ndarray
    k_hat: np.ndarray
    dims: tuple[int, int, int]
    spacing: float
    k_mag: float = K_MAG
    _geom: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def N(self) -> int:
        return self.positions.shape[0]

    @property
    def k_vec(self) -> np.ndarray:
        return self.k_mag * self.k_hat

    def pair_geometry(self):
        """Pairwise ``(xi, cos_dr, r_vec)`` for all site pairs (0-based arrays).

        ``r_vec[a, b] = r_a - r_b``; the diagonal of ``xi`` is zero and that of
        ``cos_dr`` is set to zero.
        """
        if "pairs" not in self._geom:
            r_vec = self.positions[:, None, :] - self.positions[None, :, :]
            dist = np.linalg.norm(r_vec, axis=-1)
            with np.errstate(invalid="ignore", divide="ignore"):
                cos_dr = np.where(dist > 0, (r_vec @ self.d_hat) / dist, 0.0)
            self._geom["pairs"] = (K_MAG * dist, cos_dr, r_vec)
        return self._geom["pairs"]


def build_lattice(dims, spacing: float, d_hat=X_HAT, k_hat=Z_HAT, k_mag: float = K_MAG) -> Lattice:
    """Rectangular ``Nx x Ny x Nz`` grid with site label ``ix + iy*Nx + iz*Nx*Ny + 1``.

    Parameters
    ----------
    dims : (int, int, int)
        Number of sites along x, y, z.
    spacing : float
        Lattice constant in units of the wavelength.
    d_hat, k_hat : 3-vectors
        Dipole orientation and excitation direction; normalised here.
    k_mag : float
        Wave number of the excitation field, used only for the travelling
        phase. The dipole-dipole distance ``xi`` always uses the transition
        wave number 2*pi, so changing ``k_mag`` is a pure gauge change.
    """
    dims = tuple(int(x) for x in dims)
    if len(dims) != 3 or min(dims) < 1:
        raise DomainError(f"dims must be three positive integers, got {dims}")
    if not np.isfinite(spacing) or spacing <= 0:
        raise DomainError(f"spacing must be positive, got {spacing}")
    nx, ny, nz = dims
    iz, iy, ix = np.meshgrid(np.arange(nz), np.arange(ny), np.arange(nx), indexing="ij")
    grid = np.stack([ix.ravel(), iy.ravel(), iz.ravel()], axis=1)
    positions = spacing * grid.astype(float)
    positions.setflags(write=False)
    return Lattice(
        positions=positions,
        d_hat=_unit(d_hat, "d_hat"),
        k_hat=_unit(k_hat, "k_hat"),
        dims=dims,
        spacing=float(spacing),
        k_mag=float(k_mag),
    )


def separation(lat: Lattice, mu: int, nu: int):
    """Dimensionless distance, unit vector and displacement from site ``nu`` to ``mu``.

    Returns ``(xi, r_hat, r_vec)`` with ``r_vec = r_mu - r_nu``.
    """
    if mu == nu:
        raise DomainError(f"separation needs two distinct sites, got {mu} twice")
    for s in (mu, nu):
        if not 1 <= s <= lat.N:
            raise DomainError(f"site {s} outside [1, {lat.N}]")
    r_vec = lat.positions[mu - 1] - lat.positions[nu - 1]
    dist = float(np.linalg.norm(r_vec))
    return K_MAG * dist, r_vec / dist, r_vec
