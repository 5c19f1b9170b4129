"""Initial states, time evolution and eigenmode weightings.

Three independent propagators are provided for ``dc/dt = A c``:

* :func:`evolve_eigen` uses the eigendecomposition, ``c(t) = U e^{Lt} U^-1 c(0)``;
* :func:`evolve_ode` is a fixed-step RK4 integrator, kept deliberately simple
  so it can serve as an oracle for the other two;
* :func:`evolve_krylov` applies ``exp(A dt)`` through an Arnoldi basis and
  never forms a dense eigendecomposition.

The n-th phase-imprinted state carries amplitude
``exp(2 pi i n (f - 1) / C) / sqrt(C)`` on each bare state, where ``f`` is the
sum of excited-site labels and ``C`` the dimension.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .coupling import CouplingMatrix
from .errors import DomainError, NumericalError
from .hilbert import HilbertSpace
from .spectral import Spectrum

ODE_MAX_STEP = 1e-3
ODE_MIN_STEP = 1e-12


@dataclass(frozen=True, eq=False)
class AmplitudeState:
    amplitudes: np.ndarray
    time: float = 0.0

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def __mul__(self, alpha):
        return AmplitudeState(alpha * self.amplitudes, self.time)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class EvolutionSeries:
    """Time grid plus either full amplitudes ``(T, dim)`` or a projection ``d(t)``."""

    times: np.ndarray
    amplitudes: np.ndarray | None = None
    d: np.ndarray | None = None

    @property
    def population(self) -> np.ndarray:
        """``|d(t)|^2`` for projected series, total ``sum |c|^2`` otherwise."""
        if self.d is not None:
            return np.abs(self.d) ** 2
        return self.norm_sq

    @property
    def norm_sq(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)


@dataclass(frozen=True, eq=False)
class ModeWeights:
    n: int
    v: np.ndarray
    w: np.ndarray
    wt: np.ndarray
    eigenvalues: np.ndarray


def _check_n(space: HilbertSpace, n: int):
    if not 1 <= n <= space.dim:
        raise DomainError(f"imprint index n={n} outside [1, {space.dim}]")


def _check_times(times) -> np.ndarray:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.ndim != 1 or times.size == 0:
        raise DomainError("time grid must be a nonempty 1-D sequence")
    if times[0] < 0 or np.any(np.diff(times) < 0):
        raise DomainError("time grid must be nonnegative and ascending")
    return times


def _as_vector(c0) -> np.ndarray:
    if isinstance(c0, AmplitudeState):
        return np.asarray(c0.amplitudes, dtype=complex)
    return np.asarray(c0, dtype=complex)


def _as_operator(A):
    if isinstance(A, CouplingMatrix):
        return A.matrix
    if sp.issparse(A):
        return A.tocsr()
    return np.asarray(A, dtype=complex)


def imprint_phases(space: HilbertSpace, n: int) -> np.ndarray:
    """Unit-modulus phases ``exp(2 pi i n (f - 1) / dim)`` in bare-state order."""
    _check_n(space, n)
    return np.exp(2j * np.pi * n * (space.phase_indices - 1) / space.dim)


def imprinted_basis(space: HilbertSpace) -> np.ndarray:
    """Matrix whose column ``n - 1`` is the n-th phase-imprinted state."""
    n = np.arange(1, space.dim + 1)
    return np.exp(2j * np.pi * np.outer(space.phase_indices - 1, n) / space.dim) / np.sqrt(space.dim)


def initial_timed_dicke(space: HilbertSpace) -> AmplitudeState:
    """Symmetric state left by absorbing M photons: equal real amplitudes."""
    return AmplitudeState(np.full(space.dim, 1.0 / np.sqrt(space.dim), dtype=complex))


def initial_phase_imprinted(space: HilbertSpace, n: int) -> AmplitudeState:
    return AmplitudeState(imprint_phases(space, n) / np.sqrt(space.dim))


def evolve_eigen(spec: Spectrum, c0, times) -> EvolutionSeries:
    if not spec.has_vectors:
        raise DomainError("evolve_eigen needs a spectrum computed with eigenvectors")
    times = _check_times(times)
    coeff = spec.U_inv @ _as_vector(c0)
    modal = np.exp(np.outer(times, spec.eigenvalues)) * coeff[None, :]
    return EvolutionSeries(times, amplitudes=modal @ spec.U.T)


def ode_step_size(A) -> float:
    """RK4 step for ``A``: at most 1e-3 and at most 0.05 over the row-sum norm.

    The row-sum norm bounds every eigenvalue, so ``|h lambda| <= 0.05`` and
    the accumulated RK4 error over tens of 1/Gamma stays below 1e-9.
    """
    op = _as_operator(A)
    rowsum = float(np.abs(op).sum(axis=1).max()) if not sp.issparse(op) else float(abs(op).sum(axis=1).max())
    return min(ODE_MAX_STEP, 0.05 / max(rowsum, 1e-300))


def evolve_ode(A, c0, times, step: float | None = None) -> EvolutionSeries:
    """Fixed-step classical RK4 integration, landing exactly on each grid point."""
    op = _as_operator(A)
    times = _check_times(times)
    h_max = ode_step_size(op) if step is None else float(step)
    if not h_max >= ODE_MIN_STEP:
        raise NumericalError(f"RK4 step {h_max:.3e} underflows the minimum {ODE_MIN_STEP:g}", residual=h_max)

    c = _as_vector(c0).copy()
    out = np.empty((times.size, c.size), dtype=complex)
    t = 0.0
    for i, t_next in enumerate(times):
        span = t_next - t
        if span > 0:
            nsteps = int(np.ceil(span / h_max - 1e-9))
            h = span / nsteps
            for _ in range(nsteps):
                k1 = op @ c
                k2 = op @ (c + 0.5 * h * k1)
                k3 = op @ (c + 0.5 * h * k2)
                k4 = op @ (c + h * k3)
                c = c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t = t_next
        out[i] = c
    return EvolutionSeries(times, amplitudes=out)


def _arnoldi(op, v0: np.ndarray, m: int, breakdown_tol: float):
    """Arnoldi process; returns ``(V, H, k)`` with ``k`` the basis size reached."""
    beta = np.linalg.norm(v0)
    V = np.zeros((v0.size, m + 1), dtype=complex)
    H = np.zeros((m + 1, m), dtype=complex)
    V[:, 0] = v0 / beta
    for j in range(m):
        w = op @ V[:, j]
        # modified Gram-Schmidt, applied twice for orthogonality
        for _ in range(2):
            for i in range(j + 1):
                hij = np.vdot(V[:, i], w)
                H[i, j] += hij
                w = w - hij * V[:, i]
        H[j + 1, j] = np.linalg.norm(w)
        if H[j + 1, j].real <= breakdown_tol:
            return V, H, j + 1
        V[:, j + 1] = w / H[j + 1, j]
    return V, H, m


def evolve_krylov(A, c0, times, subspace_dim: int = 30, tol: float = 1e-12) -> EvolutionSeries:
    """Propagate with Krylov approximations of ``exp(A dt) c``.

    Each substep builds an Arnoldi basis of dimension ``subspace_dim`` and
    shrinks the step until the standard a posteriori estimate
    ``beta * h_{m+1,m} * |[exp(dt H_m)]_{m,1}|`` is below ``tol * beta``.
    On breakdown the Krylov space is invariant and the step is exact.
    """
    if subspace_dim < 2:
        raise DomainError(f"subspace_dim must be at least 2, got {subspace_dim}")
    op = _as_operator(A)
    times = _check_times(times)
    c = _as_vector(c0).copy()
    dim = c.size
    m_max = min(subspace_dim, dim)
    anorm = float(abs(op).sum(axis=1).max()) if sp.issparse(op) else float(np.abs(op).sum(axis=1).max())
    breakdown_tol = 1e-12 * max(anorm, 1.0)

    out = np.empty((times.size, dim), dtype=complex)
    t = 0.0
    dt_guess = None
    for i, t_next in enumerate(times):
        while t_next - t > 0:
            beta = np.linalg.norm(c)
            if beta == 0.0:
                t = t_next
                break
            V, H, k = _arnoldi(op, c, m_max, breakdown_tol)
            exact = k < m_max or k == dim
            remaining = t_next - t
            dt = remaining if (exact or dt_guess is None) else min(remaining, dt_guess)
            while True:
                E = sla.expm(dt * H[:k, :k])
                if exact:
                    break
                err = beta * abs(H[k, k - 1]) * abs(E[k - 1, 0])
                if err <= tol * beta:
                    break
                dt *= 0.5
                if dt < ODE_MIN_STEP:
                    raise NumericalError("Krylov step underflow", residual=err)
            c = beta * (V[:, :k] @ E[:, 0])
            if not exact:
                # try a larger step next time if this one was comfortably accurate
                dt_guess = dt * 2.0 if err < 1e-3 * tol * beta else dt
            t += dt
            if abs(t_next - t) < 1e-14 * max(1.0, t_next):
                t = t_next
        out[i] = c
    return EvolutionSeries(times, amplitudes=out)


def mode_weights(spec: Spectrum, space: HilbertSpace, n: int) -> ModeWeights:
    """Overlaps of the n-th imprinted state with each eigenmode.

    ``v_l`` is the projection of eigenvector ``l`` onto the imprinted state,
    ``w_l`` the component of the imprinted state along mode ``l``. Their
    products sum to one; ``wt`` is ``|v_l w_l|^2`` normalised to unit sum.
    """
    if not spec.has_vectors:
        raise DomainError("mode_weights needs a spectrum computed with eigenvectors")
    phi = initial_phase_imprinted(space, n).amplitudes
    v = phi.conj() @ spec.U
    w = spec.U_inv @ phi
    mag = np.abs(v * w) ** 2
    return ModeWeights(n=n, v=v, w=w, wt=mag / mag.sum(), eigenvalues=spec.eigenvalues)


def evolve_imprinted(spec: Spectrum, space: HilbertSpace, n: int, times) -> EvolutionSeries:
    """``d_n(t) = sum_l v_l e^{lambda_l t} w_l`` for the n-th imprinted state."""
    times = _check_times(times)
    mw = mode_weights(spec, space, n)
    d = np.exp(np.outer(times, spec.eigenvalues)) @ (mw.v * mw.w)
    return EvolutionSeries(times, d=d)


def project_imprinted(series: EvolutionSeries, space: HilbertSpace, n: int) -> EvolutionSeries:
    """Overlap ``<phi_n | c(t)>`` of a full-state series with the n-th imprinted state."""
    phi = initial_phase_imprinted(space, n).amplitudes
    return EvolutionSeries(series.times, d=series.amplitudes @ phi.conj())


def write_evolution_csv(path, series: EvolutionSeries) -> Path:
    """``t_gamma, re_d, im_d, population`` for projected series, else ``t_gamma, norm_sq``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        if series.d is not None:
            writer.writerow(["t_gamma", "re_d", "im_d", "population"])
            for t, d in zip(series.times, series.d):
                writer.writerow([f"{t:.12g}", f"{d.real:.12g}", f"{d.imag:.12g}", f"{abs(d) ** 2:.12g}"])
        else:
            writer.writerow(["t_gamma", "norm_sq"])
            for t, p in zip(series.times, series.norm_sq):
                writer.writerow([f"{t:.12g}", f"{p:.12g}"])
    return path


def write_weights_csv(path, weights: ModeWeights) -> Path:
    """``mode_index, wt, re_2lambda_over_gamma, im_2lambda_over_gamma``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mode_index", "wt", "re_2lambda_over_gamma", "im_2lambda_over_gamma"])
        for l, (wt, lam) in enumerate(zip(weights.wt, weights.eigenvalues), start=1):
            writer.writerow([l, f"{wt:.12g}", f"{2 * lam.real:.12g}", f"{2 * lam.imag:.12g}"])
    return path
