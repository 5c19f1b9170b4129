"""Decay fits, beat periods and imprint-index selection."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.signal import find_peaks

from .dynamics import EvolutionSeries, ModeWeights
from .errors import DomainError
from .hilbert import HilbertSpace
from .spectral import Spectrum

FIT_MODES = ("anchored", "free")
DEFAULT_WINDOWS = {"free": (5.0, 40.0), "anchored": (0.0, 40.0)}
BEAT_THRESHOLD = 0.05
BEAT_JOINT_WEIGHT = 0.5


@dataclass(frozen=True)
class DecayFit:
    rate: float
    intercept: float
    window: tuple[float, float]
    mode: str
    residual: float

    def lifetime_ratio(self, M: int) -> float:
        """Lifetime relative to the M-excitation intrinsic lifetime ``1/(M Gamma)``."""
        return M / self.rate if self.rate > 0 else np.inf


def fit_decay(series: EvolutionSeries, window: tuple[float, float] | None = None, mode: str = "free") -> DecayFit:
    """Straight-line fit of ``ln P(t)`` over a time window.

    ``mode="free"`` fits slope and intercept; ``mode="anchored"`` pins the
    intercept to ``ln P(0)``, which requires ``t = 0`` on the grid. The
    returned ``rate`` is minus the slope.
    """
    if mode not in FIT_MODES:
        raise DomainError(f"fit mode must be one of {FIT_MODES}, got {mode!r}")
    t0, t1 = DEFAULT_WINDOWS[mode] if window is None else (float(window[0]), float(window[1]))
    if not t1 > t0:
        raise DomainError(f"fit window ({t0}, {t1}) is empty")
    times = np.asarray(series.times)
    pop = np.asarray(series.population)
    sel = (times >= t0) & (times <= t1)
    if sel.sum() < 2:
        raise DomainError(f"fewer than two samples inside window ({t0}, {t1})")
    if np.any(pop[sel] <= 0):
        raise DomainError("population must be positive inside the fit window")
    t, y = times[sel], np.log(pop[sel])

    if mode == "free":
        slope, intercept = np.polyfit(t, y, 1)
    else:
        if times[0] != 0.0 or pop[0] <= 0:
            raise DomainError("anchored fit needs a positive population sample at t = 0")
        intercept = float(np.log(pop[0]))
        denom = np.dot(t, t)
        if denom == 0:
            raise DomainError("anchored fit window contains only t = 0")
        slope = np.dot(t, y - intercept) / denom
    resid = y - (intercept + slope * t)
    return DecayFit(
        rate=float(-slope),
        intercept=float(intercept),
        window=(t0, t1),
        mode=mode,
        residual=float(np.sqrt(np.mean(resid**2))),
    )


def dominant_modes(weights: ModeWeights, count: int = 2) -> np.ndarray:
    """Indices (0-based) of the ``count`` largest weightings, largest first."""
    return np.argsort(-weights.wt, kind="stable")[:count]


def beat_period(weights: ModeWeights, threshold: float = BEAT_THRESHOLD, joint: float = BEAT_JOINT_WEIGHT) -> float | None:
    """Beat period (in 1/Gamma) between the two most heavily weighted modes.

    The population oscillates at the difference of the two modes' frequency
    shifts ``Im(lambda)``. Returns None when fewer than two modes exceed
    ``threshold``, when the top two carry no more than ``joint`` of the
    total weight, or when their shifts coincide.
    """
    if weights.wt.size < 2:
        return None
    a, b = dominant_modes(weights, 2)
    if weights.wt[b] <= threshold:
        return None
    if weights.wt[a] + weights.wt[b] <= joint:
        return None
    dshift = abs(weights.eigenvalues[a].imag - weights.eigenvalues[b].imag)
    if dshift <= 1e-12:
        return None
    return 2.0 * np.pi / dshift


def peak_spacing(series: EvolutionSeries, prominence: float = 1.0) -> float | None:
    """Mean spacing of the maxima of ``ln P(t)``.

    ``prominence`` is in units of ``ln P``. The default of 1 keeps the deep
    two-mode beat maxima and drops the shallow humps left by minor modes.
    Returns None with fewer than two peaks.
    """
    pop = np.asarray(series.population)
    if np.any(pop <= 0):
        raise DomainError("population must be positive for peak finding")
    peaks, _ = find_peaks(np.log(pop), prominence=prominence)
    if peaks.size < 2:
        return None
    return float(np.mean(np.diff(np.asarray(series.times)[peaks])))


def weight_matrix(spec: Spectrum, space: HilbertSpace) -> np.ndarray:
    """``wt[n - 1, l]`` for every imprint index ``n`` at once."""
    if not spec.has_vectors:
        raise DomainError("weight scan needs a spectrum computed with eigenvectors")
    dim = space.dim
    n = np.arange(1, dim + 1)
    phases = np.exp(2j * np.pi * np.outer(n, space.phase_indices - 1) / dim) / np.sqrt(dim)  # (n, m)
    V = phases.conj() @ spec.U
    W = phases @ spec.U_inv.T
    mag = np.abs(V * W) ** 2
    return mag / mag.sum(axis=1, keepdims=True)


def scan_imprint_index(spec: Spectrum, space: HilbertSpace, target_mode: int = 1) -> list[tuple[int, float]]:
    """Rank every imprint index ``n`` by the weighting it puts on ``target_mode``.

    ``target_mode`` is 1-based in the spectrum's presentation order. The
    result is sorted by weight, descending, ties broken by ascending ``n``.
    """
    if not 1 <= target_mode <= spec.dim:
        raise DomainError(f"target mode {target_mode} outside [1, {spec.dim}]")
    wt = weight_matrix(spec, space)[:, target_mode - 1]
    order = np.lexsort((np.arange(wt.size), -wt))
    return [(int(i) + 1, float(wt[i])) for i in order]


def min_decay(spec: Spectrum) -> tuple[int, float]:
    """1-based mode label and value of the smallest decay constant ``-Re(2 lambda)``."""
    if spec.dim == 0:
        raise DomainError("empty spectrum")
    dc = spec.decay_constants
    l = int(np.argmin(dc))
    return l + 1, float(dc[l])


def write_fit_report(path, fits: Iterable[DecayFit], M: int, mode_label: int | str = "") -> Path:
    """CSV ``mode, window_start, window_end, rate_gamma, lifetime_x_intrinsic, residual``.

    ``mode`` holds the fit mode unless ``mode_label`` overrides it.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mode", "window_start", "window_end", "rate_gamma", "lifetime_x_intrinsic", "residual"])
        for fit in fits:
            writer.writerow([
                mode_label or fit.mode,
                f"{fit.window[0]:.12g}",
                f"{fit.window[1]:.12g}",
                f"{fit.rate:.12g}",
                f"{fit.lifetime_ratio(M):.12g}",
                f"{fit.residual:.12g}",
            ])
    return path
