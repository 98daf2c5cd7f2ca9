"""Magnitude spectra on the grid w_k = pi k / (N T_s), k = 0..N.

A record of 2N samples is transformed with a 2N-point FFT and multiplied by
T_s, so a sampled unit-area pulse has spectrum close to its continuous-time
Fourier transform. No window is applied: records are transients that decay to
zero inside the window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from faultloc.model import ValidationError
from faultloc.xferfn import FrequencyGrid


@dataclass(frozen=True, eq=False)
class MagnitudeSpectrum:
    """Per-channel magnitudes, ``mags`` of shape (channels, N + 1)."""

    grid: FrequencyGrid
    mags: np.ndarray

    def __post_init__(self):
        m = np.array(self.mags, dtype=float, ndmin=2)
        if m.shape[-1] != len(self.grid):
            raise ValidationError("mags", f"length {m.shape[-1]} does not match grid of {len(self.grid)}")
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise ValidationError("mags", "must be finite and non-negative")
        m.flags.writeable = False
        object.__setattr__(self, "mags", m)

    @property
    def spacing(self) -> float:
        w = self.grid.omegas
        return float(w[1] - w[0]) if w.size > 1 else math.nan


def frequency_grid(N: int, T_s: float) -> FrequencyGrid:
    if N < 1:
        raise ValidationError("N", "must be >= 1")
    if not T_s > 0:
        raise ValidationError("T_s", "must be > 0")
    return FrequencyGrid(np.pi * np.arange(N + 1) / (N * T_s))


def magnitude_spectrum(w) -> MagnitudeSpectrum:
    """Spectrum of a Waveform; odd-length records are zero-padded by one sample."""
    x = np.asarray(w.samples, dtype=float)
    n = x.shape[0] + (x.shape[0] % 2)
    X = np.fft.rfft(x, n=n, axis=0) * w.T_s
    return MagnitudeSpectrum(frequency_grid(n // 2, w.T_s), np.abs(X).T)


def gaussian_magnitude(sigma: float, grid: FrequencyGrid) -> MagnitudeSpectrum:
    """|U(jw)| = exp(-w^2 sigma^2 / 2) of the unit-area Gaussian pulse."""
    if not sigma > 0:
        raise ValidationError("sigma", "must be > 0")
    w = grid.omegas
    return MagnitudeSpectrum(grid, np.exp(-0.5 * (w * sigma) ** 2))


def fault_bandwidth(sigma: float, threshold: float = 0.01) -> float:
    """Frequency above which the Gaussian fault spectrum is below ``threshold``."""
    if not sigma > 0:
        raise ValidationError("sigma", "must be > 0")
    if not 0 < threshold < 1:
        raise ValidationError("threshold", "must lie in (0, 1)")
    return math.sqrt(-2.0 * math.log(threshold)) / sigma


def sigma_for_bandwidth(omega_f: float, threshold: float = 0.01) -> float:
    """Inverse of :func:`fault_bandwidth`."""
    if not omega_f > 0:
        raise ValidationError("omega_f", "must be > 0")
    return math.sqrt(-2.0 * math.log(threshold)) / omega_f
