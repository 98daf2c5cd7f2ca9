"""Closed-form transfer function of the per-unit Telegrapher's line.

The sensor output is ``Y(s) = H(s; ell) exp(-t_f s) U(s)`` with

    H(s; ell) = expm(-Gamma (F + E s) ell) @ B.

Writing ``a = f_v + s e_v`` and ``b = f_i + s e_i`` the exponent is
``ell * [[0, b], [a, 0]]``, whose square is ``a b ell**2 * I``. Hence

    expm(M) = cosh(g ell) I + sinh(g ell)/g * [[0, b], [a, 0]],  g = sqrt(a b),

which is even in ``g`` so the square-root branch does not matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from faultloc.model import NondimensionalSystem, ValidationError

SERIES_SWITCH = 1e-6


def _check_finite(name, x):
    if not np.all(np.isfinite(x)):
        raise ValidationError(name, "must be finite")


def _hyperbolic_terms(s, sys: NondimensionalSystem, ell: float):
    """Return cosh(g ell), sinh(g ell)/g, a, b for complex frequency ``s``."""
    s = np.asarray(s, dtype=complex)
    a = sys.f_v + s * sys.e_v
    b = sys.f_i + s * sys.e_i
    x2 = a * b * (ell * ell)
    x = np.sqrt(x2)
    small = np.abs(x) < SERIES_SWITCH
    with np.errstate(invalid="ignore", divide="ignore"):
        shg = np.where(small, ell * (1.0 + x2 / 6.0 + x2 * x2 / 120.0), np.sinh(x) / x * ell)
    ch = np.where(small, 1.0 + x2 / 2.0 + x2 * x2 / 24.0, np.cosh(x))
    return ch, shg, a, b


def laplace_propagation(s, sys: NondimensionalSystem, ell: float) -> np.ndarray:
    """expm(-Gamma (F + E s) ell) for arbitrary complex ``s``; shape s.shape + (2, 2)."""
    ch, shg, a, b = _hyperbolic_terms(s, sys, ell)
    out = np.empty(np.shape(ch) + (2, 2), dtype=complex)
    out[..., 0, 0] = ch
    out[..., 0, 1] = shg * b
    out[..., 1, 0] = shg * a
    out[..., 1, 1] = ch
    return out


def laplace_transfer(s, sys: NondimensionalSystem, ell: float) -> np.ndarray:
    """H(s; ell) for complex ``s``. Returns shape (2,) + s.shape."""
    ch, shg, a, b = _hyperbolic_terms(s, sys, ell)
    h1 = ch * sys.b_v + shg * b
    h2 = shg * a * sys.b_v + ch
    return np.stack([h1, h2])


def propagation_matrix(omega, sys: NondimensionalSystem, ell: float) -> np.ndarray:
    """Propagation matrix at s = j*omega. Negative ``ell`` is allowed."""
    _check_finite("omega", omega)
    _check_finite("ell", ell)
    return laplace_propagation(1j * np.asarray(omega, dtype=float), sys, float(ell))


def transfer_function(omega, sys: NondimensionalSystem, ell: float) -> np.ndarray:
    """H(j omega; ell) as a complex array of shape (2,) + omega.shape."""
    _check_finite("omega", omega)
    _check_finite("ell", ell)
    return laplace_transfer(1j * np.asarray(omega, dtype=float), sys, float(ell))


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    omegas: np.ndarray

    def __post_init__(self):
        w = np.array(self.omegas, dtype=float, ndmin=1)
        if w.ndim != 1 or w.size == 0:
            raise ValidationError("omegas", "must be a non-empty 1-D sequence")
        _check_finite("omegas", w)
        if w[0] < 0:
            raise ValidationError("omegas", "first entry must be >= 0")
        if np.any(np.diff(w) <= 0):
            raise ValidationError("omegas", "must be strictly increasing")
        w.flags.writeable = False
        object.__setattr__(self, "omegas", w)

    def __len__(self):
        return self.omegas.size


@dataclass(frozen=True, eq=False)
class FrequencyResponse:
    grid: FrequencyGrid
    h1: np.ndarray
    h2: np.ndarray
    ell: float

    @property
    def magnitudes(self) -> np.ndarray:
        """|H1|, |H2| stacked as shape (2, len(grid))."""
        return np.abs(np.stack([self.h1, self.h2]))


def magnitude_response(grid: FrequencyGrid, sys: NondimensionalSystem, ell: float) -> FrequencyResponse:
    h = transfer_function(grid.omegas, sys, ell)
    return FrequencyResponse(grid=grid, h1=h[0], h2=h[1], ell=float(ell))


def log_sweep(omega_min: float, omega_max: float, points_per_decade: int = 400) -> np.ndarray:
    decades = math.log10(omega_max / omega_min)
    n = max(2, int(math.ceil(decades * points_per_decade)) + 1)
    return np.logspace(math.log10(omega_min), math.log10(omega_max), n)


def critical_frequency(
    sys: NondimensionalSystem,
    ell: float,
    delta: float = 0.005,
    omega_min: float = 1.0,
    omega_max: float = 1e8,
    points_per_decade: int = 400,
) -> float | None:
    """Frequency at which the line stops behaving like its DC limit.

    Returns the first frequency on a logarithmic sweep at which the relative
    deviation ``| |H_i(jw)| - |H_i(0)| | / |H_i(0)|`` exceeds ``delta`` in
    every channel, or None if that never happens within the sweep.

    The voltage channel alone departs much earlier, through the lumped series
    inductance of the line segment (``w L ell / R0`` against a DC gain of
    order ``r / R0``). Requiring every channel to move picks out the onset of
    distributed, wave-like behaviour instead, which is what shrinks as the
    fault moves away.
    """
    if not ell > 0:
        raise ValidationError("ell", "must be > 0")
    if not 0 < delta < 1:
        raise ValidationError("delta", "must lie in (0, 1)")
    w = log_sweep(omega_min, omega_max, points_per_decade)
    dc = np.abs(transfer_function(0.0, sys, ell))
    mags = np.abs(transfer_function(w, sys, ell))
    dev = np.abs(mags - dc[:, None]) / dc[:, None]
    hit = np.flatnonzero(dev.min(axis=0) > delta)
    if hit.size == 0:
        return None
    return float(w[hit[0]])
