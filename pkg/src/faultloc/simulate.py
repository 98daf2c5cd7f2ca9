"""Synthetic sensor data, generated two independent ways.

``synthesize_output`` multiplies the closed-form transfer function by the
fault spectrum and inverse-transforms. ``simulate_pde`` time-steps the PDE
itself and never touches the transfer function, so it can serve as honest
test data for the estimator.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from faultloc.model import NondimensionalSystem, ValidationError
from faultloc.xferfn import transfer_function

DIVERGENCE_LIMIT = 1e6
# exp(-k^2/2) = 1e-9: beyond k sigma a Gaussian is below 1e-9 of its peak
GAUSS_TAIL = math.sqrt(2.0 * math.log(1e9))


class StabilityError(RuntimeError):
    pass


class RecordLengthError(ValueError):
    def __init__(self, message: str, required_samples: int):
        super().__init__(message)
        self.required_samples = required_samples


@dataclass(frozen=True, eq=False)
class Waveform:
    """Uniformly sampled (v/V0, i/I0) record; ``samples`` has shape (n, 2)."""

    T_s: float
    samples: np.ndarray
    start_time: float = 0.0

    def __post_init__(self):
        x = np.array(self.samples, dtype=float)
        if not self.T_s > 0:
            raise ValidationError("T_s", "must be > 0")
        if x.ndim != 2 or x.shape[1] != 2 or x.shape[0] < 2:
            raise ValidationError("samples", f"expected shape (n >= 2, 2), got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValidationError("samples", "must be finite")
        x.flags.writeable = False
        object.__setattr__(self, "samples", x)

    @property
    def times(self) -> np.ndarray:
        return self.start_time + self.T_s * np.arange(self.samples.shape[0])

    def __len__(self):
        return self.samples.shape[0]


@dataclass(frozen=True, eq=False)
class SpatialState:
    xi_nodes: np.ndarray
    z_values: np.ndarray


def gaussian_pulse_waveform(sigma: float, t_f: float, T_s: float, n: int) -> np.ndarray:
    """Samples of the unit-area Gaussian u(t_k - t_f) at t_k = k T_s."""
    if not sigma > 0:
        raise ValidationError("sigma", "must be > 0")
    if n < 2:
        raise ValidationError("n", "must be >= 2")
    if t_f < 6 * sigma or t_f > n * T_s - 6 * sigma:
        warnings.warn(
            f"Gaussian pulse at t_f={t_f:g} s with sigma={sigma:g} s is truncated by the "
            f"record [0, {n * T_s:g}] s",
            RuntimeWarning,
            stacklevel=2,
        )
    t = T_s * np.arange(n) - t_f
    return np.exp(-0.5 * (t / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))


def required_samples(sys: NondimensionalSystem, ell: float, t_f: float, sigma: float, T_s: float) -> int:
    """Shortest record holding the whole response above 1e-9 of its peak.

    The impulse response of the line is supported on [-transit, transit]
    around the fault time, so the response spans t_f +- (transit + tail).
    """
    transit = abs(ell) * sys.wave_slowness
    return int(math.ceil((t_f + transit + GAUSS_TAIL * sigma) / T_s)) + 1


def synthesize_output(
    sys: NondimensionalSystem, ell: float, t_f: float, sigma: float, T_s: float, n: int
) -> Waveform:
    """Exact sensor output for a Gaussian fault, via Y = H e^{-j w t_f} U."""
    if n < 2 or n % 2:
        raise ValidationError("n", f"must be even and >= 2, got {n}")
    transit = abs(ell) * sys.wave_slowness
    need = required_samples(sys, ell, t_f, sigma, T_s)
    if need > n:
        raise RecordLengthError(
            f"record of {n} samples wraps around; at least {need} samples are required "
            f"(next power of two: {1 << (need - 1).bit_length()})",
            need,
        )
    if t_f - transit - GAUSS_TAIL * sigma < 0:
        raise RecordLengthError(
            f"fault time t_f={t_f:g} s is too early: the response starts before t=0 "
            f"(need t_f >= {transit + GAUSS_TAIL * sigma:g} s)",
            need,
        )
    w = 2.0 * np.pi * np.fft.rfftfreq(n, d=T_s)
    H = transfer_function(w, sys, ell)
    Y = H * (np.exp(-1j * w * t_f) * np.exp(-0.5 * (w * sigma) ** 2) / T_s)
    y = np.fft.irfft(Y, n=n, axis=-1)
    return Waveform(T_s=T_s, samples=y.T)


class LineStepper:
    """Backward Euler in time, RK4 in space, for the per-unit line.

    Each step solves, for the new state z on the nodes xi_i = i/(m-1),

        dz/dxi = Gamma ell (E/dt + F) z - Gamma ell (E/dt) z_prev,

    as an ODE in xi from z(1) = B u_k down to xi = 0, with z_prev linearly
    interpolated at RK stage points. The step is linear in (u_k, z_prev), so
    it is assembled once into ``z_new = A z_prev + c u_k``.
    """

    def __init__(self, sys: NondimensionalSystem, ell: float, dt: float, spatial_nodes: int = 256):
        if spatial_nodes < 16:
            raise ValidationError("spatial_nodes", f"must be >= 16, got {spatial_nodes}")
        if not dt > 0:
            raise ValidationError("dt", "must be > 0")
        self.sys = sys
        self.ell = float(ell)
        self.dt = float(dt)
        self.m = int(spatial_nodes)
        self.xi = np.linspace(0.0, 1.0, self.m)
        self.A, self.c = self._assemble()
        self.z = np.zeros(2 * self.m)

    def _assemble(self):
        m, ell, dt, sys = self.m, self.ell, self.dt, self.sys
        h = 1.0 / (m - 1)
        P = np.array([[0.0, -ell * (sys.e_i / dt + sys.f_i)], [-ell * (sys.e_v / dt + sys.f_v), 0.0]])
        Q = np.array([[0.0, -ell * sys.e_i / dt], [-ell * sys.e_v / dt, 0.0]])
        K = 1 + 2 * m  # column 0: u_k, columns 1..: flattened z_prev

        def prev(i):
            e = np.zeros((2, K))
            e[0, 1 + 2 * i] = 1.0
            e[1, 2 + 2 * i] = 1.0
            return e

        rows = np.zeros((m, 2, K))
        z = np.zeros((2, K))
        z[:, 0] = sys.B
        rows[m - 1] = z
        QP_hi = Q @ prev(m - 1)
        for i in range(m - 2, -1, -1):
            QP_lo = Q @ prev(i)
            QP_mid = 0.5 * (QP_hi + QP_lo)
            k1 = P @ z - QP_hi
            k2 = P @ (z - 0.5 * h * k1) - QP_mid
            k3 = P @ (z - 0.5 * h * k2) - QP_mid
            k4 = P @ (z - h * k3) - QP_lo
            z = z - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            rows[i] = z
            QP_hi = QP_lo
        rows = rows.reshape(2 * m, K)
        return np.ascontiguousarray(rows[:, 1:]), rows[:, 0].copy()

    def step(self, u_k: float) -> None:
        self.z = self.A @ self.z + self.c * u_k
        if not np.abs(self.z).max() <= DIVERGENCE_LIMIT:
            raise StabilityError(
                "PDE solution diverged (|z| > 1e6); use more spatial nodes or a different time step"
            )

    @property
    def output(self) -> np.ndarray:
        return self.z[:2].copy()

    @property
    def state(self) -> SpatialState:
        return SpatialState(self.xi.copy(), self.z.reshape(self.m, 2).copy())


def simulate_pde(
    sys: NondimensionalSystem,
    ell: float,
    u,
    T_s: float,
    spatial_nodes: int = 256,
    substeps: int = 1,
) -> Waveform:
    """Time-step the line from rest with boundary input ``u`` at the fault end.

    ``u`` holds u(t - t_f) sampled at the simulation step ``T_s / substeps``;
    its length must be a multiple of ``substeps``. The returned waveform is
    the xi = 0 state every ``substeps`` steps, i.e. sampled at ``T_s``.
    """
    u = np.asarray(u, dtype=float)
    if substeps < 1:
        raise ValidationError("substeps", "must be >= 1")
    if u.ndim != 1 or u.size % substeps or u.size // substeps < 2:
        raise ValidationError("u", f"length must be a multiple of substeps={substeps} giving >= 2 samples")
    stepper = LineStepper(sys, ell, T_s / substeps, spatial_nodes)
    A, c = stepper.A, stepper.c
    z = np.zeros(2 * stepper.m)
    out = np.empty((u.size // substeps, 2))
    for q, uq in enumerate(u):
        z = A @ z
        if uq != 0.0:
            z += c * uq
        if not np.abs(z).max() <= DIVERGENCE_LIMIT:
            raise StabilityError(
                f"PDE solution diverged at step {q} (|z| > 1e6); use more spatial nodes "
                "or a different time step"
            )
        if q % substeps == 0:
            out[q // substeps] = z[:2]
    return Waveform(T_s=T_s, samples=out)


def simulate_fault_pde(
    sys: NondimensionalSystem,
    ell: float,
    t_f: float,
    sigma: float,
    T_s: float,
    n: int,
    spatial_nodes: int = 256,
    substeps: int = 1,
) -> Waveform:
    """PDE response to the Gaussian fault pulse, n output samples at T_s."""
    u = gaussian_pulse_waveform(sigma, t_f, T_s / substeps, n * substeps)
    return simulate_pde(sys, ell, u, T_s, spatial_nodes, substeps)
