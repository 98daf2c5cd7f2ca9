"""Magnitude least-squares fault localisation.

The cost compares measured output magnitudes with the model prediction
|H(j w_k; ell)| |U(j w_k)| over the discrete grid, summed up to a cut-off
frequency. Taking magnitudes removes the unknown fault time.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from faultloc.model import NondimensionalSystem, ValidationError
from faultloc.spectrum import MagnitudeSpectrum, sigma_for_bandwidth
from faultloc.xferfn import critical_frequency, transfer_function

INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
GOLDEN = 1.0 + INV_GOLDEN


@dataclass(frozen=True, eq=False)
class CostCurve:
    ells: np.ndarray
    costs: np.ndarray

    @property
    def spread(self) -> float:
        """(max - min) / mean; small values mean an uninformative curve."""
        return float((self.costs.max() - self.costs.min()) / self.costs.mean())

    @property
    def argmin(self) -> float:
        return float(self.ells[np.argmin(self.costs)])


@dataclass(frozen=True)
class EstimateResult:
    ell_hat: float
    cost_at_min: float
    iterations: int
    evaluations: int
    band_used: tuple
    converged: bool
    signed_ell: float = math.nan


@dataclass(frozen=True)
class BandwidthAdvice:
    omega_star: float
    omega_f_recommended: float
    omega_b_recommended: float
    sigma_recommended: float
    T_s_recommended: float


class CostFunction:
    """J(ell) for fixed data; precomputes the band and the fault spectrum."""

    def __init__(
        self,
        measured: MagnitudeSpectrum,
        sys: NondimensionalSystem,
        sigma: float,
        omega_cut: float | None = None,
        weights=(1.0, 1.0),
    ):
        w = measured.grid.omegas
        if measured.mags.shape[0] != 2:
            raise ValidationError("measured", "expected a two-channel spectrum")
        if w.size < 2 or w[0] != 0.0:
            raise ValidationError("measured", "grid must start at 0 with at least two points")
        d = np.diff(w)
        if not np.allclose(d, d[0], rtol=1e-9, atol=0.0):
            raise ValidationError("measured", "grid is not uniformly spaced")
        if not sigma > 0:
            raise ValidationError("sigma", "must be > 0")
        top = float(w[-1])
        if omega_cut is None:
            omega_cut = top
        if not 0 <= omega_cut <= top * (1 + 1e-12):
            raise ValidationError("omega_cut", f"must lie in [0, {top:g}] rad/s, got {omega_cut!r}")
        band = w <= omega_cut * (1 + 1e-12)
        self.omegas = w[band]
        self.measured = measured.mags[:, band]
        self.u_mag = np.exp(-0.5 * (self.omegas * sigma) ** 2)
        self.weights = np.asarray(weights, dtype=float).reshape(2, 1)
        self.sys = sys
        self.omega_cut = float(omega_cut)
        self.evaluations = 0

    def model(self, ell: float) -> np.ndarray:
        return np.abs(transfer_function(self.omegas, self.sys, ell)) * self.u_mag

    def __call__(self, ell: float) -> float:
        self.evaluations += 1
        r = self.measured - self.model(ell)
        return float(np.sum(self.weights * r * r))


def cost(
    ell: float,
    measured: MagnitudeSpectrum,
    sys: NondimensionalSystem,
    sigma: float,
    omega_cut: float | None = None,
    weights=(1.0, 1.0),
) -> float:
    return CostFunction(measured, sys, sigma, omega_cut, weights)(ell)


def sweep_cost(
    ells,
    measured: MagnitudeSpectrum,
    sys: NondimensionalSystem,
    sigma: float,
    omega_cut: float | None = None,
    threads: int = 1,
) -> CostCurve:
    """Evaluate J on a grid of distances. Results do not depend on ``threads``."""
    ells = np.asarray(ells, dtype=float).ravel()
    if ells.size == 0:
        raise ValidationError("ells", "distance grid is empty")
    fn = CostFunction(measured, sys, sigma, omega_cut)
    if threads == 1:
        costs = [fn(x) for x in ells]
    else:
        with ThreadPoolExecutor(max_workers=threads or None) as pool:
            costs = list(pool.map(fn, ells))
    return CostCurve(ells, np.array(costs))


class _Budget(Exception):
    pass


def _golden(f, a, c, tol, max_evals):
    """Golden-section search on [a, c]; returns (iterations, final width)."""
    a, c = min(a, c), max(a, c)
    x1 = c - INV_GOLDEN * (c - a)
    x2 = a + INV_GOLDEN * (c - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while c - a >= tol:
        if f.evaluations >= max_evals:
            raise _Budget
        it += 1
        if f1 <= f2:
            c, x2, f2 = x2, x1, f1
            x1 = c - INV_GOLDEN * (c - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_GOLDEN * (c - a)
            f2 = f(x2)
    return it, c - a


class _Tracked:
    """Wraps a cost function, remembering the best point seen."""

    def __init__(self, fn):
        self.fn = fn
        self.evaluations = 0
        self.best = (math.nan, math.inf)

    def __call__(self, x):
        self.evaluations += 1
        fx = self.fn(x)
        if fx < self.best[1]:
            self.best = (x, fx)
        return fx


def _bracket(f, x0, step, max_evals):
    """Walk downhill from x0 with golden-ratio growing steps until J rises."""
    a, fa = x0, f(x0)
    b, fb = x0 + step, f(x0 + step)
    if fb > fa:
        b2, fb2 = x0 - step, f(x0 - step)
        if fb2 >= fa:
            return x0 - step, x0 + step, 0
        b, fb = b2, fb2
        step = -step
    it = 0
    while True:
        if f.evaluations >= max_evals:
            raise _Budget
        it += 1
        step *= GOLDEN
        c, fc = b + step, f(b + step)
        if fc > fb:
            return a, c, it
        a, fa, b, fb = b, fb, c, fc


def localize(
    measured: MagnitudeSpectrum,
    sys: NondimensionalSystem,
    sigma: float,
    omega_cut: float | None = None,
    init_ell: float | None = None,
    tol: float = 0.01,
    max_evals: int = 10_000,
    coarse=(10.0, 1e5, 64),
) -> EstimateResult:
    """Fit the fault distance.

    With ``init_ell=None`` a logarithmic sweep over ``coarse`` picks the best
    cell, which golden-section search then refines. With a starting guess the
    search runs unconstrained over the real line from that point, growing a
    bracket downhill first. Either way the reported distance is |ell|.
    """
    fn = CostFunction(measured, sys, sigma, omega_cut)
    f = _Tracked(fn)
    iterations = 0
    converged = False
    try:
        if init_ell is None:
            lo, hi, n = coarse
            grid = np.logspace(math.log10(lo), math.log10(hi), int(n))
            costs = np.array([f(x) for x in grid])
            i = int(np.argmin(costs))
            # the lowest cell extends down to zero distance
            a = grid[i - 1] if i > 0 else 0.0
            c = grid[min(i + 1, grid.size - 1)]
        else:
            if not math.isfinite(init_ell):
                raise ValidationError("init_ell", "must be finite")
            step = max(1.0, 0.01 * abs(init_ell))
            a, c, iterations = _bracket(f, float(init_ell), step, max_evals)
        its, width = _golden(f, a, c, tol, max_evals)
        iterations += its
        converged = bool(width < tol)
    except _Budget:
        converged = False
    x, fx = f.best
    return EstimateResult(
        ell_hat=abs(float(x)),
        cost_at_min=float(fx),
        iterations=iterations,
        evaluations=f.evaluations,
        band_used=(0.0, fn.omega_cut),
        converged=converged,
        signed_ell=float(x),
    )


def advise_bandwidth(sys: NondimensionalSystem, ell_min: float, delta: float = 0.005) -> BandwidthAdvice:
    """Design rule: w_f = 10 w*, w_b = 10 w_f, with w* taken at the closest fault of interest."""
    if not ell_min > 0:
        raise ValidationError("ell_min", "must be > 0")
    w_star = critical_frequency(sys, ell_min, delta)
    if w_star is None:
        raise ValidationError("ell_min", "critical frequency lies beyond the sweep range")
    w_f = 10.0 * w_star
    w_b = 10.0 * w_f
    return BandwidthAdvice(
        omega_star=w_star,
        omega_f_recommended=w_f,
        omega_b_recommended=w_b,
        sigma_recommended=sigma_for_bandwidth(w_f),
        T_s_recommended=math.pi / w_b,
    )
