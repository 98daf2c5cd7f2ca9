"""Line parameters, per-unit bases and the non-dimensional Telegrapher system.

Voltages and currents are scaled by base values ``V0`` and ``I0`` and distance
by the fault distance, which turns the Telegrapher's equation into

    ell * E dz/dt = Gamma dz/dxi - ell * F z,   xi in [0, 1]

with sensor output ``z(t, 0)`` and fault boundary ``z(t, 1) = B u(t - t_f)``.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np


class ValidationError(ValueError):
    """Raised when an input violates a documented invariant.

    ``field`` names the offending parameter so callers can report it.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _require(cond: bool, name: str, message: str) -> None:
    if not cond:
        raise ValidationError(name, message)


def _finite(x: float) -> bool:
    return isinstance(x, (int, float, np.floating, np.integer)) and math.isfinite(x)


@dataclass(frozen=True)
class LineParameters:
    """Distributed line constants per metre (ohm/m, H/m, F/m, S/m)."""

    R: float
    L: float
    C: float
    G: float = 0.0

    def __post_init__(self):
        for name in ("R", "L", "C"):
            v = getattr(self, name)
            _require(_finite(v) and v > 0, name, f"must be finite and > 0, got {v!r}")
        _require(_finite(self.G) and self.G >= 0, "G", f"must be finite and >= 0, got {self.G!r}")

    @property
    def wave_speed(self) -> float:
        """Lossless propagation speed 1/sqrt(LC) in m/s."""
        return 1.0 / math.sqrt(self.L * self.C)

    def transit_time(self, ell: float) -> float:
        return abs(ell) * math.sqrt(self.L * self.C)


@dataclass(frozen=True)
class BaseQuantities:
    """Per-unit bases. ``R0`` is computed once, here, and reused everywhere."""

    V0: float
    I0: float
    R0: float = field(init=False)

    def __post_init__(self):
        _require(_finite(self.V0) and self.V0 > 0, "V0", f"must be finite and > 0, got {self.V0!r}")
        _require(_finite(self.I0) and self.I0 > 0, "I0", f"must be finite and > 0, got {self.I0!r}")
        object.__setattr__(self, "R0", self.V0 / self.I0)


@dataclass(frozen=True)
class FaultSpec:
    """Fault resistance (ohm), onset time (s) and Gaussian pulse width (s)."""

    r: float
    t_f: float
    sigma: float

    def __post_init__(self):
        _require(_finite(self.r) and self.r >= 0, "r", f"must be finite and >= 0, got {self.r!r}")
        _require(_finite(self.t_f) and self.t_f >= 0, "t_f", f"must be finite and >= 0, got {self.t_f!r}")
        _require(_finite(self.sigma) and self.sigma > 0, "sigma", f"must be finite and > 0, got {self.sigma!r}")


@dataclass(frozen=True, eq=False)
class NondimensionalSystem:
    """Coefficient matrices of the per-unit system.

    E = diag(C R0, L/R0), F = diag(G R0, R/R0), Gamma = [[0, -1], [-1, 0]] and
    the fault coupling vector B = (r/R0, 1). The diagonal entries are kept as
    scalars as well, since the transfer function only needs those.
    """

    e_v: float
    e_i: float
    f_v: float
    f_i: float
    b_v: float
    R0: float

    @property
    def E(self) -> np.ndarray:
        return np.diag([self.e_v, self.e_i])

    @property
    def F(self) -> np.ndarray:
        return np.diag([self.f_v, self.f_i])

    @property
    def Gamma(self) -> np.ndarray:
        return np.array([[0.0, -1.0], [-1.0, 0.0]])

    @property
    def B(self) -> np.ndarray:
        return np.array([self.b_v, 1.0])

    @property
    def wave_slowness(self) -> float:
        """sqrt(LC) in s/m; equal to sqrt(e_v * e_i) since R0 cancels."""
        return math.sqrt(self.e_v * self.e_i)


def nondimensionalise(line: LineParameters, bases: BaseQuantities, fault: FaultSpec) -> NondimensionalSystem:
    R0 = bases.R0
    return NondimensionalSystem(
        e_v=line.C * R0,
        e_i=line.L / R0,
        f_v=line.G * R0,
        f_i=line.R / R0,
        b_v=fault.r / R0,
        R0=R0,
    )


def to_per_unit(v, i, bases: BaseQuantities, inverse: bool = False):
    """Scale (volts, amps) to per-unit, or back when ``inverse`` is set."""
    if inverse:
        return v * bases.V0, i * bases.I0
    return v / bases.V0, i / bases.I0


def condition_number(m: np.ndarray) -> float:
    """max/min ratio of a positive diagonal matrix."""
    d = np.abs(np.diag(m))
    return float(d.max() / d.min())


@dataclass(frozen=True)
class SimSettings:
    """Fields used only to generate synthetic data. The estimator never sees these."""

    ell_true: float
    T_s: float
    n_samples: int
    spatial_nodes: int = 256
    substeps: int = 1

    def __post_init__(self):
        _require(_finite(self.ell_true), "ell_true", "must be finite")
        _require(_finite(self.T_s) and self.T_s > 0, "T_s", f"must be finite and > 0, got {self.T_s!r}")
        n = self.n_samples
        _require(
            isinstance(n, (int, np.integer)) and n >= 8 and (n & (n - 1)) == 0,
            "n_samples",
            f"must be a power of two >= 8, got {n!r}",
        )
        _require(
            isinstance(self.spatial_nodes, (int, np.integer)) and self.spatial_nodes >= 16,
            "spatial_nodes",
            f"must be an integer >= 16, got {self.spatial_nodes!r}",
        )
        _require(
            isinstance(self.substeps, (int, np.integer)) and self.substeps >= 1,
            "substeps",
            f"must be an integer >= 1, got {self.substeps!r}",
        )


@dataclass(frozen=True)
class CaseConfig:
    line: LineParameters
    bases: BaseQuantities
    fault: FaultSpec
    sim: SimSettings

    @property
    def system(self) -> NondimensionalSystem:
        return nondimensionalise(self.line, self.bases, self.fault)

    def to_ini(self) -> str:
        # repr() round-trips floats exactly
        lines = [
            "[line]",
            f"R = {self.line.R!r}",
            f"L = {self.line.L!r}",
            f"C = {self.line.C!r}",
            f"G = {self.line.G!r}",
            "",
            "[bases]",
            f"V0 = {self.bases.V0!r}",
            f"I0 = {self.bases.I0!r}",
            "",
            "[fault]",
            f"r = {self.fault.r!r}",
            f"t_f = {self.fault.t_f!r}",
            f"sigma = {self.fault.sigma!r}",
            "",
            "[sim]",
            f"ell_true = {self.sim.ell_true!r}",
            f"T_s = {self.sim.T_s!r}",
            f"n_samples = {self.sim.n_samples}",
            f"spatial_nodes = {self.sim.spatial_nodes}",
            f"substeps = {self.sim.substeps}",
            "",
        ]
        return "\n".join(lines)


_SCHEMA = {
    "line": {"R": float, "L": float, "C": float, "G": float},
    "bases": {"V0": float, "I0": float},
    "fault": {"r": float, "t_f": float, "sigma": float},
    "sim": {"ell_true": float, "T_s": float, "n_samples": int, "spatial_nodes": int, "substeps": int},
}
_OPTIONAL = {("line", "G"): 0.0, ("sim", "spatial_nodes"): 256, ("sim", "substeps"): 1}


def parse_config(text: str) -> CaseConfig:
    """Parse the INI-style case file. Unknown keys are rejected."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys are case-sensitive (L vs l)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ValidationError("config", str(exc)) from exc

    values: dict[str, dict] = {}
    for section, keys in _SCHEMA.items():
        if not cp.has_section(section):
            raise ValidationError(section, "missing section")
        extra = set(cp[section]) - set(keys)
        if extra:
            raise ValidationError(f"{section}.{sorted(extra)[0]}", "unknown key")
        values[section] = {}
        for key, kind in keys.items():
            if key not in cp[section]:
                if (section, key) in _OPTIONAL:
                    values[section][key] = _OPTIONAL[(section, key)]
                    continue
                raise ValidationError(key, f"missing from [{section}]")
            raw = cp[section][key]
            try:
                values[section][key] = kind(raw) if kind is float else int(raw)
            except ValueError as exc:
                raise ValidationError(key, f"cannot parse {raw!r} as {kind.__name__}") from exc

    return CaseConfig(
        line=LineParameters(**values["line"]),
        bases=BaseQuantities(**values["bases"]),
        fault=FaultSpec(**values["fault"]),
        sim=SimSettings(**values["sim"]),
    )


def load_config(path) -> CaseConfig:
    return parse_config(Path(path).read_text())


def table1_text() -> str:
    return resources.files("faultloc").joinpath("configs/table1.ini").read_text()


def table1_config() -> CaseConfig:
    """The 220 kV case study shipped with the package."""
    return parse_config(table1_text())
