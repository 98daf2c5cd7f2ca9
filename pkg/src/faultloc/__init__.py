"""Single-ended fault localisation on distributed-parameter lines.

The line between sensor and fault is modelled by the Telegrapher's equation in
per-unit form. The estimator fits the fault distance by matching measured
output magnitude spectra to the closed-form transfer function.
"""

from faultloc.model import (
    BaseQuantities,
    CaseConfig,
    FaultSpec,
    LineParameters,
    NondimensionalSystem,
    ValidationError,
    load_config,
    nondimensionalise,
    table1_config,
)

__version__ = "0.1.0"

__all__ = [
    "BaseQuantities",
    "CaseConfig",
    "FaultSpec",
    "LineParameters",
    "NondimensionalSystem",
    "ValidationError",
    "load_config",
    "nondimensionalise",
    "table1_config",
    "__version__",
]
