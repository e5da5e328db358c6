"""Noisy single-parameter quantum metrology toolkit.

Lindblad propagation of one- and two-qubit probes, quantum Fisher
information via the symmetric logarithmic derivative, and GRAPE-style
gradient ascent over piecewise-constant Pauli control fields.
"""

from . import dynamics, grape, qcore, qfi, schemes
from .dynamics import NoiseModel, StatePair
from .errors import (
    ContractViolationError,
    PulseFormatError,
    SingularStatisticsError,
    UndefinedBoundError,
)
from .grape import ControlPulse, OptimizationResult
from .schemes import OptimizerSettings, SchemeConfig, make_scheme

__version__ = "0.1.0"

__all__ = [
    "qcore",
    "dynamics",
    "qfi",
    "grape",
    "schemes",
    "NoiseModel",
    "StatePair",
    "ControlPulse",
    "OptimizationResult",
    "OptimizerSettings",
    "SchemeConfig",
    "make_scheme",
    "ContractViolationError",
    "SingularStatisticsError",
    "UndefinedBoundError",
    "PulseFormatError",
    "__version__",
]
