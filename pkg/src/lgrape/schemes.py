"""Factory for the six metrology schemes and their evaluation.

Scheme taxonomy: UE is a single sensing qubit prepared in |+>; the
ancilla-assisted kinds prepare the Bell state (|00> + |11>)/sqrt(2) with the
frequency encoded on particle 1 only. Noise always acts on particle 1 and
additionally on particle 2 for the noisy-ancilla kinds. The C-prefixed kinds
add piecewise-constant control; the uncontrolled kinds force the zero pulse.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import dynamics, grape, qfi

__all__ = [
    "SCHEME_KINDS",
    "CONTROLLED_KINDS",
    "NOISY_ANCILLA_KINDS",
    "OptimizerSettings",
    "SchemeConfig",
    "make_scheme",
    "evaluate",
    "plus_state",
    "bell_state",
]

SCHEME_KINDS = ("UE", "NLA", "NA", "CUE", "CNLA", "CNA")
CONTROLLED_KINDS = ("CUE", "CNLA", "CNA")
NOISY_ANCILLA_KINDS = ("NA", "CNA")

DEFAULT_OMEGA0 = 3.0
DEFAULT_DT = 0.01


def plus_state():
    v = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
    return np.outer(v, v.conj())


def bell_state():
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1.0 / np.sqrt(2.0)
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class OptimizerSettings:
    learning_rate: float = 0.001
    max_iters: int = 2000
    restarts: int = 5
    seed: int = 42
    plateau_tol_scale: float = 1e-7
    adaptive: bool = False
    u_max: float = None


@dataclass(frozen=True)
class SchemeConfig:
    kind: str
    n_particles: int
    initial_state: np.ndarray
    controlled: bool
    noise: dynamics.NoiseModel
    omega0: float
    T: float
    dt: float
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)

    def control_generators(self):
        return grape.control_generators(self.kind)

    @property
    def n_segments(self):
        return int(round(self.T / self.dt))

    def zero_pulse(self):
        return grape.ControlPulse.zero(self.n_segments, len(self.control_generators()), self.dt)

    def with_omega0(self, omega0):
        return replace(self, omega0=float(omega0))


def make_scheme(kind, noise=None, omega0=DEFAULT_OMEGA0, T=20.0, dt=DEFAULT_DT, optimizer=None):
    """Build a SchemeConfig for one of the six kinds, validating noise placement."""
    if kind not in SCHEME_KINDS:
        raise ValueError(f"unknown scheme kind {kind!r}; expected one of {SCHEME_KINDS}")
    if noise is None:
        noise = dynamics.NoiseModel()
    n = 1 if kind in ("UE", "CUE") else 2
    expected_noisy = 0 if noise.kind == "none" else (2 if kind in NOISY_ANCILLA_KINDS else 1)
    if noise.n_noisy != expected_noisy:
        raise ValueError(
            f"scheme {kind} expects {expected_noisy} noise rate(s) for kind "
            f"{noise.kind!r}, got {noise.n_noisy}"
        )
    m = round(T / dt)
    if abs(m * dt - T) > 1e-9:
        raise ValueError(f"horizon T={T} must be a multiple of dt={dt}")
    return SchemeConfig(
        kind=kind,
        n_particles=n,
        initial_state=plus_state() if n == 1 else bell_state(),
        controlled=kind in CONTROLLED_KINDS,
        noise=noise,
        omega0=float(omega0),
        T=float(T),
        dt=float(dt),
        optimizer=optimizer or OptimizerSettings(),
    )


def evaluate(scheme, pulse=None, validate=True):
    """F_Q(T) and the normalized F_Q(T)/T for a scheme under a pulse.

    Uncontrolled kinds only accept the zero pulse (or None, which means it).
    """
    if pulse is None:
        pulse = scheme.zero_pulse()
    if not scheme.controlled and not pulse.is_zero():
        raise ValueError(f"scheme {scheme.kind} is uncontrolled; only the zero pulse is allowed")
    pair = dynamics.propagate(scheme, pulse, validate=validate)
    f = qfi.qfi(pair)
    return f, f / scheme.T
