"""Gradient-ascent pulse engineering over piecewise-constant Pauli controls."""

from dataclasses import dataclass

import numpy as np

from .dynamics import StatePair
from .qcore import pauli, unvec, vec
from .qfi import qfi_with_costate

__all__ = [
    "ControlPulse",
    "OptimizationResult",
    "control_generators",
    "gradient",
    "optimize",
]

PLATEAU_WINDOW = 25


@dataclass(frozen=True)
class ControlPulse:
    """m x K table of control amplitudes over segments of width dt."""

    dt: float
    amplitudes: np.ndarray  # shape (m, K)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=float)
        if amps.ndim != 2:
            raise ValueError(f"amplitudes must be a 2-D table, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def m(self):
        return self.amplitudes.shape[0]

    @property
    def n_controls(self):
        return self.amplitudes.shape[1]

    def is_zero(self):
        return not np.any(self.amplitudes)

    @classmethod
    def zero(cls, m, n_controls, dt):
        return cls(dt, np.zeros((m, n_controls)))


@dataclass
class OptimizationResult:
    best_pulse: ControlPulse
    best_qfi: float
    qfi_trace: np.ndarray  # evaluated F_Q per iteration of the winning restart
    iterations_run: int
    seed: int
    converged: bool
    restart_index: int = 0
    restart_best_qfis: tuple = ()


def control_generators(kind):
    """Control Hamiltonians for a scheme kind.

    Single-particle kinds use the three local Paulis; two-particle kinds use
    all fifteen Pauli products sigma_i ox sigma_j with (i, j) != (0, 0),
    ordered lexicographically, so local terms (i = 0 or j = 0) come built in.
    """
    if kind in ("UE", "CUE"):
        return [pauli(i, 1, 1) for i in (1, 2, 3)]
    if kind in ("NLA", "NA", "CNLA", "CNA"):
        gens = []
        for i in range(4):
            for j in range(4):
                if i == 0 and j == 0:
                    continue
                gens.append(np.kron(pauli(i, 1, 1), pauli(j, 1, 1)))
        return gens
    raise ValueError(f"unknown scheme kind {kind!r}")


def gradient(scheme, pulse):
    """Exact gradient of F_Q(T) w.r.t. every pulse amplitude, shape (m, K)."""
    from ._engine import SchemeEngine

    return SchemeEngine(scheme).gradient(pulse.amplitudes)


def _initial_tables(m, n_controls, restarts, seed):
    tables = [np.zeros((m, n_controls))]
    for r in range(1, restarts):
        rng = np.random.default_rng([seed, r])
        tables.append(rng.uniform(-0.1, 0.1, size=(m, n_controls)))
    return tables


def optimize(scheme, progress=None):
    """Plain gradient ascent u <- u + lr * dF/du from several restarts.

    Restart 0 starts from the all-zero pulse, the rest from i.i.d. uniform
    amplitudes in [-0.1, 0.1] drawn deterministically from the seed. A
    restart stops after max_iters updates or once |dF| stays below the
    plateau tolerance for 25 consecutive iterations. Restarts are mutually
    independent and are advanced as one batch; the best restart wins.
    """
    from ._engine import SchemeEngine

    engine = SchemeEngine(scheme)
    opt = scheme.optimizer
    m, n_ctrl = engine.m, engine.n_controls
    tables = _initial_tables(m, n_ctrl, opt.restarts, opt.seed)

    state = [
        {
            "u": tables[r],
            "trace": [],
            "best_f": -np.inf,
            "best_u": tables[r].copy(),
            "plateau": 0,
            "done": False,
            "iters": 0,
            "converged": False,
            "adam_m": np.zeros((m, n_ctrl)),
            "adam_v": np.zeros((m, n_ctrl)),
        }
        for r in range(opt.restarts)
    ]

    iteration = 0
    while True:
        active = [r for r, s in enumerate(state) if not s["done"]]
        if not active:
            break
        batch = np.stack([state[r]["u"] for r in active])
        vt, vb = engine.forward_many(batch)
        costates_t, costates_b, values = [], [], []
        for i in range(len(active)):
            f, d_rho, d_drho = qfi_with_costate(StatePair(unvec(vt[i]), unvec(vb[i])))
            values.append(f)
            costates_t.append(vec(d_rho))
            costates_b.append(vec(d_drho))
        grads = engine.gradient_many(batch, np.stack(costates_t), np.stack(costates_b))

        for i, r in enumerate(active):
            s = state[r]
            f = values[i]
            if s["trace"]:
                if abs(f - s["trace"][-1]) < opt.plateau_tol_scale * max(1.0, abs(f)):
                    s["plateau"] += 1
                else:
                    s["plateau"] = 0
            s["trace"].append(f)
            if f > s["best_f"]:
                s["best_f"] = f
                s["best_u"] = s["u"].copy()
            if s["plateau"] >= PLATEAU_WINDOW:
                s["done"] = True
                s["converged"] = True
                continue
            if s["iters"] >= opt.max_iters:
                s["done"] = True
                continue
            g = grads[i]
            if opt.adaptive:
                s["adam_m"] = 0.9 * s["adam_m"] + 0.1 * g
                s["adam_v"] = 0.999 * s["adam_v"] + 0.001 * g * g
                t = s["iters"] + 1
                m_hat = s["adam_m"] / (1 - 0.9**t)
                v_hat = s["adam_v"] / (1 - 0.999**t)
                step = opt.learning_rate * m_hat / (np.sqrt(v_hat) + 1e-8)
            else:
                step = opt.learning_rate * g
            u_new = s["u"] + step
            if opt.u_max is not None:
                u_new = np.clip(u_new, -opt.u_max, opt.u_max)
            s["u"] = u_new
            s["iters"] += 1
        iteration += 1
        if progress is not None and iteration % 100 == 0:
            progress(iteration, [s["best_f"] for s in state])

    winner = int(np.argmax([s["best_f"] for s in state]))
    w = state[winner]
    return OptimizationResult(
        best_pulse=ControlPulse(scheme.dt, w["best_u"]),
        best_qfi=float(w["best_f"]),
        qfi_trace=np.asarray(w["trace"]),
        iterations_run=w["iters"],
        seed=opt.seed,
        converged=w["converged"],
        restart_index=winner,
        restart_best_qfis=tuple(float(s["best_f"]) for s in state),
    )
