"""Lindblad generators and piecewise-constant propagation.

The Liouvillian acts on column-vectorized density matrices:

    d vec(rho)/dt = [ -i(I ox H - H^T ox I) + sum_k rate_k D_k ] vec(rho)

with the dissipator blocks assembled from vec(A X B) = (B^T ox A) vec(X).
The density matrix and its frequency derivative are advanced together with
the exponential of a block lower-triangular generator, which propagates the
derivative exactly (no first-order chain-rule bias).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ContractViolationError
from .qcore import SIGMA_X, SIGMA_Y, SIGMA_Z, dag, pauli, unvec, vec

__all__ = [
    "NOISE_KINDS",
    "NoiseModel",
    "DissipatorTerm",
    "Liouvillian",
    "StatePair",
    "encoding_hamiltonian",
    "dissipators",
    "liouvillian",
    "propagate",
    "hamiltonian_superop",
    "choi_matrix",
    "LOWERING",
    "RAISING",
]

# Jump operator conventions: LOWERING empties the excited level |1>, so a
# population prepared in |1> relaxes as rho_11(t) = exp(-gamma t).
LOWERING = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
RAISING = LOWERING.conj().T

NOISE_KINDS = (
    "none",
    "spontaneous_emission",
    "generalized_pauli_dephasing",
    "pauli_xy",
    "spin_boson_pc",
)

STANDARD = "standard"  # L rho L^dag - 1/2 {L^dag L, rho}
HALF_DIFFERENCE = "half_difference"  # L rho L - rho (for Hermitian L, L^2 = I)


@dataclass(frozen=True)
class NoiseModel:
    """Noise family plus its rates and shape parameters.

    rates carries one entry per noisy particle: decay rates gamma_i for the
    time-homogeneous kinds, or eta_i prefactors of the time-dependent rate
    gamma_i(t) = eta_i * arctan(cutoff_freq * t) for spin_boson_pc.
    """

    kind: str = "none"
    rates: tuple = ()
    axis_theta: float = 0.0  # dephasing axis polar angle (generalized_pauli_dephasing)
    axis_phi: float = 0.0  # dephasing axis azimuth
    asymmetry: float = 0.5  # p in [0, 1], pauli_xy weight of sigma_x vs sigma_y
    coupling_theta: float = 0.0  # bath coupling angle in [0, pi/2] (spin_boson_pc)
    cutoff_freq: float = 1.0  # bath cutoff omega_c (spin_boson_pc)

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        if any(r < 0 for r in self.rates):
            raise ValueError(f"noise rates must be nonnegative, got {self.rates}")
        if self.kind == "none" and self.rates:
            raise ValueError("noise kind 'none' takes no rates")
        if self.kind != "none" and not self.rates:
            raise ValueError(f"noise kind {self.kind!r} needs at least one rate")
        if not 0.0 <= self.asymmetry <= 1.0:
            raise ValueError(f"asymmetry p must be in [0, 1], got {self.asymmetry}")
        if not 0.0 <= self.coupling_theta <= np.pi / 2 + 1e-12:
            raise ValueError(f"coupling angle must be in [0, pi/2], got {self.coupling_theta}")

    @property
    def n_noisy(self):
        return len(self.rates)

    def is_time_dependent(self):
        return self.kind == "spin_boson_pc"


@dataclass(frozen=True)
class DissipatorTerm:
    rate: float
    op: np.ndarray
    form: str


@dataclass(frozen=True)
class Liouvillian:
    matrix: np.ndarray  # (d^2, d^2)
    dim: int


@dataclass
class StatePair:
    """Density matrix together with its derivative w.r.t. the encoded frequency."""

    rho: np.ndarray
    drho: np.ndarray

    def validate(self, psd_tol=1e-9, tol=1e-10):
        rho, drho = self.rho, self.drho
        if abs(np.trace(rho) - 1.0) > tol:
            raise ContractViolationError(f"Tr rho = {np.trace(rho)}, expected 1")
        if np.linalg.norm(rho - dag(rho)) > tol:
            raise ContractViolationError("rho is not Hermitian")
        min_eig = np.linalg.eigvalsh(rho)[0]
        if min_eig < -psd_tol:
            raise ContractViolationError(f"rho has eigenvalue {min_eig:.3e} < -{psd_tol}")
        if abs(np.trace(drho)) > tol:
            raise ContractViolationError(f"Tr drho = {np.trace(drho)}, expected 0")
        if np.linalg.norm(drho - dag(drho)) > tol:
            raise ContractViolationError("drho is not Hermitian")
        return self


def encoding_hamiltonian(omega0, n_particles=1):
    """Frequency-encoding Hamiltonian omega0 * sigma_z / 2 on the sensing slot."""
    if n_particles not in (1, 2):
        raise ValueError(f"n_particles must be 1 or 2, got {n_particles}")
    return omega0 * pauli(3, 1, n_particles) / 2.0


def encoding_generator(n_particles=1):
    """d(encoding Hamiltonian)/d omega0 = sigma_z / 2 on the sensing slot."""
    return pauli(3, 1, n_particles) / 2.0


def _dephasing_axis_op(theta, phi):
    n = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    return n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z


def _embed(op, particle, n_particles):
    if n_particles == 1:
        return op
    if particle == 1:
        return np.kron(op, np.eye(2, dtype=complex))
    return np.kron(np.eye(2, dtype=complex), op)


def dissipators(model, t, n_particles):
    """Dissipator terms (rate, jump operator, form) at time t.

    The noisy particles are slots 1..k in order; rates[i] belongs to
    particle i+1. Time enters only through the spin-boson rate
    gamma(t) = eta * arctan(omega_c * t).
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if model.n_noisy > n_particles:
        raise ValueError(
            f"{model.n_noisy} noise rates given for {n_particles} particle(s)"
        )
    terms = []
    if model.kind == "none":
        return terms
    if model.kind == "spontaneous_emission":
        for i, g in enumerate(model.rates):
            terms.append(DissipatorTerm(g, _embed(LOWERING, i + 1, n_particles), STANDARD))
    elif model.kind == "generalized_pauli_dephasing":
        op = _dephasing_axis_op(model.axis_theta, model.axis_phi)
        for i, g in enumerate(model.rates):
            terms.append(DissipatorTerm(g / 2.0, _embed(op, i + 1, n_particles), HALF_DIFFERENCE))
    elif model.kind == "pauli_xy":
        weights = (model.asymmetry, 1.0 - model.asymmetry)
        for i, g in enumerate(model.rates):
            for w, sigma in zip(weights, (SIGMA_X, SIGMA_Y)):
                terms.append(
                    DissipatorTerm(g * w / 2.0, _embed(sigma, i + 1, n_particles), HALF_DIFFERENCE)
                )
    elif model.kind == "spin_boson_pc":
        cos2 = np.cos(model.coupling_theta) ** 2
        sin2 = np.sin(model.coupling_theta) ** 2
        for i, eta in enumerate(model.rates):
            g_t = eta * np.arctan(model.cutoff_freq * t)
            terms.append(DissipatorTerm(g_t * cos2, _embed(LOWERING, i + 1, n_particles), STANDARD))
            terms.append(DissipatorTerm(g_t * cos2, _embed(RAISING, i + 1, n_particles), STANDARD))
            terms.append(
                DissipatorTerm(g_t * sin2 / 2.0, _embed(SIGMA_Z, i + 1, n_particles), STANDARD)
            )
    return terms


def hamiltonian_superop(h):
    """Commutator superoperator -i(I ox H - H^T ox I)."""
    d = h.shape[0]
    eye = np.eye(d, dtype=complex)
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def _dissipator_superop(term):
    op = term.op
    d = op.shape[0]
    eye = np.eye(d, dtype=complex)
    if term.form == STANDARD:
        opd_op = dag(op) @ op
        block = (
            np.kron(op.conj(), op)
            - 0.5 * np.kron(eye, opd_op)
            - 0.5 * np.kron(opd_op.T, eye)
        )
    elif term.form == HALF_DIFFERENCE:
        block = np.kron(op.T, op) - np.eye(d * d, dtype=complex)
    else:
        raise ValueError(f"unknown dissipator form {term.form!r}")
    return term.rate * block


def liouvillian(h_total, diss):
    """Assemble the full generator from a Hamiltonian and dissipator terms."""
    h_total = np.asarray(h_total, dtype=complex)
    defect = np.linalg.norm(h_total - dag(h_total))
    if defect > 1e-10:
        raise ContractViolationError(
            f"liouvillian requires a Hermitian Hamiltonian; defect {defect:.3e}"
        )
    mat = hamiltonian_superop(h_total)
    for term in diss:
        mat = mat + _dissipator_superop(term)
    return Liouvillian(mat, h_total.shape[0])


def choi_matrix(superop):
    """Choi matrix of a channel given in column-stacking superoperator form.

    Complete positivity of the channel is equivalent to the Choi matrix
    being positive semidefinite; the identity channel maps to the
    unnormalized maximally entangled projector.
    """
    d2 = superop.shape[0]
    d = int(round(np.sqrt(d2)))
    s4 = superop.reshape(d, d, d, d)  # axes [j, i, l, k] of S[(i+dj),(k+dl)]
    return s4.transpose(3, 1, 2, 0).reshape(d2, d2)


def segment_times(m, dt):
    """Midpoints of the m propagation segments."""
    return (np.arange(m) + 0.5) * dt


def segment_generators(scheme, pulse):
    """Per-segment Liouvillian matrices for a scheme and control pulse."""
    n = scheme.n_particles
    h0 = encoding_hamiltonian(scheme.omega0, n)
    gens = scheme.control_generators()
    amps = np.asarray(pulse.amplitudes, dtype=float)
    if amps.shape != (pulse.m, len(gens)):
        raise ValueError(
            f"pulse table {amps.shape} does not match {pulse.m} segments x {len(gens)} generators"
        )
    mats = []
    for k, t_mid in enumerate(segment_times(pulse.m, pulse.dt)):
        h = h0 + sum(u * g for u, g in zip(amps[k], gens))
        mats.append(liouvillian(h, dissipators(scheme.noise, t_mid, n)).matrix)
    return mats


def _first_segment_generator(scheme, pulse):
    n = scheme.n_particles
    h0 = encoding_hamiltonian(scheme.omega0, n)
    gens = scheme.control_generators()
    amps = np.asarray(pulse.amplitudes, dtype=float)
    h = h0 + sum(u * g for u, g in zip(amps[0], gens))
    t_mid = 0.5 * pulse.dt
    return liouvillian(h, dissipators(scheme.noise, t_mid, n)).matrix


def _augmented_step(l_mat, g_super, dt):
    d2 = l_mat.shape[0]
    block = np.zeros((2 * d2, 2 * d2), dtype=complex)
    block[:d2, :d2] = l_mat
    block[d2:, d2:] = l_mat
    block[d2:, :d2] = g_super
    return scipy.linalg.expm(dt * block)


def augmented_step_matrices(scheme, pulse):
    """Per-segment propagators of the joint (vec rho, vec drho) vector."""
    g_super = hamiltonian_superop(encoding_generator(scheme.n_particles))
    return [
        _augmented_step(l_mat, g_super, pulse.dt)
        for l_mat in segment_generators(scheme, pulse)
    ]


def propagate(scheme, pulse, validate=True):
    """Advance (rho, drho/domega) over the piecewise-constant pulse segments.

    Each segment exponentiates the block generator [[L, 0], [dL/domega, L]],
    so the frequency derivative is propagated exactly alongside the state.
    Dissipator rates are evaluated at segment midpoints.
    """
    m = int(round(scheme.T / pulse.dt))
    if pulse.m != m or abs(pulse.m * pulse.dt - scheme.T) > 1e-9:
        raise ValueError(
            f"pulse covers {pulse.m} x {pulse.dt} = {pulse.m * pulse.dt}, scheme horizon is {scheme.T}"
        )
    n = scheme.n_particles
    d = 2**n
    g_super = hamiltonian_superop(encoding_generator(n))
    x = np.concatenate([vec(scheme.initial_state), np.zeros(d * d, dtype=complex)])

    amps = np.asarray(pulse.amplitudes, dtype=float)
    constant = (not scheme.noise.is_time_dependent()) and (
        m == 0 or np.all(amps == amps[0])
    )
    if constant and m > 0:
        l_mat = _first_segment_generator(scheme, pulse)
        step = _augmented_step(l_mat, g_super, pulse.dt)
        for _ in range(m):
            x = step @ x
            if validate:
                StatePair(unvec(x[: d * d]), unvec(x[d * d :])).validate()
    else:
        for l_mat in segment_generators(scheme, pulse):
            x = _augmented_step(l_mat, g_super, pulse.dt) @ x
            if validate:
                StatePair(unvec(x[: d * d]), unvec(x[d * d :])).validate()

    pair = StatePair(unvec(x[: d * d]), unvec(x[d * d :]))
    if validate:
        pair.validate()
    return pair
