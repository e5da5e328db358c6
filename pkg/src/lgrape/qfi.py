"""Symmetric logarithmic derivative, Fisher information, and precision bounds.

Rank deficiency is handled with a cutoff on eigenvalue pair sums: terms with
lambda_i + lambda_j <= cutoff are dropped, i.e. the SLD is defined on the
support of rho.
"""

import numpy as np

from .errors import ContractViolationError, SingularStatisticsError, UndefinedBoundError
from .qcore import dag

__all__ = ["Povm", "sld", "qfi", "qfi_with_costate", "cfi", "qcrb", "DEFAULT_CUTOFF"]

DEFAULT_CUTOFF = 1e-10


class Povm:
    """A positive operator-valued measure: PSD elements summing to identity."""

    def __init__(self, elements, tol=1e-10):
        elements = [np.asarray(e, dtype=complex) for e in elements]
        if not elements:
            raise ValueError("a POVM needs at least one element")
        d = elements[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for e in elements:
            if e.shape != (d, d):
                raise ValueError("POVM elements must share one square shape")
            if np.linalg.norm(e - dag(e)) > tol:
                raise ContractViolationError("POVM element is not Hermitian")
            min_eig = np.linalg.eigvalsh(e)[0]
            if min_eig < -tol:
                raise ContractViolationError(
                    f"POVM element has eigenvalue {min_eig:.3e} < -{tol}"
                )
            total += e
        if np.linalg.norm(total - np.eye(d)) > tol:
            raise ContractViolationError("POVM elements do not sum to identity")
        self.elements = elements
        self.dim = d

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


def _eigenbasis_blocks(sp, cutoff):
    lam, v = np.linalg.eigh(sp.rho)
    dr = dag(v) @ sp.drho @ v
    pair_sums = lam[:, None] + lam[None, :]
    keep = pair_sums > cutoff
    return lam, v, dr, pair_sums, keep


def sld(sp, cutoff=DEFAULT_CUTOFF):
    """Symmetric logarithmic derivative L solving drho = (rho L + L rho) / 2."""
    if cutoff < 0:
        raise ValueError(f"cutoff must be nonnegative, got {cutoff}")
    _, v, dr, pair_sums, keep = _eigenbasis_blocks(sp, cutoff)
    l_eig = np.where(keep, 2.0 * dr / np.where(keep, pair_sums, 1.0), 0.0)
    return v @ l_eig @ dag(v)


def qfi(sp, cutoff=DEFAULT_CUTOFF):
    """Quantum Fisher information 2 sum |<i|drho|j>|^2 / (lambda_i + lambda_j)."""
    if cutoff < 0:
        raise ValueError(f"cutoff must be nonnegative, got {cutoff}")
    _, _, dr, pair_sums, keep = _eigenbasis_blocks(sp, cutoff)
    terms = 2.0 * np.abs(dr) ** 2 / np.where(keep, pair_sums, 1.0)
    return float(np.sum(terms[keep]))


def qfi_with_costate(sp, cutoff=DEFAULT_CUTOFF):
    """QFI together with its exact gradient w.r.t. the state pair.

    Returns (F, dF/drho, dF/ddrho) = (F, -L^2, 2L). The pair of cost
    matrices makes F a linear functional of (rho, drho) whose differential
    matches dF, which is what pulse-gradient backpropagation consumes.
    """
    l_op = sld(sp, cutoff)
    f = qfi(sp, cutoff)
    return f, -(l_op @ l_op), 2.0 * l_op


def cfi(sp, povm, p_floor=1e-12, dp_floor=1e-9):
    """Classical Fisher information of the POVM statistics p_x = Tr[rho M_x]."""
    total = 0.0
    for m_x in povm:
        p = float(np.real(np.trace(sp.rho @ m_x)))
        dp = float(np.real(np.trace(sp.drho @ m_x)))
        if p <= p_floor:
            if abs(dp) <= dp_floor:
                continue
            raise SingularStatisticsError(
                f"outcome probability {p:.3e} vanishes but derivative is {dp:.3e}"
            )
        total += dp * dp / p
    return total


def qcrb(fisher, repetitions=1):
    """Cramer-Rao precision bound 1 / sqrt(v F)."""
    if repetitions < 1 or int(repetitions) != repetitions:
        raise ValueError(f"repetitions must be a positive integer, got {repetitions}")
    if fisher <= 0:
        raise UndefinedBoundError(f"bound undefined for Fisher information {fisher}")
    return 1.0 / np.sqrt(repetitions * fisher)
