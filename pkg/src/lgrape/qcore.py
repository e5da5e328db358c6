"""Dense complex linear algebra for small Hilbert spaces (dim <= 16).

Vectorization uses the column-stacking convention throughout: vec(A) stacks
the columns of A left to right, so vec(A X B) = (B^T otimes A) vec(X).
"""

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import ContractViolationError

__all__ = [
    "pauli",
    "kron",
    "herm_eig",
    "expm",
    "vec",
    "unvec",
    "dag",
    "Spectrum",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "IDENTITY_2",
]

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_SINGLE_QUBIT_PAULIS = (IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z)


class Spectrum(NamedTuple):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray  # real, shape (d,)
    eigenvectors: np.ndarray  # orthonormal columns, shape (d, d)


def dag(a):
    """Conjugate transpose."""
    return np.conj(np.asarray(a)).T


def pauli(index, particle=1, n=1):
    """Pauli operator (0 = identity) embedded at a tensor slot.

    Returns sigma_index acting on `particle` (1-based) of an n-particle
    register, identity on every other slot; the result is 2^n x 2^n.
    """
    if index not in (0, 1, 2, 3):
        raise ValueError(f"pauli index must be 0..3, got {index}")
    if n not in (1, 2):
        raise ValueError(f"particle count must be 1 or 2, got {n}")
    if not 1 <= particle <= n:
        raise ValueError(f"particle must be in 1..{n}, got {particle}")
    factors = [IDENTITY_2] * n
    factors[particle - 1] = _SINGLE_QUBIT_PAULIS[index]
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def kron(a, b):
    """Kronecker product with block structure (a_ij * b)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def herm_eig(h, atol=1e-10):
    """Eigendecomposition of a Hermitian matrix.

    Raises ContractViolationError when the input deviates from Hermiticity
    by more than `atol` in Frobenius norm.
    """
    h = np.asarray(h, dtype=complex)
    defect = np.linalg.norm(h - dag(h))
    if defect > atol:
        raise ContractViolationError(
            f"herm_eig requires a Hermitian matrix; ||h - h^dag||_F = {defect:.3e}"
        )
    eigenvalues, eigenvectors = np.linalg.eigh(h)
    return Spectrum(eigenvalues, eigenvectors)


def expm(m):
    """Matrix exponential of a square complex matrix."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expm expects a square matrix, got shape {m.shape}")
    if not np.any(m):
        return np.eye(m.shape[0], dtype=complex)
    return scipy.linalg.expm(m)


def vec(a):
    """Column-stack a matrix into a vector."""
    return np.asarray(a, dtype=complex).flatten(order="F")


def unvec(v):
    """Inverse of vec; the length of v must be a perfect square."""
    v = np.asarray(v, dtype=complex).ravel()
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValueError(f"unvec needs a perfect-square length, got {v.size}")
    return v.reshape((d, d), order="F")
