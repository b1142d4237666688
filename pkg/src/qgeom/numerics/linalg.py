"""Dense complex matrices: validated operator type, exponentials, samplers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from qgeom.errors import InputError

HERMITEAN_TOL = 1e-12

TAGS = ("hermitean", "skew-hermitean", "unitary", "density")

SIGMA = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def as_matrix(A) -> np.ndarray:
    if isinstance(A, ComplexOperator):
        return A.entries
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"expected a square matrix, got shape {M.shape}")
    return M


def is_hermitean(A, tol: float = HERMITEAN_TOL) -> bool:
    M = as_matrix(A)
    return bool(np.max(np.abs(M - M.conj().T), initial=0.0) <= tol)


def require_hermitean(A, tol: float = HERMITEAN_TOL) -> np.ndarray:
    M = as_matrix(A)
    if not is_hermitean(M, tol):
        raise InputError("operator is not hermitean")
    return M


def is_density(A, tol: float = HERMITEAN_TOL) -> bool:
    M = as_matrix(A)
    if not is_hermitean(M, tol):
        return False
    if abs(np.trace(M) - 1) > tol:
        return False
    return bool(np.linalg.eigvalsh((M + M.conj().T) / 2).min() >= -tol)


def require_density(A, tol: float = HERMITEAN_TOL) -> np.ndarray:
    M = as_matrix(A)
    if not is_density(M, tol):
        raise InputError("operator is not a density matrix (hermitean, PSD, unit trace)")
    return M


def require_same_size(*mats) -> int:
    sizes = {as_matrix(M).shape[0] for M in mats}
    if len(sizes) != 1:
        raise InputError(f"operators have different sizes {sorted(sizes)}")
    return sizes.pop()


@dataclass(frozen=True)
class ComplexOperator:
    """Square complex matrix with an optional structural tag that is checked on construction."""

    entries: np.ndarray
    tag: Optional[str] = None

    def __post_init__(self):
        M = np.array(self.entries, dtype=complex)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
            raise InputError(f"expected a non-empty square matrix, got shape {M.shape}")
        M.setflags(write=False)
        object.__setattr__(self, "entries", M)
        if self.tag is None:
            return
        if self.tag not in TAGS:
            raise InputError(f"unknown tag {self.tag!r}")
        n = M.shape[0]
        if self.tag == "hermitean" and not is_hermitean(M):
            raise InputError("entries are not hermitean")
        if self.tag == "skew-hermitean" and not is_hermitean(1j * M):
            raise InputError("entries are not skew-hermitean")
        if self.tag == "unitary" and not np.allclose(M @ M.conj().T, np.eye(n), atol=1e-12):
            raise InputError("entries are not unitary")
        if self.tag == "density" and not is_density(M):
            raise InputError("entries are not a density matrix")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def mat_exp(M) -> np.ndarray:
    """Matrix exponential.

    Normal matrices use their unitary eigenbasis; everything else goes through
    Padé scaling-and-squaring.
    """
    A = as_matrix(M)
    if np.allclose(A @ A.conj().T, A.conj().T @ A, atol=1e-13 * max(1.0, np.abs(A).max())):
        if is_hermitean(1j * A, tol=1e-14 * max(1.0, np.abs(A).max())):
            w, V = np.linalg.eigh(1j * A)
            return (V * np.exp(-1j * w)) @ V.conj().T
        if is_hermitean(A, tol=1e-14 * max(1.0, np.abs(A).max())):
            w, V = np.linalg.eigh(A)
            return (V * np.exp(w)) @ V.conj().T
    return scipy.linalg.expm(A)


def commutator(A, B) -> np.ndarray:
    A, B = as_matrix(A), as_matrix(B)
    return A @ B - B @ A


def anticommutator(A, B) -> np.ndarray:
    A, B = as_matrix(A), as_matrix(B)
    return A @ B + B @ A


# -- samplers (all take an explicit numpy Generator) -------------------------


def random_hermitean(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (X + X.conj().T) / 2


def random_state(rng: np.random.Generator, n: int, normalize: bool = True) -> np.ndarray:
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return z / np.linalg.norm(z) if normalize else z


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_density(rng: np.random.Generator, n: int, rank: int | None = None) -> np.ndarray:
    rank = n if rank is None else rank
    X = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = X @ X.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real
