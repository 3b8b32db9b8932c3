"""Dense complex matrix primitives.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
:func:`as_matrix` is the single entry point that validates and freezes
them; every public routine in the package funnels its operands through it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    ClassViolationError,
    NonDiagonalizableError,
    NonFiniteError,
    ShapeError,
    SingularMatrixError,
)

__all__ = [
    "CLASS_TOL",
    "DEFECTIVE_COND",
    "SOLVE_COND",
    "GeneralEig",
    "HermitianEig",
    "OperatorClass",
    "as_matrix",
    "classify",
    "class_tolerance",
    "commutator",
    "condition_number",
    "general_eig",
    "hermitian_eig",
    "identity",
    "random_unitary",
    "solve",
    "spectral_norm",
]

CLASS_TOL = 1e-10
DEFECTIVE_COND = 1e8
SOLVE_COND = 1e12


def as_matrix(m, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a read-only, finite, 2-D complex128 array.

    Scalars become 1x1 matrices. A fresh copy is made so callers can never
    mutate an operand after it has been validated.
    """
    a = np.array(m, dtype=np.complex128, copy=True)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {a.shape}")
    if a.size == 0:
        raise ShapeError(f"{name} must be nonempty")
    if not np.all(np.isfinite(a)):
        raise NonFiniteError(f"{name} has non-finite entries")
    if square and a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {a.shape}")
    a.flags.writeable = False
    return a


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def commutator(q, a) -> np.ndarray:
    """``q @ a - a @ q``."""
    return q @ a - a @ q


def spectral_norm(m) -> float:
    """Largest singular value, from a full SVD."""
    a = as_matrix(m)
    return float(np.linalg.svd(a, compute_uv=False)[0])


def condition_number(m) -> float:
    """2-norm condition number; ``inf`` for exactly singular input."""
    a = as_matrix(m, square=True)
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def class_tolerance(m) -> float:
    """Default Hermitian/normal test threshold, ``1e-10 * (1 + ||m||)``."""
    return CLASS_TOL * (1.0 + spectral_norm(m))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a Ginibre matrix."""
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class HermitianEig:
    eigenvalues: np.ndarray
    vectors: np.ndarray
    residual: float

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class GeneralEig:
    eigenvalues: np.ndarray
    vectors: np.ndarray
    conditioning: float

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return np.linalg.solve(v.T, (v * self.eigenvalues).T).T


def hermitian_eig(m, tol: float | None = None) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises:
        ShapeError: ``m`` is not square.
        ClassViolationError: ``||m - m*||`` exceeds ``tol`` (default
            :func:`class_tolerance`).
    """
    a = as_matrix(m, square=True)
    if tol is None:
        tol = class_tolerance(a)
    skew = spectral_norm(a - a.conj().T)
    if skew > tol:
        raise ClassViolationError(f"matrix is not Hermitian: ||A - A*|| = {skew:.3e} > {tol:.3e}")
    # Symmetrize so LAPACK sees an exactly Hermitian operand.
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    residual = spectral_norm(a @ v - v * w)
    w.flags.writeable = False
    v.flags.writeable = False
    return HermitianEig(w, v, residual)


def general_eig(m, max_cond: float = DEFECTIVE_COND) -> GeneralEig:
    """Eigendecomposition ``m = V diag(w) V^-1`` of a diagonalizable matrix.

    Eigenvector columns are unit-normalized. A matrix whose eigenvector
    condition number exceeds ``max_cond`` is treated as defective.
    """
    a = as_matrix(m, square=True)
    w, v = np.linalg.eig(a)
    cond = condition_number(v)
    if not np.isfinite(cond) or cond > max_cond:
        raise NonDiagonalizableError(
            f"eigenvector matrix condition {cond:.3e} exceeds {max_cond:.1e}; "
            "matrix is defective to working precision"
        )
    w.flags.writeable = False
    v.flags.writeable = False
    return GeneralEig(w, v, cond)


def solve(a, b, max_cond: float = SOLVE_COND) -> np.ndarray:
    """Solve ``a @ x = b``.

    Raises:
        SingularMatrixError: ``a`` is singular or its condition number is
            above ``max_cond``.
    """
    a = as_matrix(a, square=True, name="a")
    b = as_matrix(b, name="b")
    if b.shape[0] != a.shape[0]:
        raise ShapeError(f"b has {b.shape[0]} rows, a has {a.shape[0]}")
    cond = condition_number(a)
    if not np.isfinite(cond) or cond > max_cond:
        raise SingularMatrixError(f"matrix is singular to working precision (cond = {cond:.3e})")
    x = np.linalg.solve(a, b)
    x.flags.writeable = False
    return x


class OperatorClass(enum.IntEnum):
    """Operator classes, ordered from strongest to weakest."""

    HERMITIAN = 0
    NORMAL = 1
    DIAGONALIZABLE = 2
    GENERAL = 3


def classify(m, tol: float | None = None) -> OperatorClass:
    """Strongest class ``m`` belongs to. ``tol`` is an absolute threshold."""
    a = as_matrix(m, square=True)
    if tol is None:
        tol = class_tolerance(a)
    ah = a.conj().T
    if spectral_norm(a - ah) <= tol:
        return OperatorClass.HERMITIAN
    if spectral_norm(a @ ah - ah @ a) <= tol:
        return OperatorClass.NORMAL
    try:
        general_eig(a)
    except NonDiagonalizableError:
        return OperatorClass.GENERAL
    return OperatorClass.DIAGONALIZABLE
