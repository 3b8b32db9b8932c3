"""Two-block operator constructions on ``X1 (+) X2``.

The direct sum of two Euclidean spaces carries the Euclidean norm of the
concatenated vector, so every operator norm here is a spectral norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .linalg import as_matrix, spectral_norm

__all__ = [
    "BlockSpec",
    "SpaceStackingCheck",
    "corner_q",
    "direct_sum",
    "embed_upper_right",
    "stacked_vector_norm",
    "upper_right_block",
    "verify_space_stacking",
]

STACKING_TOL = 1e-12


@dataclass(frozen=True)
class BlockSpec:
    top_dim: int
    bottom_dim: int

    def __post_init__(self):
        if self.top_dim < 1 or self.bottom_dim < 1:
            raise ShapeError(f"block dimensions must be positive, got {self}")

    @property
    def size(self) -> int:
        return self.top_dim + self.bottom_dim


def direct_sum(a1, a2) -> np.ndarray:
    """``[[a1, 0], [0, a2]]`` for square ``a1``, ``a2``."""
    a1 = as_matrix(a1, square=True, name="a1")
    a2 = as_matrix(a2, square=True, name="a2")
    n1, n2 = a1.shape[0], a2.shape[0]
    out = np.zeros((n1 + n2, n1 + n2), dtype=np.complex128)
    out[:n1, :n1] = a1
    out[n1:, n1:] = a2
    out.flags.writeable = False
    return out


def embed_upper_right(r, spec: BlockSpec | None = None) -> np.ndarray:
    """``[[0, r], [0, 0]]`` on ``X1 (+) X2`` where ``r: X2 -> X1``."""
    r = as_matrix(r, name="r")
    if spec is None:
        spec = BlockSpec(*r.shape)
    if r.shape != (spec.top_dim, spec.bottom_dim):
        raise ShapeError(f"r has shape {r.shape}, block spec wants {(spec.top_dim, spec.bottom_dim)}")
    out = np.zeros((spec.size, spec.size), dtype=np.complex128)
    out[: spec.top_dim, spec.top_dim :] = r
    out.flags.writeable = False
    return out


def upper_right_block(m, spec: BlockSpec) -> np.ndarray:
    return np.asarray(m)[: spec.top_dim, spec.top_dim :]


def corner_q(s, sign: complex = -1) -> np.ndarray:
    """Unipotent corner matrix ``[[I, sign*s], [0, I]]``.

    Its inverse is ``corner_q(s, -sign)``; the product of the two is checked
    against the identity before returning.
    """
    s = as_matrix(s, name="s")
    n1, n2 = s.shape
    n = n1 + n2

    def build(c):
        q = np.eye(n, dtype=np.complex128)
        q[:n1, n1:] = c * s
        return q

    q = build(sign)
    gap = spectral_norm(q @ build(-sign) - np.eye(n))
    if gap > 1e-13:
        raise ArithmeticError(f"corner matrix inverse check failed: {gap:.3e}")
    q.flags.writeable = False
    return q


def stacked_vector_norm(x1, x2) -> float:
    """Norm of ``(x1, x2)`` in ``X1 (+) X2``."""
    return float(np.linalg.norm(np.concatenate([np.ravel(x1), np.ravel(x2)])))


@dataclass(frozen=True)
class SpaceStackingCheck:
    """Measured residuals of the three space-side stacking conditions.

    ``first_block_residual``: ``| ||(x1, 0)|| - ||x1|| |``.
    ``projection_margin``: ``||(x1, x2)|| - ||x2||`` (must be >= 0).
    ``corner_residual``: ``| ||[[0, r], [0, 0]]|| - ||r|| | / (1 + ||r||)``.
    """

    first_block_residual: float
    projection_margin: float
    corner_residual: float
    tol: float = STACKING_TOL

    @property
    def first_block_ok(self) -> bool:
        return self.first_block_residual <= self.tol

    @property
    def projection_ok(self) -> bool:
        return self.projection_margin >= -self.tol

    @property
    def corner_ok(self) -> bool:
        return self.corner_residual <= self.tol

    @property
    def passed(self) -> bool:
        return self.first_block_ok and self.projection_ok and self.corner_ok


def verify_space_stacking(r, x1, x2, tol: float = STACKING_TOL) -> SpaceStackingCheck:
    """Measure the stacking conditions for ``r: X2 -> X1``, ``x1 in X1``, ``x2 in X2``.

    Failures are reported in the returned record, never raised.
    """
    r = as_matrix(r, name="r")
    x1 = np.ravel(np.asarray(x1, dtype=np.complex128))
    x2 = np.ravel(np.asarray(x2, dtype=np.complex128))
    if x1.shape[0] != r.shape[0] or x2.shape[0] != r.shape[1]:
        raise ShapeError(f"vectors of length {x1.shape[0]}, {x2.shape[0]} do not fit r of shape {r.shape}")
    n1 = float(np.linalg.norm(x1))
    first = abs(stacked_vector_norm(x1, np.zeros_like(x2)) - n1)
    margin = stacked_vector_norm(x1, x2) - float(np.linalg.norm(x2))
    rn = spectral_norm(r)
    corner = abs(spectral_norm(embed_upper_right(r)) - rn) / (1.0 + rn)
    return SpaceStackingCheck(first, margin, corner, tol)
