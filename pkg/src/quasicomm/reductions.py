"""Block constructions that turn quasi-commutators into commutators.

Each ``*_reduce``/``*_construct`` routine materializes the stacked objects
for one instance, checks the block identities that make the reduction work,
and returns a :class:`ReductionWitness` with the measured residuals and the
two norms being related.

Notation: ``a1`` acts on ``X1`` (n1 x n1), ``a2`` on ``X2`` (n2 x n2) and
``s: X2 -> X1`` is n1 x n2. The stacked operator is ``A = diag(a1, a2)``.
All residuals are divided by ``1 + ||expected block||``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import linalg
from .errors import (
    DegenerateShiftError,
    HypothesisViolation,
    NonDiagonalizableError,
    PathError,
    ShapeError,
    SingularDifferenceError,
    SingularMatrixError,
)
from .funcalc import CalculusPath, ScalarFunction, apply_function
from .linalg import as_matrix, commutator, spectral_norm
from .stacking import BlockSpec, corner_q, direct_sum, embed_upper_right

__all__ = [
    "Theorem",
    "ReductionWitness",
    "commuting_corollary",
    "shift_quotient",
    "thm1_reduce",
    "thm3_construct",
    "thm3_lipschitz_quotient",
    "thm4_construct_b",
    "thm4_f_of_b",
]

IDENTITY_TOL = 1e-9
EXACT_TOL = 1e-12
BLOCK_TOL = 1e-13
COMMUTING_TOL = 1e-10
DIFFERENCE_COND = 1e8


class Theorem(str, enum.Enum):
    THM1 = "thm1"
    THM3 = "thm3"
    THM4 = "thm4"
    COMMUTING = "commuting"


@dataclass
class ReductionWitness:
    """One fully materialized instance of a reduction.

    ``residuals`` and ``tolerances`` share keys; ``primary`` names the
    residual reported as :attr:`structural_residual`. A residual of ``None``
    means the corresponding route was unavailable (see ``notes``).
    """

    theorem: Theorem
    function: str
    a1: np.ndarray
    a2: np.ndarray | None
    s: np.ndarray | None
    eps: complex | None
    q: np.ndarray
    a_stacked: np.ndarray
    commutator_norm: float
    quasi_norm: float
    residuals: dict[str, float | None]
    tolerances: dict[str, float]
    primary: str
    b: np.ndarray | None = None
    norms: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    bound_check: object | None = None

    @property
    def structural_residual(self) -> float | None:
        return self.residuals[self.primary]

    def failing(self) -> list[str]:
        return [
            k
            for k, r in self.residuals.items()
            if r is not None and not r <= self.tolerances[k]
        ]

    @property
    def identity_verified(self) -> bool:
        return not self.failing()

    def summary(self) -> dict:
        return {
            "theorem": self.theorem.value,
            "function": self.function,
            "residuals": dict(self.residuals),
            "tolerances": dict(self.tolerances),
            "norms": {"commutator": self.commutator_norm, "quasi": self.quasi_norm, **self.norms},
            "identity_verified": self.identity_verified,
            "notes": list(self.notes),
        }


def _rel(diff: np.ndarray, expected: np.ndarray) -> float:
    return spectral_norm(diff) / (1.0 + spectral_norm(expected))


def _check_pair(a1, a2, s):
    a1 = as_matrix(a1, square=True, name="a1")
    a2 = as_matrix(a2, square=True, name="a2")
    s = as_matrix(s, name="s")
    if s.shape != (a1.shape[0], a2.shape[0]):
        raise ShapeError(f"s must be {a1.shape[0]}x{a2.shape[0]}, got {s.shape}")
    return a1, a2, s


def thm1_reduce(a1, a2, s, f: ScalarFunction, path: CalculusPath | None = None,
                tol: float = IDENTITY_TOL) -> ReductionWitness:
    """Embed the quasi-commutator ``f(a1) s - s f(a2)`` as a commutator.

    With ``Q = [[I, -s], [0, I]]`` and ``A = diag(a1, a2)`` both
    ``Q f(A) - f(A) Q`` and ``Q A - A Q`` are upper-right corner matrices
    carrying the quasi-commutators of ``f(a_i)`` and ``a_i``. ``f(A)`` is
    evaluated on the stacked matrix, not assembled from ``f(a1)``, ``f(a2)``.
    """
    a1, a2, s = _check_pair(a1, a2, s)
    spec = BlockSpec(*s.shape)
    q = corner_q(s, -1)
    a = direct_sum(a1, a2)
    fa = apply_function(f, a, path)
    fa1 = apply_function(f, a1, path)
    fa2 = apply_function(f, a2, path)

    quasi_block = fa1 @ s - s @ fa2
    comm_block = a1 @ s - s @ a2
    m1 = commutator(q, fa)
    c1 = commutator(q, a)
    quasi = spectral_norm(quasi_block)
    comm = spectral_norm(comm_block)
    stacked_quasi = spectral_norm(m1)
    stacked_comm = spectral_norm(c1)

    residuals = {
        "f_identity": _rel(m1 - embed_upper_right(quasi_block, spec), quasi_block),
        "commutator_identity": _rel(c1 - embed_upper_right(comm_block, spec), comm_block),
        "quasi_bridge": abs(stacked_quasi - quasi) / (1.0 + quasi),
        "commutator_bridge": abs(stacked_comm - comm) / (1.0 + comm),
    }
    tolerances = {
        "f_identity": tol,
        "commutator_identity": tol,
        "quasi_bridge": EXACT_TOL,
        "commutator_bridge": EXACT_TOL,
    }
    return ReductionWitness(
        Theorem.THM1, f.name, a1, a2, s, None, q, a,
        commutator_norm=comm, quasi_norm=quasi,
        residuals=residuals, tolerances=tolerances, primary="f_identity",
        norms={"stacked_commutator": stacked_comm, "stacked_quasi": stacked_quasi},
    )


def _shift(a1: np.ndarray, eps: complex) -> np.ndarray:
    out = a1 + eps * np.eye(a1.shape[0])
    out.flags.writeable = False
    return out


def _nonzero_eps(eps) -> complex:
    eps = complex(eps)
    if eps == 0:
        raise DegenerateShiftError("shift eps must be nonzero")
    return eps


def thm3_construct(a1, eps, f: ScalarFunction, path: CalculusPath | None = None,
                   tol: float = IDENTITY_TOL, corner_tol: float = 1e-14) -> ReductionWitness:
    """Scalar-shift construction ``Q = [[I, I/eps], [0, I]]``, ``A = diag(a1, a1 + eps I)``.

    The commutator ``Q A - A Q`` is the corner matrix carrying ``I``; the
    ``f``-side commutator carries ``(f(a1 + eps I) - f(a1)) / eps``.

    The corner residual has a rounding floor of roughly
    ``u * ||a1|| / |eps|`` (``u`` the unit roundoff) from forming
    ``a1 + eps I`` and scaling by ``1/eps``; ``corner_tol`` is only
    attainable when ``|eps|`` is not small against ``||a1||``.
    """
    eps = _nonzero_eps(eps)
    a1 = as_matrix(a1, square=True, name="a1")
    n = a1.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    spec = BlockSpec(n, n)
    shifted = _shift(a1, eps)
    q = corner_q(eye, 1 / eps)
    a = direct_sum(a1, shifted)
    fa = apply_function(f, a, path)
    diff_block = (apply_function(f, shifted, path) - apply_function(f, a1, path)) / eps

    c = commutator(q, a)
    m = commutator(q, fa)
    unit = spectral_norm(eye)
    if unit != 1.0:
        raise ArithmeticError(f"||I|| = {unit!r}, expected 1")
    residuals = {
        "commutator_identity": _rel(c - embed_upper_right(eye, spec), eye),
        "f_identity": _rel(m - embed_upper_right(diff_block, spec), diff_block),
    }
    return ReductionWitness(
        Theorem.THM3, f.name, a1, None, None, eps, q, a,
        commutator_norm=unit, quasi_norm=spectral_norm(diff_block),
        residuals=residuals,
        tolerances={"commutator_identity": corner_tol, "f_identity": tol},
        primary="f_identity",
        norms={"stacked_commutator": spectral_norm(c), "stacked_quasi": spectral_norm(m)},
    )


def shift_quotient(f: ScalarFunction, a1, eps, path: CalculusPath | None = None,
                   method: str = "auto") -> np.ndarray:
    """``(f(a1 + eps I) - f(a1)) / eps``.

    ``method="direct"`` forms both matrix functions and subtracts, which
    loses about ``u * ||f(a1)|| / |eps|`` to cancellation.
    ``method="expansion"`` (polynomials only) expands ``p(x + eps) - p(x)``
    in powers of ``x`` first, so no cancellation occurs. ``"auto"`` picks
    the expansion whenever ``f`` is a polynomial.
    """
    eps = _nonzero_eps(eps)
    a1 = as_matrix(a1, square=True, name="a1")
    if method == "auto":
        method = "expansion" if f.is_polynomial else "direct"
    if method == "direct":
        return (apply_function(f, _shift(a1, eps), path) - apply_function(f, a1, path)) / eps
    if method != "expansion":
        raise ValueError(f"unknown method {method!r}")
    if not f.is_polynomial:
        raise PathError(f"expansion quotient needs a polynomial, got {f.name}")
    c = f.poly_coefficients
    deg = len(c) - 1
    if deg == 0:
        return np.zeros_like(a1)
    # (p(x + eps) - p(x)) / eps = sum_i r_i x^i
    r = [
        sum(c[k] * comb(k, i) * eps ** (k - i - 1) for k in range(i + 1, deg + 1))
        for i in range(deg)
    ]
    n = a1.shape[0]
    out = r[-1] * np.eye(n, dtype=np.complex128)
    for ri in reversed(r[:-1]):
        out = out @ a1
        out[np.diag_indices(n)] += ri
    return out


def thm3_lipschitz_quotient(a1, eps_grid, f: ScalarFunction, path: CalculusPath | None = None,
                            method: str = "auto") -> list[tuple[complex, float]]:
    """``(eps, ||f(a1 + eps I) - f(a1)|| / |eps|)`` for each grid point, in grid order."""
    grid = [_nonzero_eps(e) for e in eps_grid]
    a1 = as_matrix(a1, square=True, name="a1")
    return [(e, spectral_norm(shift_quotient(f, a1, e, path, method))) for e in grid]


def _similarity_routes(a1, a2, s):
    q = corner_q(s, -1)
    q_inv = corner_q(s, +1)
    b_sim = q @ direct_sum(a1, a2) @ q_inv
    n1 = a1.shape[0]
    b_direct = np.zeros_like(b_sim)
    b_direct[:n1, :n1] = a1
    b_direct[:n1, n1:] = a1 @ s - s @ a2
    b_direct[n1:, n1:] = a2
    return q, q_inv, b_sim, b_direct


def thm4_construct_b(a1, a2, s) -> tuple[np.ndarray, np.ndarray]:
    """Similarity ``B = Q diag(a1, a2) Q^-1`` with ``Q = [[I, -s], [0, I]]``.

    ``B`` is also assembled directly as ``[[a1, a1 s - s a2], [0, a2]]``; the
    two routes must agree to ``1e-13 (1 + ||B||)``.
    """
    a1, a2, s = _check_pair(a1, a2, s)
    q, _, b_sim, b_direct = _similarity_routes(a1, a2, s)
    gap = spectral_norm(b_sim - b_direct)
    if gap > BLOCK_TOL * (1.0 + spectral_norm(b_sim)):
        raise ArithmeticError(f"similarity and block routes for B disagree by {gap:.3e}")
    b_sim.flags.writeable = False
    return b_sim, q


def thm4_f_of_b(a1, a2, s, f: ScalarFunction, path: CalculusPath | None = None) -> ReductionWitness:
    """Evaluate ``f(B)`` through the similarity and through an independent oracle.

    The similarity route is ``Q diag(f(a1), f(a2)) Q^-1``. The oracle applies
    the functional calculus to ``B`` itself: Horner for polynomials, a general
    eigendecomposition otherwise. When ``B`` is too close to defective for the
    oracle, its residual is ``None`` and a note is attached; the similarity
    route is still reported.
    """
    a1, a2, s = _check_pair(a1, a2, s)
    q, q_inv, b, b_direct = _similarity_routes(a1, a2, s)
    n1 = a1.shape[0]
    a = direct_sum(a1, a2)
    fa1 = apply_function(f, a1, path)
    fa2 = apply_function(f, a2, path)
    fb = q @ direct_sum(fa1, fa2) @ q_inv

    quasi_block = fa1 @ s - s @ fa2
    fb_block = np.zeros_like(fb)
    fb_block[:n1, :n1] = fa1
    fb_block[:n1, n1:] = quasi_block
    fb_block[n1:, n1:] = fa2

    notes = []
    cond_q = linalg.condition_number(q)
    oracle_path = CalculusPath.HORNER if f.is_polynomial else CalculusPath.DIAGONALIZABLE
    try:
        fb_oracle = apply_function(f, b, oracle_path)
        oracle = _rel(fb - fb_oracle, fb)
    except (PathError, NonDiagonalizableError) as exc:
        oracle = None
        notes.append(f"oracle unavailable: {exc}")

    fa = apply_function(f, a, path)
    quasi = spectral_norm(quasi_block)
    comm = spectral_norm(a1 @ s - s @ a2)
    fb_gap = spectral_norm(fb - fa)
    b_gap = spectral_norm(b - a)
    residuals = {
        "b_routes": _rel(b - b_direct, b),
        "block_formula": _rel(fb - fb_block, fb),
        "oracle": oracle,
        "quasi_chain": abs(fb_gap - quasi) / (1.0 + quasi),
        "commutator_chain": abs(b_gap - comm) / (1.0 + comm),
    }
    tolerances = {
        "b_routes": BLOCK_TOL,
        "block_formula": BLOCK_TOL,
        "oracle": 1e-8 * cond_q**2,
        "quasi_chain": EXACT_TOL,
        "commutator_chain": EXACT_TOL,
    }
    b.flags.writeable = False
    return ReductionWitness(
        Theorem.THM4, f.name, a1, a2, s, None, q, a,
        commutator_norm=comm, quasi_norm=quasi,
        residuals=residuals, tolerances=tolerances, primary="oracle", b=b,
        norms={"f_b_minus_f_a": fb_gap, "b_minus_a": b_gap, "cond_q": cond_q},
        notes=notes,
    )


def commuting_corollary(a1, a2, f: ScalarFunction, path: CalculusPath | None = None,
                        max_cond: float = DIFFERENCE_COND) -> ReductionWitness:
    """Commuting pair with ``s = (a1 - a2)^-1``, so that ``a1 s - s a2 = I``.

    The quasi norm is that of ``(a1 - a2)^-1 (f(a2) - f(a1))``, formed as written.

    Raises:
        HypothesisViolation: ``a1`` and ``a2`` do not commute.
        SingularDifferenceError: ``a1 - a2`` is singular or worse conditioned
            than ``max_cond``.
    """
    a1 = as_matrix(a1, square=True, name="a1")
    a2 = as_matrix(a2, square=True, name="a2")
    if a1.shape != a2.shape:
        raise ShapeError(f"a1 and a2 must have the same shape, got {a1.shape} and {a2.shape}")
    n = a1.shape[0]
    gap = spectral_norm(commutator(a1, a2))
    bound = COMMUTING_TOL * (1.0 + spectral_norm(a1)) * (1.0 + spectral_norm(a2))
    if gap > bound:
        raise HypothesisViolation(f"a1 and a2 do not commute: ||[a1, a2]|| = {gap:.3e}")
    diff = a1 - a2
    eye = np.eye(n, dtype=np.complex128)
    try:
        s = linalg.solve(diff, eye, max_cond=max_cond)
    except SingularMatrixError as exc:
        raise SingularDifferenceError(f"a1 - a2 is not invertible: {exc}") from exc
    cond = linalg.condition_number(diff)

    fa1 = apply_function(f, a1, path)
    fa2 = apply_function(f, a2, path)
    comm_block = a1 @ s - s @ a2
    expr = s @ (fa2 - fa1)
    quasi_commutator = fa1 @ s - s @ fa2
    quasi = spectral_norm(expr)
    residuals = {
        "unit_corner": _rel(comm_block - eye, eye),
        "quasi_forms": abs(spectral_norm(quasi_commutator) - quasi) / (1.0 + quasi),
    }
    tolerances = {"unit_corner": IDENTITY_TOL * cond, "quasi_forms": IDENTITY_TOL * cond}
    return ReductionWitness(
        Theorem.COMMUTING, f.name, a1, a2, s, None, corner_q(s, -1), direct_sum(a1, a2),
        commutator_norm=spectral_norm(comm_block), quasi_norm=quasi,
        residuals=residuals, tolerances=tolerances, primary="unit_corner",
        norms={"cond_difference": cond, "quasi_commutator": spectral_norm(quasi_commutator)},
    )
