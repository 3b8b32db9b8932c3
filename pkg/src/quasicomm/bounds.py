"""Constructive bound functions ``g`` for commutator estimates.

For a polynomial ``p(z) = sum_k c_k z^k`` the telescoping identity
``[Q, A^k] = sum_j A^j [Q, A] A^(k-1-j)`` gives, for every ``Q`` and every
``A`` with ``||A|| <= r``,

    ||Q p(A) - p(A) Q|| <= (sum_k |c_k| k r^(k-1)) ||QA - AQ||.

The slope depends on ``r`` but never on ``Q``. For non-polynomial functions
no bound is produced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import HypothesisDomainError, ShapeError, UnsupportedFunctionError
from .funcalc import CalculusPath, ScalarFunction, affine, apply_function
from .linalg import as_matrix, commutator, spectral_norm

__all__ = [
    "BoundCheck",
    "BoundFunction",
    "affine_exactness",
    "check_hypothesis",
    "check_transfer",
    "polynomial_g1",
    "slack",
]

Q_COND = 1e8
RADIUS_SLACK = 1e-12


def slack(g_value: float) -> float:
    return 1e-10 * (1.0 + g_value)


@dataclass(frozen=True)
class BoundFunction:
    """A nondecreasing ``g: [0, inf) -> [0, inf)``.

    ``form`` is ``"linear"`` (``t -> slope * t``) or ``"tabulated"``
    (piecewise-linear through ``points``, defined up to the last abscissa).
    ``radius`` records the operator-norm ball the bound was derived for.
    """

    form: str
    slope: float = 0.0
    points: tuple[tuple[float, float], ...] = ()
    provenance: str = ""
    radius: float | None = None

    def __post_init__(self):
        if self.form == "linear":
            if not self.slope >= 0:
                raise ValueError(f"slope must be nonnegative, got {self.slope}")
        elif self.form == "tabulated":
            ts = [t for t, _ in self.points]
            gs = [g for _, g in self.points]
            if len(ts) < 2 or ts[0] != 0 or np.any(np.diff(ts) <= 0):
                raise ValueError("tabulated bound needs increasing abscissae starting at 0")
            if np.any(np.diff(gs) < 0) or gs[0] < 0:
                raise ValueError("tabulated bound must be nonnegative and nondecreasing")
        else:
            raise ValueError(f"unknown bound form {self.form!r}")

    @classmethod
    def linear(cls, slope: float, provenance: str = "", radius: float | None = None) -> BoundFunction:
        return cls("linear", float(slope), provenance=provenance, radius=radius)

    def __call__(self, t: float) -> float:
        if t < 0:
            raise ValueError("bound functions are defined on [0, inf)")
        if self.form == "linear":
            return self.slope * t
        ts, gs = zip(*self.points)
        if t > ts[-1]:
            raise ValueError(f"t = {t} beyond tabulated range {ts[-1]}")
        return float(np.interp(t, ts, gs))

    def to_dict(self) -> dict:
        return {
            "form": self.form,
            "slope": self.slope,
            "points": [list(p) for p in self.points],
            "provenance": self.provenance,
            "radius": self.radius,
        }


def polynomial_g1(f: ScalarFunction, radius: float) -> BoundFunction:
    """Linear bound with slope ``sum_k |c_k| k radius^(k-1)``, valid for ``||A|| <= radius``."""
    if not f.is_polynomial:
        raise UnsupportedFunctionError(f"no constructive bound for {f.name}")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    c = f.poly_coefficients
    slope = sum(abs(ck) * k * radius ** (k - 1) for k, ck in enumerate(c) if k >= 1)
    return BoundFunction.linear(
        slope,
        provenance=f"telescoping commutator bound for {f.name} on ||A|| <= {radius!r}",
        radius=float(radius),
    )


def affine_exactness(m, f0, q, a) -> tuple[float, float]:
    """``(||Q f(A) - f(A) Q||, |m| ||QA - AQ||)`` for ``f(z) = m z + f0``; equal in exact arithmetic."""
    q = as_matrix(q, square=True, name="q")
    a = as_matrix(a, square=True, name="a")
    if q.shape != a.shape:
        raise ShapeError(f"q {q.shape} and a {a.shape} differ in shape")
    fa = apply_function(affine(m, f0), a, CalculusPath.HORNER)
    lhs = spectral_norm(commutator(q, fa))
    rhs = abs(complex(m)) * spectral_norm(commutator(q, a))
    return lhs, rhs


@dataclass(frozen=True)
class BoundCheck:
    """Outcome of testing ``lhs <= g(argument)``; ``margin = g(argument) - lhs``."""

    argument: float
    g_value: float
    lhs: float
    margin: float
    satisfied: bool

    def __bool__(self) -> bool:
        return self.satisfied

    def to_dict(self) -> dict:
        return {
            "argument": self.argument,
            "g_value": self.g_value,
            "lhs": self.lhs,
            "margin": self.margin,
            "satisfied": self.satisfied,
        }


def _evaluate(g: BoundFunction, argument: float, lhs: float) -> BoundCheck:
    gv = g(argument)
    margin = gv - lhs
    return BoundCheck(argument, gv, lhs, margin, margin >= -slack(gv))


def _check_radius(g: BoundFunction, norm: float) -> None:
    if g.radius is not None and norm > g.radius * (1 + RADIUS_SLACK) + RADIUS_SLACK:
        raise HypothesisDomainError(f"operator norm {norm:.6g} exceeds bound radius {g.radius:.6g}")


def check_hypothesis(g: BoundFunction, q, a, f: ScalarFunction,
                     path: CalculusPath | None = None) -> BoundCheck:
    """Test ``||Q f(A) - f(A) Q|| <= g(||QA - AQ||)`` for an invertible ``Q``.

    Raises:
        HypothesisDomainError: ``q`` is singular (condition above 1e8) or
            ``||a||`` exceeds the radius ``g`` was built for.
    """
    q = as_matrix(q, square=True, name="q")
    a = as_matrix(a, square=True, name="a")
    cond = linalg.condition_number(q)
    if not cond <= Q_COND:
        raise HypothesisDomainError(f"q is not invertible to working precision (cond = {cond:.3e})")
    _check_radius(g, spectral_norm(a))
    fa = apply_function(f, a, path)
    return _evaluate(g, spectral_norm(commutator(q, a)), spectral_norm(commutator(q, fa)))


def check_transfer(g: BoundFunction, a1, a2, s, f: ScalarFunction,
                   path: CalculusPath | None = None) -> BoundCheck:
    """Test ``||f(a1) s - s f(a2)|| <= g(||a1 s - s a2||)`` with the same ``g``."""
    a1 = as_matrix(a1, square=True, name="a1")
    a2 = as_matrix(a2, square=True, name="a2")
    s = as_matrix(s, name="s")
    if s.shape != (a1.shape[0], a2.shape[0]):
        raise ShapeError(f"s must be {a1.shape[0]}x{a2.shape[0]}, got {s.shape}")
    _check_radius(g, max(spectral_norm(a1), spectral_norm(a2)))
    fa1 = apply_function(f, a1, path)
    fa2 = apply_function(f, a2, path)
    return _evaluate(g, spectral_norm(a1 @ s - s @ a2), spectral_norm(fa1 @ s - s @ fa2))
