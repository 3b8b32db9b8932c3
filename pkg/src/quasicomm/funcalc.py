"""Scalar function catalog and the matrix functional calculus ``A -> f(A)``.

Three evaluation paths are available:

* ``HERMITIAN``: ``V f(L) V*`` from a Hermitian eigendecomposition.
* ``DIAGONALIZABLE``: ``V f(L) V^-1`` from a general eigendecomposition.
* ``HORNER``: direct polynomial evaluation, valid for every square matrix
  but only for polynomial (including affine and identity) functions.

Functions are referenced by catalog name so a run is reproducible from its
configuration alone; see :func:`get_function` for the accepted names.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    ClassViolationError,
    DomainError,
    NonDiagonalizableError,
    PathError,
)
from .stacking import direct_sum

__all__ = [
    "ABS",
    "DOMAIN_SLACK",
    "EXP",
    "IDENTITY",
    "SIN",
    "SQRT",
    "CalculusPath",
    "ScalarFunction",
    "affine",
    "apply_block_diagonal",
    "apply_function",
    "catalog_names",
    "eval_scalar",
    "get_function",
    "polynomial",
]

# Eigenvalues this close to a domain boundary are snapped onto it.
DOMAIN_SLACK = 1e-12


class CalculusPath(enum.Enum):
    HERMITIAN = "hermitian-eig"
    DIAGONALIZABLE = "diagonalizable"
    HORNER = "polynomial-horner"


_BUILTINS = ("exp", "sin", "sqrt", "abs", "identity", "affine", "polynomial")


@dataclass(frozen=True)
class ScalarFunction:
    """A catalog function.

    ``kind`` is one of ``exp``, ``sin``, ``sqrt``, ``abs``, ``identity``,
    ``affine`` or ``polynomial``. ``coefficients`` is set for the last three
    (ascending degree); ``affine`` stores ``(f0, m)``.
    """

    name: str
    kind: str
    coefficients: tuple[complex, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in _BUILTINS:
            raise ValueError(f"unknown function kind {self.kind!r}")
        if self.kind == "polynomial":
            if not self.coefficients:
                raise ValueError("polynomial needs at least one coefficient")
            if self.coefficients[-1] == 0 and len(self.coefficients) > 1:
                raise ValueError("trailing polynomial coefficient must be nonzero")
        if self.kind == "affine" and len(self.coefficients) != 2:
            raise ValueError("affine function stores exactly (f0, m)")

    @property
    def is_polynomial(self) -> bool:
        return self.kind in ("polynomial", "affine", "identity")

    @property
    def poly_coefficients(self) -> tuple[complex, ...]:
        """Ascending coefficients for any polynomial-kind function."""
        if self.kind == "identity":
            return (0j, 1 + 0j)
        if self.is_polynomial:
            return self.coefficients
        raise PathError(f"{self.name} is not a polynomial")

    @property
    def slope(self) -> complex:
        """``m`` of an affine function (1 for the identity)."""
        if self.kind == "identity":
            return 1 + 0j
        if self.kind == "affine":
            return self.coefficients[1]
        raise ValueError(f"{self.name} is not affine")

    @property
    def needs_real_spectrum(self) -> bool:
        return self.kind in ("sqrt", "abs")

    @property
    def needs_nonnegative_spectrum(self) -> bool:
        return self.kind == "sqrt"

    def __call__(self, z):
        return eval_scalar(self, z)


def polynomial(coefficients, name: str | None = None) -> ScalarFunction:
    coeffs = tuple(complex(c) for c in coefficients)
    if name is None:
        name = "poly:" + ",".join(_fmt_coeff(c) for c in coeffs)
    return ScalarFunction(name, "polynomial", coeffs)


def affine(m, f0=0.0, name: str | None = None) -> ScalarFunction:
    m, f0 = complex(m), complex(f0)
    if name is None:
        name = f"affine:{_fmt_coeff(m)},{_fmt_coeff(f0)}"
    return ScalarFunction(name, "affine", (f0, m))


def _fmt_coeff(c: complex) -> str:
    return repr(c.real) if c.imag == 0 else repr(c).strip("()")


EXP = ScalarFunction("exp", "exp")
SIN = ScalarFunction("sin", "sin")
SQRT = ScalarFunction("sqrt", "sqrt")
ABS = ScalarFunction("abs", "abs")
IDENTITY = ScalarFunction("identity", "identity")

_CATALOG = {
    "exp": EXP,
    "sin": SIN,
    "sqrt": SQRT,
    "abs": ABS,
    "identity": IDENTITY,
    "x2": polynomial([0, 0, 1], name="x2"),
    "x3": polynomial([0, 0, 0, 1], name="x3"),
    "3x2+x": polynomial([0, 1, 3], name="3x2+x"),
}
_ALIASES = {"square": "x2", "id": "identity", "cube": "x3"}


def catalog_names() -> list[str]:
    return list(_CATALOG)


def get_function(name: str) -> ScalarFunction:
    """Resolve a catalog name.

    Besides the fixed names (``exp``, ``sin``, ``sqrt``, ``abs``,
    ``identity``, ``x2``, ``x3``, ``3x2+x``) two parametrized forms are
    accepted: ``poly:c0,c1,...`` (ascending coefficients) and
    ``affine:m,f0``. Coefficients are parsed with :class:`complex`, so
    ``1+2j`` works.
    """
    key = _ALIASES.get(name, name)
    if key in _CATALOG:
        return _CATALOG[key]
    head, sep, tail = name.partition(":")
    if sep:
        try:
            values = [complex(tok.strip()) for tok in tail.split(",") if tok.strip()]
        except ValueError as exc:
            raise KeyError(f"bad coefficients in {name!r}: {exc}") from None
        if head == "poly" and values:
            return polynomial(values)
        if head == "affine" and len(values) == 2:
            return affine(values[0], values[1])
    raise KeyError(f"unknown function {name!r}; known: {', '.join(_CATALOG)}, poly:..., affine:m,f0")


def _check_domain(f: ScalarFunction, z: np.ndarray) -> np.ndarray:
    """Validate (and snap) spectrum values for ``f``; returns a new array."""
    z = np.asarray(z, dtype=np.complex128)
    if not f.needs_real_spectrum:
        return z
    if np.any(np.abs(z.imag) > DOMAIN_SLACK):
        raise DomainError(f"{f.name} requires a real spectrum")
    z = z.real.astype(np.complex128)
    if f.needs_nonnegative_spectrum:
        if np.any(z.real < -DOMAIN_SLACK):
            raise DomainError(f"{f.name} requires a nonnegative spectrum, min = {z.real.min():.3e}")
        z = np.maximum(z.real, 0.0).astype(np.complex128)
    return z


def _eval_values(f: ScalarFunction, z: np.ndarray) -> np.ndarray:
    z = _check_domain(f, z)
    if f.kind == "exp":
        return np.exp(z)
    if f.kind == "sin":
        return np.sin(z)
    if f.kind == "sqrt":
        return np.sqrt(z.real).astype(np.complex128)
    if f.kind == "abs":
        return np.abs(z.real).astype(np.complex128)
    out = np.zeros_like(z)
    for c in reversed(f.poly_coefficients):
        out = out * z + c
    return out


def eval_scalar(f: ScalarFunction, z) -> complex:
    """``f(z)`` for a single complex number."""
    z = complex(z)
    if not cmath.isfinite(z):
        raise DomainError("argument must be finite")
    return complex(_eval_values(f, np.array([z]))[0])


def _horner(f: ScalarFunction, a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if f.kind == "identity":
        return a.copy()
    if f.kind == "affine":
        f0, m = f.coefficients
        return m * a + f0 * np.eye(n)
    coeffs = f.poly_coefficients
    out = coeffs[-1] * np.eye(n, dtype=np.complex128)
    for c in reversed(coeffs[:-1]):
        out = out @ a
        out[np.diag_indices(n)] += c
    return out


def default_path(f: ScalarFunction, a) -> CalculusPath:
    """Polynomials go through Horner; otherwise Hermitian if possible."""
    if f.is_polynomial:
        return CalculusPath.HORNER
    if linalg.classify(a) == linalg.OperatorClass.HERMITIAN:
        return CalculusPath.HERMITIAN
    return CalculusPath.DIAGONALIZABLE


def apply_function(f: ScalarFunction, a, path: CalculusPath | None = None) -> np.ndarray:
    """Evaluate ``f(a)`` along ``path`` (chosen by :func:`default_path` if omitted).

    Raises:
        PathError: the path's prerequisite fails (non-Hermitian input for
            ``HERMITIAN``, defective input for ``DIAGONALIZABLE``, a
            non-polynomial ``f`` for ``HORNER``).
        DomainError: the spectrum of ``a`` is outside the domain of ``f``.
    """
    a = linalg.as_matrix(a, square=True)
    if path is None:
        path = default_path(f, a)
    path = CalculusPath(path)

    if path is CalculusPath.HORNER:
        if not f.is_polynomial:
            raise PathError(f"Horner path needs a polynomial, got {f.name}")
        out = _horner(f, a)
    elif path is CalculusPath.HERMITIAN:
        try:
            eig = linalg.hermitian_eig(a)
        except ClassViolationError as exc:
            raise PathError(str(exc)) from exc
        v = eig.vectors
        out = (v * _eval_values(f, eig.eigenvalues)) @ v.conj().T
    else:
        try:
            eig = linalg.general_eig(a)
        except NonDiagonalizableError as exc:
            raise PathError(str(exc)) from exc
        v = eig.vectors
        fv = v * _eval_values(f, eig.eigenvalues)
        out = np.linalg.solve(v.T, fv.T).T
    if not np.all(np.isfinite(out)):
        raise DomainError(f"{f.name}(A) overflowed")
    out.flags.writeable = False
    return out


def apply_block_diagonal(f: ScalarFunction, a1, a2, path: CalculusPath | None = None) -> np.ndarray:
    """``f`` applied to the stacked matrix ``diag(a1, a2)``.

    The stacked matrix is formed first and ``f`` is evaluated on it as a
    whole; comparing the result against ``diag(f(a1), f(a2))`` is the point.
    """
    return apply_function(f, direct_sum(a1, a2), path)
