"""Exception hierarchy shared by every module of the package."""


class QuasiCommError(Exception):
    """Base class for all errors raised by quasicomm."""


class ShapeError(QuasiCommError, ValueError):
    """Operand dimensions are incompatible with the requested operation."""


class NonFiniteError(QuasiCommError, ValueError):
    """Input contains NaN or Inf entries."""


class ClassViolationError(QuasiCommError):
    """Matrix does not belong to the operator class an operation requires."""


class NonDiagonalizableError(QuasiCommError):
    """Eigenvector matrix is too ill-conditioned to trust a diagonalization."""


class SingularMatrixError(QuasiCommError):
    """Matrix is singular to working precision."""


class DomainError(QuasiCommError, ValueError):
    """Spectrum (or scalar argument) lies outside the domain of a function."""


class PathError(QuasiCommError):
    """Requested functional-calculus path cannot be used for this input."""


class DegenerateShiftError(QuasiCommError, ValueError):
    """A shift of zero was supplied where its reciprocal is needed."""


class HypothesisViolation(QuasiCommError):
    """Inputs do not satisfy the hypothesis of a reduction (e.g. commuting pair)."""


class SingularDifferenceError(SingularMatrixError):
    """The difference A1 - A2 is not invertible."""


class UnsupportedFunctionError(QuasiCommError):
    """No constructive bound is available for the given function."""


class HypothesisDomainError(QuasiCommError):
    """The similarity Q passed to a bound check is not invertible."""


class ConfigError(QuasiCommError, ValueError):
    """Invalid harness configuration, detected before any trial runs."""


class GenerationError(QuasiCommError):
    """Random ensemble generation exhausted its resampling budget."""


class ReportEmissionError(QuasiCommError, OSError):
    """Writing a verification report failed."""
