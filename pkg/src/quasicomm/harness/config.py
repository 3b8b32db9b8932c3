from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError
from ..funcalc import ScalarFunction, get_function
from .ensembles import Ensemble

MAX_DIM = 64
MAX_SEED = 2**64 - 1

SUITES = ("stacking", "thm1", "thm3", "thm4", "commuting", "hypothesis-transfer", "lipschitz-probe")
PROBE_SUITES = frozenset({"lipschitz-probe"})

# |eps| >= 0.1 keeps the corner-identity rounding floor below 1e-14 for ||a1|| <= 1.
DEFAULT_EPS_GRID = (0.1, 0.3, 1.0, 3.0, 10.0)
PROBE_EPS_GRID = (1e-3, 1e-2, 1e-1, 1.0, 10.0)

DEFAULT_TOLERANCES: dict[str, dict[str, float]] = {
    "stacking": {"first_block": 1e-12, "corner": 1e-12, "direct_sum_norm": 1e-12},
    "thm1": {
        "f_identity": 1e-9,
        "commutator_identity": 1e-9,
        "quasi_bridge": 1e-12,
        "commutator_bridge": 1e-12,
    },
    "thm3": {"commutator_identity": 1e-14, "f_identity": 1e-9},
    "thm4": {
        "b_routes": 1e-13,
        "block_formula": 1e-13,
        "oracle": 1e-8,
        "quasi_chain": 1e-12,
        "commutator_chain": 1e-12,
    },
    "commuting": {"unit_corner": 1e-9, "quasi_forms": 1e-9},
    "hypothesis-transfer": {"slack": 1e-10},
    "lipschitz-probe": {},
}


@dataclass(frozen=True)
class TrialConfig:
    """One verification run.

    ``tolerance_overrides`` maps residual names (see ``DEFAULT_TOLERANCES``)
    to replacement thresholds. For ``thm4``'s ``oracle`` and ``commuting``'s
    residuals the value is a coefficient, multiplied by ``cond(Q)^2`` and
    ``cond(a1 - a2)`` respectively.
    """

    suite: str
    seed: int = 0
    dim1: int = 4
    dim2: int = 3
    ensemble: str | None = None
    function_name: str = "x2"
    trials: int = 10
    tolerance_overrides: dict[str, float] = field(default_factory=dict)
    eps_grid: tuple[complex, ...] | None = None

    def __post_init__(self):
        self.validate()

    @property
    def function(self) -> ScalarFunction:
        return get_function(self.function_name)

    @property
    def resolved_ensemble(self) -> Ensemble:
        if self.ensemble is None:
            if self.suite == "commuting":
                return Ensemble.COMMUTING_DIAGONAL_PAIR
            return Ensemble.HERMITIAN_GAUSSIAN
        return Ensemble.parse(self.ensemble)

    @property
    def resolved_eps_grid(self) -> tuple[complex, ...]:
        if self.eps_grid is not None:
            return tuple(complex(e) for e in self.eps_grid)
        grid = PROBE_EPS_GRID if self.suite in PROBE_SUITES else DEFAULT_EPS_GRID
        return tuple(complex(e) for e in grid)

    @property
    def tolerances(self) -> dict[str, float]:
        return {**DEFAULT_TOLERANCES[self.suite], **self.tolerance_overrides}

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {SUITES}")
        if not 0 <= self.seed <= MAX_SEED:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        for name, d in (("dim1", self.dim1), ("dim2", self.dim2)):
            if not 1 <= d <= MAX_DIM:
                raise ConfigError(f"{name} must lie in [1, {MAX_DIM}], got {d}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        try:
            f = self.function
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
        ensemble = self.resolved_ensemble

        unknown = set(self.tolerance_overrides) - set(DEFAULT_TOLERANCES[self.suite])
        if unknown:
            raise ConfigError(f"unknown tolerance names for {self.suite}: {sorted(unknown)}")
        if any(not v >= 0 for v in self.tolerance_overrides.values()):
            raise ConfigError("tolerances must be nonnegative")

        if f.needs_real_spectrum and not ensemble.real_spectrum:
            raise ConfigError(f"{f.name} needs a real spectrum; {ensemble.value} does not provide one")
        if self.suite == "commuting":
            if ensemble is not Ensemble.COMMUTING_DIAGONAL_PAIR:
                raise ConfigError("the commuting suite needs the CommutingDiagonalPair ensemble")
            if self.dim1 != self.dim2:
                raise ConfigError("the commuting suite needs dim1 == dim2")
        elif ensemble is Ensemble.COMMUTING_DIAGONAL_PAIR and self.dim1 != self.dim2:
            raise ConfigError("CommutingDiagonalPair needs dim1 == dim2")
        if self.suite == "hypothesis-transfer" and not f.is_polynomial:
            raise ConfigError(f"hypothesis-transfer needs a polynomial function, got {f.name}")

        if self.suite in ("thm3", "lipschitz-probe"):
            grid = self.resolved_eps_grid
            if not grid:
                raise ConfigError("eps grid is empty")
            if any(e == 0 for e in grid):
                raise ConfigError("eps grid contains 0; the shift must be nonzero")
            if f.needs_real_spectrum and any(e.imag != 0 for e in grid):
                raise ConfigError(f"{f.name} needs real shifts")
            if f.needs_nonnegative_spectrum and any(e.real <= -0.1 for e in grid):
                raise ConfigError("sqrt samples have spectrum in [0.1, 1]; shifts must exceed -0.1")

    def echo(self) -> dict:
        """Deterministic, JSON-ready description of the run."""
        return {
            "suite": self.suite,
            "seed": self.seed,
            "dims": [self.dim1, self.dim2],
            "function": self.function_name,
            "ensemble": self.resolved_ensemble.value,
            "trials": self.trials,
            "tolerances": dict(sorted(self.tolerances.items())),
            "eps_grid": [[e.real, e.imag] for e in self.resolved_eps_grid]
            if self.suite in ("thm3", "lipschitz-probe") else None,
        }
