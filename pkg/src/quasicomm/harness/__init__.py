from .config import SUITES, TrialConfig
from .ensembles import Ensemble, generate, trial_rng
from .report import VerificationReport, emit_report, read_report
from .suites import run_suite

__all__ = [
    "SUITES",
    "Ensemble",
    "TrialConfig",
    "VerificationReport",
    "emit_report",
    "generate",
    "read_report",
    "run_suite",
    "trial_rng",
]
