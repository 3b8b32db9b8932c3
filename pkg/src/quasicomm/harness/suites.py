"""Per-trial verification routines and the suite runner."""

from __future__ import annotations

import concurrent.futures
import math
import time
from datetime import datetime, timezone

import numpy as np

from .. import __version__
from ..bounds import check_hypothesis, check_transfer, polynomial_g1, slack
from ..linalg import OperatorClass, classify, spectral_norm
from ..reductions import (
    commuting_corollary,
    thm1_reduce,
    thm3_construct,
    thm3_lipschitz_quotient,
    thm4_f_of_b,
)
from ..stacking import direct_sum, verify_space_stacking
from .config import PROBE_SUITES, TrialConfig
from .ensembles import GENERATOR_ID, Ensemble, complex_gaussian, sample_operator, sample_pair, trial_rng
from .report import VerificationReport, aggregate_records


def _num(x):
    """JSON-ready scalar: floats stay floats, complex becomes ``[re, im]``."""
    if x is None:
        return None
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    return float(x)


def _headroom(residuals: dict, tolerances: dict) -> float:
    values = [tolerances[k] - r for k, r in residuals.items() if r is not None]
    return min(values) if values else math.inf


def _record(config: TrialConfig, index: int, residuals: dict, norms: dict, margin, passed: bool,
            **extra) -> dict:
    rec = {
        "suite": config.suite,
        "seed": config.seed,
        "dims": [config.dim1, config.dim2],
        "function": config.function_name,
        "ensemble": config.resolved_ensemble.value,
        "trial_index": index,
        "residuals": {k: _num(v) for k, v in residuals.items()},
        "norms": {k: _num(v) for k, v in norms.items()},
        "margin": None if margin is None or not math.isfinite(margin) else float(margin),
        "pass": bool(passed),
    }
    rec.update(extra)
    return rec


def _gaussian_s(rng, config):
    return complex_gaussian(rng, (config.dim1, config.dim2))


def trial_stacking(config: TrialConfig, index: int) -> dict:
    rng = trial_rng(config.seed, index)
    tol = config.tolerances
    r = complex_gaussian(rng, (config.dim1, config.dim2))
    x1 = complex_gaussian(rng, config.dim1)
    x2 = complex_gaussian(rng, config.dim2)
    a1, a2 = sample_pair(config.resolved_ensemble, config.dim1, config.dim2, rng, config.function)

    check = verify_space_stacking(r, x1, x2)
    ds_norm = spectral_norm(direct_sum(a1, a2))
    parts = max(spectral_norm(a1), spectral_norm(a2))
    residuals = {
        "first_block": check.first_block_residual,
        "corner": check.corner_residual,
        "direct_sum_norm": abs(ds_norm - parts) / (1.0 + parts),
    }
    closure = None
    if config.resolved_ensemble is Ensemble.HERMITIAN_GAUSSIAN:
        closure = classify(direct_sum(a1, a2)) is OperatorClass.HERMITIAN
    margin = min(_headroom(residuals, tol), check.projection_margin + tol["first_block"])
    passed = margin >= 0 and closure is not False
    return _record(
        config, index, residuals,
        {"commutator": None, "quasi": None, "r": spectral_norm(r), "direct_sum": ds_norm},
        margin, passed,
        checks={"projection_margin": check.projection_margin, "hermitian_closure": closure},
    )


def trial_thm1(config: TrialConfig, index: int) -> dict:
    rng = trial_rng(config.seed, index)
    f = config.function
    a1, a2 = sample_pair(config.resolved_ensemble, config.dim1, config.dim2, rng, f)
    s = _gaussian_s(rng, config)
    w = thm1_reduce(a1, a2, s, f)
    margin = _headroom(w.residuals, config.tolerances)
    return _record(
        config, index, w.residuals,
        {"commutator": w.commutator_norm, "quasi": w.quasi_norm, **w.norms},
        margin, margin >= 0,
    )


def trial_thm3(config: TrialConfig, index: int) -> dict:
    rng = trial_rng(config.seed, index)
    f = config.function
    tol = config.tolerances
    a1 = sample_operator(config.resolved_ensemble, config.dim1, rng, f)
    grid = config.resolved_eps_grid
    worst = {"commutator_identity": 0.0, "f_identity": 0.0}
    quasi = 0.0
    for eps in grid:
        w = thm3_construct(a1, eps, f)
        for k in worst:
            worst[k] = max(worst[k], w.residuals[k])
        quasi = max(quasi, w.quasi_norm)
    margin = _headroom(worst, tol)
    bound = None
    if f.is_polynomial:
        g = polynomial_g1(f, spectral_norm(a1) + max(abs(e) for e in grid))
        ratios = thm3_lipschitz_quotient(a1, grid, f)
        bound_margin = min(g.slope - ratio + slack(g.slope) for _, ratio in ratios)
        bound = {"slope": g.slope, "sup_ratio": max(r for _, r in ratios)}
        margin = min(margin, bound_margin)
    return _record(
        config, index, worst, {"commutator": 1.0, "quasi": quasi}, margin, margin >= 0,
        bound=bound,
    )


def trial_thm4(config: TrialConfig, index: int) -> dict:
    rng = trial_rng(config.seed, index)
    f = config.function
    a1, a2 = sample_pair(config.resolved_ensemble, config.dim1, config.dim2, rng, f)
    s = _gaussian_s(rng, config)
    w = thm4_f_of_b(a1, a2, s, f)
    tol = dict(config.tolerances)
    tol["oracle"] *= w.norms["cond_q"] ** 2
    margin = _headroom(w.residuals, tol)
    return _record(
        config, index, w.residuals,
        {"commutator": w.commutator_norm, "quasi": w.quasi_norm, **w.norms},
        margin, margin >= 0, notes=w.notes,
    )


def trial_commuting(config: TrialConfig, index: int) -> dict:
    rng = trial_rng(config.seed, index)
    f = config.function
    a1, a2 = sample_pair(config.resolved_ensemble, config.dim1, config.dim2, rng, f)
    w = commuting_corollary(a1, a2, f)
    cond = w.norms["cond_difference"]
    tol = {k: v * cond for k, v in config.tolerances.items()}
    margin = _headroom(w.residuals, tol)
    return _record(
        config, index, w.residuals,
        {"commutator": w.commutator_norm, "quasi": w.quasi_norm, **w.norms},
        margin, margin >= 0,
    )


def trial_hypothesis_transfer(config: TrialConfig, index: int) -> dict:
    rng = trial_rng(config.seed, index)
    f = config.function
    a1, a2 = sample_pair(config.resolved_ensemble, config.dim1, config.dim2, rng, f)
    s = _gaussian_s(rng, config)
    n = config.dim1 + config.dim2
    q_random = complex_gaussian(rng, (n, n))

    w = thm1_reduce(a1, a2, s, f)
    g = polynomial_g1(f, max(1.0, spectral_norm(a1), spectral_norm(a2)))
    hyp_stacked = check_hypothesis(g, w.q, w.a_stacked, f)
    hyp_random = check_hypothesis(g, q_random, w.a_stacked, f)
    transfer = check_transfer(g, a1, a2, s, f)

    scale = config.tolerances["slack"] / 1e-10
    checks = {"hypothesis_stacked": hyp_stacked, "hypothesis_random": hyp_random, "transfer": transfer}
    ok = {k: c.margin >= -scale * slack(c.g_value) for k, c in checks.items()}
    # Transfer soundness: the stacked hypothesis must carry over to the pair.
    sound = (not ok["hypothesis_stacked"]) or ok["transfer"]
    return _record(
        config, index, {},
        {"commutator": w.commutator_norm, "quasi": w.quasi_norm},
        min(c.margin for c in checks.values()), all(ok.values()) and sound,
        bound=g.to_dict(),
        checks={k: {**c.to_dict(), "satisfied": ok[k]} for k, c in checks.items()},
    )


def trial_lipschitz_probe(config: TrialConfig, index: int) -> dict:
    rng = trial_rng(config.seed, index)
    f = config.function
    a1 = sample_operator(config.resolved_ensemble, config.dim1, rng, f)
    ratios = thm3_lipschitz_quotient(a1, config.resolved_eps_grid, f)
    sup = max(r for _, r in ratios)
    return _record(
        config, index, {}, {"commutator": 1.0, "quasi": sup}, None, True,
        probe={"sup_ratio": sup, "ratios": [[e.real, e.imag, r] for e, r in ratios]},
    )


TRIALS = {
    "stacking": trial_stacking,
    "thm1": trial_thm1,
    "thm3": trial_thm3,
    "thm4": trial_thm4,
    "commuting": trial_commuting,
    "hypothesis-transfer": trial_hypothesis_transfer,
    "lipschitz-probe": trial_lipschitz_probe,
}


def _run_chunk(config: TrialConfig, indices: list[int]) -> list[dict]:
    fn = TRIALS[config.suite]
    return [fn(config, i) for i in indices]


def run_suite(config: TrialConfig, parallel: int = 1) -> VerificationReport:
    """Run every trial of ``config`` and aggregate the records.

    Records depend only on ``(config, trial_index)``; ``parallel`` worker
    processes change wall-clock time, never the report contents.
    """
    config.validate()
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    indices = list(range(config.trials))
    if parallel <= 1 or config.trials == 1:
        records = _run_chunk(config, indices)
    else:
        chunks = [indices[k::parallel] for k in range(parallel)]
        chunks = [c for c in chunks if c]
        with concurrent.futures.ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            parts = pool.map(_run_chunk, [config] * len(chunks), chunks)
            records = [rec for part in parts for rec in part]
    records.sort(key=lambda r: r["trial_index"])
    if config.suite in PROBE_SUITES:
        for rec in records:
            rec["pass"] = True
    return VerificationReport(
        config=config.echo(),
        records=records,
        aggregate=aggregate_records(records),
        version=__version__,
        generator_id=GENERATOR_ID,
        started_at=started.isoformat(),
        duration_s=time.perf_counter() - t0,
    )
