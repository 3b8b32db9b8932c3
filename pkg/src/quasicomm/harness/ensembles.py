"""Seeded random matrix ensembles.

Every trial draws from its own generator, derived from the master seed and
the trial index only, so results do not depend on scheduling.
"""

from __future__ import annotations

import enum

import numpy as np

from ..errors import ConfigError, GenerationError
from ..funcalc import ScalarFunction
from ..linalg import condition_number, random_unitary, spectral_norm

MAX_ATTEMPTS = 100
DIAG_COND_MAX = 100.0
MIN_SEPARATION = 0.1
GENERATOR_ID = f"numpy.random.PCG64 via SeedSequence(seed, spawn_key=(trial,)); numpy {np.__version__}"


class Ensemble(str, enum.Enum):
    HERMITIAN_GAUSSIAN = "HermitianGaussian"
    NORMAL_RANDOM = "NormalRandom"
    DIAGONALIZABLE_RANDOM = "DiagonalizableRandom"
    COMMUTING_DIAGONAL_PAIR = "CommutingDiagonalPair"

    @classmethod
    def parse(cls, name: str) -> Ensemble:
        key = name.replace("-", "").replace("_", "").lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ConfigError(f"unknown ensemble {name!r}; choose from {[m.value for m in cls]}")

    @property
    def real_spectrum(self) -> bool:
        return self in (Ensemble.HERMITIAN_GAUSSIAN, Ensemble.COMMUTING_DIAGONAL_PAIR)


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial_index,))))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """I.i.d. standard complex normal entries (unit variance)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _hermitian(dim, rng):
    g = complex_gaussian(rng, (dim, dim))
    h = (g + g.conj().T) / 2
    norm = spectral_norm(h)
    if norm == 0:
        raise GenerationError("drew a zero Hermitian matrix")
    return h / norm


def _normal(dim, rng):
    u = random_unitary(dim, rng)
    lam = complex_gaussian(rng, dim)
    lam = lam / np.max(np.abs(lam))
    return (u * lam) @ u.conj().T


def _diagonalizable(dim, rng):
    for _ in range(MAX_ATTEMPTS):
        # V = U diag(sigma) W* with sigma log-uniform on [1, 10]
        sigma = 10.0 ** rng.uniform(0.0, 1.0, dim)
        v = (random_unitary(dim, rng) * sigma) @ random_unitary(dim, rng).conj().T
        if condition_number(v) <= DIAG_COND_MAX:
            lam = complex_gaussian(rng, dim)
            lam = lam / np.max(np.abs(lam))
            return np.linalg.solve(v.T, (v * lam).T).T
    raise GenerationError(f"no eigenvector matrix with condition <= {DIAG_COND_MAX} in {MAX_ATTEMPTS} attempts")


def _commuting_pair(dim, rng):
    d1 = rng.uniform(-1.0, 1.0, dim)
    d2 = rng.uniform(-1.0, 1.0, dim)
    for _ in range(MAX_ATTEMPTS):
        close = np.abs(d1 - d2) < MIN_SEPARATION
        if not close.any():
            return np.diag(d1).astype(np.complex128), np.diag(d2).astype(np.complex128)
        d2[close] = rng.uniform(-1.0, 1.0, int(close.sum()))
    raise GenerationError(f"could not separate diagonals by {MIN_SEPARATION} in {MAX_ATTEMPTS} attempts")


def generate(ensemble: Ensemble, dim: int, rng: np.random.Generator):
    """Draw one matrix (or, for ``CommutingDiagonalPair``, a pair of matrices).

    * ``HermitianGaussian``: ``(G + G*)/2`` scaled to spectral norm 1.
    * ``NormalRandom``: ``U diag(l) U*``, Haar ``U``, complex ``l`` with ``max|l| = 1``.
    * ``DiagonalizableRandom``: ``V diag(l) V^-1`` with ``cond(V) <= 100``.
    * ``CommutingDiagonalPair``: two real diagonals in ``[-1, 1]`` whose
      corresponding entries differ by at least 0.1.
    """
    ensemble = Ensemble(ensemble)
    if dim < 1:
        raise ConfigError("dimension must be positive")
    if ensemble is Ensemble.HERMITIAN_GAUSSIAN:
        return _hermitian(dim, rng)
    if ensemble is Ensemble.NORMAL_RANDOM:
        return _normal(dim, rng)
    if ensemble is Ensemble.DIAGONALIZABLE_RANDOM:
        return _diagonalizable(dim, rng)
    return _commuting_pair(dim, rng)


def make_admissible(f: ScalarFunction, a: np.ndarray) -> np.ndarray:
    """Map a real-spectrum sample with ``||a|| <= 1`` into the domain of ``f``.

    Only ``sqrt`` needs it: the spectrum ``[-1, 1]`` is sent affinely onto
    ``[0.1, 1]``, which preserves commutativity and keeps ``||a|| <= 1``.
    """
    if f.needs_nonnegative_spectrum:
        return 0.45 * (a + np.eye(a.shape[0])) + 0.1 * np.eye(a.shape[0])
    return a


def sample_operator(ensemble: Ensemble, dim: int, rng, f: ScalarFunction) -> np.ndarray:
    """One admissible operator; from a pair ensemble the first member is used."""
    sample = generate(ensemble, dim, rng)
    if isinstance(sample, tuple):
        sample = sample[0]
    return make_admissible(f, sample)


def sample_pair(ensemble: Ensemble, dim1: int, dim2: int, rng, f: ScalarFunction):
    """Two operators for the reductions; a commuting pair needs ``dim1 == dim2``."""
    if Ensemble(ensemble) is Ensemble.COMMUTING_DIAGONAL_PAIR:
        if dim1 != dim2:
            raise ConfigError("CommutingDiagonalPair needs dim1 == dim2")
        a1, a2 = generate(ensemble, dim1, rng)
        return make_admissible(f, a1), make_admissible(f, a2)
    return sample_operator(ensemble, dim1, rng, f), sample_operator(ensemble, dim2, rng, f)
