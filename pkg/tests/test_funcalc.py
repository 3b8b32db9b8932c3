import math

import numpy as np
import pytest

from conftest import crandn, rand_hermitian
from quasicomm import funcalc
from quasicomm.errors import DomainError, PathError
from quasicomm.funcalc import ABS, EXP, IDENTITY, SIN, SQRT, CalculusPath, apply_function, get_function
from quasicomm.linalg import random_unitary, spectral_norm
from quasicomm.stacking import direct_sum

H, D, P = CalculusPath.HERMITIAN, CalculusPath.DIAGONALIZABLE, CalculusPath.HORNER


def test_eval_scalar_examples():
    assert funcalc.eval_scalar(EXP, 0) == 1
    assert funcalc.eval_scalar(get_function("x2"), 3) == 9
    with pytest.raises(DomainError):
        funcalc.eval_scalar(SQRT, -1)
    with pytest.raises(DomainError):
        funcalc.eval_scalar(ABS, 1j)
    assert funcalc.eval_scalar(SQRT, -1e-14) == 0
    assert funcalc.eval_scalar(funcalc.affine(2, 1), 3) == 7
    assert SIN(math.pi / 2) == pytest.approx(1.0)


def test_catalog_lookup():
    assert get_function("square") is get_function("x2")
    p = get_function("poly:1,0,2")
    assert p.poly_coefficients == (1, 0, 2)
    assert p(2) == 9
    aff = get_function("affine:2+1j,0.5")
    assert aff.slope == 2 + 1j
    assert aff(1) == 2.5 + 1j
    for name in funcalc.catalog_names():
        assert get_function(name).name == name
    with pytest.raises(KeyError):
        get_function("tanh")
    with pytest.raises(KeyError):
        get_function("poly:a,b")


def test_polynomial_invariants():
    with pytest.raises(ValueError):
        funcalc.polynomial([])
    with pytest.raises(ValueError):
        funcalc.polynomial([1, 2, 0])
    funcalc.polynomial([0])  # the zero polynomial is allowed


def test_apply_function_examples():
    np.testing.assert_allclose(apply_function(EXP, np.diag([0, np.log(2)])), np.diag([1, 2]), atol=1e-15)
    swap = np.array([[0, 1], [1, 0]])
    for path in (H, D, P):
        np.testing.assert_allclose(apply_function(get_function("x2"), swap, path), np.eye(2), atol=1e-15)


def _taylor_sin(a, degree=25):
    # independent oracle: explicit matrix powers, no package code
    out = np.zeros_like(a)
    power = a.copy()
    for k in range(1, degree + 1, 2):
        out = out + (-1) ** ((k - 1) // 2) * power / math.factorial(k)
        power = power @ a @ a
    return out


def test_sin_hermitian_path_matches_taylor(rng):
    a = rand_hermitian(rng, 8)
    eig_route = apply_function(SIN, a, H)
    assert spectral_norm(eig_route - _taylor_sin(a)) <= 1e-9
    coeffs = [0.0] * 26
    for k in range(1, 26, 2):
        coeffs[k] = (-1) ** ((k - 1) // 2) / math.factorial(k)
    taylor = funcalc.polynomial(coeffs)
    assert spectral_norm(eig_route - apply_function(taylor, a, P)) <= 1e-9


def test_path_errors(rng):
    with pytest.raises(PathError):
        apply_function(EXP, [[0, 1], [0, 0]], H)
    with pytest.raises(PathError):
        apply_function(EXP, [[0, 1], [0, 0]], D)
    with pytest.raises(PathError):
        apply_function(EXP, np.eye(2), P)
    # polynomials work on defective matrices through Horner
    np.testing.assert_array_equal(apply_function(get_function("x2"), [[0, 1], [0, 0]]), np.zeros((2, 2)))


def test_domain_errors():
    with pytest.raises(DomainError):
        apply_function(SQRT, np.diag([1.0, -0.5]))
    with pytest.raises(DomainError):
        apply_function(ABS, np.diag([1.0, 1j]), D)
    # round-off below the slack band is clamped, not rejected
    out = apply_function(SQRT, np.diag([4.0, -1e-14]))
    np.testing.assert_allclose(out, np.diag([2.0, 0.0]))


def test_abs_and_sqrt_on_hermitian(rng):
    a = rand_hermitian(rng, 6)
    absa = apply_function(ABS, a)
    np.testing.assert_allclose(absa @ absa, a @ a, atol=1e-13)
    psd = a @ a + 0.1 * np.eye(6)
    root = apply_function(SQRT, psd)
    np.testing.assert_allclose(root @ root, psd, atol=1e-13)


def test_default_path_selection(rng):
    a = rand_hermitian(rng, 4)
    assert funcalc.default_path(get_function("x2"), a) is P
    assert funcalc.default_path(EXP, a) is H
    assert funcalc.default_path(EXP, crandn(rng, 4, 4)) is D


def test_block_diagonal_examples():
    np.testing.assert_allclose(funcalc.apply_block_diagonal(get_function("x2"), [[1]], [[2]]), np.diag([1, 4]))
    np.testing.assert_allclose(funcalc.apply_block_diagonal(EXP, [[0]], [[np.log(3)]]), np.diag([1, 3]), atol=1e-15)


def test_block_diagonal_sin_pair(rng):
    a1, a2 = rand_hermitian(rng, 4), rand_hermitian(rng, 4)
    stacked = funcalc.apply_block_diagonal(SIN, a1, a2, H)
    parts = direct_sum(apply_function(SIN, a1, H), apply_function(SIN, a2, H))
    assert spectral_norm(stacked - parts) <= 1e-10


@pytest.mark.parametrize("name", ["exp", "sin", "identity", "x2", "3x2+x", "x3"])
def test_hermitian_and_other_paths_agree(rng, name):
    f = get_function(name)
    for n in (1, 3, 9):
        a = rand_hermitian(rng, n)
        ref = apply_function(f, a, H)
        other = P if f.is_polynomial else D
        assert spectral_norm(ref - apply_function(f, a, other)) <= 1e-9 * (1 + spectral_norm(ref))


def test_identity_round_trip(rng):
    a = rand_hermitian(rng, 7)
    for path in (H, D, P):
        assert spectral_norm(apply_function(IDENTITY, a, path) - a) <= 1e-10
    g = crandn(rng, 5, 5)
    np.testing.assert_array_equal(apply_function(IDENTITY, g), g)


@pytest.mark.parametrize("name", ["exp", "sin", "x2", "3x2+x"])
def test_similarity_covariance(rng, name):
    f = get_function(name)
    for n in (2, 5, 8):
        for _ in range(5):
            v = crandn(rng, n, n)
            a = v @ np.diag(crandn(rng, n)) @ np.linalg.inv(v)
            while True:
                q = crandn(rng, n, n)
                cond = np.linalg.cond(q)
                if cond <= 1e3:
                    break
            qi = np.linalg.inv(q)
            fa = apply_function(f, a, D)
            lhs = apply_function(f, q @ a @ qi, D)
            assert spectral_norm(lhs - q @ fa @ qi) <= 1e-7 * cond**2 * (1 + spectral_norm(fa))


def test_results_are_read_only(rng):
    out = apply_function(EXP, rand_hermitian(rng, 3))
    with pytest.raises(ValueError):
        out[0, 0] = 0


def test_unitary_similarity_hermitian_path(rng):
    u = random_unitary(4, rng)
    lam = np.array([-1.0, 0.0, 0.5, 2.0])
    a = (u * lam) @ u.conj().T
    expected = (u * np.exp(lam)) @ u.conj().T
    assert spectral_norm(apply_function(EXP, a) - expected) <= 1e-13
