import numpy as np
import pytest

from conftest import crandn, rand_hermitian
from quasicomm.errors import ShapeError
from quasicomm.linalg import OperatorClass, classify, spectral_norm
from quasicomm.stacking import BlockSpec, corner_q, direct_sum, embed_upper_right, verify_space_stacking


def test_direct_sum_examples():
    np.testing.assert_array_equal(direct_sum([[1]], [[2]]), np.diag([1, 2]))
    np.testing.assert_array_equal(direct_sum(np.eye(2), [[0]]), np.diag([1, 1, 0]))
    with pytest.raises(ShapeError):
        direct_sum(np.zeros((2, 3)), [[1]])


def test_direct_sum_norm_is_max(rng):
    for _ in range(20):
        a1, a2 = crandn(rng, 4, 4), crandn(rng, 4, 4)
        expected = max(spectral_norm(a1), spectral_norm(a2))
        assert spectral_norm(direct_sum(a1, a2)) == pytest.approx(expected, rel=1e-12)


def test_embed_examples(rng):
    np.testing.assert_array_equal(embed_upper_right([[3]], BlockSpec(1, 1)), [[0, 3], [0, 0]])
    np.testing.assert_array_equal(embed_upper_right(np.zeros((2, 3))), np.zeros((5, 5)))
    r = crandn(rng, 3, 5)
    assert abs(spectral_norm(embed_upper_right(r)) - spectral_norm(r)) <= 1e-12
    with pytest.raises(ShapeError):
        embed_upper_right(r, BlockSpec(5, 3))
    with pytest.raises(ShapeError):
        BlockSpec(0, 2)


def test_corner_q_examples(rng):
    np.testing.assert_array_equal(corner_q(np.zeros((2, 3))), np.eye(5))
    np.testing.assert_array_equal(corner_q([[1]], -1), [[1, -1], [0, 1]])
    s = crandn(rng, 3, 4)
    np.testing.assert_allclose(corner_q(s, -1) @ corner_q(s, +1), np.eye(7), atol=1e-15)
    eps = 0.3 - 0.2j
    np.testing.assert_allclose(corner_q(np.eye(2), 1 / eps)[:2, 2:], np.eye(2) / eps)


def test_space_stacking_examples(rng):
    r = crandn(rng, 2, 2)
    chk = verify_space_stacking(r, [1, 0], [0, 0])
    assert chk.first_block_residual == 0
    chk = verify_space_stacking(r, [0, 0], [1, 0])
    assert chk.projection_margin == 0
    assert chk.passed
    chk = verify_space_stacking(crandn(rng, 4, 3), crandn(rng, 4), crandn(rng, 3))
    assert chk.corner_residual <= 1e-12
    assert chk.passed


def test_space_stacking_reports_instead_of_raising():
    chk = verify_space_stacking([[1.0]], [1.0], [1.0], tol=-1.0)
    assert not chk.passed
    with pytest.raises(ShapeError):
        verify_space_stacking(np.zeros((2, 2)), [1.0], [1.0, 2.0])


def test_space_conditions_random(rng):
    for _ in range(200):
        m, n = rng.integers(1, 17, size=2)
        chk = verify_space_stacking(crandn(rng, m, n), crandn(rng, m) * rng.uniform(0, 10), crandn(rng, n))
        assert chk.passed


def test_hermitian_closure(rng):
    for n1, n2 in [(1, 1), (3, 5), (8, 2)]:
        stacked = direct_sum(rand_hermitian(rng, n1), rand_hermitian(rng, n2))
        assert classify(stacked) is OperatorClass.HERMITIAN
