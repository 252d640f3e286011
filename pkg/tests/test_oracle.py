import numpy as np
import pytest

from tensorcomp import oracle
from tensorcomp.obs_model import Dataset, n_exact, n_hat, sample_dataset
from tensorcomp.tensor_core import mode_multiply


def test_expect_t_init_examples(rng):
    for dims in [(2, 2, 2), (2, 3, 2)]:
        t = rng.standard_normal(dims)
        np.testing.assert_allclose(oracle.expect_t_init_exhaustive(t), t, atol=1e-12)
    np.testing.assert_array_equal(oracle.expect_t_init_exhaustive(np.zeros((2, 2, 2))), 0)


def test_expect_t_init_guard():
    with pytest.raises(ValueError):
        oracle.expect_t_init_exhaustive(np.zeros((30, 30, 30)))


def test_pairwise_matches_grouped_many(rng):
    for _ in range(50):
        dims = tuple(rng.integers(2, 5, size=3))
        data = sample_dataset(rng.standard_normal(dims), int(rng.integers(2, 200)), 0.3, rng)
        j = int(rng.integers(0, 3))
        slow = oracle.n_hat_pairwise(data, j)
        np.testing.assert_allclose(n_hat(data, j), slow, rtol=1e-10, atol=1e-10 * np.max(np.abs(slow)))


def test_pairwise_hand_value():
    data = Dataset((2, 2, 2), [[0, 0, 0], [0, 0, 0]], [1.0, 1.0])
    np.testing.assert_allclose(oracle.n_hat_pairwise(data, 0), [[64.0, 0], [0, 0]])


def test_pairwise_expectation_over_pairs(rng):
    t = rng.standard_normal((2, 2, 2))
    np.testing.assert_allclose(
        oracle.expect_n_hat_exhaustive(t, 2, estimator=oracle.n_hat_pairwise), n_exact(t, 2), atol=1e-10
    )


def test_pairwise_guard(rng):
    data = sample_dataset(np.zeros((3, 3, 3)), 501, 0.0, rng)
    with pytest.raises(ValueError):
        oracle.n_hat_pairwise(data, 0)


def test_mode_multiply_naive(rng):
    a = rng.standard_normal((3, 2, 4))
    for j in range(3):
        b = rng.standard_normal((a.shape[j], 3))
        np.testing.assert_allclose(oracle.mode_multiply_naive(a, j, b), mode_multiply(a, j, b), atol=1e-12)
        np.testing.assert_allclose(oracle.mode_multiply_naive(a, j, np.eye(a.shape[j])), a, atol=0)
    assert not np.any(oracle.mode_multiply_naive(np.zeros((2, 2)), 0, b[:2]))


@pytest.mark.parametrize("shape", [(6, 8), (8, 6), (5, 5)])
def test_jacobi_svd_reconstructs(rng, shape):
    m = rng.standard_normal(shape)
    u, s, vt = oracle.jacobi_svd(m)
    np.testing.assert_allclose(u @ np.diag(s) @ vt, m, atol=1e-12)
    np.testing.assert_allclose(s, np.linalg.svd(m, compute_uv=False), rtol=1e-12)
