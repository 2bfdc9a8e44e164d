"""Unitary transforms, the block DFT, and the truncated pseudoinverse."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ddsrs.numerics import block_dft, dft, dft_matrix, idft, pinv


def _random_complex(rng, size):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def test_dft_is_unitary(rng):
    x = _random_complex(rng, 64)
    y = dft(x)
    assert np.linalg.norm(y) == pytest.approx(np.linalg.norm(x))
    assert np.allclose(idft(y), x, atol=1e-12)


def test_dft_matrix_matches_fft(rng):
    for size in (1, 2, 5, 8):
        f = dft_matrix(size)
        x = _random_complex(rng, size)
        assert np.allclose(f @ x, dft(x), atol=1e-12)
        assert np.allclose(f.conj().T @ f, np.eye(size), atol=1e-12)


def test_dft_size_mismatch_raises(rng):
    with pytest.raises(ValueError):
        dft(np.ones(8), size=4)
    with pytest.raises(ValueError):
        idft(np.ones(8), size=16)


def test_block_dft_equals_kron_oracle(rng):
    for m, n in ((4, 2), (8, 4), (3, 5)):
        x = _random_complex(rng, m * n)
        oracle = np.kron(dft_matrix(n), np.eye(m)) @ x
        assert np.allclose(block_dft(x, m, n), oracle, atol=1e-12)
        assert np.allclose(
            block_dft(block_dft(x, m, n), m, n, inverse=True), x, atol=1e-12)


@given(st.integers(min_value=1, max_value=6), st.integers(min_value=1, max_value=6),
       st.integers(min_value=0, max_value=2**32 - 1))
def test_block_dft_preserves_energy(m, n, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(m * n) + 1j * rng.standard_normal(m * n)
    assert np.linalg.norm(block_dft(x, m, n)) == pytest.approx(
        np.linalg.norm(x), rel=1e-10)


def test_pinv_full_rank_reconstructs(rng):
    a = _random_complex(rng, (6, 4))
    a_pinv, rank = pinv(a)
    assert rank == 4
    assert np.allclose(a_pinv @ a, np.eye(4), atol=1e-10)


def test_pinv_truncates_small_singular_values(rng):
    u, _, vh = np.linalg.svd(_random_complex(rng, (5, 5)))
    a = u @ np.diag([1.0, 0.5, 1e-3, 1e-9, 1e-12]) @ vh
    _, rank_tight = pinv(a, rel_tol=1e-10)
    _, rank_loose = pinv(a, rel_tol=1e-2)
    assert rank_tight == 4
    assert rank_loose == 2


def test_pinv_zero_matrix():
    a_pinv, rank = pinv(np.zeros((3, 2)))
    assert rank == 0
    assert np.all(a_pinv == 0)
    assert a_pinv.shape == (2, 3)


@given(st.integers(min_value=2, max_value=5), st.integers(min_value=0, max_value=2**32 - 1))
def test_pinv_projector_property(n, seed):
    """A @ pinv(A) @ A == A for well-conditioned random matrices."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n + 1, n)) + 1j * rng.standard_normal((n + 1, n))
    a_pinv, _ = pinv(a)
    assert np.allclose(a @ a_pinv @ a, a, atol=1e-9)
