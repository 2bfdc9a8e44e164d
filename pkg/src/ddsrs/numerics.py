"""Shared numeric kernels: unitary DFTs, block DFTs, tolerant pseudoinverse.

Every DFT in the package is unitary (1/sqrt(size) both ways), so matrix
identities can be written without stray scale factors.  Complex vectors
and matrices are plain numpy arrays.
"""

from __future__ import annotations

import numpy as np


def dft(x: np.ndarray, size: int | None = None) -> np.ndarray:
    """Unitary DFT of a vector.

    Parameters
    ----------
    x : complex vector
    size : expected length; a mismatch raises ValueError.  Defaults to len(x).
    """
    x = np.asarray(x)
    if size is None:
        size = x.shape[-1]
    if x.shape[-1] != size:
        raise ValueError(f"dft: expected length {size}, got {x.shape[-1]}")
    return np.fft.fft(x, axis=-1) / np.sqrt(size)


def idft(x: np.ndarray, size: int | None = None) -> np.ndarray:
    """Unitary inverse DFT of a vector."""
    x = np.asarray(x)
    if size is None:
        size = x.shape[-1]
    if x.shape[-1] != size:
        raise ValueError(f"idft: expected length {size}, got {x.shape[-1]}")
    return np.fft.ifft(x, axis=-1) * np.sqrt(size)


def dft_matrix(size: int) -> np.ndarray:
    """Dense unitary DFT matrix, mainly for small-scale cross-checks."""
    if size <= 0:
        raise ValueError(f"dft_matrix: size must be positive, got {size}")
    k = np.arange(size)
    return np.exp(-2j * np.pi * np.outer(k, k) / size) / np.sqrt(size)


def block_dft(x: np.ndarray, m: int, n: int, inverse: bool = False) -> np.ndarray:
    """Apply the unitary DFT across n length-m blocks of a vector.

    The input is read as n stacked blocks of length m; output block i is
    sum_k W[i, k] * block_k with W the unitary n-point (I)DFT matrix.
    Equivalent to multiplying by kron(F_n, I_m) without forming it.
    """
    x = np.asarray(x)
    if x.shape != (m * n,):
        raise ValueError(f"block_dft: expected shape ({m * n},), got {x.shape}")
    blocks = x.reshape(n, m)
    if inverse:
        out = np.fft.ifft(blocks, axis=0) * np.sqrt(n)
    else:
        out = np.fft.fft(blocks, axis=0) / np.sqrt(n)
    return out.reshape(m * n)


def pinv(a: np.ndarray, rel_tol: float = 1e-10) -> tuple[np.ndarray, int]:
    """Moore-Penrose pseudoinverse with a relative singular-value cutoff.

    Returns (a_pinv, rank) where rank counts singular values above
    rel_tol * s_max.  A zero matrix has rank 0 and a zero pseudoinverse.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"pinv: expected a nonempty matrix, got shape {a.shape}")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    cutoff = rel_tol * (s[0] if s.size else 0.0)
    keep = s > cutoff
    rank = int(np.count_nonzero(keep))
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    return (vh.conj().T * inv_s) @ u.conj().T, rank
