"""Per-symbol channel matrices and MMSE equalization.

Given per-sample tap values over one symbol's post-CP span, the symbol's
time-domain channel matrix is quasi-circulant: row k holds the taps
active at sample k, with wrap-around columns standing in for the cyclic
prefix.  Conjugating by the symbol DFT yields the frequency-domain
matrix used by the equalizer; it is diagonal only when the taps are
constant over the symbol, and Doppler populates the off-diagonals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ddsrs.waveform import qam_hard_decision


def time_channel_matrix(h_span: np.ndarray) -> np.ndarray:
    """Quasi-circulant symbol channel from per-sample taps.

    h_span[tap, k] is the tap value at the symbol's post-CP sample k; the
    output has [k, (k - tap) mod m_o] = h_span[tap, k], exact whenever the
    cyclic prefix covers the delay span.
    """
    h_span = np.asarray(h_span)
    n_taps, m_o = h_span.shape
    if n_taps > m_o:
        raise ValueError(f"time_channel_matrix: {n_taps} taps exceed symbol size {m_o}")
    out = np.zeros((m_o, m_o), dtype=complex)
    rows = np.arange(m_o)
    for tap in range(n_taps):
        out[rows, (rows - tap) % m_o] = h_span[tap]
    return out


def ofdm_channel_matrix(h_span: np.ndarray) -> np.ndarray:
    """Frequency-domain symbol channel: F H F^H with unitary symbol DFTs."""
    h_time = time_channel_matrix(h_span)
    return np.fft.ifft(np.fft.fft(h_time, axis=0), axis=1)


@dataclass
class EqualizedSymbol:
    """MMSE output for one symbol: soft values, hard decisions, bits."""

    x: np.ndarray          # equalized (soft) frequency-domain symbols
    hard: np.ndarray       # nearest constellation points
    bits: np.ndarray       # hard-decision bits
    symbol_index: int | None = None


def mmse_equalize(y_freq: np.ndarray, h_ofdm: np.ndarray, sigma2: float,
                  qam_order: int, symbol_index: int | None = None) -> EqualizedSymbol:
    """Linear MMSE equalization with hard decisions on the output.

    Solves (H^H H + sigma2 I) x = H^H y; with sigma2 = 0 this degenerates
    to zero-forcing via least squares, which also covers a singular H.
    """
    y_freq = np.asarray(y_freq)
    h_ofdm = np.asarray(h_ofdm)
    if h_ofdm.shape != (y_freq.size, y_freq.size):
        raise ValueError(
            f"mmse_equalize: channel {h_ofdm.shape} does not match "
            f"observation of {y_freq.size}"
        )
    if sigma2 < 0:
        raise ValueError(f"mmse_equalize: sigma2 must be nonnegative, got {sigma2}")
    if sigma2 == 0:
        x = np.linalg.lstsq(h_ofdm, y_freq, rcond=None)[0]
    else:
        gram = h_ofdm.conj().T @ h_ofdm
        gram[np.diag_indices_from(gram)] += sigma2
        x = np.linalg.solve(gram, h_ofdm.conj().T @ y_freq)
    hard, bits = qam_hard_decision(x, qam_order)
    return EqualizedSymbol(x=x, hard=hard, bits=bits, symbol_index=symbol_index)
