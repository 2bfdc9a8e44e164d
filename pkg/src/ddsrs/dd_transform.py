"""Per-symbol transforms between frequency, time, and delay-Doppler domains.

A symbol's m_o samples are split into n delay blocks of length m; the
delay-Doppler picture applies the unitary n-point DFT across blocks at
fixed intra-block position, i.e. multiplies by kron(F_n, I_m).  The same
grid is reachable from the frequency domain by subcarrier decimation, a
unitary m-point IDFT, and a per-block phase ramp; both paths are exposed
because pilots are naturally defined per subcarrier while the receiver
works on time-domain samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ddsrs.config import SimConfig
from ddsrs.numerics import block_dft


@dataclass
class DDGrid:
    """Delay-Doppler samples of one symbol: column d is Doppler bin d."""

    y: np.ndarray                 # (m, n) complex; y[delay_in_block, doppler]
    symbol_index: int | None = None

    @property
    def vec(self) -> np.ndarray:
        """Doppler blocks stacked into one length m*n vector."""
        return self.y.T.reshape(-1)

    @classmethod
    def from_vec(cls, vec: np.ndarray, m: int, n: int,
                 symbol_index: int | None = None) -> "DDGrid":
        vec = np.asarray(vec)
        if vec.shape != (m * n,):
            raise ValueError(f"DDGrid.from_vec: expected shape ({m * n},), got {vec.shape}")
        return cls(y=vec.reshape(n, m).T, symbol_index=symbol_index)


def time_to_dd(r_payload: np.ndarray, cfg: SimConfig,
               symbol_index: int | None = None) -> DDGrid:
    """CP-stripped time-domain symbol to the delay-Doppler grid."""
    vec = block_dft(np.asarray(r_payload), cfg.m, cfg.n)
    return DDGrid.from_vec(vec, cfg.m, cfg.n, symbol_index)


def dd_to_time(grid: DDGrid, cfg: SimConfig) -> np.ndarray:
    """Inverse of time_to_dd."""
    return block_dft(grid.vec, cfg.m, cfg.n, inverse=True)


def freq_to_dd(x_freq: np.ndarray, cfg: SimConfig,
               symbol_index: int | None = None) -> DDGrid:
    """Frequency-domain symbol to the delay-Doppler grid.

    Decimates the spectrum by n at each offset, takes the unitary m-point
    IDFT, and applies the offset's phase ramp exp(2j*pi*m_idx*n_idx/m_o).
    Identical to time_to_dd applied to the symbol's time-domain samples.
    """
    x_freq = np.asarray(x_freq)
    if x_freq.shape != (cfg.m_o,):
        raise ValueError(f"freq_to_dd: expected shape ({cfg.m_o},), got {x_freq.shape}")
    decimated = x_freq.reshape(cfg.m, cfg.n)
    blocks = np.fft.ifft(decimated, axis=0) * np.sqrt(cfg.m)
    ramp = np.exp(
        2j * np.pi * np.outer(np.arange(cfg.m), np.arange(cfg.n)) / cfg.m_o
    )
    return DDGrid(y=blocks * ramp, symbol_index=symbol_index)


def pilot_to_dd(cfg: SimConfig, pilot: np.ndarray, comb_offset: int = 0) -> DDGrid:
    """Delay-Doppler image of a sounding symbol's frequency-domain grid."""
    pilot = np.asarray(pilot)
    if pilot.size != cfg.n_pilot:
        raise ValueError(f"pilot_to_dd: pilot length {pilot.size} != {cfg.n_pilot}")
    x = np.zeros(cfg.m_o, dtype=complex)
    x[comb_offset + cfg.k_tc * np.arange(cfg.n_pilot)] = pilot
    return freq_to_dd(x, cfg)
