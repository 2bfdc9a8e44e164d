"""Per-block CIR estimation from one symbol's delay-Doppler observation.

Within one OFDM symbol the channel is modeled as constant over each of
the n delay blocks, giving n length-L impulse responses.  Their DFT
across blocks couples to the transmitted delay-Doppler signal through a
block matrix of truncated circulants, so a single symbol yields n CIR
snapshots by least squares.  The same machinery serves the comb pilot
and, in the sequential loop, hard-decided data symbols.

Block-circulant structure (m = block length, n = blocks, unitary DFTs):
the DD channel matrix has (i, j) blocks circ(h_dd[:, (i-j) mod n]) / sqrt(n)
where entries above the diagonal — the taps that wrap around a block
boundary — carry an extra phase exp(-2j*pi*j/n) tied to the transmit
block index j.  Interchanging the roles of channel and signal gives the
regressor built here, whose wrap phase therefore follows (i - j) mod n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ddsrs.channel import DelayTimeResponse
from ddsrs.config import SimConfig
from ddsrs.dd_transform import DDGrid
from ddsrs.numerics import pinv


def _circulant_columns(v: np.ndarray, n_cols: int) -> np.ndarray:
    """First n_cols columns of the circulant matrix with first column v."""
    m = v.shape[0]
    idx = (np.arange(m)[:, None] - np.arange(n_cols)[None, :]) % m
    return v[idx]


@dataclass
class DdRegressor:
    """Least-squares regressor mapping stacked block CIRs to a DD observation."""

    matrix: np.ndarray            # (m*n, n*n_taps) complex
    n_taps: int
    symbol_index: int | None = None
    _cache: tuple | None = field(default=None, repr=False, compare=False)

    def solver(self, rel_tol: float = 1e-10) -> tuple[np.ndarray, int]:
        """Pseudoinverse and effective rank, cached per tolerance."""
        if self._cache is None or self._cache[0] != rel_tol:
            self._cache = (rel_tol, *pinv(self.matrix, rel_tol))
        return self._cache[1], self._cache[2]

    @property
    def cond(self) -> float:
        """2-norm condition number of the regressor."""
        s = np.linalg.svd(self.matrix, compute_uv=False)
        return float(s[0] / s[-1]) if s[-1] > 0 else np.inf


def build_regressor(x_dd: DDGrid, n_taps: int) -> DdRegressor:
    """Regressor for one symbol given its transmitted delay-Doppler grid.

    Block (i, j) gathers the transmit block (i - j) mod n into the first
    n_taps circulant columns, with the wrap-around entries (above the
    block diagonal) phased by exp(-2j*pi*(i-j)/n).
    """
    m, n = x_dd.y.shape
    if n_taps > m:
        raise ValueError(f"build_regressor: n_taps {n_taps} exceeds block length {m}")
    wrap = np.arange(m)[:, None] < np.arange(n_taps)[None, :]
    scale = 1.0 / np.sqrt(n)
    gathered = []
    for d in range(n):
        cols = _circulant_columns(x_dd.y[:, d], n_taps) * scale
        gathered.append(np.where(wrap, cols * np.exp(-2j * np.pi * d / n), cols))
    out = np.zeros((m * n, n * n_taps), dtype=complex)
    for i in range(n):
        for j in range(n):
            out[i * m:(i + 1) * m, j * n_taps:(j + 1) * n_taps] = gathered[(i - j) % n]
    return DdRegressor(matrix=out, n_taps=n_taps, symbol_index=x_dd.symbol_index)


@dataclass
class BlockCirEstimate:
    """Estimated per-block CIRs of one symbol, with least-squares diagnostics."""

    h_dd: np.ndarray      # (n_taps, n): Doppler-domain block CIRs
    residual: float       # ||y - A h|| over the symbol
    rank: int             # effective rank used by the solver
    full_rank: bool       # rank == n * n_taps
    symbol_index: int | None = None


def estimate_block_cirs(y_dd: DDGrid, regressor: DdRegressor,
                        rel_tol: float = 1e-10) -> BlockCirEstimate:
    """Least-squares block-CIR estimate from one symbol's DD observation."""
    y = y_dd.vec
    if y.size != regressor.matrix.shape[0]:
        raise ValueError(
            f"estimate_block_cirs: observation of {y.size} entries, "
            f"regressor rows {regressor.matrix.shape[0]}"
        )
    solver, rank = regressor.solver(rel_tol)
    h_vec = solver @ y
    residual = float(np.linalg.norm(y - regressor.matrix @ h_vec))
    n = regressor.matrix.shape[1] // regressor.n_taps
    h_dd = h_vec.reshape(n, regressor.n_taps).T
    return BlockCirEstimate(
        h_dd=h_dd,
        residual=residual,
        rank=rank,
        full_rank=rank == regressor.matrix.shape[1],
        symbol_index=y_dd.symbol_index,
    )


def dd_to_delay_time(h_dd: np.ndarray) -> np.ndarray:
    """Doppler-domain block CIRs to per-block time-domain CIRs."""
    h_dd = np.asarray(h_dd)
    n = h_dd.shape[1]
    return np.fft.ifft(h_dd, axis=1) * np.sqrt(n)


def delay_time_to_dd(h_blocks: np.ndarray) -> np.ndarray:
    """Inverse of dd_to_delay_time."""
    h_blocks = np.asarray(h_blocks)
    n = h_blocks.shape[1]
    return np.fft.fft(h_blocks, axis=1) / np.sqrt(n)


def block_times(cfg: SimConfig, symbol_index: int) -> np.ndarray:
    """Effective sample time of each delay block of a symbol (post CP).

    A block CIR estimate approximates the average channel over the block,
    so its temporal center of mass is the block middle.  Stamping at the
    block start instead would bias every Doppler component by a half-block
    phase, which measurably degrades prediction at high mobility.
    """
    t0 = cfg.symbol_payload_start(symbol_index) + (cfg.m - 1) / 2.0
    return t0 + cfg.m * np.arange(cfg.n)


def dense_dd_channel(h_dd: np.ndarray, m: int) -> np.ndarray:
    """Dense delay-Doppler channel matrix for given Doppler-domain block CIRs.

    Small-scale oracle: block (i, j) is the circulant of block CIR
    (i - j) mod n zero-padded to length m, scaled by 1/sqrt(n), with the
    wrap-around entries phased by exp(-2j*pi*j/n).
    """
    h_dd = np.asarray(h_dd)
    n_taps, n = h_dd.shape
    if n_taps > m:
        raise ValueError(f"dense_dd_channel: n_taps {n_taps} exceeds block length {m}")
    wrap = np.arange(m)[:, None] < np.arange(m)[None, :]
    out = np.zeros((m * n, m * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            v = np.concatenate([h_dd[:, (i - j) % n], np.zeros(m - n_taps, complex)])
            block = _circulant_columns(v, m) / np.sqrt(n)
            block = np.where(wrap, block * np.exp(-2j * np.pi * j / n), block)
            out[i * m:(i + 1) * m, j * m:(j + 1) * m] = block
    return out


# --- CIR bookkeeping across symbols ------------------------------------------

class CirStack:
    """Delay-time CIR snapshots collected across symbols, kept time-sorted."""

    def __init__(self, n_taps: int):
        self.n_taps = n_taps
        self._h = np.zeros((n_taps, 0), dtype=complex)
        self._times = np.zeros(0, dtype=float)

    @property
    def n_cir(self) -> int:
        return self._times.size

    @property
    def times(self) -> np.ndarray:
        return self._times

    @property
    def matrix(self) -> np.ndarray:
        """(n_taps, n_cir) CIR columns ordered by ascending time."""
        return self._h

    def append(self, h_blocks: np.ndarray, times: np.ndarray) -> None:
        """Insert CIR columns taken at the given sample times."""
        h_blocks = np.asarray(h_blocks)
        times = np.asarray(times, dtype=float)
        if h_blocks.shape != (self.n_taps, times.size):
            raise ValueError(
                f"CirStack.append: expected ({self.n_taps}, {times.size}) CIRs, "
                f"got {h_blocks.shape}"
            )
        if np.intersect1d(times, self._times).size:
            raise ValueError("CirStack.append: duplicate CIR times")
        self._h = np.concatenate([self._h, h_blocks], axis=1)
        self._times = np.concatenate([self._times, times])
        order = np.argsort(self._times)
        self._h = self._h[:, order]
        self._times = self._times[order]

    def trim(self, max_cir: int) -> None:
        """Drop the oldest CIRs so at most max_cir columns remain."""
        if max_cir < 1:
            raise ValueError(f"CirStack.trim: max_cir must be positive, got {max_cir}")
        if self.n_cir > max_cir:
            self._h = self._h[:, -max_cir:]
            self._times = self._times[-max_cir:]


def interpolate_cirs(stack: CirStack, times: np.ndarray) -> DelayTimeResponse:
    """Linear interpolation of stacked CIRs onto target sample times.

    Outside the stack's span the nearest CIR is held constant.
    """
    if stack.n_cir == 0:
        raise ValueError("interpolate_cirs: empty stack")
    times = np.asarray(times)
    h = np.empty((stack.n_taps, times.size), dtype=complex)
    for tap in range(stack.n_taps):
        h[tap] = np.interp(times, stack.times, stack.matrix[tap].real) \
            + 1j * np.interp(times, stack.times, stack.matrix[tap].imag)
    return DelayTimeResponse(h=h, times=times)


# --- frequency-domain baseline -----------------------------------------------

def fd_cir_from_srs(y_freq: np.ndarray, pilot: np.ndarray, cfg: SimConfig,
                    comb_offset: int = 0) -> np.ndarray:
    """Classic one-shot CIR estimate from a sounding symbol.

    Least-squares per-subcarrier equalization on the comb followed by an
    IDFT to the delay domain, truncated to the configured delay span; the
    comb offset is compensated by the matching delay-domain phase ramp.
    """
    y_freq = np.asarray(y_freq)
    pilot = np.asarray(pilot)
    if pilot.size != cfg.n_pilot:
        raise ValueError(f"fd_cir_from_srs: pilot length {pilot.size} != {cfg.n_pilot}")
    if np.any(pilot == 0):
        raise ValueError("fd_cir_from_srs: pilot contains zeros")
    comb = comb_offset + cfg.k_tc * np.arange(cfg.n_pilot)
    h_comb = y_freq[comb] / pilot
    cir = np.fft.ifft(h_comb)
    taps = np.arange(cfg.n_taps)
    if cfg.n_taps > cfg.n_pilot:
        raise ValueError(
            f"fd_cir_from_srs: delay span {cfg.n_taps} exceeds comb size {cfg.n_pilot}"
        )
    return cir[:cfg.n_taps] * np.exp(2j * np.pi * comb_offset * taps / cfg.m_o)
