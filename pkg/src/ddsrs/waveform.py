"""Transmit waveform: QAM mapping, sounding sequences, slot grids, OFDM.

The serialized transmit stream is unit power per sample: data symbols
carry unit-power QAM on every subcarrier, and sounding symbols scale the
comb pilot by sqrt(k_tc) to make up for the empty subcarriers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ddsrs.config import SRS_SYMBOLS_PER_SLOT, SimConfig
from ddsrs.numerics import dft, idft


# --- QAM ------------------------------------------------------------------

def _gray_levels(n_bits: int) -> np.ndarray:
    """PAM amplitude for each n_bits-wide label, Gray-coded along the axis."""
    codes = np.arange(1 << n_bits)
    binary = codes.copy()
    shift = 1
    while shift < n_bits:
        binary ^= binary >> shift
        shift <<= 1
    # label 0...0 lands on the largest positive amplitude
    return (1 << n_bits) - 1 - 2.0 * binary


def qam_constellation(order: int) -> np.ndarray:
    """Unit-average-power square QAM constellation indexed by bit label.

    The label's first half selects the in-phase level, the second half the
    quadrature level, each half Gray-coded so neighbouring points differ
    in one bit.  Label 0 maps to the top-right corner point.
    """
    n_bits = order.bit_length() - 1
    if order < 4 or (1 << n_bits) != order or n_bits % 2 != 0:
        raise ValueError(f"qam_constellation: order must be 4^k, got {order}")
    half = n_bits // 2
    levels = _gray_levels(half)
    points = levels[:, None] + 1j * levels[None, :]
    energy = np.mean(np.abs(points) ** 2)
    return (points / np.sqrt(energy)).reshape(order)


def qam_map(bits: np.ndarray, order: int) -> np.ndarray:
    """Map a bit vector to QAM symbols, first bit most significant."""
    bits = np.asarray(bits)
    n_bits = order.bit_length() - 1
    if bits.size % n_bits != 0:
        raise ValueError(f"qam_map: bit count {bits.size} not divisible by {n_bits}")
    table = qam_constellation(order)
    weights = 1 << np.arange(n_bits - 1, -1, -1)
    labels = bits.reshape(-1, n_bits) @ weights
    return table[labels]


def qam_hard_decision(symbols: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nearest constellation point and its bits for each input symbol."""
    symbols = np.asarray(symbols)
    table = qam_constellation(order)
    n_bits = order.bit_length() - 1
    labels = np.argmin(np.abs(symbols[:, None] - table[None, :]), axis=1)
    shifts = np.arange(n_bits - 1, -1, -1)
    bits = (labels[:, None] >> shifts[None, :]) & 1
    return table[labels], bits.reshape(-1)


def qam_demap_hard(symbols: np.ndarray, order: int) -> np.ndarray:
    """Hard-decision bits for each input symbol."""
    return qam_hard_decision(symbols, order)[1]


# --- sounding sequence ------------------------------------------------------

def zc_sequence(length: int, root: int = 1) -> np.ndarray:
    """Zadoff-Chu sequence of a given length and root.

    Both parities use the standard constant-amplitude form; the root must
    be coprime with the length for the sequence to stay zero-autocorrelation.
    """
    if length <= 0:
        raise ValueError(f"zc_sequence: length must be positive, got {length}")
    if root <= 0 or math.gcd(root, length) != 1:
        raise ValueError(f"zc_sequence: root {root} not coprime with length {length}")
    n = np.arange(length)
    exponent = n * (n + 1) if length % 2 else n * n
    return np.exp(-1j * np.pi * root * exponent / length)


def _largest_coprime_below(limit: int, root: int) -> int:
    for candidate in range(limit, 0, -1):
        if math.gcd(candidate, root) == 1:
            return candidate
    raise ValueError(f"no length below {limit} coprime with root {root}")


def srs_pilot(cfg: SimConfig, root: int = 1) -> np.ndarray:
    """Pilot values for one sounding symbol, one entry per comb subcarrier.

    A Zadoff-Chu sequence of the comb length, cyclically extended from the
    largest shorter coprime length when the root does not divide evenly,
    and scaled by sqrt(k_tc) so the sounding symbol has unit power per
    transmitted sample.
    """
    length = cfg.n_pilot
    if math.gcd(root, length) == 1:
        seq = zc_sequence(length, root)
    else:
        base = _largest_coprime_below(length - 1, root)
        seq = zc_sequence(base, root)[np.arange(length) % base]
    return seq * np.sqrt(cfg.k_tc)


# --- slot grid ---------------------------------------------------------------

@dataclass
class ResourceGrid:
    """Frequency-domain symbols of one slot with data and pilot masks."""

    x: np.ndarray           # (m_o, n_o) complex
    data_mask: np.ndarray   # (m_o, n_o) bool
    pilot_mask: np.ndarray  # (m_o, n_o) bool


def build_slot(cfg: SimConfig, data_symbols: np.ndarray, has_srs: bool,
               pilot: np.ndarray | None = None, comb_offset: int = 0) -> ResourceGrid:
    """Fill one slot's grid with data columns and, optionally, sounding columns.

    In a sounding slot the last SRS_SYMBOLS_PER_SLOT symbols carry the comb
    pilot and the rest carry data; otherwise every symbol carries data.
    data_symbols is consumed column by column.
    """
    n_data_cols = cfg.n_o - SRS_SYMBOLS_PER_SLOT if has_srs else cfg.n_o
    data_symbols = np.asarray(data_symbols)
    if data_symbols.size != n_data_cols * cfg.m_o:
        raise ValueError(
            f"build_slot: expected {n_data_cols * cfg.m_o} data symbols, "
            f"got {data_symbols.size}"
        )
    if not 0 <= comb_offset < cfg.k_tc:
        raise ValueError(f"build_slot: comb_offset {comb_offset} outside [0, {cfg.k_tc})")
    x = np.zeros((cfg.m_o, cfg.n_o), dtype=complex)
    data_mask = np.zeros_like(x, dtype=bool)
    pilot_mask = np.zeros_like(x, dtype=bool)
    x[:, :n_data_cols] = data_symbols.reshape(cfg.m_o, n_data_cols, order="F")
    data_mask[:, :n_data_cols] = True
    if has_srs:
        if pilot is None:
            pilot = srs_pilot(cfg)
        pilot = np.asarray(pilot)
        if pilot.size != cfg.n_pilot:
            raise ValueError(
                f"build_slot: pilot length {pilot.size} != comb size {cfg.n_pilot}"
            )
        comb = comb_offset + cfg.k_tc * np.arange(cfg.n_pilot)
        for col in range(n_data_cols, cfg.n_o):
            x[comb, col] = pilot
            pilot_mask[comb, col] = True
    return ResourceGrid(x=x, data_mask=data_mask, pilot_mask=pilot_mask)


# --- OFDM -------------------------------------------------------------------

def ofdm_modulate(x: np.ndarray, m_cp: int) -> np.ndarray:
    """Unitary IDFT per column plus cyclic prefix; columns are symbols."""
    x = np.asarray(x)
    m_o = x.shape[0]
    td = np.fft.ifft(x, axis=0) * np.sqrt(m_o)
    return np.concatenate([td[m_o - m_cp:], td], axis=0)


def serialize_symbols(s: np.ndarray) -> np.ndarray:
    """Concatenate symbol columns into one sample stream."""
    return np.asarray(s).reshape(-1, order="F")


def strip_cp(r_symbol: np.ndarray, m_cp: int) -> np.ndarray:
    """Drop the cyclic prefix of one received symbol."""
    r_symbol = np.asarray(r_symbol)
    if r_symbol.size <= m_cp:
        raise ValueError(f"strip_cp: symbol of {r_symbol.size} samples, cp {m_cp}")
    return r_symbol[m_cp:]


def ofdm_demodulate(r_symbol: np.ndarray, m_cp: int) -> np.ndarray:
    """Received symbol (CP included) to frequency domain."""
    payload = strip_cp(r_symbol, m_cp)
    return dft(payload)


def frame_grids(cfg: SimConfig, rng: np.random.Generator,
                pilot: np.ndarray | None = None) -> tuple[list[ResourceGrid], dict[int, np.ndarray]]:
    """Random data bits for a whole frame, mapped onto per-slot grids.

    Returns the slot grids and a map from global data-symbol index to the
    bit vector that symbol carries.
    """
    grids: list[ResourceGrid] = []
    bits_by_symbol: dict[int, np.ndarray] = {}
    bits_per_col = cfg.m_o * cfg.bits_per_symbol
    for slot in range(cfg.n_slots):
        cols = cfg.data_symbols_in_slot(slot)
        bits = rng.integers(0, 2, size=bits_per_col * len(cols))
        symbols = qam_map(bits, cfg.qam_order)
        grids.append(build_slot(cfg, symbols, cfg.slot_has_srs(slot), pilot=pilot))
        for pos, symbol_index in enumerate(cols):
            bits_by_symbol[symbol_index] = bits[pos * bits_per_col:(pos + 1) * bits_per_col]
    return grids, bits_by_symbol


__all__ = [
    "ResourceGrid",
    "build_slot",
    "frame_grids",
    "ofdm_demodulate",
    "ofdm_modulate",
    "qam_constellation",
    "qam_demap_hard",
    "qam_hard_decision",
    "qam_map",
    "serialize_symbols",
    "srs_pilot",
    "strip_cp",
    "zc_sequence",
]
