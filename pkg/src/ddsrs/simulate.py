"""Frame-level transmit/receive plumbing shared by the experiments.

Builds whole frames (slot grids, OFDM modulation, serialization), passes
them through a drawn channel, and runs the competing receivers: the
classic per-sounding-symbol frequency-domain estimator, the per-block
delay-Doppler estimator (with or without Doppler-basis prediction), the
sequential data-driven loop, and a genie that equalizes with the true
channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ddsrs.bem import predict
from ddsrs.channel import (
    ChannelRealization,
    DelayTimeResponse,
    apply_channel,
    materialize_response,
    sample_tdlc,
)
from ddsrs.config import SimConfig
from ddsrs.dd_estimator import CirStack, fd_cir_from_srs, interpolate_cirs
from ddsrs.equalizer import EqualizedSymbol, mmse_equalize, ofdm_channel_matrix
from ddsrs.numerics import dft
from ddsrs.sequential import SequentialState, detection_order, initial_fit, step
from ddsrs.waveform import (
    ResourceGrid,
    frame_grids,
    ofdm_modulate,
    serialize_symbols,
    srs_pilot,
)


@dataclass
class Frame:
    """One transmitted frame: grids, payload bits, serialized samples."""

    cfg: SimConfig
    grids: list[ResourceGrid]
    bits: dict[int, np.ndarray]      # global data-symbol index -> bits
    x: np.ndarray                    # (m_o, n_symbols) frequency-domain columns
    s: np.ndarray                    # serialized time-domain stream
    pilot: np.ndarray


@dataclass
class Reception:
    """A received frame together with the channel that produced it."""

    cfg: SimConfig
    r: np.ndarray
    channel: ChannelRealization
    resp: DelayTimeResponse         # true tap values over the frame

    def payload(self, symbol_index: int) -> np.ndarray:
        """CP-stripped time-domain samples of one symbol."""
        start = self.cfg.symbol_payload_start(symbol_index)
        return self.r[start:start + self.cfg.m_o]

    def y_freq(self, symbol_index: int) -> np.ndarray:
        return dft(self.payload(symbol_index))


def transmit_frame(cfg: SimConfig, rng: np.random.Generator) -> Frame:
    """Random payload bits on every data symbol, pilots on sounding symbols."""
    pilot = srs_pilot(cfg)
    grids, bits = frame_grids(cfg, rng, pilot=pilot)
    x = np.concatenate([g.x for g in grids], axis=1)
    s = serialize_symbols(ofdm_modulate(x, cfg.m_cp))
    return Frame(cfg=cfg, grids=grids, bits=bits, x=x, s=s, pilot=pilot)


def propagate(frame: Frame, rng: np.random.Generator,
              channel: ChannelRealization | None = None) -> Reception:
    """Draw a channel (unless given), apply it, and add receiver noise."""
    cfg = frame.cfg
    if channel is None:
        channel = sample_tdlc(cfg, rng)
    resp = materialize_response(channel, cfg.total_samples, cfg.t_s)
    r = apply_channel(frame.s, resp, cfg.sigma2, rng)
    return Reception(cfg=cfg, r=r, channel=channel, resp=resp)


# --- channel estimates from the sounding symbols ------------------------------

def srs_payloads(rx: Reception) -> list[tuple[int, np.ndarray]]:
    return [(i, rx.payload(i)) for i in rx.cfg.srs_symbols()]


def fd_srs_stack(rx: Reception, frame: Frame) -> CirStack:
    """One CIR per sounding symbol, stamped at the symbol's midpoint."""
    cfg = rx.cfg
    stack = CirStack(cfg.n_taps)
    for symbol_index in cfg.srs_symbols():
        cir = fd_cir_from_srs(rx.y_freq(symbol_index), frame.pilot, cfg)
        midpoint = cfg.symbol_payload_start(symbol_index) + cfg.m_o / 2.0
        stack.append(cir[:, None], np.array([midpoint]))
    return stack


def dd_srs_state(rx: Reception, frame: Frame, rel_tol: float = 1e-10) -> SequentialState:
    """Per-block CIR stack and Doppler model from the sounding symbols alone."""
    return initial_fit(srs_payloads(rx), rx.cfg, pilot=frame.pilot, rel_tol=rel_tol)


# --- equalization with a given channel source ---------------------------------

def equalize_symbols(rx: Reception, h_source, symbols: list[int]) -> dict[int, EqualizedSymbol]:
    """MMSE-equalize chosen symbols, reading taps from h_source(span_times)."""
    cfg = rx.cfg
    out: dict[int, EqualizedSymbol] = {}
    for symbol_index in symbols:
        span = cfg.symbol_payload_start(symbol_index) + np.arange(cfg.m_o)
        h_span = h_source(span)
        h_ofdm = ofdm_channel_matrix(h_span)
        out[symbol_index] = mmse_equalize(
            rx.y_freq(symbol_index), h_ofdm, cfg.sigma2, cfg.qam_order, symbol_index
        )
    return out


def equalize_with_stack(rx: Reception, stack: CirStack,
                        symbols: list[int]) -> dict[int, EqualizedSymbol]:
    """Equalize using linear interpolation of stacked CIR snapshots."""
    return equalize_symbols(rx, lambda span: interpolate_cirs(stack, span).h, symbols)


def equalize_with_model(rx: Reception, state: SequentialState,
                        symbols: list[int]) -> dict[int, EqualizedSymbol]:
    """Equalize using the fitted Doppler-basis model (no data feedback)."""
    return equalize_symbols(rx, lambda span: predict(state.model, span).h, symbols)


def equalize_with_truth(rx: Reception, symbols: list[int]) -> dict[int, EqualizedSymbol]:
    """Genie equalizer: reads the true taps over each symbol."""
    return equalize_symbols(rx, lambda span: rx.resp.slice_times(span), symbols)


# --- the sequential data-driven receiver --------------------------------------

def run_data_driven(rx: Reception, frame: Frame, rel_tol: float = 1e-10,
                    mse_probe=None, state: SequentialState | None = None,
                    ) -> tuple[dict[int, EqualizedSymbol], SequentialState]:
    """Run the full sequential loop over the frame's data symbols.

    mse_probe, if given, is called as mse_probe(state, symbol_index,
    'before'|'after') around every detection step, letting experiments
    trace model quality without re-running the loop.  A precomputed
    initial state may be passed in; it is advanced in place.
    """
    cfg = rx.cfg
    if state is None:
        state = dd_srs_state(rx, frame, rel_tol=rel_tol)
    detected: dict[int, EqualizedSymbol] = {}
    for symbol_index in detection_order(cfg):
        if mse_probe is not None:
            mse_probe(state, symbol_index, "before")
        state, eq = step(state, rx.payload(symbol_index), symbol_index, cfg, rel_tol)
        detected[symbol_index] = eq
        if mse_probe is not None:
            mse_probe(state, symbol_index, "after")
    return detected, state


def bit_errors(frame: Frame, detected: dict[int, EqualizedSymbol],
               symbols: list[int] | None = None) -> tuple[int, int]:
    """Count (errors, bits) over the chosen data symbols."""
    if symbols is None:
        symbols = sorted(detected)
    errors = 0
    total = 0
    for symbol_index in symbols:
        truth = frame.bits[symbol_index]
        got = detected[symbol_index].bits
        errors += int(np.count_nonzero(truth != got))
        total += truth.size
    return errors, total
