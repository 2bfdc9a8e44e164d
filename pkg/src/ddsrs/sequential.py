"""Sequential data-driven channel tracking across a frame.

Sounding symbols seed per-block CIR snapshots and a Doppler-basis model.
Data symbols are then detected nearest-to-the-pilots first: the model
predicts the channel over the symbol, MMSE equalization yields hard
decisions, and the re-encoded symbol acts as a virtual pilot whose
delay-Doppler regressor produces fresh CIR snapshots.  Every detection
therefore extends the observation window and refines the model for the
symbols still pending.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ddsrs.bem import FIT_REL_TOL, BemModel, fit_bem, predict
from ddsrs.config import SimConfig
from ddsrs.dd_estimator import (
    BlockCirEstimate,
    CirStack,
    block_times,
    build_regressor,
    dd_to_delay_time,
    estimate_block_cirs,
)
from ddsrs.dd_transform import freq_to_dd, pilot_to_dd, time_to_dd
from ddsrs.equalizer import EqualizedSymbol, mmse_equalize, ofdm_channel_matrix
from ddsrs.numerics import dft
from ddsrs.waveform import srs_pilot


def detection_order(cfg: SimConfig) -> list[int]:
    """Data symbols ordered by distance to the nearest sounding symbol.

    Ties break toward the earlier symbol, so the scan alternates around
    each pilot burst before drifting into the unsounded tail of the frame.
    """
    srs = cfg.srs_symbols()
    if not srs:
        raise ValueError("detection_order: the frame carries no sounding symbols")
    srs_arr = np.array(srs)
    data = cfg.data_symbols()
    return sorted(data, key=lambda d: (np.abs(srs_arr - d).min(), d))


@dataclass
class StepRecord:
    """Diagnostics of one detection step."""

    symbol_index: int
    residual: float
    rank: int
    n_cir_after: int


@dataclass
class SequentialState:
    """Evolving receiver state: CIR stack, Doppler model, step history."""

    stack: CirStack
    model: BemModel
    records: list[StepRecord] = field(default_factory=list)


def _append_estimate(stack: CirStack, est: BlockCirEstimate, cfg: SimConfig,
                     symbol_index: int) -> None:
    stack.append(dd_to_delay_time(est.h_dd), block_times(cfg, symbol_index))
    if cfg.stack_window is not None:
        stack.trim(cfg.stack_window)


def initial_fit(srs_payloads: list[tuple[int, np.ndarray]], cfg: SimConfig,
                pilot: np.ndarray | None = None, rel_tol: float = 1e-10,
                bem_rel_tol: float = FIT_REL_TOL) -> SequentialState:
    """Seed the state from received sounding symbols.

    srs_payloads pairs each sounding symbol's global index with its
    CP-stripped time-domain samples.  All sounding symbols share one
    pilot, so a single regressor (and one factorization) serves them all.
    """
    if not srs_payloads:
        raise ValueError("initial_fit: no sounding symbols supplied")
    if pilot is None:
        pilot = srs_pilot(cfg)
    x_dd = pilot_to_dd(cfg, pilot)
    regressor = build_regressor(x_dd, cfg.n_taps)
    stack = CirStack(cfg.n_taps)
    records = []
    for symbol_index, payload in srs_payloads:
        y_dd = time_to_dd(payload, cfg, symbol_index)
        est = estimate_block_cirs(y_dd, regressor, rel_tol)
        _append_estimate(stack, est, cfg, symbol_index)
        records.append(StepRecord(symbol_index, est.residual, est.rank, stack.n_cir))
    model = fit_bem(stack, cfg.upsilon_max_hz, cfg.q, cfg.t_s, bem_rel_tol)
    return SequentialState(stack=stack, model=model, records=records)


def step(state: SequentialState, payload: np.ndarray, symbol_index: int,
         cfg: SimConfig, rel_tol: float = 1e-10,
         bem_rel_tol: float = FIT_REL_TOL) -> tuple[SequentialState, EqualizedSymbol]:
    """Detect one data symbol and fold it back into the channel model.

    Predict the taps over the symbol, equalize, hard-decide, then use the
    decided symbol as a virtual pilot: estimate its block CIRs, append
    them to the stack, and refit the Doppler model.
    """
    payload = np.asarray(payload)
    if payload.shape != (cfg.m_o,):
        raise ValueError(f"step: expected payload of {cfg.m_o} samples, got {payload.shape}")
    span = cfg.symbol_payload_start(symbol_index) + np.arange(cfg.m_o)
    h_span = predict(state.model, span).h
    h_ofdm = ofdm_channel_matrix(h_span)
    y_freq = dft(payload)
    eq = mmse_equalize(y_freq, h_ofdm, cfg.sigma2, cfg.qam_order, symbol_index)

    x_dd = freq_to_dd(eq.hard, cfg, symbol_index)
    regressor = build_regressor(x_dd, cfg.n_taps)
    y_dd = time_to_dd(payload, cfg, symbol_index)
    est = estimate_block_cirs(y_dd, regressor, rel_tol)
    _append_estimate(state.stack, est, cfg, symbol_index)
    model = fit_bem(state.stack, cfg.upsilon_max_hz, cfg.q, cfg.t_s, bem_rel_tol)

    state.model = model
    state.records.append(StepRecord(symbol_index, est.residual, est.rank, state.stack.n_cir))
    return state, eq
