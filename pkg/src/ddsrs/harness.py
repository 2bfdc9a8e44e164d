"""Monte-Carlo experiments: NMSE and BER sweeps, CSV results, parallelism.

Every experiment derives one rng per trial from the master seed, runs
trials independently, and merges results by trial index, so outputs are
byte-identical regardless of the worker count.  Results go to a fixed
nine-column CSV schema consumed by the plotting package:

    experiment, method, axis_name, axis_value, metric_name, metric_value,
    ci_halfwidth, trials, seed

Axis conventions: symbol and slot positions are reported 1-based (the
code itself indexes from 0); NMSE is reported in dB with a -120 dB floor;
confidence half-widths are 95% normal-approximation intervals in the same
units as the metric.
"""

from __future__ import annotations

import csv
import math
import multiprocessing
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ddsrs.channel import apply_channel, materialize_response, sample_tdlc
from ddsrs.config import SimConfig
from ddsrs.dd_estimator import interpolate_cirs
from ddsrs.bem import predict
from ddsrs.simulate import (
    Reception,
    bit_errors,
    dd_srs_state,
    equalize_with_model,
    equalize_with_stack,
    fd_srs_stack,
    run_data_driven,
    transmit_frame,
)

NMSE_FLOOR_DB = -120.0
_NMSE_FLOOR_LIN = 10.0 ** (NMSE_FLOOR_DB / 10.0)

# Default probe symbols for the per-symbol BER experiment: the first three
# data symbols following the first sounding burst (the opening symbols of
# the second slot in the default layout), reported 1-based on the axis.
def _default_targets(cfg: SimConfig) -> list[int]:
    first_burst_end = cfg.srs_symbols_in_slot(0)[-1]
    candidates = [d for d in cfg.data_symbols() if d > first_burst_end]
    if len(candidates) < 3:
        raise ValueError("per-symbol BER experiment needs three data symbols "
                         "after the first sounding burst")
    return candidates[:3]


# --- metrics -------------------------------------------------------------------

def nmse(h_est: np.ndarray, h_truth: np.ndarray) -> float:
    """Normalized mean-square error between tap arrays, in linear scale."""
    h_est = np.asarray(h_est)
    h_truth = np.asarray(h_truth)
    if h_est.shape != h_truth.shape:
        raise ValueError(f"nmse: shape mismatch {h_est.shape} vs {h_truth.shape}")
    denom = float(np.sum(np.abs(h_truth) ** 2))
    if denom == 0:
        raise ValueError("nmse: reference is identically zero")
    return float(np.sum(np.abs(h_est - h_truth) ** 2)) / denom


def nmse_db(value_linear: float) -> float:
    """Linear NMSE to dB with the reporting floor applied."""
    return 10.0 * math.log10(max(value_linear, _NMSE_FLOOR_LIN))


def _mean_ci(samples) -> tuple[float, float]:
    arr = np.asarray(samples, dtype=float)
    mean = float(arr.mean())
    if arr.size < 2:
        return mean, 0.0
    half = 1.96 * float(arr.std(ddof=1)) / math.sqrt(arr.size)
    return mean, half


def _db_row(samples) -> tuple[float, float]:
    """Mean linear NMSE in dB with a delta-method half-width, also in dB."""
    mean, half = _mean_ci(samples)
    if mean <= _NMSE_FLOOR_LIN:
        return NMSE_FLOOR_DB, 0.0
    return 10.0 * math.log10(mean), (10.0 / math.log(10.0)) * half / mean


# --- result container and CSV schema --------------------------------------------

CSV_COLUMNS = (
    "experiment", "method", "axis_name", "axis_value",
    "metric_name", "metric_value", "ci_halfwidth", "trials", "seed",
)


@dataclass
class ResultRow:
    method: str
    axis_name: str
    axis_value: float
    metric_name: str
    metric_value: float
    ci_halfwidth: float
    trials: int
    seed: int


@dataclass
class ExperimentResult:
    experiment: str
    cfg: SimConfig
    rows: list[ResultRow] = field(default_factory=list)
    extras: dict = field(default_factory=dict)


def _fmt(value: float) -> str:
    return "%.9g" % value


def write_csv(result: ExperimentResult, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in result.rows:
            writer.writerow([
                result.experiment, row.method, row.axis_name, _fmt(row.axis_value),
                row.metric_name, _fmt(row.metric_value), _fmt(row.ci_halfwidth),
                row.trials, row.seed,
            ])


def read_csv(path: str | Path) -> list[dict]:
    """Parse a results CSV back into typed row dicts."""
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected CSV columns {reader.fieldnames}")
        rows = []
        for rec in reader:
            rows.append({
                "experiment": rec["experiment"],
                "method": rec["method"],
                "axis_name": rec["axis_name"],
                "axis_value": float(rec["axis_value"]),
                "metric_name": rec["metric_name"],
                "metric_value": float(rec["metric_value"]),
                "ci_halfwidth": float(rec["ci_halfwidth"]),
                "trials": int(rec["trials"]),
                "seed": int(rec["seed"]),
            })
    return rows


def _run_trials(fn, args_list, threads: int) -> list:
    """Map trials to workers; results come back ordered by trial index."""
    if threads <= 1:
        return [fn(args) for args in args_list]
    with multiprocessing.Pool(threads) as pool:
        return pool.map(fn, args_list)


def _method_label(method: str, snr_db: float, multi: bool) -> str:
    return f"{method}@{snr_db:g}dB" if multi else method


# --- NMSE experiments ------------------------------------------------------------

def _sounded_span(cfg: SimConfig) -> np.ndarray:
    """Post-CP sample indices of the sounding symbols.

    Both estimators carry observations only here, so evaluating the
    interpolated taps on this span compares estimation quality rather
    than interpolation across the unsounded data region.
    """
    return np.concatenate([
        cfg.symbol_payload_start(s) + np.arange(cfg.m_o) for s in cfg.srs_symbols()
    ])


def _nmse_snr_trial(args) -> list[tuple[float, float]]:
    cfg, snr_list, trial = args
    rng = np.random.default_rng([cfg.seed, trial])
    frame = transmit_frame(cfg, rng)
    channel = sample_tdlc(cfg, rng)
    resp = materialize_response(channel, cfg.total_samples, cfg.t_s)
    span = _sounded_span(cfg)
    truth = resp.slice_times(span)
    out = []
    for snr_db in snr_list:
        cfg_point = replace(cfg, snr_db=snr_db)
        r = apply_channel(frame.s, resp, cfg_point.sigma2, rng)
        rx = Reception(cfg=cfg_point, r=r, channel=channel, resp=resp)
        fd = interpolate_cirs(fd_srs_stack(rx, frame), span).h
        dd = interpolate_cirs(dd_srs_state(rx, frame).stack, span).h
        out.append((nmse(fd, truth), nmse(dd, truth)))
    return out


def _nmse_speed_trial(args) -> list[tuple[float, float]]:
    cfg, speed_list, trial = args
    rng = np.random.default_rng([cfg.seed, trial])
    frame = transmit_frame(cfg, rng)
    span = _sounded_span(cfg)
    out = []
    for speed in speed_list:
        cfg_point = replace(cfg, speed_kmh=speed, upsilon_max=None)
        channel = sample_tdlc(cfg_point, rng)
        resp = materialize_response(channel, cfg_point.total_samples, cfg_point.t_s)
        truth = resp.slice_times(span)
        r = apply_channel(frame.s, resp, cfg_point.sigma2, rng)
        rx = Reception(cfg=cfg_point, r=r, channel=channel, resp=resp)
        fd = interpolate_cirs(fd_srs_stack(rx, frame), span).h
        dd = interpolate_cirs(dd_srs_state(rx, frame).stack, span).h
        out.append((nmse(fd, truth), nmse(dd, truth)))
    return out


def _shrink_to_sounded(cfg: SimConfig) -> SimConfig:
    """Estimation-only experiments need no unsounded slots; drop them."""
    if cfg.n_srs_slots < 1:
        raise ValueError("NMSE experiments need at least one sounded slot")
    return replace(cfg, n_slots=cfg.n_srs_slots)


def run_nmse_vs_snr(cfg: SimConfig, snr_list, trials: int, threads: int = 1,
                    out: str | Path | None = None) -> ExperimentResult:
    """Channel-estimation NMSE of the frequency-domain and per-block
    delay-Doppler estimators across receiver SNR, one shared channel draw
    per trial.  NMSE is evaluated on the taps over the sounded slots."""
    cfg = _shrink_to_sounded(cfg)
    snr_list = [float(s) for s in snr_list]
    per_trial = _run_trials(_nmse_snr_trial,
                            [(cfg, snr_list, t) for t in range(trials)], threads)
    result = ExperimentResult("nmse_vs_snr", cfg)
    for a, snr_db in enumerate(snr_list):
        for m, method in enumerate(("fd", "dd")):
            value, half = _db_row([trial[a][m] for trial in per_trial])
            result.rows.append(ResultRow(method, "snr_db", snr_db, "nmse_db",
                                         value, half, trials, cfg.seed))
    if out is not None:
        write_csv(result, out)
    return result


def run_nmse_vs_speed(cfg: SimConfig, speed_list, trials: int, threads: int = 1,
                      out: str | Path | None = None) -> ExperimentResult:
    """Channel-estimation NMSE across relative speed at the configured SNR.

    Each speed point derives its Doppler spread from the speed (any
    upsilon_max override is cleared) and draws its own channel."""
    cfg = _shrink_to_sounded(cfg)
    speed_list = [float(v) for v in speed_list]
    per_trial = _run_trials(_nmse_speed_trial,
                            [(cfg, speed_list, t) for t in range(trials)], threads)
    result = ExperimentResult("nmse_vs_speed", cfg)
    for a, speed in enumerate(speed_list):
        for m, method in enumerate(("fd", "dd")):
            value, half = _db_row([trial[a][m] for trial in per_trial])
            result.rows.append(ResultRow(method, "speed_kmh", speed, "nmse_db",
                                         value, half, trials, cfg.seed))
    if out is not None:
        write_csv(result, out)
    return result


# --- BER experiments --------------------------------------------------------------

def _ber_trial(args) -> dict:
    cfg, snr_list, targets, trial = args
    rng = np.random.default_rng([cfg.seed, trial])
    frame = transmit_frame(cfg, rng)
    channel = sample_tdlc(cfg, rng)
    resp = materialize_response(channel, cfg.total_samples, cfg.t_s)
    record: dict = {"symbol": {}, "slot": {}}
    for snr_db in snr_list:
        cfg_point = replace(cfg, snr_db=snr_db)
        r = apply_channel(frame.s, resp, cfg_point.sigma2, rng)
        rx = Reception(cfg=cfg_point, r=r, channel=channel, resp=resp)

        state0 = dd_srs_state(rx, frame)
        if targets:
            for method, eqs in (
                ("fd", equalize_with_stack(rx, fd_srs_stack(rx, frame), targets)),
                ("dd_bem", equalize_with_model(rx, state0, targets)),
            ):
                for symbol_index in targets:
                    record["symbol"][(method, snr_db, symbol_index)] = bit_errors(
                        frame, eqs, [symbol_index])

        detected, _ = run_data_driven(rx, frame, state=state0)
        for symbol_index in targets:
            record["symbol"][("dd_data_driven", snr_db, symbol_index)] = bit_errors(
                frame, detected, [symbol_index])
        for slot in range(cfg_point.n_slots):
            data_symbols = cfg_point.data_symbols_in_slot(slot)
            record["slot"][(snr_db, slot)] = bit_errors(frame, detected, data_symbols)
    return record


def run_ber_frames(cfg: SimConfig, snr_list, trials: int, threads: int = 1,
                   targets: list[int] | None = None) -> tuple[list[dict], list[int]]:
    """Per-trial BER records shared by the per-symbol and per-slot reports."""
    snr_list = [float(s) for s in snr_list]
    if targets is None:
        targets = _default_targets(cfg)
    per_trial = _run_trials(_ber_trial,
                            [(cfg, snr_list, targets, t) for t in range(trials)],
                            threads)
    return per_trial, targets


def _symbol_rows(result: ExperimentResult, per_trial: list[dict], snr_list,
                 targets: list[int], trials: int, seed: int) -> None:
    multi = len(snr_list) > 1
    for snr_db in snr_list:
        for method in ("fd", "dd_bem", "dd_data_driven"):
            for symbol_index in targets:
                samples = [t["symbol"][(method, snr_db, symbol_index)] for t in per_trial]
                rates = [err / bits for err, bits in samples]
                value, half = _mean_ci(rates)
                result.rows.append(ResultRow(
                    _method_label(method, snr_db, multi), "symbol_index",
                    float(symbol_index + 1), "ber", value, half, trials, seed))


def _slot_rows(result: ExperimentResult, per_trial: list[dict], snr_list,
               n_slots: int, trials: int, seed: int) -> None:
    multi = len(snr_list) > 1
    for snr_db in snr_list:
        for slot in range(n_slots):
            rates = [t["slot"][(snr_db, slot)][0] / t["slot"][(snr_db, slot)][1]
                     for t in per_trial]
            value, half = _mean_ci(rates)
            result.rows.append(ResultRow(
                _method_label("dd_data_driven", snr_db, multi), "slot_index",
                float(slot + 1), "ber", value, half, trials, seed))


def run_ber_per_symbol(cfg: SimConfig, snr_list, trials: int, threads: int = 1,
                       out: str | Path | None = None,
                       targets: list[int] | None = None) -> ExperimentResult:
    """BER at the first data symbols after the sounded slots, for the
    frequency-domain baseline, the Doppler-basis predictor without data
    feedback, and the sequential data-driven receiver."""
    per_trial, targets = run_ber_frames(cfg, snr_list, trials, threads, targets)
    snr_list = [float(s) for s in snr_list]
    result = ExperimentResult("ber_per_symbol", cfg)
    _symbol_rows(result, per_trial, snr_list, targets, trials, cfg.seed)
    result.extras["per_trial"] = per_trial
    result.extras["targets"] = targets
    if out is not None:
        write_csv(result, out)
    return result


def run_ber_per_slot(cfg: SimConfig, snr_list, trials: int, threads: int = 1,
                     out: str | Path | None = None) -> ExperimentResult:
    """Per-slot BER of the sequential data-driven receiver across the frame."""
    per_trial, _ = run_ber_frames(cfg, snr_list, trials, threads, targets=[])
    snr_list = [float(s) for s in snr_list]
    result = ExperimentResult("ber_per_slot", cfg)
    _slot_rows(result, per_trial, snr_list, cfg.n_slots, trials, cfg.seed)
    result.extras["per_trial"] = per_trial
    if out is not None:
        write_csv(result, out)
    return result


def summarize_ber_frames(cfg: SimConfig, per_trial: list[dict], snr_list,
                         targets: list[int]) -> tuple[ExperimentResult, ExperimentResult]:
    """Build both BER reports from one shared set of trial records."""
    snr_list = [float(s) for s in snr_list]
    symbol_result = ExperimentResult("ber_per_symbol", cfg)
    _symbol_rows(symbol_result, per_trial, snr_list, targets, len(per_trial), cfg.seed)
    symbol_result.extras["per_trial"] = per_trial
    symbol_result.extras["targets"] = targets
    slot_result = ExperimentResult("ber_per_slot", cfg)
    _slot_rows(slot_result, per_trial, snr_list, cfg.n_slots, len(per_trial), cfg.seed)
    slot_result.extras["per_trial"] = per_trial
    return symbol_result, slot_result


# --- model-quality trace -------------------------------------------------------------

def _mse_trial(args) -> dict:
    cfg, trial = args
    rng = np.random.default_rng([cfg.seed, trial])
    frame = transmit_frame(cfg, rng)
    channel = sample_tdlc(cfg, rng)
    resp = materialize_response(channel, cfg.total_samples, cfg.t_s)
    r = apply_channel(frame.s, resp, cfg.sigma2, rng)
    rx = Reception(cfg=cfg, r=r, channel=channel, resp=resp)

    state0 = dd_srs_state(rx, frame)
    initial_model = state0.model
    trace: dict[float, float] = {}
    bem_trace: dict[float, float] = {}
    improvements: list[bool] = []
    pre_post: list[tuple[float, float]] = []
    pre_holder: list[float] = []

    def span_mse(model, span):
        truth = resp.slice_times(span)
        est = predict(model, span).h
        return float(np.mean(np.abs(est - truth) ** 2))

    def probe(state, symbol_index, phase):
        span = cfg.symbol_payload_start(symbol_index) + np.arange(cfg.m_o)
        if phase == "before":
            pre_holder.append(span_mse(state.model, span))
            for block in range(cfg.n):
                sub = span[block * cfg.m:(block + 1) * cfg.m]
                position = symbol_index + 1 + block / cfg.n
                trace[position] = span_mse(state.model, sub)
                bem_trace[position] = span_mse(initial_model, sub)
        else:
            post = span_mse(state.model, span)
            pre = pre_holder[-1]
            pre_post.append((pre, post))
            improvements.append(post < pre)

    run_data_driven(rx, frame, state=state0, mse_probe=probe)
    return {"trace": trace, "bem_trace": bem_trace,
            "improvements": improvements, "pre_post": pre_post}


def run_mse_vs_symbol(cfg: SimConfig, trials: int, threads: int = 1,
                      out: str | Path | None = None) -> ExperimentResult:
    """Channel MSE across the frame for the sequential receiver.

    At each detection the model in force is scored per delay block
    against the true taps (series dd_data_driven); the frozen initial fit
    is scored at the same positions (series dd_bem).  Positions on the
    axis are 1-based symbol indices plus the block fraction.  A summary
    row reports how often the post-detection refit lowered the MSE over
    the just-detected symbol."""
    per_trial = _run_trials(_mse_trial, [(cfg, t) for t in range(trials)], threads)
    result = ExperimentResult("mse_vs_symbol", cfg)
    positions = sorted(per_trial[0]["trace"])
    for series, key in (("dd_data_driven", "trace"), ("dd_bem", "bem_trace")):
        for position in positions:
            value, half = _mean_ci([t[key][position] for t in per_trial])
            result.rows.append(ResultRow(series, "symbol_position", position,
                                         "mse", value, half, trials, cfg.seed))
    fractions = [np.mean(t["improvements"]) for t in per_trial]
    value, half = _mean_ci(fractions)
    result.rows.append(ResultRow("dd_data_driven", "overall", 0.0,
                                 "update_improves_fraction", value, half,
                                 trials, cfg.seed))
    result.extras["per_trial"] = per_trial
    if out is not None:
        write_csv(result, out)
    return result
