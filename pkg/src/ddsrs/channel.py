"""Time-varying multipath channel: TDL-C sampling, tap evolution, application.

The channel is a tapped delay line at sample resolution: path p has a
complex gain, an integer delay tap, and a Doppler shift, so tap values
evolve as gain * exp(2j*pi*doppler*t*t_s).  Tap powers are normalized to
unit total power, which keeps the received signal at unit power per
sample on average and makes snr_db a per-sample SNR.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ddsrs.config import SimConfig

# TDL-C power-delay profile: normalized delays and per-tap powers in dB,
# from 3GPP TR 38.901 table 7.7.2-3.  Delays are scaled to the configured
# delay span and rounded to the sample grid when a channel is drawn.
TDLC_DELAY_NORM = np.array([
    0.0000, 0.2099, 0.2219, 0.2329, 0.2176, 0.6366, 0.6448, 0.6560,
    0.6584, 0.7935, 0.8213, 0.9336, 1.2285, 1.3083, 2.1704, 2.7105,
    4.2589, 4.6003, 5.4902, 5.6077, 6.3065, 6.6374, 7.0427, 8.6523,
])
TDLC_POWER_DB = np.array([
    -4.4, -1.2, -3.5, -5.2, -2.5, 0.0, -2.2, -3.9,
    -7.4, -7.1, -10.7, -11.1, -5.1, -6.8, -8.7, -13.2,
    -13.9, -13.9, -15.8, -17.1, -16.0, -15.7, -21.6, -22.8,
])


@dataclass
class ChannelRealization:
    """One drawn channel: per-path gains, integer delay taps, Doppler shifts."""

    gains: np.ndarray     # complex, (n_paths,)
    taps: np.ndarray      # int, (n_paths,), in [0, n_taps)
    dopplers: np.ndarray  # Hz, (n_paths,)
    n_taps: int           # delay span the taps live in


@dataclass
class DelayTimeResponse:
    """Channel tap values over a set of sample times.

    h[tap, i] is the impulse-response value at delay `tap` and absolute
    sample time times[i].
    """

    h: np.ndarray       # complex, (n_taps, n_times)
    times: np.ndarray   # int or float sample indices, (n_times,)

    def slice_times(self, times: np.ndarray) -> np.ndarray:
        """Tap values at a subset of this response's (contiguous) times."""
        times = np.asarray(times)
        start = int(self.times[0])
        idx = np.asarray(times - start, dtype=int)
        if idx.min() < 0 or idx.max() >= self.h.shape[1]:
            raise ValueError("slice_times: requested times outside the response span")
        return self.h[:, idx]


def sample_tdlc(cfg: SimConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw a Rayleigh-faded TDL-C channel on the sample grid.

    Normalized profile delays are stretched so the longest path lands on
    tap n_taps - 1, then rounded; paths that collide on a tap are merged
    with their powers summed.  Gains are complex normal with the merged
    tap powers (normalized to unit total), and each path gets an
    independent Doppler shift upsilon_max * cos(theta), theta uniform.
    """
    if cfg.n_taps < 2:
        raise ValueError("sample_tdlc: need at least two taps to place the profile")
    scale = (cfg.n_taps - 1) / TDLC_DELAY_NORM.max()
    raw_taps = np.rint(TDLC_DELAY_NORM * scale).astype(int)
    powers = 10.0 ** (TDLC_POWER_DB / 10.0)
    taps = np.unique(raw_taps)
    merged = np.zeros(taps.size)
    np.add.at(merged, np.searchsorted(taps, raw_taps), powers)
    merged /= merged.sum()

    n_paths = taps.size
    gains = np.sqrt(merged / 2.0) * (
        rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths)
    )
    dopplers = cfg.upsilon_max_hz * np.cos(rng.uniform(0.0, 2.0 * np.pi, n_paths))
    return ChannelRealization(gains=gains, taps=taps, dopplers=dopplers, n_taps=cfg.n_taps)


def materialize_response(ch: ChannelRealization, n_samples: int, t_s: float,
                         start: int = 0) -> DelayTimeResponse:
    """Evaluate the tap values over a contiguous span of sample times."""
    if n_samples <= 0:
        raise ValueError(f"materialize_response: n_samples must be positive, got {n_samples}")
    times = start + np.arange(n_samples)
    phases = np.exp(2j * np.pi * np.outer(ch.dopplers, times * t_s))
    h = np.zeros((ch.n_taps, n_samples), dtype=complex)
    np.add.at(h, ch.taps, ch.gains[:, None] * phases)
    return DelayTimeResponse(h=h, times=times)


def apply_channel(s: np.ndarray, resp: DelayTimeResponse, sigma2: float,
                  rng: np.random.Generator | None = None) -> np.ndarray:
    """Pass a sample stream through the channel and add complex noise.

    r[k] = sum_tap h[tap, k] * s[k - tap] with zeros before the stream
    start; sigma2 is the total noise variance per sample (setting it to 0
    skips the noise draw entirely).
    """
    s = np.asarray(s)
    if resp.h.shape[1] != s.size:
        raise ValueError(
            f"apply_channel: response covers {resp.h.shape[1]} samples, "
            f"stream has {s.size}"
        )
    r = np.zeros(s.size, dtype=complex)
    for tap in range(resp.h.shape[0]):
        if tap == 0:
            r += resp.h[0] * s
        else:
            r[tap:] += resp.h[tap, tap:] * s[:-tap]
    if sigma2 > 0:
        if rng is None:
            raise ValueError("apply_channel: sigma2 > 0 requires an rng")
        noise = rng.standard_normal(s.size) + 1j * rng.standard_normal(s.size)
        r += np.sqrt(sigma2 / 2.0) * noise
    return r


def dense_channel_matrix(resp: DelayTimeResponse) -> np.ndarray:
    """Full linear operator of the channel over the response span.

    Lower-banded K x K matrix with [k, k - tap] = h[tap, k]; intended for
    small-scale cross-checks of apply_channel and the per-symbol models.
    """
    k_total = resp.h.shape[1]
    out = np.zeros((k_total, k_total), dtype=complex)
    rows = np.arange(k_total)
    for tap in range(resp.h.shape[0]):
        valid = rows >= tap
        out[rows[valid], rows[valid] - tap] = resp.h[tap, valid]
    return out
