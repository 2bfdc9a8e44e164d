"""Delay-Doppler channel estimation for OFDM links with comb-type pilots.

The package simulates a single-user link at baseband: OFDM frames with
sounding symbols on a frequency comb, a time-varying multipath channel,
delay-Doppler domain channel estimation at per-block time resolution,
basis-expansion tracking of the tap gains, MMSE equalization, and a
sequential loop that turns detected data symbols into virtual pilots.
"""

from ddsrs.config import SimConfig, default_desk_config, default_paper_config

__all__ = ["SimConfig", "default_paper_config", "default_desk_config"]
