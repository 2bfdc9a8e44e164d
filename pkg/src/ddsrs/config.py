"""Link configuration: grid geometry, channel parameters, experiment knobs.

All sizes are in samples of the baseband grid unless noted otherwise.
Symbol and slot indices are 0-based everywhere in the code; experiment
outputs that report symbol or slot positions label them 1-based and say so.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

SPEED_OF_LIGHT = 299_792_458.0  # m/s

# Sounding symbols sit at the tail of a sounding slot, mirroring an
# SRS-style allocation: always this many symbols per sounding slot.
SRS_SYMBOLS_PER_SLOT = 4

# Config-file keys that are aliases for (or consistency checks against)
# derived quantities rather than declared fields.
_DERIVED_KEYS = ("m", "m_t", "t_s")
_FIELD_ALIASES = {"l": "n_taps"}


def doppler_from_speed(speed_kmh: float, f_c: float) -> float:
    """Maximum Doppler shift in Hz for a relative speed in km/h at carrier f_c."""
    if speed_kmh < 0:
        raise ValueError(f"speed must be nonnegative, got {speed_kmh}")
    if f_c <= 0:
        raise ValueError(f"carrier frequency must be positive, got {f_c}")
    return (speed_kmh / 3.6) * f_c / SPEED_OF_LIGHT


@dataclass(frozen=True)
class SimConfig:
    m_o: int = 1024            # subcarriers per OFDM symbol
    n_o: int = 14              # OFDM symbols per slot
    n: int = 4                 # delay blocks per symbol (block length m = m_o / n)
    m_cp: int = 39             # cyclic prefix length in samples
    k_tc: int = 4              # pilot comb spacing in subcarriers
    delta_f: float = 15e3      # subcarrier spacing, Hz
    f_c: float = 4.9e9         # carrier frequency, Hz
    n_taps: int = 40           # channel delay span L in samples (taps 0..L-1)
    speed_kmh: float = 500.0   # relative speed used to derive the Doppler spread
    upsilon_max: float | None = None  # Doppler spread override, Hz (None: derive)
    q: int = 16                # Doppler basis order (even; q+1 basis functions)
    snr_db: float = 30.0       # per-sample SNR at the receiver input
    n_slots: int = 4           # slots per frame
    n_srs_slots: int = 2       # leading slots that carry sounding symbols
    qam_order: int = 4         # square QAM constellation size
    stack_window: int | None = None  # keep only this many newest CIRs (None: all)
    seed: int = 1              # master seed for reproducible experiments

    def __post_init__(self) -> None:
        for name in ("m_o", "n_o", "n", "k_tc", "n_taps", "n_slots", "qam_order"):
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        for name in ("m_cp", "n_srs_slots", "seed"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {value!r}")
        if self.m_o % self.n != 0:
            raise ValueError(f"m_o={self.m_o} is not divisible by n={self.n}")
        if self.m_o % self.k_tc != 0:
            raise ValueError(f"m_o={self.m_o} is not divisible by k_tc={self.k_tc}")
        if self.m_cp < self.n_taps - 1:
            raise ValueError(
                f"cyclic prefix m_cp={self.m_cp} shorter than delay span minus one "
                f"({self.n_taps - 1}); symbols would interfere"
            )
        if self.n_o < SRS_SYMBOLS_PER_SLOT:
            raise ValueError(f"n_o={self.n_o} cannot host {SRS_SYMBOLS_PER_SLOT} sounding symbols")
        if self.n_srs_slots > self.n_slots:
            raise ValueError(
                f"n_srs_slots={self.n_srs_slots} exceeds n_slots={self.n_slots}"
            )
        if self.q % 2 != 0 or self.q < 0:
            raise ValueError(f"q must be a nonnegative even integer, got {self.q}")
        if self.qam_order not in (4, 16, 64, 256):
            raise ValueError(f"qam_order must be a square QAM size, got {self.qam_order}")
        if self.delta_f <= 0 or self.f_c <= 0:
            raise ValueError("delta_f and f_c must be positive")
        if self.speed_kmh < 0:
            raise ValueError(f"speed_kmh must be nonnegative, got {self.speed_kmh}")
        if self.upsilon_max is not None and self.upsilon_max < 0:
            raise ValueError(f"upsilon_max must be nonnegative, got {self.upsilon_max}")
        if self.stack_window is not None and (
            not isinstance(self.stack_window, int) or self.stack_window < 1
        ):
            raise ValueError(
                f"stack_window must be a positive integer or unset, got {self.stack_window!r}"
            )

    # --- derived geometry -------------------------------------------------

    @property
    def m(self) -> int:
        """Delay-block length in samples."""
        return self.m_o // self.n

    @property
    def m_t(self) -> int:
        """Samples per OFDM symbol including the cyclic prefix."""
        return self.m_o + self.m_cp

    @property
    def t_s(self) -> float:
        """Sample period in seconds."""
        return 1.0 / (self.delta_f * self.m_o)

    @property
    def samples_per_slot(self) -> int:
        return self.m_t * self.n_o

    @property
    def n_symbols(self) -> int:
        """OFDM symbols in the frame."""
        return self.n_slots * self.n_o

    @property
    def total_samples(self) -> int:
        return self.n_symbols * self.m_t

    @property
    def n_pilot(self) -> int:
        """Pilot subcarriers per sounding symbol."""
        return self.m_o // self.k_tc

    @property
    def bits_per_symbol(self) -> int:
        """Bits carried by one QAM constellation point."""
        return self.qam_order.bit_length() - 1

    # --- derived physics --------------------------------------------------

    @property
    def upsilon_max_hz(self) -> float:
        """Doppler spread in Hz: the override if set, else derived from speed."""
        if self.upsilon_max is not None:
            return self.upsilon_max
        return doppler_from_speed(self.speed_kmh, self.f_c)

    @property
    def sigma2(self) -> float:
        """Noise variance per received sample for unit per-sample signal power."""
        return 10.0 ** (-self.snr_db / 10.0)

    # --- frame layout -----------------------------------------------------

    def slot_has_srs(self, slot: int) -> bool:
        return 0 <= slot < self.n_srs_slots

    def srs_symbols_in_slot(self, slot: int) -> list[int]:
        """Global indices of the sounding symbols in a slot (empty if none)."""
        if not self.slot_has_srs(slot):
            return []
        first = slot * self.n_o + self.n_o - SRS_SYMBOLS_PER_SLOT
        return list(range(first, first + SRS_SYMBOLS_PER_SLOT))

    def data_symbols_in_slot(self, slot: int) -> list[int]:
        """Global indices of the data symbols in a slot."""
        start = slot * self.n_o
        n_data = self.n_o - SRS_SYMBOLS_PER_SLOT if self.slot_has_srs(slot) else self.n_o
        return list(range(start, start + n_data))

    def srs_symbols(self) -> list[int]:
        return [i for s in range(self.n_slots) for i in self.srs_symbols_in_slot(s)]

    def data_symbols(self) -> list[int]:
        return [i for s in range(self.n_slots) for i in self.data_symbols_in_slot(s)]

    def symbol_start(self, symbol: int) -> int:
        """First sample (CP included) of a symbol in the serialized frame."""
        return symbol * self.m_t

    def symbol_payload_start(self, symbol: int) -> int:
        """First post-CP sample of a symbol in the serialized frame."""
        return symbol * self.m_t + self.m_cp


def default_paper_config() -> SimConfig:
    """Full-size reference configuration (1024 subcarriers, 4 slots)."""
    return SimConfig()


def default_desk_config() -> SimConfig:
    """Reduced grid for quick runs and tests.

    Keeps the subcarrier spacing, slot layout, delay span, and block count
    of the full-size configuration, so per-block dwell times and Doppler
    per symbol are unchanged; only the subcarrier count shrinks.
    """
    return SimConfig(m_o=256)


def _parse_value(field: dataclasses.Field, raw: str):
    text = raw.strip()
    if text.lower() in ("none", ""):
        return None
    if field.type in ("int", int):
        return int(text)
    if field.type in ("float", float):
        return float(text)
    if "float" in str(field.type):
        return float(text)
    if "int" in str(field.type):
        return int(text)
    return text


def read_config_file(path: str | Path) -> dict:
    """Parse a key=value config file into a field-name -> value dict.

    Lines that are blank or start with '#' are skipped.  Keys are the
    lowercase field names of SimConfig; 'l' is accepted for n_taps, and
    the derived keys m, m_t, t_s are accepted and checked for consistency
    by apply_config.
    """
    path = Path(path)
    fields = {f.name: f for f in dataclasses.fields(SimConfig)}
    out: dict = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip().lower()
        key = _FIELD_ALIASES.get(key, key)
        if key in _DERIVED_KEYS:
            out[key] = float(raw.strip())
            continue
        if key not in fields:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = _parse_value(fields[key], raw)
    return out


def apply_config(base: SimConfig | None = None, file_values: dict | None = None,
                 overrides: dict | None = None) -> SimConfig:
    """Build a SimConfig with precedence overrides > file_values > base.

    Derived keys found in file_values (m, m_t, t_s) are verified against
    the resulting configuration and rejected on mismatch.
    """
    base = base if base is not None else SimConfig()
    merged = {f.name: getattr(base, f.name) for f in dataclasses.fields(SimConfig)}
    derived: dict = {}
    for source in (file_values or {}), (overrides or {}):
        for key, value in source.items():
            if key in _DERIVED_KEYS:
                derived[key] = value
            elif value is not None or key in ("upsilon_max", "stack_window"):
                merged[key] = value
    cfg = SimConfig(**merged)
    for key, value in derived.items():
        actual = getattr(cfg, key)
        if abs(actual - value) > 1e-9 * max(1.0, abs(actual)):
            raise ValueError(
                f"config key {key}={value} conflicts with derived value {actual}"
            )
    return cfg
