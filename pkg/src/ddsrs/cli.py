"""Command-line entry point for the Monte-Carlo experiments.

Exit codes: 0 on success, 2 for configuration problems (bad flags, bad
config file, inconsistent values), 3 for runtime failures.

Configuration precedence: command-line flags override config-file values,
which override the experiment's own defaults on top of the standard
configuration.  Passing --speed-kmh clears any Doppler-spread override so
the spread follows the requested speed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ddsrs.config import SimConfig, apply_config, read_config_file
from ddsrs.harness import (
    run_ber_per_slot,
    run_ber_per_symbol,
    run_mse_vs_symbol,
    run_nmse_vs_snr,
    run_nmse_vs_speed,
)

DEFAULT_SNR_SWEEP = [0.0, 10.0, 20.0, 30.0]
DEFAULT_SPEED_SWEEP = [50.0, 120.0, 210.0, 320.0, 450.0, 600.0, 800.0, 1000.0]

# Per-experiment defaults applied below the config file and flags.
EXPERIMENT_DEFAULTS: dict[str, dict] = {
    "nmse-vs-snr": {},
    "nmse-vs-speed": {"snr_db": 20.0},
    "ber-per-symbol": {"speed_kmh": 360.0, "upsilon_max": None},
    "ber-per-slot": {"speed_kmh": 360.0, "upsilon_max": None},
    "mse-vs-symbol": {"speed_kmh": 360.0, "upsilon_max": None},
}


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddsrs",
        description="Link-level channel estimation and equalization experiments",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name, help_text in (
        ("nmse-vs-snr", "estimation NMSE across receiver SNR"),
        ("nmse-vs-speed", "estimation NMSE across relative speed"),
        ("ber-per-symbol", "BER at the first symbols after the sounded slots"),
        ("ber-per-slot", "per-slot BER of the data-driven receiver"),
        ("mse-vs-symbol", "channel-model MSE trace across the frame"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, default=None,
                       help="key=value config file")
        p.add_argument("--snr-db", type=_float_list, default=None,
                       help="comma-separated SNR points in dB")
        p.add_argument("--speed-kmh", type=_float_list, default=None,
                       help="comma-separated speeds in km/h")
        p.add_argument("--trials", type=int, default=100,
                       help="Monte-Carlo trials (default 100)")
        p.add_argument("--seed", type=int, default=None, help="master seed")
        p.add_argument("--q", type=int, default=None, help="Doppler basis order")
        p.add_argument("--out", type=Path, default=None,
                       help="output CSV path (default results/<experiment>.csv)")
        p.add_argument("--threads", type=int, default=1, help="worker processes")
    return parser


def _build_config(args) -> SimConfig:
    file_values = read_config_file(args.config) if args.config else {}
    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.q is not None:
        overrides["q"] = args.q
    if args.speed_kmh is not None and args.experiment != "nmse-vs-speed":
        overrides["speed_kmh"] = args.speed_kmh[0]
        overrides["upsilon_max"] = None
    if args.snr_db is not None and args.experiment not in ("nmse-vs-snr", "ber-per-symbol"):
        overrides["snr_db"] = args.snr_db[0]
    base = apply_config(SimConfig(), EXPERIMENT_DEFAULTS[args.experiment], {})
    return apply_config(base, file_values, overrides)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _build_config(args)
        if args.trials < 1:
            raise ValueError(f"--trials must be positive, got {args.trials}")
        if args.threads < 1:
            raise ValueError(f"--threads must be positive, got {args.threads}")
    except ValueError as exc:
        print(f"ddsrs: configuration error: {exc}", file=sys.stderr)
        return 2
    out = args.out if args.out is not None else Path("results") / f"{args.experiment.replace('-', '_')}.csv"
    try:
        if args.experiment == "nmse-vs-snr":
            snrs = args.snr_db if args.snr_db is not None else DEFAULT_SNR_SWEEP
            result = run_nmse_vs_snr(cfg, snrs, args.trials, args.threads, out)
        elif args.experiment == "nmse-vs-speed":
            speeds = args.speed_kmh if args.speed_kmh is not None else DEFAULT_SPEED_SWEEP
            result = run_nmse_vs_speed(cfg, speeds, args.trials, args.threads, out)
        elif args.experiment == "ber-per-symbol":
            snrs = args.snr_db if args.snr_db is not None else [cfg.snr_db]
            result = run_ber_per_symbol(cfg, snrs, args.trials, args.threads, out)
        elif args.experiment == "ber-per-slot":
            result = run_ber_per_slot(cfg, [cfg.snr_db], args.trials, args.threads, out)
        else:
            result = run_mse_vs_symbol(cfg, args.trials, args.threads, out)
    except Exception as exc:  # runtime failure, keep the exit-code contract
        print(f"ddsrs: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    print(f"{result.experiment}: {len(result.rows)} rows over {args.trials} trials -> {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
