"""Command-line interface: parsing, precedence, exit codes, outputs."""

import pytest

from ddsrs.cli import EXPERIMENT_DEFAULTS, _build_config, build_parser, main
from ddsrs.harness import read_csv

TINY = """\
# reduced grid for quick runs
m_o = 32
n_o = 6
n = 4
m_cp = 7
k_tc = 4
l = 4
n_slots = 2
n_srs_slots = 1
q = 4
speed_kmh = 240
snr_db = 25
seed = 3
"""


@pytest.fixture
def tiny_config_file(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY)
    return path


def test_parser_defaults():
    args = build_parser().parse_args(["nmse-vs-snr"])
    assert args.experiment == "nmse-vs-snr"
    assert args.trials == 100
    assert args.threads == 1
    assert args.config is None and args.out is None
    assert args.snr_db is None and args.speed_kmh is None


def test_parser_splits_sweep_lists():
    args = build_parser().parse_args(["nmse-vs-speed", "--speed-kmh", "50,120, 210"])
    assert args.speed_kmh == [50.0, 120.0, 210.0]


def test_parser_rejects_bad_sweep():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["nmse-vs-snr", "--snr-db", "ten,20"])


def test_parser_requires_experiment():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_experiment_defaults_applied():
    args = build_parser().parse_args(["ber-per-slot"])
    cfg = _build_config(args)
    assert cfg.speed_kmh == EXPERIMENT_DEFAULTS["ber-per-slot"]["speed_kmh"]
    assert cfg.upsilon_max is None
    args = build_parser().parse_args(["nmse-vs-speed"])
    assert _build_config(args).snr_db == 20.0


def test_flags_override_config_file(tiny_config_file):
    args = build_parser().parse_args([
        "ber-per-slot", "--config", str(tiny_config_file),
        "--seed", "99", "--q", "2", "--speed-kmh", "120",
    ])
    cfg = _build_config(args)
    assert cfg.m_o == 32                      # from file
    assert cfg.n_taps == 4                    # via the 'l' alias
    assert cfg.seed == 99                     # flag beats file
    assert cfg.q == 2
    assert cfg.speed_kmh == 120.0
    assert cfg.upsilon_max is None            # speed flag clears the override


def test_speed_flag_is_sweep_for_speed_experiment(tiny_config_file):
    args = build_parser().parse_args([
        "nmse-vs-speed", "--config", str(tiny_config_file),
        "--speed-kmh", "60,480",
    ])
    cfg = _build_config(args)
    assert cfg.speed_kmh == 240.0             # file value kept; flag is the sweep


def test_main_rejects_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("no_such_knob = 5\n")
    code = main(["nmse-vs-snr", "--config", str(bad), "--trials", "1"])
    assert code == 2
    assert "configuration error" in capsys.readouterr().err


def test_main_rejects_nonpositive_trials():
    assert main(["nmse-vs-snr", "--trials", "0"]) == 2


def test_main_rejects_inconsistent_derived_value(tmp_path):
    cfg = tmp_path / "conflict.cfg"
    cfg.write_text(TINY + "m = 5\n")          # m_o/n is 8, not 5
    assert main(["nmse-vs-snr", "--config", str(cfg), "--trials", "1"]) == 2


def test_main_runs_tiny_sweep(tiny_config_file, tmp_path, capsys):
    out = tmp_path / "nmse.csv"
    code = main([
        "nmse-vs-snr", "--config", str(tiny_config_file),
        "--snr-db", "10,30", "--trials", "2", "--out", str(out),
    ])
    assert code == 0
    assert out.exists()
    rows = read_csv(out)
    assert len(rows) == 4
    assert {r["method"] for r in rows} == {"fd", "dd"}
    assert "nmse_vs_snr" in capsys.readouterr().out


def test_main_default_output_path(tiny_config_file, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code = main([
        "ber-per-slot", "--config", str(tiny_config_file), "--trials", "1",
    ])
    assert code == 0
    assert (tmp_path / "results" / "ber_per_slot.csv").exists()


def test_main_ber_per_symbol_weights_snr_sweep(tiny_config_file, tmp_path):
    out = tmp_path / "ber.csv"
    code = main([
        "ber-per-symbol", "--config", str(tiny_config_file),
        "--snr-db", "15,25", "--trials", "1", "--out", str(out),
    ])
    assert code == 0
    rows = read_csv(out)
    assert {r["method"] for r in rows} == {
        "fd@15dB", "dd_bem@15dB", "dd_data_driven@15dB",
        "fd@25dB", "dd_bem@25dB", "dd_data_driven@25dB",
    }


def test_main_mse_trace(tiny_config_file, tmp_path):
    out = tmp_path / "mse.csv"
    code = main([
        "mse-vs-symbol", "--config", str(tiny_config_file),
        "--trials", "1", "--out", str(out),
    ])
    assert code == 0
    rows = read_csv(out)
    assert any(r["metric_name"] == "update_improves_fraction" for r in rows)


def test_main_runtime_failure_exit_code(tiny_config_file, tmp_path, capsys):
    # point the output at an unwritable location
    out = tmp_path / "file"
    out.write_text("occupied")
    code = main([
        "nmse-vs-snr", "--config", str(tiny_config_file),
        "--snr-db", "10", "--trials", "1",
        "--out", str(out / "nested.csv"),
    ])
    assert code == 3
    assert "ddsrs:" in capsys.readouterr().err
