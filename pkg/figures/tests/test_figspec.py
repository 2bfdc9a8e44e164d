"""Figure catalogue and spec validation."""

from pathlib import Path

import pytest

from ddsrs_figures.spec import FIGURE_IDS, FigureSpec, layout_for


def test_catalogue_covers_five_figures():
    assert FIGURE_IDS == (2, 3, 4, 5, 6)


def test_layouts_pin_scales_and_experiments():
    assert layout_for(2).experiment == "nmse_vs_snr"
    assert layout_for(3).experiment == "nmse_vs_speed"
    assert layout_for(4).experiment == "ber_per_symbol"
    assert layout_for(5).experiment == "ber_per_slot"
    assert layout_for(6).experiment == "mse_vs_symbol"
    # BER and MSE magnitudes need log axes; NMSE is already in dB
    assert [layout_for(i).log_y for i in FIGURE_IDS] == [False, False, True, True, True]
    assert layout_for(6).drop_axis_names == ("overall",)


def test_unknown_figure_id_rejected():
    with pytest.raises(ValueError):
        layout_for(7)
    with pytest.raises(ValueError):
        FigureSpec(figure=1, inputs=(Path("x.csv"),), out=Path("x.svg"))


def test_spec_requires_inputs_and_svg_out():
    with pytest.raises(ValueError):
        FigureSpec(figure=2, inputs=(), out=Path("x.svg"))
    with pytest.raises(ValueError):
        FigureSpec(figure=2, inputs=(Path("x.csv"),), out=Path("x.png"))
