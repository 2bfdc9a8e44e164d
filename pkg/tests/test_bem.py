"""Doppler-basis tap tracking: grid, fit, prediction."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ddsrs.bem import basis_matrix, doppler_grid, fit_bem, predict
from ddsrs.dd_estimator import CirStack


def test_grid_spans_doppler_interval():
    grid = doppler_grid(800.0, 8)
    assert grid.shape == (9,)
    assert grid[0] == pytest.approx(-800.0)
    assert grid[-1] == pytest.approx(800.0)
    assert grid[4] == 0.0
    assert np.allclose(np.diff(grid), 200.0)


def test_grid_static_special_case():
    assert np.all(doppler_grid(0.0, 0) == np.zeros(1))
    with pytest.raises(ValueError):
        doppler_grid(100.0, 0)


@pytest.mark.parametrize("q", [-2, 3, 7])
def test_grid_rejects_odd_or_negative_order(q):
    with pytest.raises(ValueError):
        doppler_grid(500.0, q)


def test_basis_matrix_formula():
    times = np.array([0.0, 3.0, 10.0])
    t_s = 1e-6
    phi = basis_matrix(times, 400.0, 4, t_s)
    grid = doppler_grid(400.0, 4)
    assert phi.shape == (5, 3)
    for i, nu in enumerate(grid):
        assert np.allclose(phi[i], np.exp(2j * np.pi * nu * times * t_s))
    assert np.allclose(phi[:, 0], 1.0)
    assert np.allclose(np.abs(phi), 1.0)


def _stack_from_modes(rng, grid_subset, times, t_s, n_taps):
    """Snapshots synthesized exactly from a subset of grid exponentials."""
    gains = rng.standard_normal((n_taps, len(grid_subset))) \
        + 1j * rng.standard_normal((n_taps, len(grid_subset)))
    phi = np.exp(2j * np.pi * np.outer(grid_subset, times * t_s))
    stack = CirStack(n_taps)
    stack.append(gains @ phi, times)
    return stack, gains, phi


def test_on_grid_trajectories_fit_exactly(rng):
    """Snapshots built from grid exponentials are reproduced with no error."""
    q, upsilon, t_s, n_taps = 4, 600.0, 1e-5, 3
    grid = doppler_grid(upsilon, q)
    times = np.arange(0.0, 12.0)          # more snapshots than modes
    stack, _, _ = _stack_from_modes(rng, grid, times, t_s, n_taps)
    model = fit_bem(stack, upsilon, q, t_s, rel_tol=1e-12)
    assert model.rank == q + 1
    assert not model.underdetermined
    pred = predict(model, times)
    assert np.allclose(pred.h, stack.matrix, atol=1e-8)


def test_on_grid_extrapolation_is_exact(rng):
    q, upsilon, t_s, n_taps = 4, 600.0, 1e-5, 2
    grid = doppler_grid(upsilon, q)
    gains = rng.standard_normal((n_taps, q + 1)) + 1j * rng.standard_normal((n_taps, q + 1))
    fit_times = np.arange(0.0, 15.0)
    stack = CirStack(n_taps)
    stack.append(gains @ np.exp(2j * np.pi * np.outer(grid, fit_times * t_s)), fit_times)
    model = fit_bem(stack, upsilon, q, t_s, rel_tol=1e-12)
    far_times = np.arange(100.0, 130.0, 3.0)
    truth = gains @ np.exp(2j * np.pi * np.outer(grid, far_times * t_s))
    assert np.allclose(predict(model, far_times).h, truth, atol=1e-7)


def test_static_tap_fits_with_zero_order():
    stack = CirStack(2)
    cir = np.array([[1.0 + 1j], [0.25j]])
    for t in (0.0, 10.0, 20.0):
        stack.append(cir, np.array([t]))
    model = fit_bem(stack, 0.0, 0, 1e-5)
    pred = predict(model, np.array([5.0, 100.0]))
    assert np.allclose(pred.h, np.repeat(cir, 2, axis=1), atol=1e-12)


def test_underdetermined_flag_and_bounded_rank(rng):
    q, upsilon, t_s = 8, 500.0, 1e-5
    stack = CirStack(2)
    times = np.array([0.0, 7.0, 19.0])
    h = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    stack.append(h, times)
    model = fit_bem(stack, upsilon, q, t_s, rel_tol=1e-12)
    assert model.underdetermined
    assert model.rank <= stack.n_cir


def test_tolerance_truncation_reduces_rank(rng):
    """Closely spaced snapshot times make the basis ill conditioned; the
    default cutoff keeps only the resolvable modes."""
    q, upsilon, t_s = 16, 1600.0, 6.5104166666666667e-08
    times = np.arange(40.0)               # tiny fraction of a Doppler cycle
    stack = CirStack(1)
    stack.append(np.exp(2j * np.pi * 800.0 * times * t_s)[None, :], times)
    tight = fit_bem(stack, upsilon, q, t_s, rel_tol=1e-14)
    loose = fit_bem(stack, upsilon, q, t_s)
    assert loose.rank < tight.rank


def test_fit_rejects_empty_stack():
    with pytest.raises(ValueError):
        fit_bem(CirStack(3), 500.0, 4, 1e-5)


def test_fit_reproduces_snapshots_within_window(rng):
    """Even off grid, the fitted model matches the snapshots it consumed
    to within the truncation-limited residual."""
    q, upsilon, t_s = 8, 900.0, 1e-5
    nu = 333.3                            # off-grid Doppler
    times = np.arange(0.0, 60.0, 4.0)
    stack = CirStack(1)
    stack.append(np.exp(2j * np.pi * nu * times * t_s)[None, :], times)
    model = fit_bem(stack, upsilon, q, t_s, rel_tol=1e-10)
    pred = predict(model, times)
    rel = np.linalg.norm(pred.h - stack.matrix) / np.linalg.norm(stack.matrix)
    assert rel < 1e-3


@given(st.floats(min_value=50.0, max_value=2000.0),
       st.sampled_from([2, 4, 8, 16]))
def test_grid_is_symmetric(upsilon, q):
    grid = doppler_grid(upsilon, q)
    assert np.allclose(grid, -grid[::-1])
    assert len(grid) == q + 1


def test_prediction_carries_times_through():
    stack = CirStack(1)
    stack.append(np.ones((1, 3), dtype=complex), np.array([0.0, 5.0, 9.0]))
    model = fit_bem(stack, 0.0, 0, 1e-5)
    times = np.array([1.5, 2.5])
    pred = predict(model, times)
    assert np.all(pred.times == times)
    assert pred.h.shape == (1, 2)
