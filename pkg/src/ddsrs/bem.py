"""Basis-expansion tracking of channel taps over time.

Each delay tap's trajectory is modeled as a superposition of complex
exponentials on a uniform Doppler grid spanning [-upsilon_max,
+upsilon_max].  Gains are fitted to stacked CIR snapshots by least
squares; the fitted model then evaluates (predicts) the taps at arbitrary
sample times.  Over short observation windows the exponentials are far
from orthogonal, so the fit uses the tolerance-truncated pseudoinverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ddsrs.channel import DelayTimeResponse
from ddsrs.dd_estimator import CirStack
from ddsrs.numerics import pinv


def doppler_grid(upsilon_max: float, q: int) -> np.ndarray:
    """Uniform grid of q+1 Doppler frequencies covering +-upsilon_max."""
    if q % 2 != 0 or q < 0:
        raise ValueError(f"doppler_grid: q must be nonnegative and even, got {q}")
    if q == 0:
        if upsilon_max > 0:
            raise ValueError("doppler_grid: q=0 cannot cover a nonzero Doppler spread")
        return np.zeros(1)
    return 2.0 * upsilon_max * np.arange(-q // 2, q // 2 + 1) / q


def basis_matrix(times: np.ndarray, upsilon_max: float, q: int,
                 t_s: float) -> np.ndarray:
    """Rows exp(2j*pi*nu*t*t_s) of the Doppler basis at the given sample times."""
    times = np.asarray(times)
    grid = doppler_grid(upsilon_max, q)
    return np.exp(2j * np.pi * np.outer(grid, times * t_s))


# Default singular-value cutoff for the gain fit.  Observation windows of a
# few slots resolve far fewer than q+1 exponentials, and the CIR snapshots
# carry a few percent of block-quantization and decision-feedback error, so
# weak modes hold no signal; keeping them produces huge canceling gains
# whose extrapolation beyond the fitted window diverges.  The cutoff also
# damps error feedback when detected symbols act as pilots: with a looser
# cutoff the fit chases corrupted snapshots and the frame tail collapses.
FIT_REL_TOL = 2e-2


@dataclass(frozen=True)
class BemModel:
    """Fitted Doppler-basis gains for every delay tap."""

    gains: np.ndarray       # (n_taps, q+1) complex
    upsilon_max: float
    q: int
    t_s: float
    n_fit: int              # CIR snapshots the fit consumed
    rank: int               # effective rank of the basis over the fit window

    @property
    def underdetermined(self) -> bool:
        return self.n_fit < self.q + 1


def fit_bem(stack: CirStack, upsilon_max: float, q: int, t_s: float,
            rel_tol: float = FIT_REL_TOL) -> BemModel:
    """Least-squares Doppler-basis fit to the stacked CIR snapshots."""
    if stack.n_cir == 0:
        raise ValueError("fit_bem: empty CIR stack")
    phi = basis_matrix(stack.times, upsilon_max, q, t_s)
    phi_pinv, rank = pinv(phi, rel_tol)
    gains = stack.matrix @ phi_pinv
    return BemModel(gains=gains, upsilon_max=upsilon_max, q=q, t_s=t_s,
                    n_fit=stack.n_cir, rank=rank)


def predict(model: BemModel, times: np.ndarray) -> DelayTimeResponse:
    """Evaluate the fitted tap trajectories at the given sample times."""
    times = np.asarray(times)
    phi = basis_matrix(times, model.upsilon_max, model.q, model.t_s)
    return DelayTimeResponse(h=model.gains @ phi, times=times)
