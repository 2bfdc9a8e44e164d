"""Shared fixtures and hypothesis settings for the test suite."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ddsrs.config import SimConfig

settings.register_profile(
    "suite",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow,
                           HealthCheck.function_scoped_fixture],
    derandomize=True,
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_cfg():
    """Smallest grid that exercises every code path: 4 blocks of 4 samples."""
    return SimConfig(m_o=16, n_o=4, n=4, m_cp=3, k_tc=4, n_taps=3,
                     n_slots=1, n_srs_slots=1, q=2, speed_kmh=120.0)


@pytest.fixture
def small_cfg():
    """Small frame with data and sounding symbols for loop-level tests."""
    return SimConfig(m_o=32, n_o=6, n=4, m_cp=7, k_tc=4, n_taps=4,
                     n_slots=2, n_srs_slots=1, q=4, speed_kmh=240.0,
                     snr_db=25.0)
