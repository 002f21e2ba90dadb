import numpy as np
import pytest

from hybridamp import SystemConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture
def link_config():
    """Full-rank link from the reference experiment at N=16, noise for -5 dB."""
    return SystemConfig(
        n_tx_antennas=16, n_rx_antennas=8, n_rf_tx=2, n_rf_rx=2, n_streams=2,
        p_max=1.0, noise_var=10**0.5 / 2, n_paths=15,
    )


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
