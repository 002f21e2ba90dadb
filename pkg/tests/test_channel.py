import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridamp import (
    SystemConfig,
    apply_kronecker,
    array_response,
    draw_channel,
    draw_geometric_channel,
    make_rank_deficient_r_half,
)


def test_array_response_broadside():
    np.testing.assert_allclose(array_response(0.0, 4), 0.5 * np.ones(4), atol=1e-15)


def test_array_response_thirty_degrees():
    np.testing.assert_allclose(array_response(np.pi / 6, 2), np.array([1, 1j]) / np.sqrt(2), atol=1e-15)


def test_array_response_constant_modulus():
    a = array_response(1.234, 8)
    assert np.linalg.norm(a) == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(np.abs(a), 1 / np.sqrt(8), atol=1e-15)


@pytest.mark.parametrize("n", [0, -3, 2.5])
def test_array_response_rejects_bad_size(n):
    with pytest.raises(ValueError):
        array_response(0.3, n)


@settings(max_examples=200, deadline=None)
@given(
    phi=st.floats(-10.0, 10.0, allow_nan=False),
    n=st.integers(1, 1024),
)
def test_array_response_unit_norm_property(phi, n):
    a = array_response(phi, n)
    assert np.linalg.norm(a) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(np.abs(a), 1 / np.sqrt(n), rtol=1e-12)


def test_system_config_invariants():
    with pytest.raises(ValueError):
        SystemConfig(n_tx_antennas=1, n_rx_antennas=8, n_rf_tx=2, n_rf_rx=2, n_streams=2)
    with pytest.raises(ValueError):
        SystemConfig(n_tx_antennas=8, n_rx_antennas=8, n_rf_tx=2, n_rf_rx=1, n_streams=2)
    with pytest.raises(ValueError):
        SystemConfig(8, 8, 2, 2, 2, p_max=0.0)
    with pytest.raises(ValueError):
        SystemConfig(8, 8, 2, 2, 2, noise_var=-1.0)
    with pytest.raises(ValueError):
        SystemConfig(8, 8, 2, 2, 2, n_paths=0)


def test_single_path_is_rank_one(rng):
    cfg = SystemConfig(12, 8, 2, 2, 2, n_paths=1)
    h, paths = draw_geometric_channel(cfg, rng)
    s = np.linalg.svd(h, compute_uv=False)
    assert np.sum(s > 1e-10 * s[0]) == 1
    assert paths.n_paths == 1


def test_geometric_channel_is_deterministic(link_config):
    h1, p1 = draw_geometric_channel(link_config, np.random.default_rng(7))
    h2, p2 = draw_geometric_channel(link_config, np.random.default_rng(7))
    assert np.array_equal(h1, h2)
    assert np.array_equal(p1.gains, p2.gains)


def test_path_angles_in_range(link_config, rng):
    _, paths = draw_geometric_channel(link_config, rng)
    for angles in (paths.aoa, paths.aod):
        assert np.all(angles >= 0) and np.all(angles < 2 * np.pi)


def test_geometric_channel_mean_power(link_config):
    # E||H||_F^2 = (NM/L) * sum_l E|alpha_l|^2 * ||a_r||^2 ||a_t||^2 = NM.
    rng = np.random.default_rng(11)
    powers = [np.linalg.norm(draw_geometric_channel(link_config, rng)[0]) ** 2 for _ in range(10_000)]
    expected = link_config.n_tx_antennas * link_config.n_rx_antennas
    assert abs(np.mean(powers) - expected) / expected < 0.05


def test_channel_columns_nest_across_array_sizes():
    small = SystemConfig(5, 8, 2, 2, 2)
    large = SystemConfig(9, 8, 2, 2, 2)
    h_small, _ = draw_geometric_channel(small, np.random.default_rng(3))
    h_large, _ = draw_geometric_channel(large, np.random.default_rng(3))
    np.testing.assert_allclose(h_large[:, :5], h_small, rtol=1e-12, atol=1e-12)


def test_apply_kronecker_identity_is_exact(link_config, rng):
    h_geo, _ = draw_geometric_channel(link_config, rng)
    out = apply_kronecker(np.eye(8), h_geo, np.eye(16))
    assert np.array_equal(out, h_geo)


def test_apply_kronecker_hand_example():
    out = apply_kronecker(np.array([[1, 0], [0, 0]]), np.ones((2, 2)), np.eye(2))
    np.testing.assert_array_equal(out, [[1, 1], [0, 0]])


def test_apply_kronecker_rank_bound(rng):
    r_half = make_rank_deficient_r_half(6, 3, rng)
    h = apply_kronecker(r_half, rng.standard_normal((6, 10)), np.eye(10))
    assert np.linalg.matrix_rank(h) <= 3


def test_apply_kronecker_dimension_mismatch():
    with pytest.raises(ValueError):
        apply_kronecker(np.eye(3), np.ones((2, 2)), np.eye(2))


def test_rank_deficient_r_half_rank_and_norms(rng):
    r = make_rank_deficient_r_half(8, 2, rng)
    s = np.linalg.svd(r, compute_uv=False)
    assert np.sum(s > 1e-10) == 2
    np.testing.assert_allclose(np.linalg.norm(r, axis=1), 1.0, atol=1e-12)


def test_rank_deficient_r_half_rejects_rank():
    with pytest.raises(ValueError):
        make_rank_deficient_r_half(4, 5, np.random.default_rng(0))
    with pytest.raises(ValueError):
        make_rank_deficient_r_half(4, 0, np.random.default_rng(0))


@pytest.mark.parametrize("seed", range(100))
def test_rank_deficient_channel_rank(seed, link_config):
    ch = draw_channel(link_config, np.random.default_rng(seed), rank_deficient=True)
    s = np.linalg.svd(ch.h, compute_uv=False)
    assert np.sum(s > 1e-10 * s[0]) <= link_config.n_rf_rx
    np.testing.assert_allclose(ch.h, ch.r_half @ ch.h_geo @ ch.s_half, rtol=1e-12, atol=1e-12)


def test_full_rank_channel_is_geometric(link_config, rng):
    ch = draw_channel(link_config, rng)
    assert np.array_equal(ch.h, ch.h_geo)
    assert np.array_equal(ch.r_half, np.eye(8))
