"""
test_scene.py - Tests for geometry, random streams and channel generation
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from metrics import user_sinrs
from models import BeamformerSolution, ChannelSet, SystemConfig
from scene import (
    cascaded_channel,
    complex_normal,
    effective_channels,
    effective_user_channel,
    generate_channels,
    irs_loop_matrix,
    normalize_noise,
    path_loss,
    random_unit_phases,
    rician,
    steering_vector,
    target_matrix,
    trial_rng,
    with_target_gains,
)


# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture
def cfg() -> SystemConfig:
    return SystemConfig(
        n_tx=4, n_rx=3, n_users=2, n_targets=2, target_angles=[-0.5, 0.4], n_irs=6
    )


@pytest.fixture
def channels(cfg):
    return generate_channels(cfg, trial_rng(3, 0, 0, 0))


# =============================================================================
# RANDOM STREAM TESTS
# =============================================================================


class TestTrialRng:
    """Tests for coordinate-addressed generators."""

    def test_same_coordinate_same_stream(self):
        a = trial_rng(5, 1, 2, 0).standard_normal(8)
        b = trial_rng(5, 1, 2, 0).standard_normal(8)
        assert np.array_equal(a, b)

    def test_different_coordinates_differ(self):
        a = trial_rng(5, 1, 2, 0).standard_normal(8)
        b = trial_rng(5, 1, 2, 1).standard_normal(8)
        c = trial_rng(6, 1, 2, 0).standard_normal(8)
        assert not np.allclose(a, b)
        assert not np.allclose(a, c)

    def test_complex_normal_variance(self):
        samples = complex_normal(np.random.default_rng(0), 200_000, variance=4.0)
        assert np.mean(np.abs(samples) ** 2) == pytest.approx(4.0, rel=0.02)

    def test_random_unit_phases(self):
        v = random_unit_phases(10, np.random.default_rng(1))
        assert np.allclose(np.abs(v), 1.0)


# =============================================================================
# ARRAY RESPONSE TESTS
# =============================================================================


class TestSteering:
    """Tests for ULA steering vectors and path loss."""

    def test_unit_modulus_entries(self):
        a = steering_vector(0.3, 8)
        assert a.shape == (8,)
        assert np.allclose(np.abs(a), 1.0)
        assert a[0] == pytest.approx(1.0)

    def test_broadside_is_all_ones(self):
        assert np.allclose(steering_vector(0.0, 5), 1.0)

    def test_phase_progression(self):
        theta = 0.7
        a = steering_vector(theta, 4)
        expected = np.exp(-1j * np.pi * np.arange(4) * math.sin(theta))
        assert np.allclose(a, expected)

    def test_invalid_size(self):
        with pytest.raises(ValueError):
            steering_vector(0.1, 0)

    def test_path_loss_reference(self):
        assert path_loss(1.0, 2.2) == pytest.approx(1e-3)
        assert path_loss(10.0, 2.0) == pytest.approx(1e-5)

    def test_path_loss_invalid_distance(self):
        with pytest.raises(ValueError):
            path_loss(0.0, 2.0)

    def test_rician_pure_los(self):
        los = np.ones((2, 3), dtype=complex)
        out = rician(los, 4.0, math.inf, np.random.default_rng(0))
        assert np.allclose(out, 2.0 * los)

    def test_target_matrix_single_target(self):
        a = target_matrix(np.array([2.0 + 0j]), [0.2], 3, 4)
        expected = 2.0 * np.outer(steering_vector(0.2, 3), steering_vector(0.2, 4).conj())
        assert np.allclose(a, expected)


# =============================================================================
# CHANNEL GENERATION TESTS
# =============================================================================


class TestGenerateChannels:
    """Tests for generate_channels."""

    def test_shapes(self, cfg, channels):
        assert channels.g_t.shape == (6, 4)
        assert channels.g_r.shape == (3, 6)
        assert channels.h_d.shape == (2, 4)
        assert channels.h_r.shape == (2, 6)
        assert channels.beta.shape == (2,)
        assert channels.a_mat.shape == (3, 4)
        assert channels.n_tx == 4 and channels.n_rx == 3
        assert channels.n_irs == 6 and channels.n_users == 2

    def test_deterministic(self, cfg):
        a = generate_channels(cfg, trial_rng(3, 0, 0, 0))
        b = generate_channels(cfg, trial_rng(3, 0, 0, 0))
        assert np.array_equal(a.h_d, b.h_d)
        assert np.array_equal(a.g_t, b.g_t)
        assert np.array_equal(a.a_mat, b.a_mat)

    def test_users_inside_disc(self, cfg, channels):
        offsets = channels.user_positions[:, :2] - np.array([cfg.irs_x, 0.0])
        assert np.all(np.linalg.norm(offsets, axis=1) <= cfg.user_radius + 1e-12)

    def test_target_matrix_consistent(self, cfg, channels):
        expected = target_matrix(channels.beta, cfg.target_angles, cfg.n_rx, cfg.n_tx)
        assert np.allclose(channels.a_mat, expected)

    def test_with_target_gains(self, cfg, channels):
        beta = np.full(2, 0.5 + 0j)
        updated = with_target_gains(channels, beta)
        assert np.allclose(updated.beta, beta)
        assert np.allclose(updated.a_mat, target_matrix(beta, cfg.target_angles, 3, 4))
        assert np.array_equal(updated.h_d, channels.h_d)


# =============================================================================
# DERIVED CHANNEL TESTS
# =============================================================================


class TestDerivedChannels:
    """Tests for effective channels and the IRS loop matrix."""

    def test_effective_channel_definition(self, channels):
        v = random_unit_phases(channels.n_irs, np.random.default_rng(2))
        h_all = effective_channels(channels, v)
        for k in range(channels.n_users):
            # h_k^H = h_d^H + v^T Phi_k
            expected = channels.h_d[k].conj() + v @ cascaded_channel(channels, k)
            assert np.allclose(h_all[k].conj(), expected)

    def test_zero_irs_vector(self, channels):
        h_all = effective_channels(channels, np.zeros(channels.n_irs))
        assert np.allclose(h_all, channels.h_d)

    @pytest.mark.parametrize("phi", [0.0, 0.4, math.pi / 2, 2.5])
    def test_scalar_effective_channel(self, phi):
        ones = np.ones((1, 1), dtype=complex)
        cs = ChannelSet(
            g_t=ones, g_r=ones, h_d=ones, h_r=ones, beta=np.ones(1, dtype=complex),
            a_mat=ones, target_angles=(0.0,),
        )
        h = effective_user_channel(cs, np.array([np.exp(1j * phi)]), 0)
        # h^H = 1 + v
        assert h.shape == (1,)
        assert h[0] == pytest.approx(1.0 + np.exp(-1j * phi))

    def test_effective_user_channel_index(self, channels):
        with pytest.raises(IndexError):
            effective_user_channel(channels, np.ones(channels.n_irs), 5)

    def test_irs_loop_matrix(self, channels):
        v = random_unit_phases(channels.n_irs, np.random.default_rng(4))
        expected = channels.g_r @ np.diag(v) @ channels.g_t
        assert np.allclose(irs_loop_matrix(channels, v), expected)

    def test_normalize_noise_preserves_sinr(self, cfg, channels):
        rng = np.random.default_rng(9)
        sol = BeamformerSolution(
            w_c=complex_normal(rng, (4, 2)),
            w_r=complex_normal(rng, (4, 4)),
            v=random_unit_phases(6, rng),
        )
        physical = user_sinrs(sol, channels, cfg.noise_power_w)
        normalized = user_sinrs(sol, normalize_noise(channels, cfg.noise_power_w), 1.0)
        assert np.allclose(physical, normalized, rtol=1e-10)

    def test_normalize_noise_keeps_transmit_side(self, cfg, channels):
        ncs = normalize_noise(channels, cfg.noise_power_w)
        assert np.array_equal(ncs.g_t, channels.g_t)
        assert np.allclose(ncs.a_mat, channels.a_mat / math.sqrt(cfg.noise_power_w))
