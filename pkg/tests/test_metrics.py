"""
test_metrics.py - Tests for power, SINR, cross-correlation and feasibility evaluation
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from metrics import (
    beampattern,
    cross_correlation,
    cross_correlation_coefficients,
    feasibility_report,
    irs_interference_gram,
    is_psd,
    psd_sqrt,
    radar_sinr_full,
    radar_sinr_lower_bound,
    transmit_power,
    user_sinr,
    user_sinrs,
)
from models import BeamformerSolution, CovariancePack, SystemConfig
from scene import (
    complex_normal,
    effective_channels,
    generate_channels,
    irs_loop_matrix,
    random_unit_phases,
    steering_vector,
    trial_rng,
)


# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture
def cfg() -> SystemConfig:
    return SystemConfig(
        n_tx=4, n_rx=4, n_users=2, n_targets=2, target_angles=[-0.6, 0.5], n_irs=5
    )


@pytest.fixture
def channels(cfg):
    return generate_channels(cfg, trial_rng(1, 0, 0, 0))


@pytest.fixture
def solution(channels) -> BeamformerSolution:
    rng = np.random.default_rng(12)
    return BeamformerSolution(
        w_c=complex_normal(rng, (4, 2), 0.01),
        w_r=complex_normal(rng, (4, 4), 0.01),
        v=random_unit_phases(channels.n_irs, rng),
    )


def random_psd(rng: np.random.Generator, n: int, rank: int) -> np.ndarray:
    factor = complex_normal(rng, (n, rank))
    return factor @ factor.conj().T


# =============================================================================
# MATRIX HELPER TESTS
# =============================================================================


class TestMatrixHelpers:
    def test_psd_sqrt_squares_back(self):
        x = random_psd(np.random.default_rng(0), 4, 3)
        root = psd_sqrt(x)
        assert np.allclose(root @ root, x)
        assert np.allclose(root, root.conj().T)

    def test_is_psd(self):
        x = random_psd(np.random.default_rng(1), 3, 2)
        assert is_psd(x)
        assert not is_psd(-x)
        assert is_psd(np.zeros((3, 3)))


# =============================================================================
# POWER AND SINR TESTS
# =============================================================================


class TestPowerAndSinr:
    """Tests for transmit power and SINR evaluation."""

    def test_power_of_both_representations(self, solution):
        expected = np.sum(np.abs(solution.w_c) ** 2) + np.sum(np.abs(solution.w_r) ** 2)
        assert transmit_power(solution) == pytest.approx(expected)
        assert transmit_power(solution.to_pack()) == pytest.approx(expected)

    def test_user_sinr_manual(self, cfg, channels, solution):
        noise = cfg.noise_power_w
        h = effective_channels(channels, solution.v)[1]
        gains = np.abs(h.conj() @ solution.w_c) ** 2
        radar = np.sum(np.abs(h.conj() @ solution.w_r) ** 2)
        expected = gains[1] / (gains[0] + radar + noise)
        assert user_sinr(solution, channels, 1, noise) == pytest.approx(expected)

    def test_sinr_same_for_pack(self, cfg, channels, solution):
        a = user_sinrs(solution, channels, cfg.noise_power_w)
        b = user_sinrs(solution.to_pack(), channels, cfg.noise_power_w)
        assert np.allclose(a, b)

    def test_radar_sinr_without_loop(self, cfg, channels, solution):
        r = solution.transmit_covariance
        expected = np.real(np.trace(channels.a_mat @ r @ channels.a_mat.conj().T)) / cfg.noise_power_w
        value = radar_sinr_full(solution, channels, solution.v, cfg.noise_power_w, loop_interference=False)
        assert value == pytest.approx(expected)

    def test_lower_bound_never_exceeds_full(self, cfg, channels, solution):
        for noise in (cfg.noise_power_w, 1e-3, 1.0):
            full = radar_sinr_full(solution, channels, solution.v, noise)
            bound = radar_sinr_lower_bound(solution, channels, solution.v, noise)
            assert bound <= full * (1 + 1e-10)

    def test_lower_bound_tight_without_loop(self, cfg, channels, solution):
        v = np.zeros(channels.n_irs)
        sol = BeamformerSolution(w_c=solution.w_c, w_r=solution.w_r, v=v)
        full = radar_sinr_full(sol, channels, v, 1.0)
        bound = radar_sinr_lower_bound(sol, channels, v, 1.0)
        assert bound * channels.n_rx == pytest.approx(full)


# =============================================================================
# RADAR INTERFERENCE GRAM TESTS
# =============================================================================


class TestInterferenceGram:
    def test_quadratic_form_matches_trace(self, channels):
        rng = np.random.default_rng(3)
        r = random_psd(rng, channels.n_tx, 2)
        gram = irs_interference_gram(channels, r)
        for _ in range(5):
            v = complex_normal(rng, channels.n_irs)
            b = irs_loop_matrix(channels, v)
            expected = np.real(np.trace(b @ r @ b.conj().T))
            assert np.real(v.conj() @ gram @ v) == pytest.approx(expected, rel=1e-9)

    def test_gram_is_psd(self, channels):
        r = random_psd(np.random.default_rng(4), channels.n_tx, 3)
        assert is_psd(irs_interference_gram(channels, r))


# =============================================================================
# CROSS-CORRELATION AND BEAMPATTERN TESTS
# =============================================================================


class TestWaveformQuality:
    """Tests for cross-correlation and beampattern."""

    def test_single_target_has_no_cross_correlation(self, solution):
        assert cross_correlation(solution, [0.2]) == 0.0

    def test_cross_correlation_manual(self, solution):
        angles = [-0.4, 0.1, 0.6]
        r = solution.transmit_covariance
        steer = [steering_vector(t, 4) for t in angles]
        expected = sum(
            abs(steer[i].conj() @ r @ steer[j]) ** 2
            for i in range(3)
            for j in range(i + 1, 3)
        )
        assert cross_correlation(solution, angles) == pytest.approx(expected)

    def test_identity_covariance_gives_dirichlet_kernel(self):
        n = 6
        pack = CovariancePack(
            w_cov=np.zeros((1, n, n), dtype=complex), z_r=np.eye(n, dtype=complex), v=np.ones(1)
        )
        t1, t2 = -0.3, 0.45
        coefficients = cross_correlation_coefficients(pack, [t1, t2])
        delta = math.sin(t1) - math.sin(t2)
        kernel = abs(np.sum(np.exp(1j * np.pi * np.arange(n) * delta))) / n
        assert coefficients[(0, 1)] == pytest.approx(kernel)

    def test_rank_one_covariance_coefficient_is_one(self):
        a = steering_vector(0.2, 5)
        pack = CovariancePack(
            w_cov=np.outer(a, a.conj())[None], z_r=np.zeros((5, 5), dtype=complex), v=np.ones(1)
        )
        coefficients = cross_correlation_coefficients(pack, [-0.5, 0.6])
        assert coefficients[(0, 1)] == pytest.approx(1.0)

    def test_beampattern_peaks_at_steering_direction(self):
        theta = math.radians(20.0)
        a = steering_vector(theta, 8)
        pack = CovariancePack(
            w_cov=np.outer(a, a.conj())[None], z_r=np.zeros((8, 8), dtype=complex), v=np.ones(1)
        )
        grid = np.radians(np.arange(-89.0, 90.0, 1.0))
        power, normalized = beampattern(pack, grid)

        assert grid[np.argmax(power)] == pytest.approx(theta)
        assert power.max() == pytest.approx(64.0)
        assert normalized.max() == pytest.approx(1.0)

    def test_beampattern_empty_grid(self, solution):
        with pytest.raises(ValueError):
            beampattern(solution, [])


# =============================================================================
# FEASIBILITY REPORT TESTS
# =============================================================================


class TestFeasibilityReport:
    """Tests for feasibility_report."""

    def test_tiny_beams_violate_thresholds(self, cfg, channels):
        sol = BeamformerSolution(
            w_c=np.full((4, 2), 1e-9, dtype=complex),
            w_r=np.zeros((4, 4), dtype=complex),
            v=np.ones(channels.n_irs, dtype=complex),
        )
        report = feasibility_report(sol, cfg, channels)

        assert not report.feasible
        assert report.max_violation > 0
        assert report.cross_corr_residual == -math.inf

    def test_modulus_deviation(self, cfg, channels, solution):
        sol = BeamformerSolution(w_c=solution.w_c, w_r=solution.w_r, v=0.5 * solution.v)
        report = feasibility_report(sol, cfg, channels)
        assert report.unit_modulus_deviation == pytest.approx(0.5)
        assert not report.feasible

    def test_modulus_ignored_without_irs(self, cfg, channels, solution):
        sol = BeamformerSolution(w_c=solution.w_c, w_r=solution.w_r, v=np.zeros(channels.n_irs))
        report = feasibility_report(sol, cfg, channels, irs_enabled=False)
        assert report.unit_modulus_deviation == 0.0

    def test_cross_correlation_residual(self, cfg, channels, solution):
        limited = cfg.with_updates(cross_corr_limit=0.0)
        report = feasibility_report(solution, limited, channels)
        expected = cross_correlation(solution, cfg.target_angles)
        assert report.cross_corr_residual == pytest.approx(expected)
