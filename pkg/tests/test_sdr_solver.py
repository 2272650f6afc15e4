"""
test_sdr_solver.py - Tests for the SDR alternating optimization

Tests cover:
- Quadratic forms of the effective channel and their first-order minorants
- Rank-one reconstruction and the zero-radar transform
- Covariance and phase subproblems on small scenes
- Gaussian randomization and full solve_case2 runs
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from metrics import is_psd, radar_constraint_terms, transmit_power, user_sinrs
from models import (
    BeamformerSolution,
    ChannelSet,
    CovariancePack,
    InfeasibleOutcome,
    InfeasibleSubproblemError,
    ReconstructionError,
    SolveStatus,
    SystemConfig,
)
from scene import (
    complex_normal,
    effective_channels,
    generate_channels,
    normalize_noise,
    random_unit_phases,
    trial_rng,
)
from sdr_solver import (
    covariance_step,
    dominant_beamformers,
    gaussian_randomization,
    normalize_and_resolve,
    phase_step,
    project_unit_modulus,
    psd_project,
    quadratic_value,
    rank_one_ratio,
    reconstruct_rank_one,
    solve_case2,
    taylor_lower_bound,
    user_quadratic,
    zero_radar_transform,
)


# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture
def cfg() -> SystemConfig:
    return SystemConfig(
        n_tx=4,
        n_rx=4,
        n_users=2,
        n_targets=2,
        target_angles=[-0.6, 0.5],
        n_irs=4,
        sinr_user_db=10.0,
        sdr={"max_ao_iters": 4},
    )


@pytest.fixture
def ncs(cfg) -> ChannelSet:
    return normalize_noise(generate_channels(cfg, trial_rng(5, 0, 0, 0)), cfg.noise_power_w)


@pytest.fixture
def single_user():
    """One user on a direct channel [1, j]; IRS paths switched off."""
    cfg = SystemConfig(
        n_tx=2,
        n_rx=2,
        n_users=1,
        n_targets=1,
        target_angles=[0.0],
        n_irs=1,
        sinr_user_db=10.0,
        sinr_radar_db=-100.0,
    )
    cs = ChannelSet(
        g_t=np.zeros((1, 2), dtype=complex),
        g_r=np.zeros((2, 1), dtype=complex),
        h_d=np.array([[1.0, 1j]]),
        h_r=np.zeros((1, 1), dtype=complex),
        beta=np.ones(1, dtype=complex),
        a_mat=np.eye(2, dtype=complex),
        target_angles=(0.0,),
    )
    return cfg, cs


def random_psd(rng: np.random.Generator, n: int, rank: int) -> np.ndarray:
    factor = complex_normal(rng, (n, rank))
    return factor @ factor.conj().T


def random_pack(rng: np.random.Generator, ncs: ChannelSet, rank: int) -> CovariancePack:
    w_cov = np.stack([random_psd(rng, ncs.n_tx, rank) for _ in range(ncs.n_users)])
    return CovariancePack(
        w_cov=w_cov,
        z_r=random_psd(rng, ncs.n_tx, 2),
        v=random_unit_phases(ncs.n_irs, rng),
    )


# =============================================================================
# QUADRATIC FORM TESTS
# =============================================================================


class TestQuadraticForms:
    """Tests for user_quadratic and taylor_lower_bound."""

    def test_user_quadratic_matches_channel_form(self, ncs):
        rng = np.random.default_rng(0)
        x = random_psd(rng, ncs.n_tx, 2)
        for k in range(ncs.n_users):
            gram, linear, constant = user_quadratic(x, ncs, k)
            for _ in range(3):
                v = complex_normal(rng, ncs.n_irs)
                h = effective_channels(ncs, v)[k]
                expected = float(np.real(h.conj() @ x @ h))
                assert quadratic_value(gram, linear, constant, v) == pytest.approx(expected, rel=1e-9)

    def test_taylor_bound_is_tight_and_below(self, ncs):
        rng = np.random.default_rng(1)
        gram, linear, constant = user_quadratic(random_psd(rng, ncs.n_tx, 1), ncs, 0)
        point = random_unit_phases(ncs.n_irs, rng)
        grad, offset = taylor_lower_bound(gram, linear, constant, point)

        at_point = float(np.real(grad.conj() @ point)) + offset
        assert at_point == pytest.approx(quadratic_value(gram, linear, constant, point))
        for _ in range(20):
            v = complex_normal(rng, ncs.n_irs)
            bound = float(np.real(grad.conj() @ v)) + offset
            assert bound <= quadratic_value(gram, linear, constant, v) + 1e-9 * abs(bound)


# =============================================================================
# MATRIX HELPER TESTS
# =============================================================================


class TestHelpers:
    def test_rank_one_ratio(self):
        a = np.array([1.0, 2j, -1.0])
        assert rank_one_ratio(np.outer(a, a.conj())) == pytest.approx(0.0, abs=1e-12)
        assert rank_one_ratio(np.eye(3)) == pytest.approx(1.0)
        assert rank_one_ratio(np.zeros((3, 3))) == 1.0
        assert rank_one_ratio(np.array([[2.0]])) == 0.0

    def test_project_unit_modulus(self):
        out = project_unit_modulus(np.array([0.0, 2j, -3.0, 0.5 + 0.5j]))
        assert np.allclose(out[:3], [1.0, 1j, -1.0])
        assert abs(out[3]) == pytest.approx(1.0)

    def test_psd_project(self):
        assert np.allclose(psd_project(np.diag([1.0, -1.0])), np.diag([1.0, 0.0]))

    def test_dominant_beamformers_rank_one(self):
        rng = np.random.default_rng(2)
        w = complex_normal(rng, (3, 2))
        pack = CovariancePack(
            w_cov=np.einsum("ik,jk->kij", w, w.conj()),
            z_r=np.zeros((3, 3), dtype=complex),
            v=np.ones(1),
        )
        beams = dominant_beamformers(pack)
        for k in range(2):
            assert np.allclose(np.outer(beams[:, k], beams[:, k].conj()), pack.w_cov[k])


# =============================================================================
# RECONSTRUCTION TESTS
# =============================================================================


class TestReconstruction:
    """Tests for reconstruct_rank_one and zero_radar_transform."""

    @pytest.mark.parametrize("rank", [1, 2, 3, 4])
    def test_rank_one_reconstruction_invariants(self, ncs, rank):
        rng = np.random.default_rng(10 + rank)
        pack = random_pack(rng, ncs, rank)

        solution, new_pack = reconstruct_rank_one(pack, ncs)

        assert np.allclose(new_pack.transmit_covariance, pack.transmit_covariance)
        assert transmit_power(new_pack) == pytest.approx(transmit_power(pack))
        assert is_psd(new_pack.z_r)
        assert np.allclose(solution.transmit_covariance, pack.transmit_covariance, atol=1e-9)
        h_all = effective_channels(ncs, pack.v)
        for k in range(ncs.n_users):
            h = h_all[k]
            before = np.real(h.conj() @ pack.w_cov[k] @ h)
            after = np.real(h.conj() @ new_pack.w_cov[k] @ h)
            assert after == pytest.approx(before)
            assert rank_one_ratio(new_pack.w_cov[k]) == pytest.approx(0.0, abs=1e-9)

    def test_reconstruction_keeps_sinr(self, ncs):
        pack = random_pack(np.random.default_rng(3), ncs, 3)
        solution, _ = reconstruct_rank_one(pack, ncs)
        assert np.allclose(user_sinrs(solution, ncs, 1.0), user_sinrs(pack, ncs, 1.0))

    def test_zero_user_covariance(self, ncs):
        pack = random_pack(np.random.default_rng(4), ncs, 2)
        w_cov = pack.w_cov.copy()
        w_cov[1] = 0.0
        with pytest.raises(ReconstructionError):
            reconstruct_rank_one(CovariancePack(w_cov=w_cov, z_r=pack.z_r, v=pack.v), ncs)

    def test_zero_radar_transform(self, ncs):
        pack = random_pack(np.random.default_rng(5), ncs, 1)

        folded = zero_radar_transform(pack, [0.25, 0.75])

        assert np.allclose(folded.z_r, 0.0)
        assert np.allclose(folded.transmit_covariance, pack.transmit_covariance)
        assert np.all(user_sinrs(folded, ncs, 1.0) >= user_sinrs(pack, ncs, 1.0) - 1e-12)

    @pytest.mark.parametrize("alphas", [[1.0], [0.5, 0.6], [1.5, -0.5]])
    def test_zero_radar_transform_rejects_weights(self, ncs, alphas):
        pack = random_pack(np.random.default_rng(6), ncs, 1)
        with pytest.raises(ValueError):
            zero_radar_transform(pack, alphas)


# =============================================================================
# SUBPROBLEM TESTS
# =============================================================================


class TestCovarianceStep:
    """Tests for covariance_step."""

    def test_single_user_closed_form(self, single_user):
        cfg, cs = single_user
        pack = covariance_step(np.zeros(1), cs, cfg, loop_interference=False)

        # tr W = r / ||h||^2 with W along h
        assert transmit_power(pack) == pytest.approx(5.0, rel=1e-6)
        assert rank_one_ratio(pack.w_cov[0]) < 1e-6
        assert np.allclose(pack.z_r, 0.0, atol=1e-6)

    def test_certified_infeasible(self, single_user):
        cfg, cs = single_user
        cfg = cfg.with_updates(sinr_radar_db=10.0)
        blind = ChannelSet(
            g_t=cs.g_t, g_r=cs.g_r, h_d=cs.h_d, h_r=cs.h_r, beta=cs.beta,
            a_mat=np.zeros((2, 2), dtype=complex), target_angles=cs.target_angles,
        )
        with pytest.raises(InfeasibleSubproblemError) as exc_info:
            covariance_step(np.zeros(1), blind, cfg, loop_interference=False)
        assert exc_info.value.stage == "covariance"

    def test_comm_only_same_power(self, cfg, ncs):
        v = random_unit_phases(ncs.n_irs, np.random.default_rng(7))
        joint = covariance_step(v, ncs, cfg)
        comm = covariance_step(v, ncs, cfg, comm_only=True)

        assert np.allclose(comm.z_r, 0.0)
        assert transmit_power(comm) == pytest.approx(transmit_power(joint), rel=1e-5)

    def test_constraints_hold(self, cfg, ncs):
        v = random_unit_phases(ncs.n_irs, np.random.default_rng(8))
        pack = covariance_step(v, ncs, cfg)

        assert np.all(user_sinrs(pack, ncs, 1.0) >= cfg.sinr_user_linear * (1 - 1e-5))
        signal, denom = radar_constraint_terms(pack, ncs, 1.0, loop_interference=True)
        assert signal >= cfg.sinr_radar_linear * denom * (1 - 1e-5)
        for w in pack.w_cov:
            assert is_psd(w)

    def test_no_radar_covariance_without_cross_correlation_limit(self, cfg):
        for seed in range(5):
            ncs = normalize_noise(generate_channels(cfg, trial_rng(seed, 0, 0, 0)), cfg.noise_power_w)
            v = random_unit_phases(ncs.n_irs, np.random.default_rng(seed))
            pack = covariance_step(v, ncs, cfg)

            assert np.real(np.trace(pack.z_r)) <= 1e-6 * transmit_power(pack)

    @pytest.mark.parametrize("loop_interference", [True, False])
    @pytest.mark.parametrize("cross_corr_limit", [math.inf, 1.0])
    def test_internal_engine_across_seeds(self, cfg, loop_interference, cross_corr_limit):
        cfg = cfg.with_updates(cross_corr_limit=cross_corr_limit)
        solved = 0
        for seed in range(6):
            ncs = normalize_noise(generate_channels(cfg, trial_rng(seed, 0, 0, 0)), cfg.noise_power_w)
            v = random_unit_phases(ncs.n_irs, np.random.default_rng(seed))
            try:
                pack = covariance_step(v, ncs, cfg, loop_interference=loop_interference)
            except InfeasibleSubproblemError:
                continue
            solved += 1

            assert np.all(user_sinrs(pack, ncs, 1.0) >= cfg.sinr_user_linear * (1 - 1e-4))
            signal, denom = radar_constraint_terms(pack, ncs, 1.0, loop_interference)
            assert signal >= cfg.sinr_radar_linear * denom * (1 - 1e-4)

        assert solved > 0


class TestPhaseStep:
    """Tests for phase_step."""

    def test_keeps_covariances_feasible(self, cfg, ncs):
        v0 = random_unit_phases(ncs.n_irs, np.random.default_rng(9))
        pack = covariance_step(v0, ncs, cfg)

        v1 = phase_step(pack, ncs, cfg, v0)
        moved = CovariancePack(w_cov=pack.w_cov, z_r=pack.z_r, v=v1)

        assert v1.shape == v0.shape
        assert np.all(np.abs(v1) <= 1.0 + 1e-12)
        assert np.all(user_sinrs(moved, ncs, 1.0) >= cfg.sinr_user_linear * (1 - 1e-5))
        signal, denom = radar_constraint_terms(moved, ncs, 1.0, loop_interference=True)
        assert signal >= cfg.sinr_radar_linear * denom * (1 - 1e-5)


class TestNormalizeAndResolve:
    def test_unit_modulus_is_kept(self, cfg, ncs):
        v = random_unit_phases(ncs.n_irs, np.random.default_rng(13))
        pack = covariance_step(v, ncs, cfg)

        resolved = normalize_and_resolve(pack, ncs, cfg)

        assert np.allclose(resolved.v, v)
        assert transmit_power(resolved) == pytest.approx(transmit_power(pack), rel=1e-5)

    def test_interior_phases_are_projected(self, cfg, ncs):
        v = random_unit_phases(ncs.n_irs, np.random.default_rng(14))
        pack = covariance_step(v, ncs, cfg)
        shrunk = CovariancePack(w_cov=pack.w_cov, z_r=pack.z_r, v=0.5 * v)

        resolved = normalize_and_resolve(shrunk, ncs, cfg)

        assert np.allclose(resolved.v, v)
        assert np.all(user_sinrs(resolved, ncs, 1.0) >= cfg.sinr_user_linear * (1 - 1e-5))


# =============================================================================
# RANDOMIZATION AND SOLVER TESTS
# =============================================================================


class TestGaussianRandomization:
    def test_returns_feasible_comm_only_beams(self, cfg, ncs):
        v = random_unit_phases(ncs.n_irs, np.random.default_rng(11))
        pack = covariance_step(v, ncs, cfg, comm_only=True)

        solution = gaussian_randomization(pack, ncs, cfg, np.random.default_rng(0), count=5)

        assert isinstance(solution, BeamformerSolution)
        assert solution.w_r.shape == (ncs.n_tx, 0)
        assert np.all(user_sinrs(solution, ncs, 1.0) >= cfg.sinr_user_linear * (1 - 1e-5))
        assert transmit_power(solution) >= transmit_power(pack) * (1 - 1e-5)


class TestSolveCase2:
    """Tests for solve_case2."""

    def test_small_joint_design(self, cfg):
        cs = generate_channels(cfg, trial_rng(5, 0, 0, 0))
        solution, report = solve_case2(cfg, cs, rng=trial_rng(5, 0, 0, 1))

        assert isinstance(solution, BeamformerSolution)
        assert report.status in (SolveStatus.CONVERGED, SolveStatus.MAX_ITERS)
        assert np.allclose(np.abs(solution.v), 1.0)
        assert report.feasibility is not None
        assert report.feasibility.max_violation <= 1e-4
        trace = report.power_trace
        assert all(b <= a * (1 + 1e-5) for a, b in zip(trace, trace[1:]))
        assert report.radar_sinr_lower_bound <= report.radar_sinr_full * (1 + 1e-9)

    def test_without_irs(self, cfg):
        cs = generate_channels(cfg, trial_rng(5, 0, 0, 0))
        solution, report = solve_case2(
            cfg, cs, rng=trial_rng(5, 0, 0, 1), loop_interference=False, irs_enabled=False
        )

        assert isinstance(solution, BeamformerSolution)
        assert report.status == SolveStatus.CONVERGED
        assert report.iters_outer == 1
        assert np.allclose(solution.v, 0.0)

    def test_comm_only_has_no_radar_beams(self, cfg):
        cs = generate_channels(cfg, trial_rng(5, 0, 0, 0))
        solution, _ = solve_case2(
            cfg.with_updates(sdr={"max_ao_iters": 2, "randomizations": 5}),
            cs,
            rng=trial_rng(5, 0, 0, 1),
            comm_only=True,
        )
        assert isinstance(solution, BeamformerSolution)
        assert solution.w_r.shape == (4, 0)

    def test_infeasible_outcome(self, cfg):
        cs = generate_channels(cfg, trial_rng(5, 0, 0, 0))
        blind = ChannelSet(
            g_t=cs.g_t, g_r=cs.g_r, h_d=cs.h_d, h_r=cs.h_r, beta=np.zeros(2, dtype=complex),
            a_mat=np.zeros_like(cs.a_mat), target_angles=cs.target_angles,
        )
        outcome, report = solve_case2(cfg, blind, rng=trial_rng(5, 0, 0, 1))

        assert isinstance(outcome, InfeasibleOutcome)
        assert outcome.stage == "covariance"
        assert report.status == SolveStatus.INFEASIBLE
