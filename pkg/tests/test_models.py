"""
test_models.py - Tests for scenario, report and experiment models

Tests cover:
- SystemConfig defaults, parsing of inf / scalar thresholds, consistency checks
- dB conversions
- Numeric value types (BeamformerSolution, CovariancePack)
- SweepSpec validation and scheme compatibility
- Exception attributes
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from models import (
    BeamformerSolution,
    ConfigError,
    CovariancePack,
    DegenerateDirectionError,
    FeasibilityReport,
    InfeasibleSubproblemError,
    PenaltySettings,
    Scheme,
    SdrSettings,
    SolveReport,
    SolveStatus,
    SweepResult,
    SweepSpec,
    SweepVar,
    SystemConfig,
    TrialRecord,
    db_to_linear,
    dbm_to_watts,
    transmit_covariance,
    user_covariances,
    watts_to_dbm,
)


# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


@pytest.fixture
def solution(rng) -> BeamformerSolution:
    w_c = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    w_r = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    return BeamformerSolution(w_c=w_c, w_r=w_r, v=np.exp(1j * rng.uniform(0, 6, 3)))


# =============================================================================
# UNIT CONVERSIONS
# =============================================================================


class TestConversions:
    """Tests for dB helpers."""

    def test_db_to_linear(self):
        assert db_to_linear(10.0) == pytest.approx(10.0)
        assert db_to_linear(0.0) == pytest.approx(1.0)

    def test_dbm_to_watts(self):
        assert dbm_to_watts(30.0) == pytest.approx(1.0)
        assert dbm_to_watts(-80.0) == pytest.approx(1e-11)

    def test_watts_to_dbm_roundtrip(self):
        assert watts_to_dbm(dbm_to_watts(17.5)) == pytest.approx(17.5)

    def test_zero_watts_is_minus_inf(self):
        assert watts_to_dbm(0.0) == -math.inf


# =============================================================================
# SYSTEM CONFIG TESTS
# =============================================================================


class TestSystemConfig:
    """Tests for SystemConfig."""

    def test_default_values(self):
        cfg = SystemConfig()

        assert cfg.n_tx == 8
        assert cfg.n_rx == 8
        assert cfg.n_users == 5
        assert cfg.n_targets == 3
        assert cfg.n_irs == 50
        assert cfg.irs_x == 50.0
        assert cfg.sinr_user_db == [20.0] * 5
        assert not cfg.xcorr_active
        assert cfg.noise_power_w == pytest.approx(1e-11)
        assert [math.degrees(a) for a in cfg.target_angles] == pytest.approx([-40.0, 0.0, 40.0])

    def test_scalar_threshold_is_broadcast(self):
        cfg = SystemConfig(n_users=3, sinr_user_db=15.0)
        assert cfg.sinr_user_db == [15.0, 15.0, 15.0]
        assert cfg.sinr_user_linear == pytest.approx([db_to_linear(15.0)] * 3)

    @pytest.mark.parametrize("value", [None, "inf", "Infinity"])
    def test_cross_corr_limit_inactive_values(self, value):
        cfg = SystemConfig(cross_corr_limit=value)
        assert math.isinf(cfg.cross_corr_limit)
        assert not cfg.xcorr_active

    def test_finite_cross_corr_limit(self):
        cfg = SystemConfig(cross_corr_limit=1.0)
        assert cfg.xcorr_active

    def test_rician_factor_inf(self):
        cfg = SystemConfig(rician_factor_db="inf")
        assert math.isinf(cfg.rician_factor)

    def test_target_angle_count_mismatch(self):
        with pytest.raises(ValidationError):
            SystemConfig(n_targets=2)

    def test_threshold_list_length_mismatch(self):
        with pytest.raises(ValidationError):
            SystemConfig(n_users=2, sinr_user_db=[10.0, 10.0, 10.0])

    def test_target_angle_outside_domain(self):
        with pytest.raises(ValidationError):
            SystemConfig(n_targets=1, target_angles=[math.pi / 2])

    def test_duplicate_target_angles(self):
        with pytest.raises(ValidationError):
            SystemConfig(n_targets=2, target_angles=[0.3, 0.3])

    def test_extra_fields_forbidden(self):
        with pytest.raises(ValidationError):
            SystemConfig(n_antennas=4)

    def test_negative_cross_corr_limit(self):
        with pytest.raises(ValidationError):
            SystemConfig(cross_corr_limit=-1.0)

    def test_with_updates_revalidates(self):
        cfg = SystemConfig()
        updated = cfg.with_updates(n_irs=25, cross_corr_limit=2.0)

        assert updated.n_irs == 25
        assert updated.xcorr_active
        assert cfg.n_irs == 50

    def test_with_updates_resizes_thresholds(self):
        cfg = SystemConfig(sinr_user_db=12.0)
        updated = cfg.with_updates(n_users=3)
        assert updated.sinr_user_db == [12.0, 12.0, 12.0]

    def test_nested_settings(self):
        cfg = SystemConfig(penalty={"rho0": 10.0}, sdr={"max_ao_iters": 5})
        assert isinstance(cfg.penalty, PenaltySettings)
        assert cfg.penalty.rho0 == 10.0
        assert cfg.penalty.step_c == 0.85
        assert cfg.sdr.max_ao_iters == 5

    def test_step_c_must_shrink(self):
        with pytest.raises(ValidationError):
            PenaltySettings(step_c=1.0)

    def test_sdr_defaults(self):
        settings = SdrSettings()
        assert settings.eps_converge == 1e-3
        assert settings.randomizations == 1000


# =============================================================================
# NUMERIC VALUE TESTS
# =============================================================================


class TestNumericValues:
    """Tests for BeamformerSolution and CovariancePack."""

    def test_transmit_covariance(self, solution):
        expected = solution.w_c @ solution.w_c.conj().T + solution.w_r @ solution.w_r.conj().T
        assert np.allclose(solution.transmit_covariance, expected)

    def test_to_pack_preserves_covariance(self, solution):
        pack = solution.to_pack()

        assert pack.w_cov.shape == (2, 4, 4)
        assert np.allclose(pack.transmit_covariance, solution.transmit_covariance)
        assert np.allclose(pack.w_cov[1], np.outer(solution.w_c[:, 1], solution.w_c[:, 1].conj()))

    def test_helpers_accept_both_representations(self, solution):
        pack = solution.to_pack()
        assert np.allclose(transmit_covariance(solution), transmit_covariance(pack))
        w_cov, z_r = user_covariances(solution)
        assert np.allclose(w_cov, pack.w_cov)
        assert np.allclose(z_r, pack.z_r)

    def test_comm_only_solution_has_empty_radar_block(self):
        sol = BeamformerSolution(
            w_c=np.ones((3, 2), dtype=complex), w_r=np.zeros((3, 0), dtype=complex), v=np.ones(2)
        )
        assert np.allclose(sol.to_pack().z_r, 0.0)

    def test_pack_is_frozen(self, solution):
        pack = solution.to_pack()
        with pytest.raises(Exception):
            pack.v = np.zeros(3)  # type: ignore[misc]


# =============================================================================
# REPORT TESTS
# =============================================================================


class TestReports:
    """Tests for SolveReport and FeasibilityReport."""

    def test_final_power(self):
        report = SolveReport(status=SolveStatus.CONVERGED, power_trace=[2.0, 1.5, 1.2])
        assert report.final_power == 1.2
        assert SolveReport(status=SolveStatus.FAILED).final_power is None

    def test_max_violation(self):
        report = FeasibilityReport(
            user_residuals=[-1.0, 0.5],
            user_residuals_normalized=[-0.1, 0.2],
            radar_residual=-3.0,
            radar_residual_normalized=-0.3,
            cross_corr_residual=-math.inf,
            feasible=False,
        )
        assert report.max_violation == pytest.approx(0.2)


# =============================================================================
# SWEEP SPEC TESTS
# =============================================================================


class TestSweepSpec:
    """Tests for SweepSpec validation."""

    def test_valid_spec(self):
        spec = SweepSpec(
            sweep_var=SweepVar.M, values=[25, 50], trials=3, schemes=[Scheme.SDR_CASE1]
        )
        assert spec.trials == 3

    def test_values_required(self):
        with pytest.raises(ValidationError):
            SweepSpec(sweep_var=SweepVar.M, values=[], schemes=[Scheme.SDR_CASE1])

    def test_trials_positive(self):
        with pytest.raises(ValidationError):
            SweepSpec(sweep_var=SweepVar.M, values=[25], trials=0, schemes=[Scheme.SDR_CASE1])

    def test_integer_counts(self):
        with pytest.raises(ValidationError):
            SweepSpec(sweep_var=SweepVar.K, values=[2.5], schemes=[Scheme.SDR_CASE1])

    def test_penalty_with_finite_eps_sweep(self):
        spec = SweepSpec(
            sweep_var=SweepVar.EPS_TH, values=[1.0, math.inf], schemes=[Scheme.PENALTY_CASE1]
        )
        with pytest.raises(ConfigError):
            spec.check_compatible(SystemConfig())

    def test_penalty_with_finite_base_eps(self):
        spec = SweepSpec(sweep_var=SweepVar.M, values=[25], schemes=[Scheme.PENALTY_CASE1])
        with pytest.raises(ConfigError):
            spec.check_compatible(SystemConfig(cross_corr_limit=1.0))

    def test_sdr_schemes_always_compatible(self):
        spec = SweepSpec(sweep_var=SweepVar.EPS_TH, values=[0.1], schemes=[Scheme.SDR_CASE2])
        spec.check_compatible(SystemConfig(cross_corr_limit=1.0))


class TestSweepResult:
    """Tests for SweepResult helpers."""

    def _record(self, feasible: bool) -> TrialRecord:
        return TrialRecord(
            scheme=Scheme.SDR_CASE1,
            sweep_var=SweepVar.M,
            sweep_value=25,
            value_index=0,
            trial=0,
            seed=0,
            feasible=feasible,
            status=SolveStatus.CONVERGED if feasible else SolveStatus.INFEASIBLE,
        )

    def test_all_infeasible(self):
        spec = SweepSpec(sweep_var=SweepVar.M, values=[25], schemes=[Scheme.SDR_CASE1])
        assert SweepResult(spec=spec, records=[self._record(False)]).all_infeasible
        assert not SweepResult(spec=spec, records=[self._record(True)]).all_infeasible
        assert not SweepResult(spec=spec).all_infeasible


# =============================================================================
# ENUM AND EXCEPTION TESTS
# =============================================================================


class TestSchemes:
    def test_penalty_flags(self):
        assert Scheme.PENALTY_CASE1.is_penalty
        assert Scheme.PENALTY_CASE1_COMM_ONLY.is_penalty
        assert not Scheme.SDR_CASE1.is_penalty

    def test_comm_only_flags(self):
        assert Scheme.SDR_CASE2_COMM_ONLY.comm_only
        assert Scheme.PENALTY_CASE1_COMM_ONLY.comm_only
        assert not Scheme.SDR_NO_IRS.comm_only

    def test_values_parse(self):
        assert Scheme("sdr_no_irs") is Scheme.SDR_NO_IRS
        assert SweepVar("eps_th") is SweepVar.EPS_TH


class TestExceptions:
    def test_degenerate_direction_carries_kind(self):
        err = DegenerateDirectionError("user", 2)
        assert err.kind == "user"
        assert err.index == 2
        assert "index 2" in str(err)

    def test_infeasible_subproblem_carries_stage(self):
        err = InfeasibleSubproblemError("covariance")
        assert err.stage == "covariance"

    def test_config_error_is_value_error(self):
        assert issubclass(ConfigError, ValueError)
