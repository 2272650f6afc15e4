"""
models.py - Configuration, Result and Numeric Value Models for IRS Radcom Beamforming

This module defines the shared vocabulary of the package:
- Enums: schemes, sweep variables, solver statuses
- SystemConfig: every scenario constant (antennas, users, targets, thresholds,
  geometry, noise powers, algorithm tolerances), validated with pydantic
- ChannelSet / BeamformerSolution / CovariancePack: immutable numeric values
  (frozen dataclasses holding numpy arrays)
- SolveReport / FeasibilityReport / InfeasibleOutcome: solver outputs
- SweepSpec / TrialRecord / SweepResult: experiment plumbing
- Exception hierarchy used across solvers and the CLI

Conventions:
    All dB quantities carry a `_db` / `_dbm` suffix and are converted to linear
    scale exactly once through the `*_linear` / `*_w` properties. Angles are
    radians measured from array broadside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# =============================================================================
# EXCEPTIONS
# =============================================================================


class BeamformingError(Exception):
    """Base class for all package errors."""


class ConfigError(BeamformingError, ValueError):
    """Invalid scenario, sweep specification or CLI option."""


class DegenerateDirectionError(BeamformingError):
    """A penalty dual subproblem is unbounded along the current beamformers."""

    def __init__(self, kind: str, index: Optional[int] = None, message: str = ""):
        self.kind = kind
        self.index = index
        detail = f" (index {index})" if index is not None else ""
        super().__init__(message or f"Degenerate {kind} direction{detail}")


class InfeasibleSubproblemError(BeamformingError):
    """A conic subproblem returned an infeasibility certificate."""

    def __init__(self, stage: str, message: str = ""):
        self.stage = stage
        super().__init__(message or f"Subproblem '{stage}' is infeasible")


class ReconstructionError(BeamformingError):
    """Rank-one reconstruction hit a non-positive quadratic form."""


class ConicBuildError(BeamformingError, ValueError):
    """A conic constraint could not be built (e.g. indefinite Gram matrix)."""


# =============================================================================
# ENUMS
# =============================================================================


class Scheme(str, Enum):
    """Comparison schemes evaluated by the harness."""

    PENALTY_CASE1 = "penalty_case1"
    PENALTY_CASE1_COMM_ONLY = "penalty_case1_comm_only"
    SDR_CASE1 = "sdr_case1"
    SDR_CASE2 = "sdr_case2"
    SDR_CASE2_COMM_ONLY = "sdr_case2_comm_only"
    SDR_NO_IRS = "sdr_no_irs"

    @property
    def is_penalty(self) -> bool:
        return self in (Scheme.PENALTY_CASE1, Scheme.PENALTY_CASE1_COMM_ONLY)

    @property
    def comm_only(self) -> bool:
        return self in (Scheme.PENALTY_CASE1_COMM_ONLY, Scheme.SDR_CASE2_COMM_ONLY)


class SweepVar(str, Enum):
    """Scenario parameter varied by a sweep."""

    M = "M"
    K = "K"
    R_R_TH_DB = "r_r_th_db"
    D_X = "d_x"
    EPS_TH = "eps_th"


class SolveStatus(str, Enum):
    """Terminal status of a beamforming solve."""

    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    DIVERGED = "diverged"
    INFEASIBLE = "infeasible"
    FAILED = "failed"


class Algorithm(str, Enum):
    """Algorithms traced by the convergence experiment."""

    PENALTY = "penalty"
    SDR = "sdr"


# =============================================================================
# SCENARIO CONFIGURATION
# =============================================================================


DEFAULT_USER_SINR_DB = 20.0


def db_to_linear(value_db: float) -> float:
    """Convert a power ratio in dB to linear scale."""
    return 10.0 ** (value_db / 10.0)


def dbm_to_watts(value_dbm: float) -> float:
    """Convert dBm to watts."""
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def watts_to_dbm(value_w: float) -> float:
    """Convert watts to dBm (-inf for zero power)."""
    if value_w <= 0.0:
        return -math.inf
    return 10.0 * math.log10(value_w * 1000.0)


class PenaltySettings(BaseModel):
    """Tolerances and schedule of the two-layer penalty algorithm."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    rho0: float = Field(default=100.0, gt=0, description="Initial penalty coefficient")
    step_c: float = Field(default=0.85, gt=0, lt=1, description="Penalty shrink factor")
    eps_inner: float = Field(default=1e-3, gt=0, description="Inner relative decrease tolerance")
    eps_outer: float = Field(default=1e-7, gt=0, description="Termination indicator tolerance")
    eps_bisect: float = Field(default=1e-9, gt=0, description="Dual bisection interval width")
    max_inner: int = Field(default=200, ge=1)
    max_outer: int = Field(default=300, ge=1)
    divergence_window: int = Field(default=20, ge=1)
    divergence_factor: float = Field(default=10.0, gt=1)


class SdrSettings(BaseModel):
    """Tolerances of the SDR alternating optimization."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    eps_converge: float = Field(default=1e-3, gt=0, description="AO relative decrease tolerance")
    max_ao_iters: int = Field(default=150, ge=1)
    rank_one_ratio_tol: float = Field(default=1e-6, gt=0)
    randomizations: int = Field(default=1000, ge=1, description="Gaussian randomization draws")


class SystemConfig(BaseModel):
    """
    All scenario constants for one IRS-aided radar-communication setup.

    Defaults follow the reference desk-scale setup: 8 transmit and 8 receive
    antennas, 5 users, 3 targets at (-40, 0, 40) degrees, a 50-element IRS
    placed 50 m from the base station.

    Example:
        cfg = SystemConfig(n_irs=25, sinr_user_db=15.0)
        cfg.noise_power_w  # 1e-11
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_tx: int = Field(default=8, ge=1, description="Transmit antennas N_t")
    n_rx: int = Field(default=8, ge=1, description="Receive antennas N_r")
    n_users: int = Field(default=5, ge=1, description="Communication users K")
    n_targets: int = Field(default=3, ge=1, description="Radar targets L")
    n_irs: int = Field(default=50, ge=1, description="IRS elements M")
    target_angles: List[float] = Field(
        default_factory=lambda: [math.radians(a) for a in (-40.0, 0.0, 40.0)],
        description="Target directions in radians from broadside",
    )
    sinr_user_db: List[float] = Field(
        default_factory=lambda: [20.0] * 5,
        description="Per-user SINR thresholds r_k (dB); a scalar is broadcast",
    )
    sinr_radar_db: float = Field(default=10.0, description="Radar SINR threshold r_r (dB)")
    cross_corr_limit: float = Field(
        default=math.inf, ge=0, description="Cross-correlation limit (W^2), may be +inf"
    )
    noise_power_dbm: float = Field(default=-80.0, description="Receiver noise power")
    target_rcs_power_dbm: float = Field(default=-70.0, description="Variance of beta_l")
    irs_x: float = Field(default=50.0, gt=0, description="IRS x-coordinate d_x (m)")
    bs_position: Tuple[float, float, float] = (0.0, 0.0, 3.5)
    irs_height: float = 3.5
    user_center_height: float = 1.0
    user_radius: float = Field(default=2.0, gt=0)
    path_loss_ref_db: float = -30.0
    alpha_bs_irs: float = Field(default=2.2, ge=0)
    alpha_irs_user: float = Field(default=2.2, ge=0)
    alpha_bs_user: float = Field(default=3.6, ge=0)
    rician_factor_db: float = Field(default=3.0, description="Rician factor; +inf means pure LoS")
    antenna_spacing_ratio: float = Field(default=0.5, gt=0)
    penalty: PenaltySettings = Field(default_factory=PenaltySettings)
    sdr: SdrSettings = Field(default_factory=SdrSettings)
    seed: int = Field(default=0, ge=0, lt=2**64)

    @field_validator("cross_corr_limit", mode="before")
    @classmethod
    def parse_cross_corr_limit(cls, value: Any) -> Any:
        """Accept null and the string 'inf' as an inactive constraint."""
        if value is None:
            return math.inf
        if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        return value

    @field_validator("rician_factor_db", mode="before")
    @classmethod
    def parse_rician_factor(cls, value: Any) -> Any:
        if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        return value

    @model_validator(mode="before")
    @classmethod
    def broadcast_user_thresholds(cls, data: Any) -> Any:
        """Expand a scalar sinr_user_db to one threshold per user."""
        if isinstance(data, dict):
            n_users = int(data.get("n_users", 5))
            threshold = data.get("sinr_user_db", DEFAULT_USER_SINR_DB)
            if not isinstance(threshold, (list, tuple)):
                data = dict(data)
                data["sinr_user_db"] = [float(threshold)] * n_users
        return data

    @model_validator(mode="after")
    def validate_consistency(self) -> "SystemConfig":
        """Check counts against lists and the angle domain."""
        if len(self.target_angles) != self.n_targets:
            raise ValueError(
                f"target_angles has {len(self.target_angles)} entries, n_targets={self.n_targets}"
            )
        if len(self.sinr_user_db) != self.n_users:
            raise ValueError(
                f"sinr_user_db has {len(self.sinr_user_db)} entries, n_users={self.n_users}"
            )
        for angle in self.target_angles:
            if not -math.pi / 2 < angle < math.pi / 2:
                raise ValueError(f"target angle {angle} rad outside (-pi/2, pi/2)")
        if len(set(round(a, 12) for a in self.target_angles)) != len(self.target_angles):
            raise ValueError("target_angles must be pairwise distinct")
        finite = [self.sinr_radar_db, self.noise_power_dbm, self.target_rcs_power_dbm]
        finite += list(self.sinr_user_db)
        if not all(math.isfinite(x) for x in finite):
            raise ValueError("thresholds and noise powers must be finite")
        return self

    # -- linear-scale views -------------------------------------------------

    @property
    def noise_power_w(self) -> float:
        return dbm_to_watts(self.noise_power_dbm)

    @property
    def target_rcs_power_w(self) -> float:
        return dbm_to_watts(self.target_rcs_power_dbm)

    @property
    def sinr_user_linear(self) -> np.ndarray:
        return np.array([db_to_linear(x) for x in self.sinr_user_db])

    @property
    def sinr_radar_linear(self) -> float:
        return db_to_linear(self.sinr_radar_db)

    @property
    def rician_factor(self) -> float:
        if math.isinf(self.rician_factor_db):
            return math.inf
        return db_to_linear(self.rician_factor_db)

    @property
    def xcorr_active(self) -> bool:
        return math.isfinite(self.cross_corr_limit)

    def with_updates(self, **updates: Any) -> "SystemConfig":
        """Return a re-validated copy with some fields replaced."""
        data = self.model_dump()
        data.update(updates)
        if "n_users" in updates and "sinr_user_db" not in updates:
            # keep a uniform threshold list consistent with the new user count
            data["sinr_user_db"] = self.sinr_user_db[0]
        return SystemConfig.model_validate(data)


# =============================================================================
# NUMERIC VALUES
# =============================================================================


@dataclass(frozen=True)
class ChannelSet:
    """
    One realization of every channel in the scene.

    Shapes: g_t (M, N_t), g_r (N_r, M), h_d (K, N_t), h_r (K, M), beta (L,),
    a_mat (N_r, N_t). Row k of h_d / h_r is the user-k vector.
    """

    g_t: np.ndarray
    g_r: np.ndarray
    h_d: np.ndarray
    h_r: np.ndarray
    beta: np.ndarray
    a_mat: np.ndarray
    target_angles: Tuple[float, ...]
    spacing_ratio: float = 0.5
    user_positions: Optional[np.ndarray] = None

    @property
    def n_tx(self) -> int:
        return self.g_t.shape[1]

    @property
    def n_rx(self) -> int:
        return self.g_r.shape[0]

    @property
    def n_irs(self) -> int:
        return self.g_t.shape[0]

    @property
    def n_users(self) -> int:
        return self.h_d.shape[0]


@dataclass(frozen=True)
class BeamformerSolution:
    """Communication beamformers (N_t, K), radar beamformers (N_t, N_r'), IRS vector (M,)."""

    w_c: np.ndarray
    w_r: np.ndarray
    v: np.ndarray

    @property
    def transmit_covariance(self) -> np.ndarray:
        """R = W_c W_c^H + W_r W_r^H."""
        return self.w_c @ self.w_c.conj().T + self.w_r @ self.w_r.conj().T

    def to_pack(self) -> "CovariancePack":
        """Outer-product covariances induced by the beamformers."""
        w_cov = np.einsum("ik,jk->kij", self.w_c, self.w_c.conj())
        return CovariancePack(
            w_cov=w_cov, z_r=self.w_r @ self.w_r.conj().T, v=self.v.copy()
        )


@dataclass(frozen=True)
class CovariancePack:
    """SDR variables: W_{c,k} stacked as (K, N_t, N_t), Z_r (N_t, N_t), v (M,)."""

    w_cov: np.ndarray
    z_r: np.ndarray
    v: np.ndarray

    @property
    def transmit_covariance(self) -> np.ndarray:
        """R = sum_k W_{c,k} + Z_r."""
        return self.w_cov.sum(axis=0) + self.z_r


SolutionLike = Union[BeamformerSolution, CovariancePack]


def transmit_covariance(sol: SolutionLike) -> np.ndarray:
    """Aggregate transmit covariance of either representation."""
    return sol.transmit_covariance


def user_covariances(sol: SolutionLike) -> Tuple[np.ndarray, np.ndarray]:
    """Per-user covariances (K, N_t, N_t) and the radar covariance."""
    if isinstance(sol, CovariancePack):
        return sol.w_cov, sol.z_r
    pack = sol.to_pack()
    return pack.w_cov, pack.z_r


# =============================================================================
# SOLVER OUTPUTS
# =============================================================================


class FeasibilityReport(BaseModel):
    """
    Signed constraint residuals of a candidate solution.

    Positive residuals are violations. `feasible` compares residuals
    normalized by their natural scale against `tolerance`.
    """

    user_residuals: List[float] = Field(
        ..., description="r_k (interference + noise) - signal per user (W)"
    )
    user_residuals_normalized: List[float]
    radar_residual: float = Field(..., description="Radar constraint residual (W)")
    radar_residual_normalized: float
    cross_corr_residual: float = Field(
        ..., description="cross-correlation minus limit, -inf when inactive"
    )
    unit_modulus_deviation: float = Field(default=0.0, ge=0)
    tolerance: float = Field(default=1e-6, gt=0)
    feasible: bool

    @property
    def max_violation(self) -> float:
        vals = list(self.user_residuals_normalized) + [self.radar_residual_normalized]
        return max(vals)


class InfeasibleOutcome(BaseModel):
    """A certified-infeasible design instance (an outage event)."""

    stage: str = Field(..., description="Which subproblem certified infeasibility")
    iteration: int = Field(default=0, ge=0)
    message: str = ""


class SolveReport(BaseModel):
    """Per-iteration traces, final residuals and status of one solve."""

    scheme: Optional[Scheme] = None
    status: SolveStatus
    objective_trace: List[float] = Field(default_factory=list)
    violation_trace: List[float] = Field(default_factory=list)
    power_trace: List[float] = Field(default_factory=list)
    rho_trace: List[float] = Field(default_factory=list)
    rank_ratio_trace: List[float] = Field(default_factory=list)
    phase_modulus_trace: List[float] = Field(default_factory=list)
    iters_outer: int = Field(default=0, ge=0)
    iters_inner_total: int = Field(default=0, ge=0)
    wall_time_s: float = Field(default=0.0, ge=0)
    restarts: int = Field(default=0, ge=0)
    feasibility: Optional[FeasibilityReport] = None
    radar_sinr_full: Optional[float] = None
    radar_sinr_lower_bound: Optional[float] = None
    rank_one_direct: Optional[bool] = None
    message: str = ""

    @property
    def final_power(self) -> Optional[float]:
        return self.power_trace[-1] if self.power_trace else None


# =============================================================================
# EXPERIMENT PLUMBING
# =============================================================================


class SweepSpec(BaseModel):
    """
    What to sweep, over which values, for how many trials and schemes.

    Example:
        SweepSpec(sweep_var=SweepVar.M, values=[25, 50, 75, 100], trials=20,
                  schemes=[Scheme.SDR_CASE1, Scheme.PENALTY_CASE1])
    """

    sweep_var: SweepVar
    values: List[float] = Field(..., min_length=1)
    trials: int = Field(default=20, ge=1)
    schemes: List[Scheme] = Field(..., min_length=1)

    @model_validator(mode="after")
    def validate_integer_values(self) -> "SweepSpec":
        if self.sweep_var in (SweepVar.M, SweepVar.K):
            for value in self.values:
                if value < 1 or int(value) != value:
                    raise ValueError(f"{self.sweep_var.value} values must be positive integers")
        return self

    def check_compatible(self, base: SystemConfig) -> None:
        """Penalty schemes only solve Case I (no cross-correlation constraint)."""
        penalty = [s for s in self.schemes if s.is_penalty]
        if not penalty:
            return
        if self.sweep_var == SweepVar.EPS_TH:
            if any(math.isfinite(v) for v in self.values):
                raise ConfigError("penalty schemes require eps_th = inf")
        elif base.xcorr_active:
            raise ConfigError("penalty schemes require cross_corr_limit = inf")


class TrialRecord(BaseModel):
    """One (scheme, value, trial) outcome; the sweep CSV row."""

    scheme: Scheme
    sweep_var: SweepVar
    sweep_value: float
    value_index: int = Field(..., ge=0)
    trial: int = Field(..., ge=0)
    seed: int
    power_w: Optional[float] = None
    power_dbm: Optional[float] = None
    feasible: bool
    iters: int = Field(default=0, ge=0)
    wall_ms: float = Field(default=0.0, ge=0)
    status: SolveStatus
    restarts: int = Field(default=0, ge=0)


class SweepAggregate(BaseModel):
    """Per (scheme, value) statistics recomputable from the trial rows."""

    scheme: Scheme
    sweep_value: float
    trials: int = Field(..., ge=1)
    feasible_count: int = Field(..., ge=0)
    feasibility_rate: float = Field(..., ge=0, le=1)
    mean_power_dbm: Optional[float] = None
    median_power_dbm: Optional[float] = None
    ci_half_width_db: Optional[float] = None
    mean_iters: float = 0.0


class SweepResult(BaseModel):
    """All trial rows of a sweep plus their aggregates."""

    spec: SweepSpec
    records: List[TrialRecord] = Field(default_factory=list)
    aggregates: List[SweepAggregate] = Field(default_factory=list)

    def aggregate_for(self, scheme: Scheme, value: float) -> Optional[SweepAggregate]:
        for agg in self.aggregates:
            if agg.scheme == scheme and agg.sweep_value == value:
                return agg
        return None

    @property
    def all_infeasible(self) -> bool:
        return bool(self.records) and not any(r.feasible for r in self.records)


class OutageTrial(str, Enum):
    """How one outage realization ended."""

    OUTAGE = "outage"  # certified infeasible
    SERVED = "served"
    FAILED = "failed"  # no solution and no certificate


class OutagePoint(BaseModel):
    """
    Outage estimate of one scheme at one radar threshold.

    Failed trials are reported but left out of the estimate:
    outage = infeasible / (trials - failed), None when every trial failed.
    """

    scheme: Scheme
    r_r_th_db: float
    trials: int = Field(..., ge=1)
    infeasible: int = Field(..., ge=0)
    failed: int = Field(default=0, ge=0)
    outage: Optional[float] = Field(default=None, ge=0, le=1)
    ci_low: Optional[float] = Field(default=None, ge=0, le=1)
    ci_high: Optional[float] = Field(default=None, ge=0, le=1)

    @property
    def decided(self) -> int:
        return self.trials - self.failed


class OutageCurve(BaseModel):
    points: List[OutagePoint] = Field(default_factory=list)

    def series(self, scheme: Scheme) -> List[OutagePoint]:
        return [p for p in self.points if p.scheme == scheme]


class BeampatternRecord(BaseModel):
    """Beampattern and coefficient table for one cross-correlation limit."""

    eps_th: float
    feasible: bool
    theta_deg: List[float] = Field(default_factory=list)
    power: List[float] = Field(default_factory=list)
    power_normalized_db: List[float] = Field(default_factory=list)
    coefficients: Dict[str, float] = Field(
        default_factory=dict, description="'i-j' target pair -> normalized coefficient"
    )
    cross_correlation: Optional[float] = None


class ConvergenceTrace(BaseModel):
    """Objective / violation / power per iteration for one run."""

    algorithm: Algorithm
    n_irs: int
    objective: List[float] = Field(default_factory=list)
    violation: List[float] = Field(default_factory=list)
    power_w: List[float] = Field(default_factory=list)
    status: SolveStatus = SolveStatus.CONVERGED
