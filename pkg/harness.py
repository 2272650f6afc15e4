"""
harness.py - Monte-Carlo Experiment Runner

Drives the comparison schemes over seeded channel realizations:
- run_sweep(): power / feasibility / iterations versus M, K, r_r, d_x or eps
- run_outage(): fraction of certified-infeasible realizations per radar threshold
- run_beampattern(): transmit beampattern and cross-correlation coefficients per eps
- run_convergence(): per-iteration traces of either algorithm

Trials are independent tasks on a bounded thread pool; results are merged
in (value, trial) order so outputs do not depend on the pool size. Every
scheme of a sweep sees the same ChannelSet for a given (value, trial).

Seeding:
    channels   trial_rng(seed, value_index, trial, 0)
    solver     trial_rng(seed, value_index, trial, 1 + restart)
"""

from __future__ import annotations

import asyncio
import csv
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from conic_core import BaseConicBackend
from metrics import beampattern, cross_correlation, cross_correlation_coefficients, transmit_power
from models import (
    Algorithm,
    BeamformerSolution,
    BeampatternRecord,
    ChannelSet,
    ConfigError,
    ConvergenceTrace,
    DegenerateDirectionError,
    InfeasibleOutcome,
    OutageCurve,
    OutagePoint,
    OutageTrial,
    Scheme,
    SolveReport,
    SolveStatus,
    SweepAggregate,
    SweepResult,
    SweepSpec,
    SweepVar,
    SystemConfig,
    TrialRecord,
    watts_to_dbm,
)
from penalty_solver import solve_case1
from scene import generate_channels, trial_rng, with_target_gains
from sdr_solver import solve_case2
from settings import load_config

logger = logging.getLogger(__name__)

SolveOutcome = Tuple[Union[BeamformerSolution, InfeasibleOutcome, None], SolveReport]


# =============================================================================
# HARNESS CONFIGURATION
# =============================================================================


@dataclass
class HarnessConfig:
    """Runtime settings of the experiment runner."""

    threads: Optional[int] = None
    sweep_trials: int = 20
    outage_trials: int = 200
    max_restarts: int = 3
    out_dir: Path = Path("results")
    beampattern_eps: List[float] = field(default_factory=lambda: [0.1, 10.0, math.inf])
    grid_step_deg: float = 1.0
    record_timing: bool = True

    @classmethod
    def from_config(cls, config: Optional[Dict[str, Any]] = None) -> "HarnessConfig":
        """Create config from config.yaml."""
        if config is None:
            config = load_config()

        harness_config = config.get("harness", {})
        return cls(
            threads=harness_config.get("threads"),
            sweep_trials=harness_config.get("sweep_trials", 20),
            outage_trials=harness_config.get("outage_trials", 200),
            max_restarts=harness_config.get("max_restarts", 3),
            out_dir=Path(harness_config.get("out_dir", "results")),
            beampattern_eps=[float(e) for e in harness_config.get("beampattern_eps", [0.1, 10.0, math.inf])],
            grid_step_deg=harness_config.get("grid_step_deg", 1.0),
        )

    @property
    def workers(self) -> int:
        return self.threads or os.cpu_count() or 1


# =============================================================================
# SCHEME DISPATCH
# =============================================================================


def solve_scheme(
    scheme: Scheme,
    cfg: SystemConfig,
    cs: ChannelSet,
    rng: np.random.Generator,
    backend: Optional[BaseConicBackend] = None,
) -> SolveOutcome:
    """
    Run one comparison scheme.

    penalty_case1[_comm_only]   two-layer penalty algorithm
    sdr_case1                   SDR alternating optimization, loop cancelled
    sdr_case2[_comm_only]       SDR alternating optimization with loop interference
    sdr_no_irs                  v = 0, single covariance solve, exact radar SINR
    """
    if scheme.is_penalty:
        solution, report = solve_case1(cfg, cs, rng, comm_only=scheme.comm_only)
    elif scheme == Scheme.SDR_CASE1:
        solution, report = solve_case2(cfg, cs, rng, loop_interference=False, backend=backend)
    elif scheme == Scheme.SDR_NO_IRS:
        solution, report = solve_case2(
            cfg, cs, rng, loop_interference=False, irs_enabled=False, backend=backend
        )
    else:
        solution, report = solve_case2(
            cfg, cs, rng, comm_only=scheme.comm_only, backend=backend
        )
    return solution, report.model_copy(update={"scheme": scheme})


def solve_with_restarts(
    scheme: Scheme,
    cfg: SystemConfig,
    cs: ChannelSet,
    seed_path: Sequence[int],
    max_restarts: int = 3,
    backend: Optional[BaseConicBackend] = None,
) -> SolveOutcome:
    """
    solve_scheme with a fresh solver stream after a degenerate dual problem.

    Restart r draws from trial_rng(seed, *seed_path, 1 + r). Any other
    failure is returned as a FAILED report instead of raised.
    """
    for restart in range(max_restarts + 1):
        rng = trial_rng(cfg.seed, *seed_path, 1 + restart)
        try:
            solution, report = solve_scheme(scheme, cfg, cs, rng, backend)
            return solution, report.model_copy(update={"restarts": restart})
        except DegenerateDirectionError as e:
            if restart < max_restarts:
                logger.warning(
                    f"Restart {restart + 1}/{max_restarts} of {scheme.value} "
                    f"at {tuple(seed_path)} due to: {e}"
                )
            else:
                logger.error(f"All {max_restarts} restarts of {scheme.value} failed")
                return None, SolveReport(
                    scheme=scheme, status=SolveStatus.FAILED, restarts=restart, message=str(e)
                )
        except Exception as e:
            logger.error(f"{scheme.value} at {tuple(seed_path)} failed: {e}")
            return None, SolveReport(
                scheme=scheme, status=SolveStatus.FAILED, restarts=restart, message=str(e)
            )
    raise AssertionError("unreachable")


def config_for_value(base: SystemConfig, sweep_var: SweepVar, value: float) -> SystemConfig:
    """Scenario with the swept parameter set to value."""
    if sweep_var == SweepVar.M:
        return base.with_updates(n_irs=int(value))
    if sweep_var == SweepVar.K:
        return base.with_updates(n_users=int(value))
    if sweep_var == SweepVar.R_R_TH_DB:
        return base.with_updates(sinr_radar_db=float(value))
    if sweep_var == SweepVar.D_X:
        return base.with_updates(irs_x=float(value))
    return base.with_updates(cross_corr_limit=float(value))


def _is_feasible(solution: Any, report: SolveReport) -> bool:
    return (
        isinstance(solution, BeamformerSolution)
        and report.feasibility is not None
        and report.feasibility.feasible
    )


# =============================================================================
# AGGREGATION
# =============================================================================


def mean_confidence_half_width(values: Sequence[float], confidence: float = 0.95) -> Optional[float]:
    """Student-t half width of the mean; None for fewer than two values."""
    if len(values) < 2:
        return None
    sem = stats.sem(values)
    if not np.isfinite(sem) or sem == 0.0:
        return 0.0
    return float(sem * stats.t.ppf(0.5 + confidence / 2.0, len(values) - 1))


def outage_interval(infeasible: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval of an outage fraction."""
    ci = stats.binomtest(infeasible, trials).proportion_ci(
        confidence_level=confidence, method="wilson"
    )
    return float(max(ci.low, 0.0)), float(min(ci.high, 1.0))


def aggregate_records(records: Sequence[TrialRecord], spec: SweepSpec) -> List[SweepAggregate]:
    """Per (scheme, value) statistics; infeasible trials only count toward the rate."""
    aggregates = []
    for scheme in spec.schemes:
        for index, value in enumerate(spec.values):
            rows = [r for r in records if r.scheme == scheme and r.value_index == index]
            if not rows:
                continue
            powers = [r.power_dbm for r in rows if r.feasible and r.power_dbm is not None]
            aggregates.append(
                SweepAggregate(
                    scheme=scheme,
                    sweep_value=value,
                    trials=len(rows),
                    feasible_count=len(powers),
                    feasibility_rate=len(powers) / len(rows),
                    mean_power_dbm=float(np.mean(powers)) if powers else None,
                    median_power_dbm=float(np.median(powers)) if powers else None,
                    ci_half_width_db=mean_confidence_half_width(powers),
                    mean_iters=float(np.mean([r.iters for r in rows])),
                )
            )
    return aggregates


# =============================================================================
# EXPERIMENT RUNNER
# =============================================================================


class ExperimentRunner:
    """
    Schedules independent trials on a thread pool.

    Example:
        runner = ExperimentRunner(HarnessConfig(threads=4))
        result = await runner.run_sweep(spec, cfg)
        write_sweep_csv(result, Path("results/sweep.csv"))
    """

    def __init__(
        self,
        config: Optional[HarnessConfig] = None,
        backend: Optional[BaseConicBackend] = None,
    ):
        self.config = config or HarnessConfig.from_config()
        self.backend = backend
        self.logger = logging.getLogger(f"{__name__}.ExperimentRunner")

    async def _map(self, fn: Callable[..., Any], tasks: Sequence[Tuple[Any, ...]]) -> List[Any]:
        """Run fn(*task) for every task on the pool; results in task order."""
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            futures = [loop.run_in_executor(pool, fn, *task) for task in tasks]
            return list(await asyncio.gather(*futures))

    # -- sweep --------------------------------------------------------------

    def _sweep_trial(
        self, spec: SweepSpec, base: SystemConfig, value_index: int, trial: int
    ) -> List[TrialRecord]:
        value = spec.values[value_index]
        cfg = config_for_value(base, spec.sweep_var, value)
        cs = generate_channels(cfg, trial_rng(cfg.seed, value_index, trial, 0))
        rows = []
        for scheme in spec.schemes:
            start = time.perf_counter()
            solution, report = solve_with_restarts(
                scheme, cfg, cs, (value_index, trial), self.config.max_restarts, self.backend
            )
            wall_ms = (time.perf_counter() - start) * 1000.0 if self.config.record_timing else 0.0
            feasible = _is_feasible(solution, report)
            power = transmit_power(solution) if isinstance(solution, BeamformerSolution) else None
            rows.append(
                TrialRecord(
                    scheme=scheme,
                    sweep_var=spec.sweep_var,
                    sweep_value=value,
                    value_index=value_index,
                    trial=trial,
                    seed=cfg.seed,
                    power_w=power,
                    power_dbm=watts_to_dbm(power) if power is not None else None,
                    feasible=feasible,
                    iters=report.iters_outer,
                    wall_ms=wall_ms,
                    status=report.status,
                    restarts=report.restarts,
                )
            )
        return rows

    async def run_sweep(self, spec: SweepSpec, base: SystemConfig) -> SweepResult:
        """
        Every (value, trial) draws one ChannelSet and runs every scheme on it.

        Raises:
            ConfigError: penalty schemes combined with a finite eps
        """
        spec.check_compatible(base)
        tasks = [
            (spec, base, value_index, trial)
            for value_index in range(len(spec.values))
            for trial in range(spec.trials)
        ]
        self.logger.info(
            f"Sweep {spec.sweep_var.value} over {spec.values}: {spec.trials} trials, "
            f"schemes={[s.value for s in spec.schemes]}, workers={self.config.workers}"
        )
        batches = await self._map(self._sweep_trial, tasks)
        records = [row for batch in batches for row in batch]
        result = SweepResult(spec=spec, records=records, aggregates=aggregate_records(records, spec))
        self.logger.info(
            f"Sweep finished: {sum(r.feasible for r in records)}/{len(records)} feasible trials"
        )
        return result

    # -- outage -------------------------------------------------------------

    def _outage_trial(
        self, cfg: SystemConfig, scheme: Scheme, value_index: int, trial: int
    ) -> OutageTrial:
        cs = generate_channels(cfg, trial_rng(cfg.seed, value_index, trial, 0))
        solution, report = solve_with_restarts(
            scheme, cfg, cs, (value_index, trial), self.config.max_restarts, self.backend
        )
        if isinstance(solution, InfeasibleOutcome):
            return OutageTrial.OUTAGE
        if report.status == SolveStatus.FAILED:
            return OutageTrial.FAILED
        return OutageTrial.SERVED

    async def run_outage(
        self,
        cfg: SystemConfig,
        r_r_values_db: Sequence[float],
        trials: Optional[int] = None,
        schemes: Sequence[Scheme] = (Scheme.SDR_CASE2, Scheme.SDR_CASE2_COMM_ONLY),
    ) -> OutageCurve:
        """
        Outage per radar threshold: the share of realizations certified infeasible.

        Trials that fail without a certificate are counted in OutagePoint.failed
        and excluded from the estimate and its interval.

        Raises:
            ConfigError: cross_corr_limit is infinite, or a penalty scheme is requested
        """
        if not cfg.xcorr_active:
            raise ConfigError("outage experiments need a finite cross_corr_limit")
        if any(s.is_penalty for s in schemes):
            raise ConfigError("outage experiments use the SDR schemes only")
        trials = trials or self.config.outage_trials

        points = []
        for scheme in schemes:
            tasks = [
                (cfg.with_updates(sinr_radar_db=float(value)), scheme, index, trial)
                for index, value in enumerate(r_r_values_db)
                for trial in range(trials)
            ]
            outcomes = await self._map(self._outage_trial, tasks)
            for index, value in enumerate(r_r_values_db):
                chunk = outcomes[index * trials : (index + 1) * trials]
                infeasible = chunk.count(OutageTrial.OUTAGE)
                failed = chunk.count(OutageTrial.FAILED)
                decided = trials - failed
                outage, low, high = None, None, None
                if decided:
                    outage = infeasible / decided
                    low, high = outage_interval(infeasible, decided)
                points.append(
                    OutagePoint(
                        scheme=scheme,
                        r_r_th_db=float(value),
                        trials=trials,
                        infeasible=infeasible,
                        failed=failed,
                        outage=outage,
                        ci_low=low,
                        ci_high=high,
                    )
                )
                if failed:
                    self.logger.warning(
                        f"Outage {scheme.value} r_r={value} dB: {failed}/{trials} trials "
                        f"failed without a certificate and are excluded"
                    )
                self.logger.info(
                    f"Outage {scheme.value} r_r={value} dB: {infeasible}/{decided}"
                )
        return OutageCurve(points=points)

    # -- beampattern ----------------------------------------------------------

    def _beampattern_for(self, cfg: SystemConfig, eps: float) -> BeampatternRecord:
        cfg_eps = cfg.with_updates(cross_corr_limit=eps)
        cs = generate_channels(cfg_eps, trial_rng(cfg.seed, 0, 0, 0))
        sigma_beta = math.sqrt(cfg.target_rcs_power_w)
        cs = with_target_gains(cs, np.full(cfg.n_targets, sigma_beta, dtype=complex))
        solution, report = solve_with_restarts(
            Scheme.SDR_CASE2, cfg_eps, cs, (0, 0), self.config.max_restarts, self.backend
        )
        if not isinstance(solution, BeamformerSolution):
            self.logger.info(f"Beampattern eps={eps}: no solution ({report.status.value})")
            return BeampatternRecord(eps_th=eps, feasible=False)

        step = self.config.grid_step_deg
        grid_deg = np.arange(-90.0 + step, 90.0, step)
        power, normalized = beampattern(solution, np.radians(grid_deg), cfg.antenna_spacing_ratio)
        coefficients = cross_correlation_coefficients(
            solution, cfg.target_angles, cfg.antenna_spacing_ratio
        )
        return BeampatternRecord(
            eps_th=eps,
            feasible=_is_feasible(solution, report),
            theta_deg=[float(t) for t in grid_deg],
            power=[float(p) for p in power],
            power_normalized_db=[float(10.0 * np.log10(max(n, 1e-30))) for n in normalized],
            coefficients={
                f"{i}-{j}": value
                for (i, j), value in coefficients.items()
            },
            cross_correlation=cross_correlation(
                solution, cfg.target_angles, cfg.antenna_spacing_ratio
            ),
        )

    async def run_beampattern(
        self, cfg: SystemConfig, eps_values: Optional[Sequence[float]] = None
    ) -> List[BeampatternRecord]:
        """Case II solve per eps on one realization with beta_l = sigma_beta."""
        eps_values = list(eps_values) if eps_values is not None else self.config.beampattern_eps
        tasks = [(cfg, float(eps)) for eps in eps_values]
        return await self._map(self._beampattern_for, tasks)

    # -- convergence --------------------------------------------------------

    def _convergence_for(
        self, cfg: SystemConfig, algorithm: Algorithm, value_index: int
    ) -> ConvergenceTrace:
        cs = generate_channels(cfg, trial_rng(cfg.seed, value_index, 0, 0))
        scheme = Scheme.PENALTY_CASE1 if algorithm == Algorithm.PENALTY else Scheme.SDR_CASE2
        _, report = solve_with_restarts(
            scheme, cfg, cs, (value_index, 0), self.config.max_restarts, self.backend
        )
        objective = list(report.objective_trace)
        violation = list(report.violation_trace)
        power = list(report.power_trace)
        return ConvergenceTrace(
            algorithm=algorithm,
            n_irs=cfg.n_irs,
            objective=objective,
            violation=violation,
            power_w=power,
            status=report.status,
        )

    async def run_convergence(
        self,
        cfg: SystemConfig,
        algorithm: Algorithm,
        m_values: Optional[Sequence[int]] = None,
    ) -> List[ConvergenceTrace]:
        """Per-iteration traces for each IRS size (default: the scenario's M)."""
        if algorithm == Algorithm.PENALTY and cfg.xcorr_active:
            raise ConfigError("the penalty algorithm requires cross_corr_limit = inf")
        m_values = list(m_values) if m_values else [cfg.n_irs]
        tasks = [
            (cfg.with_updates(n_irs=int(m)), algorithm, index) for index, m in enumerate(m_values)
        ]
        return await self._map(self._convergence_for, tasks)


# =============================================================================
# CSV EXPORT
# =============================================================================


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".10g")


def _write_rows(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if not isinstance(v, str) else v for v in row])
    logger.info(f"Wrote {path}")
    return path


SWEEP_COLUMNS = [
    "scheme", "sweep_var", "sweep_value", "trial", "seed",
    "power_dbm", "feasible", "iters", "wall_ms",
]


def write_sweep_csv(result: SweepResult, path: Path) -> Path:
    rows = [
        [
            r.scheme.value, r.sweep_var.value, r.sweep_value, r.trial, r.seed,
            r.power_dbm if r.feasible else None, r.feasible, r.iters, r.wall_ms,
        ]
        for r in result.records
    ]
    return _write_rows(path, SWEEP_COLUMNS, rows)


def write_aggregate_csv(result: SweepResult, path: Path) -> Path:
    header = [
        "scheme", "sweep_value", "trials", "feasible_count", "feasibility_rate",
        "mean_power_dbm", "median_power_dbm", "ci_half_width_db", "mean_iters",
    ]
    rows = [
        [
            a.scheme.value, a.sweep_value, a.trials, a.feasible_count, a.feasibility_rate,
            a.mean_power_dbm, a.median_power_dbm, a.ci_half_width_db, a.mean_iters,
        ]
        for a in result.aggregates
    ]
    return _write_rows(path, header, rows)


def write_outage_csv(curve: OutageCurve, path: Path) -> Path:
    header = [
        "scheme", "r_r_th_db", "trials", "infeasible", "failed", "outage", "ci_low", "ci_high",
    ]
    rows = [
        [
            p.scheme.value, p.r_r_th_db, p.trials, p.infeasible, p.failed,
            p.outage, p.ci_low, p.ci_high,
        ]
        for p in curve.points
    ]
    return _write_rows(path, header, rows)


def eps_tag(eps: float) -> str:
    return "inf" if math.isinf(eps) else format(eps, "g")


def write_beampattern_csv(record: BeampatternRecord, path: Path) -> Path:
    rows = zip(record.theta_deg, record.power, record.power_normalized_db)
    return _write_rows(path, ["theta_deg", "power", "power_normalized_db"], list(rows))


def write_xcorr_csv(
    records: Sequence[BeampatternRecord], target_angles: Sequence[float], path: Path
) -> Path:
    """One row per (eps, target pair); angles in degrees."""
    degrees = [math.degrees(t) for t in target_angles]
    rows = []
    for record in records:
        for pair, value in record.coefficients.items():
            i, j = (int(part) for part in pair.split("-"))
            rows.append([eps_tag(record.eps_th), degrees[i], degrees[j], value])
    return _write_rows(path, ["eps_th", "theta_i_deg", "theta_j_deg", "coefficient"], rows)


def write_convergence_csv(traces: Sequence[ConvergenceTrace], path: Path) -> Path:
    header = ["algorithm", "n_irs", "iter", "objective", "violation", "power_w"]
    rows = []
    for trace in traces:
        count = max(len(trace.objective), len(trace.power_w), 1)
        for it in range(count):
            rows.append(
                [
                    trace.algorithm.value,
                    trace.n_irs,
                    it,
                    trace.objective[it] if it < len(trace.objective) else None,
                    trace.violation[it] if it < len(trace.violation) else None,
                    trace.power_w[it] if it < len(trace.power_w) else None,
                ]
            )
    return _write_rows(path, header, rows)


def write_penalty_trace_csv(report: SolveReport, path: Path) -> Path:
    header = ["outer_iter", "rho", "objective", "violation_xi", "power_w"]
    rows = [
        [i, rho, obj, xi, p]
        for i, (rho, obj, xi, p) in enumerate(
            zip(report.rho_trace, report.objective_trace, report.violation_trace, report.power_trace)
        )
    ]
    return _write_rows(path, header, rows)


def write_ao_trace_csv(report: SolveReport, path: Path) -> Path:
    header = ["ao_iter", "power_w", "max_rank_ratio", "phase_modulus_min"]
    rows = [
        [i, p, r, m]
        for i, (p, r, m) in enumerate(
            zip(report.power_trace, report.rank_ratio_trace, report.phase_modulus_trace)
        )
    ]
    return _write_rows(path, header, rows)
