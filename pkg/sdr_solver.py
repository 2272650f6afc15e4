"""
sdr_solver.py - SDR-Based Alternating Optimization (Case II)

Handles IRS loop interference at the radar receiver and the
cross-correlation constraint. Beamformers are relaxed to covariances
W_{c,k}, Z_r and optimized alternately with the IRS vector:

    covariance step  minimize sum_k tr(W_{c,k}) + tr(Z_r) at fixed v  (SDP)
    phase step       maximize the constraint slacks at fixed covariances,
                     with the concave part of each user constraint replaced
                     by its first-order expansion at the previous v  (SOCP)

After the objective settles, v is projected to unit modulus and the
covariances are re-solved. Rank-one covariances give beamformers directly;
otherwise a constructive rank-one reconstruction moves the excess into the
radar covariance without changing any constraint value.

All step functions take channels already scaled to unit noise power
(scene.normalize_noise) unless a noise_power is given.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from conic_core import Affine, BaseConicBackend, ConicProblem, ConicStatus, solve
from metrics import (
    feasibility_report,
    hermitian_part,
    irs_interference_gram,
    psd_sqrt,
    radar_sinr_full,
    radar_sinr_lower_bound,
    transmit_power,
)
from models import (
    BeamformerSolution,
    BeamformingError,
    ChannelSet,
    CovariancePack,
    InfeasibleOutcome,
    InfeasibleSubproblemError,
    ReconstructionError,
    SolveReport,
    SolveStatus,
    SystemConfig,
)
from scene import (
    cascaded_channel,
    complex_normal,
    effective_channels,
    irs_loop_matrix,
    normalize_noise,
    random_unit_phases,
    steering_vector,
    trial_rng,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AoState:
    """Alternating-optimization iterate."""

    pack: CovariancePack
    taylor_point: np.ndarray
    objective_trace: Tuple[float, ...] = field(default_factory=tuple)


# =============================================================================
# HELPERS
# =============================================================================


def psd_project(x: np.ndarray) -> np.ndarray:
    """Nearest PSD matrix (negative eigenvalues clipped)."""
    eigvals, eigvecs = linalg.eigh(hermitian_part(x))
    return (eigvecs * np.clip(eigvals, 0.0, None)) @ eigvecs.conj().T


def rank_one_ratio(x: np.ndarray) -> float:
    """Second over first eigenvalue; 1.0 for a zero matrix."""
    eigvals = linalg.eigvalsh(hermitian_part(x))[::-1]
    if eigvals[0] <= 0.0:
        return 1.0
    if eigvals.size == 1:
        return 0.0
    return float(max(eigvals[1], 0.0) / eigvals[0])


def project_unit_modulus(v: np.ndarray) -> np.ndarray:
    """v_m / |v_m|, with v_m = 0 mapped to 1."""
    v = np.asarray(v, dtype=complex)
    magnitude = np.abs(v)
    safe = np.where(magnitude > 0, magnitude, 1.0)
    return np.where(magnitude > 0, v / safe, 1.0 + 0j)


def user_quadratic(x_mat: np.ndarray, cs: ChannelSet, k: int) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    (Q, l, c) with h_k(v)^H X h_k(v) = v^H Q v + Re(l^H v) + c.

    With h_k^H = h_{d,k}^H + v^T Phi_k: Q = conj(Phi X Phi^H),
    l = 2 conj(Phi X h_d), c = h_d^H X h_d.
    """
    phi = cascaded_channel(cs, k)
    h_d = cs.h_d[k]
    gram = np.conj(phi @ x_mat @ phi.conj().T)
    linear = 2.0 * np.conj(phi @ x_mat @ h_d)
    constant = float(np.real(h_d.conj() @ x_mat @ h_d))
    return hermitian_part(gram), linear, constant


def quadratic_value(gram: np.ndarray, linear: np.ndarray, constant: float, v: np.ndarray) -> float:
    return float(np.real(v.conj() @ gram @ v) + np.real(linear.conj() @ v) + constant)


def taylor_lower_bound(
    gram: np.ndarray, linear: np.ndarray, constant: float, point: np.ndarray
) -> Tuple[np.ndarray, float]:
    """
    Linear minorant f(v_t) + Re(g^H (v - v_t)) of a convex quadratic,
    returned as (g, offset) so that the bound is Re(g^H v) + offset.
    """
    grad = 2.0 * gram @ point + linear
    offset = quadratic_value(gram, linear, constant, point) - float(np.real(grad.conj() @ point))
    return grad, offset


# =============================================================================
# COVARIANCE STEP
# =============================================================================


def covariance_step(
    v: np.ndarray,
    cs: ChannelSet,
    cfg: SystemConfig,
    loop_interference: bool = True,
    comm_only: bool = False,
    noise_power: float = 1.0,
    backend: Optional[BaseConicBackend] = None,
    dump_path: Optional[Path] = None,
) -> CovariancePack:
    """
    Minimum-power covariances at a fixed IRS vector.

    Constraints: per-user SINR (linear in the covariances), the radar
    trace-ratio surrogate r_r (tr(B R B^H) + sigma^2 N_r) <= tr(A R A^H)
    (r_r sigma^2 <= tr(A R A^H) without loop interference), the
    cross-correlation cone when the limit is finite, and PSD blocks.

    With an infinite cross-correlation limit Z_r is folded into the user
    blocks before solving (see zero_radar_transform): the fold keeps R and
    can only raise the user signal terms, so the optimal power is the same
    and the returned Z_r is zero.

    Raises:
        InfeasibleSubproblemError: the solver certified infeasibility
        BeamformingError: the solver failed without a certificate
    """
    v = np.asarray(v, dtype=complex)
    n_tx, n_users = cs.n_tx, cs.n_users
    prob = ConicProblem("covariance_step")
    w_blocks = [prob.add_hermitian(f"W{k}", n_tx) for k in range(n_users)]
    fold_radar = comm_only or not cfg.xcorr_active
    z_block = None if fold_radar else prob.add_hermitian("Z", n_tx)
    all_blocks = w_blocks + ([z_block] if z_block is not None else [])

    def covariance_form(c_mat: np.ndarray) -> Affine:
        return sum(prob.trace_form(b, c_mat) for b in all_blocks)

    prob.minimize(covariance_form(np.eye(n_tx)))

    h_all = effective_channels(cs, v)
    thresholds = cfg.sinr_user_linear
    for k in range(n_users):
        outer = np.outer(h_all[k], h_all[k].conj())
        # h^H R h + sigma^2 - (1/r + 1) h^H W_k h <= 0
        prob.add_inequality(
            f"user{k}",
            covariance_form(outer)
            + noise_power
            - (1.0 / thresholds[k] + 1.0) * prob.trace_form(w_blocks[k], outer),
        )

    r_r = cfg.sinr_radar_linear
    radar_signal = covariance_form(cs.a_mat.conj().T @ cs.a_mat)
    if loop_interference:
        b_mat = irs_loop_matrix(cs, v)
        prob.add_inequality(
            "radar",
            r_r * (covariance_form(b_mat.conj().T @ b_mat) + noise_power * cs.n_rx) - radar_signal,
        )
    else:
        prob.add_inequality("radar", r_r * noise_power - radar_signal)

    if cfg.xcorr_active and len(cfg.target_angles) >= 2:
        steer = [steering_vector(t, n_tx, cfg.antenna_spacing_ratio) for t in cfg.target_angles]
        parts: List[Affine] = []
        for i in range(len(steer)):
            for j in range(i + 1, len(steer)):
                pair = np.outer(steer[j], steer[i].conj())
                parts.append(covariance_form(pair))
                parts.append(sum(prob.imag_trace_form(b, pair) for b in all_blocks))
        prob.add_soc("xcorr", Affine.constant(math.sqrt(cfg.cross_corr_limit)), Affine.stack(parts))

    solution = solve(prob, backend=backend, dump_path=dump_path)
    if solution.status == ConicStatus.INFEASIBLE_CERTIFICATE:
        raise InfeasibleSubproblemError("covariance", "no covariances meet the constraints at this v")
    if not solution.status.has_solution:
        raise BeamformingError(
            f"covariance step failed with status {solution.status.value}: {solution.message}"
        )

    w_cov = np.stack([psd_project(solution.values[f"W{k}"]) for k in range(n_users)])
    z_r = psd_project(solution.values["Z"]) if z_block is not None else np.zeros((n_tx, n_tx), dtype=complex)
    return CovariancePack(w_cov=w_cov, z_r=z_r, v=v.copy())


# =============================================================================
# PHASE STEP
# =============================================================================


def phase_step(
    pack: CovariancePack,
    cs: ChannelSet,
    cfg: SystemConfig,
    taylor_point: np.ndarray,
    loop_interference: bool = True,
    noise_power: float = 1.0,
    backend: Optional[BaseConicBackend] = None,
) -> np.ndarray:
    """
    Slack-maximizing IRS update at fixed covariances.

    Variables xi = [Re v; Im v] and slacks eta (one per user, one for the
    radar constraint):

        maximize  sum eta
        s.t.      eta_k + h_k^H R h_k + sigma^2 <= (1/r_k + 1) lb_k(v)
                  r_r (v^H Q_B v + sigma^2 N_r) + eta_0 <= tr(A R A^H)
                  |v_m| <= 1,  eta >= 0

    lb_k is the first-order expansion of h_k^H W_k h_k at taylor_point,
    so taylor_point with eta = 0 stays feasible. A non-optimal solve keeps
    taylor_point.
    """
    taylor_point = np.asarray(taylor_point, dtype=complex)
    n_irs, n_users = cs.n_irs, cs.n_users
    r_total = hermitian_part(pack.transmit_covariance)

    prob = ConicProblem("phase_step")
    xi = prob.add_real("v", 2 * n_irs)
    eta = prob.add_real("eta", n_users + 1)
    prob.maximize(prob.linear_form(eta, np.ones(n_users + 1)))

    thresholds = cfg.sinr_user_linear
    for k in range(n_users):
        gram1, lin1, const1 = user_quadratic(r_total, cs, k)
        gram2, lin2, const2 = user_quadratic(pack.w_cov[k], cs, k)
        grad, offset = taylor_lower_bound(gram2, lin2, const2, taylor_point)
        weight = 1.0 / thresholds[k] + 1.0
        prob.add_quadratic(
            f"user{k}",
            xi,
            gram1,
            lin1 - weight * grad,
            const1 + noise_power - weight * offset,
            extra=prob.entry(eta, k),
        )

    r_r = cfg.sinr_radar_linear
    signal = float(np.real(np.trace(cs.a_mat @ r_total @ cs.a_mat.conj().T)))
    if loop_interference:
        prob.add_quadratic(
            "radar",
            xi,
            r_r * irs_interference_gram(cs, r_total),
            np.zeros(n_irs, dtype=complex),
            r_r * noise_power * cs.n_rx - signal,
            extra=prob.entry(eta, n_users),
        )
    else:
        prob.add_inequality("radar", prob.entry(eta, n_users) + (r_r * noise_power - signal))

    for m in range(n_irs):
        prob.add_soc(
            f"modulus{m}",
            Affine.constant(1.0),
            Affine.stack([prob.entry(xi, m), prob.entry(xi, n_irs + m)]),
        )
    prob.add_inequality("eta_nonneg", -prob.vector(eta))

    solution = solve(prob, backend=backend)
    if not solution.status.has_solution:
        logger.warning(f"Phase step returned {solution.status.value}; keeping previous v")
        return taylor_point.copy()
    values = solution.values["v"]
    v_new = values[:n_irs] + 1j * values[n_irs:]
    # clip solver round-off outside the unit disc
    magnitude = np.abs(v_new)
    return np.where(magnitude > 1.0, v_new / np.where(magnitude > 0, magnitude, 1.0), v_new)


# =============================================================================
# PROJECTION AND RECONSTRUCTION
# =============================================================================


def normalize_and_resolve(
    state: Union[AoState, CovariancePack],
    cs: ChannelSet,
    cfg: SystemConfig,
    loop_interference: bool = True,
    comm_only: bool = False,
    noise_power: float = 1.0,
    backend: Optional[BaseConicBackend] = None,
) -> CovariancePack:
    """Project v onto unit modulus and re-solve the covariance step there."""
    pack = state.pack if isinstance(state, AoState) else state
    v = project_unit_modulus(pack.v)
    return covariance_step(
        v, cs, cfg,
        loop_interference=loop_interference,
        comm_only=comm_only,
        noise_power=noise_power,
        backend=backend,
    )


def reconstruct_rank_one(
    pack: CovariancePack, cs: ChannelSet
) -> Tuple[BeamformerSolution, CovariancePack]:
    """
    Rank-one beamformers with the same aggregate covariance.

    w_k = W_k h_k / sqrt(h_k^H W_k h_k), W_k' = w_k w_k^H and
    Z' = sum_k W_k + Z - sum_k W_k'. Z' is PSD, h_k^H W_k' h_k equals
    h_k^H W_k h_k, and R (hence total power) is unchanged.

    Raises:
        ReconstructionError: h_k^H W_k h_k <= 0 for some user
    """
    h_all = effective_channels(cs, pack.v)
    n_tx, n_users = cs.n_tx, cs.n_users
    w_c = np.empty((n_tx, n_users), dtype=complex)
    for k in range(n_users):
        projected = pack.w_cov[k] @ h_all[k]
        form = float(np.real(h_all[k].conj() @ projected))
        if form <= 0.0:
            raise ReconstructionError(f"user {k}: h^H W h = {form:.3e} is not positive")
        w_c[:, k] = projected / math.sqrt(form)

    w_cov = np.einsum("ik,jk->kij", w_c, w_c.conj())
    z_r = hermitian_part(pack.transmit_covariance - w_cov.sum(axis=0))
    new_pack = CovariancePack(w_cov=w_cov, z_r=z_r, v=pack.v.copy())
    solution = BeamformerSolution(w_c=w_c, w_r=psd_sqrt(z_r), v=pack.v.copy())
    return solution, new_pack


def zero_radar_transform(
    pack: CovariancePack, alphas: Optional[Sequence[float]] = None
) -> CovariancePack:
    """
    Fold Z_r into the user covariances: W_k + alpha_k Z_r, Z_r = 0.

    Args:
        alphas: Nonnegative weights summing to one (default uniform)

    Raises:
        ValueError: alphas of the wrong length, negative or not summing to one
    """
    n_users = pack.w_cov.shape[0]
    if alphas is None:
        weights = np.full(n_users, 1.0 / n_users)
    else:
        weights = np.asarray(alphas, dtype=float)
        if weights.shape != (n_users,):
            raise ValueError(f"expected {n_users} weights, got shape {weights.shape}")
        if np.any(weights < 0) or not math.isclose(weights.sum(), 1.0, abs_tol=1e-12):
            raise ValueError("weights must be nonnegative and sum to one")
    w_cov = pack.w_cov + weights[:, None, None] * pack.z_r[None, :, :]
    return CovariancePack(w_cov=w_cov, z_r=np.zeros_like(pack.z_r), v=pack.v.copy())


def dominant_beamformers(pack: CovariancePack) -> np.ndarray:
    """Columns sqrt(lambda_1) u_1 of each user covariance."""
    n_users, n_tx, _ = pack.w_cov.shape
    w_c = np.empty((n_tx, n_users), dtype=complex)
    for k in range(n_users):
        eigvals, eigvecs = linalg.eigh(hermitian_part(pack.w_cov[k]))
        w_c[:, k] = math.sqrt(max(eigvals[-1], 0.0)) * eigvecs[:, -1]
    return w_c


# =============================================================================
# GAUSSIAN RANDOMIZATION
# =============================================================================


def _min_power_scaling(
    beams: np.ndarray,
    v: np.ndarray,
    cs: ChannelSet,
    cfg: SystemConfig,
    loop_interference: bool,
    noise_power: float,
    backend: Optional[BaseConicBackend],
) -> Optional[np.ndarray]:
    """Smallest powers p >= 0 making columns sqrt(p_k) w_k feasible; None if none exist."""
    n_users = beams.shape[1]
    h_all = effective_channels(cs, v)
    gains = np.abs(h_all.conj() @ beams) ** 2

    prob = ConicProblem("power_scaling")
    p = prob.add_real("p", n_users)
    prob.minimize(prob.linear_form(p, np.sum(np.abs(beams) ** 2, axis=0)))

    thresholds = cfg.sinr_user_linear
    for k in range(n_users):
        row = thresholds[k] * gains[k]
        row[k] = -gains[k, k]
        prob.add_inequality(f"user{k}", prob.linear_form(p, row) + thresholds[k] * noise_power)

    r_r = cfg.sinr_radar_linear
    signal = np.sum(np.abs(cs.a_mat @ beams) ** 2, axis=0)
    if loop_interference:
        loop = np.sum(np.abs(irs_loop_matrix(cs, v) @ beams) ** 2, axis=0)
        prob.add_inequality(
            "radar", prob.linear_form(p, r_r * loop - signal) + r_r * noise_power * cs.n_rx
        )
    else:
        prob.add_inequality("radar", prob.linear_form(p, -signal) + r_r * noise_power)

    if cfg.xcorr_active and len(cfg.target_angles) >= 2:
        steer = np.column_stack(
            [steering_vector(t, cs.n_tx, cfg.antenna_spacing_ratio) for t in cfg.target_angles]
        )
        proj = steer.conj().T @ beams
        rows = []
        for i in range(steer.shape[1]):
            for j in range(i + 1, steer.shape[1]):
                coeff = proj[i] * proj[j].conj()
                rows.extend([coeff.real, coeff.imag])
        prob.add_soc(
            "xcorr",
            Affine.constant(math.sqrt(cfg.cross_corr_limit)),
            prob.linear_form(p, np.vstack(rows)),
        )
    prob.add_inequality("p_nonneg", -prob.vector(p))

    solution = solve(prob, backend=backend)
    if not solution.status.has_solution:
        return None
    return np.clip(solution.values["p"], 0.0, None)


def gaussian_randomization(
    pack: CovariancePack,
    cs: ChannelSet,
    cfg: SystemConfig,
    rng: np.random.Generator,
    count: Optional[int] = None,
    loop_interference: bool = True,
    noise_power: float = 1.0,
    backend: Optional[BaseConicBackend] = None,
) -> Optional[BeamformerSolution]:
    """
    Beamformers for the communication-only scheme from non-rank-one covariances.

    Draws w_k ~ CN(0, W_k) (the first candidate is the dominant eigenvector
    set), rescales each candidate to the cheapest feasible powers and keeps
    the lowest-power one. Returns None when no candidate can be made feasible.
    """
    count = cfg.sdr.randomizations if count is None else count
    roots = [psd_sqrt(w) for w in pack.w_cov]
    n_tx, n_users = cs.n_tx, cs.n_users

    best: Optional[np.ndarray] = None
    best_power = math.inf
    for draw in range(count):
        if draw == 0:
            beams = dominant_beamformers(pack)
        else:
            beams = np.column_stack(
                [roots[k] @ complex_normal(rng, n_tx) for k in range(n_users)]
            )
        powers = _min_power_scaling(beams, pack.v, cs, cfg, loop_interference, noise_power, backend)
        if powers is None:
            continue
        scaled = beams * np.sqrt(powers)[None, :]
        power = float(np.sum(np.abs(scaled) ** 2))
        if power < best_power:
            best, best_power = scaled, power

    if best is None:
        logger.info(f"Gaussian randomization: no feasible candidate in {count} draws")
        return None
    logger.debug(f"Gaussian randomization: best power {best_power:.4e} W over {count} draws")
    return BeamformerSolution(w_c=best, w_r=np.zeros((n_tx, 0), dtype=complex), v=pack.v.copy())


# =============================================================================
# ALGORITHM
# =============================================================================


def _infeasible_report(
    start: float,
    power_trace: List[float],
    rank_trace: List[float],
    modulus_trace: List[float],
    outcome: InfeasibleOutcome,
) -> SolveReport:
    return SolveReport(
        status=SolveStatus.INFEASIBLE,
        objective_trace=list(power_trace),
        power_trace=list(power_trace),
        rank_ratio_trace=list(rank_trace),
        phase_modulus_trace=list(modulus_trace),
        iters_outer=len(power_trace),
        wall_time_s=time.perf_counter() - start,
        message=f"{outcome.stage}: {outcome.message}",
    )


def solve_case2(
    cfg: SystemConfig,
    cs: ChannelSet,
    rng: Optional[np.random.Generator] = None,
    loop_interference: bool = True,
    comm_only: bool = False,
    irs_enabled: bool = True,
    backend: Optional[BaseConicBackend] = None,
    dump_path: Optional[Path] = None,
) -> Tuple[Union[BeamformerSolution, InfeasibleOutcome], SolveReport]:
    """
    Run the SDR alternating optimization on one channel realization.

    Args:
        cfg: Scenario (a finite cross_corr_limit activates the cone constraint)
        cs: Channels in physical units (normalized internally)
        rng: Stream for the random phase initialization and randomization
        loop_interference: False treats the IRS loop at the radar as cancelled
        comm_only: Force Z_r = 0 (Gaussian randomization when not rank-one)
        irs_enabled: False fixes v = 0 and skips phase steps
        backend: Conic backend (internal interior-point method by default)
        dump_path: Write the first covariance subproblem in triplet form

    Returns:
        (solution or InfeasibleOutcome, report)
    """
    if rng is None:
        rng = trial_rng(cfg.seed, 0, 0, 1)
    settings = cfg.sdr
    start = time.perf_counter()
    ncs = normalize_noise(cs, cfg.noise_power_w)
    step_kwargs = dict(loop_interference=loop_interference, noise_power=1.0, backend=backend)

    v = random_unit_phases(cs.n_irs, rng) if irs_enabled else np.zeros(cs.n_irs, dtype=complex)
    power_trace: List[float] = []
    violation_trace: List[float] = []
    rank_trace: List[float] = []
    modulus_trace: List[float] = []
    status = SolveStatus.MAX_ITERS

    logger.info(
        f"SDR solve: M={cs.n_irs}, K={cs.n_users}, loop={loop_interference}, "
        f"xcorr={cfg.xcorr_active}, comm_only={comm_only}, irs={irs_enabled}"
    )

    iteration = 0
    try:
        state = None
        for iteration in range(settings.max_ao_iters):
            pack = covariance_step(
                v, ncs, cfg, comm_only=comm_only,
                dump_path=dump_path if iteration == 0 else None,
                **step_kwargs,
            )
            power = transmit_power(pack)
            previous = power_trace[-1] if power_trace else None
            power_trace.append(power)
            violation_trace.append(
                feasibility_report(pack, cfg, cs, loop_interference, irs_enabled=False).max_violation
            )
            rank_trace.append(max(rank_one_ratio(w) for w in pack.w_cov))
            modulus_trace.append(float(np.min(np.abs(v))) if v.size else 0.0)
            state = AoState(pack=pack, taylor_point=v, objective_trace=tuple(power_trace))
            logger.debug(f"AO {iteration}: power={power:.6e} W rank_ratio={rank_trace[-1]:.2e}")

            if not irs_enabled:
                status = SolveStatus.CONVERGED
                break
            if previous is not None and previous - power < settings.eps_converge * abs(previous):
                status = SolveStatus.CONVERGED
                break
            v = phase_step(pack, ncs, cfg, v, **step_kwargs)

        pack = (
            normalize_and_resolve(state, ncs, cfg, comm_only=comm_only, **step_kwargs)
            if irs_enabled
            else state.pack
        )
    except InfeasibleSubproblemError as e:
        outcome = InfeasibleOutcome(stage=e.stage, iteration=iteration, message=str(e))
        logger.info(f"SDR solve infeasible at AO iteration {iteration} ({e.stage})")
        return outcome, _infeasible_report(start, power_trace, rank_trace, modulus_trace, outcome)

    ratios = [rank_one_ratio(w) for w in pack.w_cov]
    rank_one = max(ratios) <= settings.rank_one_ratio_tol
    if rank_one:
        w_c = dominant_beamformers(pack)
        w_r = (
            np.zeros((cs.n_tx, 0), dtype=complex)
            if comm_only
            else psd_sqrt(hermitian_part(pack.transmit_covariance - w_c @ w_c.conj().T))
        )
        solution = BeamformerSolution(w_c=w_c, w_r=w_r, v=pack.v.copy())
    elif comm_only:
        randomized = gaussian_randomization(pack, ncs, cfg, rng, **step_kwargs)
        if randomized is None:
            outcome = InfeasibleOutcome(
                stage="randomization",
                iteration=len(power_trace),
                message="no feasible randomized candidate",
            )
            return outcome, _infeasible_report(start, power_trace, rank_trace, modulus_trace, outcome)
        solution = randomized
    else:
        solution, _ = reconstruct_rank_one(pack, ncs)

    report = SolveReport(
        status=status,
        objective_trace=power_trace,
        violation_trace=violation_trace,
        power_trace=power_trace,
        rank_ratio_trace=rank_trace,
        phase_modulus_trace=modulus_trace,
        iters_outer=len(power_trace),
        wall_time_s=time.perf_counter() - start,
        feasibility=feasibility_report(
            solution, cfg, cs, loop_interference=loop_interference, irs_enabled=irs_enabled
        ),
        radar_sinr_full=radar_sinr_full(
            solution, cs, solution.v, cfg.noise_power_w, loop_interference=loop_interference
        ),
        radar_sinr_lower_bound=radar_sinr_lower_bound(solution, cs, solution.v, cfg.noise_power_w),
        rank_one_direct=rank_one,
    )
    logger.info(
        f"SDR solve finished: status={status.value}, AO iterations={report.iters_outer}, "
        f"power={transmit_power(solution):.4e} W, rank_one={rank_one}"
    )
    return solution, report
