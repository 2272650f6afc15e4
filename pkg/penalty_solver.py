"""
penalty_solver.py - Two-Layer Penalty Algorithm (Case I)

Minimizes transmit power when the IRS loop interference at the radar
receiver is cancelled and no cross-correlation constraint is imposed.
The coupling equalities x_{k,i} = h_k^H w_{c,i} and y_i = A w_{c,i} are
moved into the objective with weight 1/(2 rho):

    minimize  sum_i ||w_i||^2
              + 1/(2 rho) (sum_{k,i} |h_k^H w_i - x_{k,i}|^2 + sum_i ||A w_i - y_i||^2)
    s.t.      r_k (sum_{i!=k} |x_{k,i}|^2 + sigma^2) <= |x_{k,k}|^2
              sum_i ||y_i||^2 >= sigma^2 r_r
              |v_m| = 1

Algorithm:
    inner loop  (block coordinate descent, fixed rho)
        W   <- closed form (one Cholesky factorization, K right-hand sides)
        v   <- element-wise unit-modulus minimizer, m = 1..M
        x_k <- dual bisection on lambda in [0, 1)
        y   <- dual bisection on lambda in [0, 1), checked against the analytic root
    until relative objective decrease < eps_inner
    rho <- c * rho; stop when max violation xi <= eps_outer

Dedicated radar beams are never needed in this case, so the returned W_r
is zero (or structurally absent for the comm-only scheme).
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import linalg, optimize

from metrics import feasibility_report, radar_sinr_full, radar_sinr_lower_bound, transmit_power
from models import (
    BeamformerSolution,
    ChannelSet,
    ConfigError,
    DegenerateDirectionError,
    SolveReport,
    SolveStatus,
    SystemConfig,
)
from scene import effective_channels, normalize_noise, random_unit_phases, trial_rng

logger = logging.getLogger(__name__)


# =============================================================================
# STATE
# =============================================================================


@dataclass(frozen=True)
class PenaltyState:
    """
    Iterate of the penalty method.

    Shapes: x_aux (K, K) with x_aux[k, i] the target of h_k^H w_i;
    y_aux (N_r, K) with column i the target of A w_i; w_c (N_t, K); v (M,).
    """

    x_aux: np.ndarray
    y_aux: np.ndarray
    w_c: np.ndarray
    v: np.ndarray
    rho: float


@dataclass(frozen=True)
class AuxUpdate:
    """Result of an auxiliary-variable update and its optimal dual value."""

    values: np.ndarray
    dual: float


def _noise(cfg: SystemConfig, noise_power: Optional[float]) -> float:
    return cfg.noise_power_w if noise_power is None else noise_power


def _channel_gains(state: PenaltyState, cs: ChannelSet) -> np.ndarray:
    """(K, K) matrix of h_k^H w_i."""
    return effective_channels(cs, state.v).conj() @ state.w_c


# =============================================================================
# OBJECTIVE AND VIOLATION
# =============================================================================


def penalized_objective(state: PenaltyState, cs: ChannelSet) -> float:
    """Power plus 1/(2 rho) times the squared coupling mismatch."""
    mismatch_x = _channel_gains(state, cs) - state.x_aux
    mismatch_y = cs.a_mat @ state.w_c - state.y_aux
    penalty = np.sum(np.abs(mismatch_x) ** 2) + np.sum(np.abs(mismatch_y) ** 2)
    return float(np.sum(np.abs(state.w_c) ** 2) + penalty / (2.0 * state.rho))


def violation_xi(state: PenaltyState, cs: ChannelSet) -> float:
    """Largest squared entry-wise coupling mismatch."""
    mismatch_x = np.abs(_channel_gains(state, cs) - state.x_aux) ** 2
    mismatch_y = np.abs(cs.a_mat @ state.w_c - state.y_aux) ** 2
    return float(max(mismatch_x.max(initial=0.0), mismatch_y.max(initial=0.0)))


# =============================================================================
# BLOCK UPDATES
# =============================================================================


def update_beamformers(state: PenaltyState, cs: ChannelSet, rho: float) -> np.ndarray:
    """
    Closed-form minimizer over W_c.

    (I + (H H^H + A^H A)/(2 rho)) W = (H X + A^H Y)/(2 rho), with H the
    (N_t, K) matrix of effective channels; the Hermitian PD system is
    factored once for all K columns.
    """
    if rho <= 0:
        raise ValueError(f"penalty coefficient must be positive, got {rho}")
    h_cols = effective_channels(cs, state.v).T
    gram = h_cols @ h_cols.conj().T + cs.a_mat.conj().T @ cs.a_mat
    system = np.eye(cs.n_tx) + gram / (2.0 * rho)
    rhs = (h_cols @ state.x_aux + cs.a_mat.conj().T @ state.y_aux) / (2.0 * rho)
    factor = linalg.cho_factor(system, lower=True)
    return linalg.cho_solve(factor, rhs)


def update_phase_elementwise(state: PenaltyState, cs: ChannelSet) -> np.ndarray:
    """
    One ascending sweep of exact unit-modulus coordinate minimizers.

    For element m the mismatch is v_m q_m + a_m with q_m = [Phi_k w_i]_m; the
    objective's v_m-dependent part is 2 Re{v_m z_m}, z_m = sum q_m conj(a_m),
    minimized by v_m = -conj(z_m)/|z_m|. z_m = 0 keeps the old value.
    """
    v = np.array(state.v, dtype=complex)
    gw = cs.g_t @ state.w_c
    q = np.einsum("km,mi->kim", cs.h_r.conj(), gw)
    total = cs.h_d.conj() @ state.w_c - state.x_aux + q @ v

    for m in range(v.size):
        q_m = q[:, :, m]
        rest = total - v[m] * q_m
        z = np.sum(q_m * rest.conj())
        magnitude = abs(z)
        if magnitude > 0.0:
            v[m] = -np.conj(z) / magnitude
        total = rest + v[m] * q_m
    return v


def _refine_root(
    func: Callable[[float], float],
    deriv: Callable[[float], float],
    lam: float,
    lo: float,
    hi: float,
    steps: int = 8,
) -> float:
    """Safeguarded Newton polish of a bracketed decreasing/increasing root."""
    for _ in range(steps):
        value = func(lam)
        slope = deriv(lam)
        if value == 0.0 or slope == 0.0:
            break
        candidate = lam - value / slope
        if not lo <= candidate <= hi:
            break
        if abs(candidate - lam) <= 4 * np.finfo(float).eps:
            lam = candidate
            break
        lam = candidate
    return lam


def update_aux_x(
    state: PenaltyState,
    cs: ChannelSet,
    k: int,
    cfg: SystemConfig,
    noise_power: Optional[float] = None,
) -> AuxUpdate:
    """
    Exact solution of the per-user auxiliary problem by strong duality.

    minimize sum_i |x_i - c_i|^2 s.t. r (sum_{i!=k} |x_i|^2 + sigma^2) <= |x_k|^2
    with c_i = h_k^H w_i. The optimal dual lies in [0, 1); for lambda > 0
    x_i = c_i/(1 + lambda r) (i != k), x_k = c_k/(1 - lambda).

    Raises:
        DegenerateDirectionError: c_k = 0 while the constraint is violated
    """
    noise = _noise(cfg, noise_power)
    r = float(cfg.sinr_user_linear[k])
    c = _channel_gains(state, cs)[k]
    others = np.ones(c.size, dtype=bool)
    others[k] = False
    interference = float(np.sum(np.abs(c[others]) ** 2))
    signal = float(abs(c[k]) ** 2)

    def residual(lam: float) -> float:
        return r * (interference / (1.0 + lam * r) ** 2 + noise) - signal / (1.0 - lam) ** 2

    def slope(lam: float) -> float:
        return -2.0 * r * r * interference / (1.0 + lam * r) ** 3 - 2.0 * signal / (1.0 - lam) ** 3

    if residual(0.0) <= 0.0:
        return AuxUpdate(values=c.copy(), dual=0.0)
    if signal == 0.0:
        raise DegenerateDirectionError("user", k)

    lo, gap = 0.0, 0.5
    while residual(1.0 - gap) > 0.0:
        lo = 1.0 - gap
        gap *= 0.5
        # 1 - gap rounds to 1 before gap underflows
        if 1.0 - gap == 1.0:
            raise DegenerateDirectionError("user", k, "user SINR unreachable by scaling")
    hi = 1.0 - gap

    lam = optimize.bisect(residual, lo, hi, xtol=cfg.penalty.eps_bisect)
    lam = _refine_root(residual, slope, lam, lo, hi)
    # land on the feasible side of the constraint
    while residual(lam) > 0.0 and lam < hi:
        lam = min(float(np.nextafter(lam, 1.0)), hi)

    x = c / (1.0 + lam * r)
    x[k] = c[k] / (1.0 - lam)
    return AuxUpdate(values=x, dual=float(lam))


def update_aux_y(
    state: PenaltyState,
    cs: ChannelSet,
    cfg: SystemConfig,
    noise_power: Optional[float] = None,
) -> AuxUpdate:
    """
    Exact solution of the radar auxiliary problem.

    minimize sum_i ||y_i - A w_i||^2 s.t. sum_i ||y_i||^2 >= sigma^2 r_r.
    With S = sum ||A w_i||^2 < sigma^2 r_r the dual solves S/(1-lambda)^2 =
    sigma^2 r_r; bisection on [0, 1) is cross-checked against
    1 - sqrt(S / (sigma^2 r_r)).

    Raises:
        DegenerateDirectionError: S = 0 (no scaling reaches the threshold)
    """
    noise = _noise(cfg, noise_power)
    target = noise * cfg.sinr_radar_linear
    aw = cs.a_mat @ state.w_c
    total = float(np.sum(np.abs(aw) ** 2))

    if total >= target:
        return AuxUpdate(values=aw, dual=0.0)
    if total == 0.0:
        raise DegenerateDirectionError("radar")

    def gap_fn(lam: float) -> float:
        return total / (1.0 - lam) ** 2 - target

    hi = 0.5
    while gap_fn(hi) < 0.0:
        hi = 1.0 - 0.5 * (1.0 - hi)
        if hi == 1.0:
            raise DegenerateDirectionError("radar", message="radar SINR unreachable by scaling")
    lam_bisect = optimize.bisect(gap_fn, 0.0, hi, xtol=cfg.penalty.eps_bisect)
    lam_exact = 1.0 - math.sqrt(total / target)

    if abs(lam_bisect - lam_exact) > 10.0 * cfg.penalty.eps_bisect:
        logger.warning(
            f"Radar dual bisection {lam_bisect:.12f} disagrees with analytic root {lam_exact:.12f}"
        )
        lam = lam_bisect
    else:
        lam = lam_exact
    return AuxUpdate(values=aw / (1.0 - lam), dual=float(lam))


# =============================================================================
# INITIALIZATION
# =============================================================================


def initial_state(
    cfg: SystemConfig,
    cs: ChannelSet,
    rng: np.random.Generator,
    noise_power: Optional[float] = None,
) -> PenaltyState:
    """
    Random unit-modulus phases, maximum-ratio beamformers scaled to meet each
    user's threshold without interference (then scaled up for the radar
    threshold), and one pass of the auxiliary updates.
    """
    noise = _noise(cfg, noise_power)
    v = random_unit_phases(cs.n_irs, rng)
    h_rows = effective_channels(cs, v)
    norms_sq = np.sum(np.abs(h_rows) ** 2, axis=1)
    powers = cfg.sinr_user_linear * noise / np.maximum(norms_sq, np.finfo(float).tiny) ** 2
    w_c = h_rows.T * np.sqrt(powers)[None, :]

    radar_total = float(np.sum(np.abs(cs.a_mat @ w_c) ** 2))
    radar_target = noise * cfg.sinr_radar_linear
    if 0.0 < radar_total < radar_target:
        w_c = w_c * math.sqrt(radar_target / radar_total)

    state = PenaltyState(
        x_aux=h_rows.conj() @ w_c,
        y_aux=cs.a_mat @ w_c,
        w_c=w_c,
        v=v,
        rho=cfg.penalty.rho0,
    )
    return _update_auxiliaries(state, cs, cfg, noise)


def _update_auxiliaries(
    state: PenaltyState, cs: ChannelSet, cfg: SystemConfig, noise: float
) -> PenaltyState:
    x_aux = np.empty_like(state.x_aux)
    for k in range(cs.n_users):
        x_aux[k] = update_aux_x(state, cs, k, cfg, noise).values
    state = replace(state, x_aux=x_aux)
    return replace(state, y_aux=update_aux_y(state, cs, cfg, noise).values)


def _restore_feasibility(w_c: np.ndarray, v: np.ndarray, cfg: SystemConfig, cs: ChannelSet) -> np.ndarray:
    """
    Smallest common scaling c >= 1 meeting every constraint exactly.

    Scaling all beams up raises every SINR (noise is fixed), so the
    residual coupling mismatch left by the penalty loop is absorbed here.
    """
    noise = 1.0
    gains = np.abs(effective_channels(cs, v).conj() @ w_c) ** 2
    factor = 1.0
    for k in range(cs.n_users):
        r = cfg.sinr_user_linear[k]
        signal = gains[k, k]
        interference = gains[k].sum() - signal
        if r * (interference + noise) > signal and signal > r * interference:
            factor = max(factor, r * noise / (signal - r * interference))
    radar_total = float(np.sum(np.abs(cs.a_mat @ w_c) ** 2))
    if 0.0 < radar_total < cfg.sinr_radar_linear * noise:
        factor = max(factor, cfg.sinr_radar_linear * noise / radar_total)
    return w_c * math.sqrt(factor)


# =============================================================================
# ALGORITHM
# =============================================================================


def solve_case1(
    cfg: SystemConfig,
    cs: ChannelSet,
    rng: Optional[np.random.Generator] = None,
    comm_only: bool = False,
) -> Tuple[BeamformerSolution, SolveReport]:
    """
    Run the two-layer penalty algorithm on one channel realization.

    Args:
        cfg: Scenario; cross_corr_limit must be infinite
        cs: Channels in physical units (normalized internally)
        rng: Stream for the random phase initialization
        comm_only: Return W_r with zero columns instead of a zero N_t x N_t block

    Returns:
        (solution, report) with report.status converged, max_iters or diverged

    Raises:
        ConfigError: cross-correlation constraint is active
        DegenerateDirectionError: an auxiliary dual problem is unbounded
    """
    if cfg.xcorr_active:
        raise ConfigError("the penalty algorithm handles cross_corr_limit = inf only")
    if rng is None:
        rng = trial_rng(cfg.seed, 0, 0, 1)

    settings = cfg.penalty
    start = time.perf_counter()
    ncs = normalize_noise(cs, cfg.noise_power_w)
    state = initial_state(cfg, ncs, rng, noise_power=1.0)

    objective_trace, violation_trace, power_trace, rho_trace = [], [], [], []
    inner_total = 0
    status = SolveStatus.MAX_ITERS

    logger.info(
        f"Penalty solve: M={cs.n_irs}, K={cs.n_users}, rho0={settings.rho0}, c={settings.step_c}"
    )

    for outer in range(settings.max_outer):
        rho = settings.rho0 * settings.step_c**outer
        state = replace(state, rho=rho)
        previous = penalized_objective(state, ncs)

        for _ in range(settings.max_inner):
            state = replace(state, w_c=update_beamformers(state, ncs, rho))
            state = replace(state, v=update_phase_elementwise(state, ncs))
            state = _update_auxiliaries(state, ncs, cfg, 1.0)
            inner_total += 1
            current = penalized_objective(state, ncs)
            decrease = previous - current
            previous = current
            if decrease < settings.eps_inner * abs(current):
                break

        xi = violation_xi(state, ncs)
        objective_trace.append(previous)
        violation_trace.append(xi)
        power_trace.append(float(np.sum(np.abs(state.w_c) ** 2)))
        rho_trace.append(rho)
        logger.debug(f"outer {outer}: rho={rho:.3e} objective={previous:.6e} xi={xi:.3e}")

        if xi <= settings.eps_outer:
            status = SolveStatus.CONVERGED
            break
        window = settings.divergence_window
        if outer >= window and xi > settings.divergence_factor * violation_trace[outer - window]:
            status = SolveStatus.DIVERGED
            break

    w_c = _restore_feasibility(state.w_c, state.v, cfg, ncs)
    w_r = np.zeros((cs.n_tx, 0 if comm_only else cs.n_tx), dtype=complex)
    solution = BeamformerSolution(w_c=w_c, w_r=w_r, v=state.v)

    report = SolveReport(
        status=status,
        objective_trace=objective_trace,
        violation_trace=violation_trace,
        power_trace=power_trace,
        rho_trace=rho_trace,
        iters_outer=len(violation_trace),
        iters_inner_total=inner_total,
        wall_time_s=time.perf_counter() - start,
        feasibility=feasibility_report(solution, cfg, cs, loop_interference=False),
        radar_sinr_full=radar_sinr_full(
            solution, cs, solution.v, cfg.noise_power_w, loop_interference=False
        ),
        radar_sinr_lower_bound=radar_sinr_lower_bound(solution, cs, solution.v, cfg.noise_power_w),
    )
    logger.info(
        f"Penalty solve finished: status={status.value}, outer={report.iters_outer}, "
        f"power={transmit_power(solution):.4e} W"
    )
    return solution, report
