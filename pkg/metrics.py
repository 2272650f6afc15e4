"""
metrics.py - Figures of Merit and Constraint Functions

Pure evaluation of every quantity the design problem constrains or
minimizes: transmit power, per-user SINR, radar SINR (exact and its
trace-ratio lower bound), cross-correlation pattern, beampattern and a
signed feasibility report. Every function accepts either a
BeamformerSolution or a CovariancePack.
"""

from __future__ import annotations

import itertools
import logging
import math
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import linalg

from models import (
    BeamformerSolution,
    ChannelSet,
    FeasibilityReport,
    SolutionLike,
    SystemConfig,
    transmit_covariance,
)
from scene import effective_channels, irs_loop_matrix, steering_vector

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-6


# =============================================================================
# MATRIX HELPERS
# =============================================================================


def hermitian_part(x: np.ndarray) -> np.ndarray:
    """(X + X^H) / 2."""
    return 0.5 * (x + x.conj().swapaxes(-1, -2))


def is_psd(x: np.ndarray, rel_tol: float = 1e-8) -> bool:
    """Minimum eigenvalue >= -rel_tol * trace after symmetrization."""
    x = hermitian_part(x)
    trace = float(np.real(np.trace(x)))
    min_eig = float(linalg.eigvalsh(x)[0]) if x.size else 0.0
    return min_eig >= -rel_tol * max(abs(trace), np.finfo(float).tiny)


def psd_sqrt(x: np.ndarray) -> np.ndarray:
    """Eigen square root U diag(sqrt(lambda)) U^H of a Hermitian PSD matrix."""
    eigvals, eigvecs = linalg.eigh(hermitian_part(x))
    return (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.conj().T


# =============================================================================
# POWER AND SINR
# =============================================================================


def transmit_power(sol: SolutionLike) -> float:
    """Total transmit power in watts."""
    if isinstance(sol, BeamformerSolution):
        return float(np.sum(np.abs(sol.w_c) ** 2) + np.sum(np.abs(sol.w_r) ** 2))
    return float(np.real(np.trace(sol.w_cov, axis1=1, axis2=2).sum() + np.trace(sol.z_r)))


def _signal_and_interference(
    sol: SolutionLike, h: np.ndarray, k: int
) -> Tuple[float, float]:
    """|h^H w_k|^2 and the interference sum for one effective channel."""
    if isinstance(sol, BeamformerSolution):
        gains = np.abs(h.conj() @ sol.w_c) ** 2
        radar = float(np.sum(np.abs(h.conj() @ sol.w_r) ** 2))
        return float(gains[k]), float(gains.sum() - gains[k]) + radar
    forms = np.real(np.einsum("i,kij,j->k", h.conj(), sol.w_cov, h))
    radar = float(np.real(h.conj() @ sol.z_r @ h))
    return float(forms[k]), float(forms.sum() - forms[k]) + radar


def user_sinr(sol: SolutionLike, cs: ChannelSet, k: int, noise_power: float) -> float:
    """SINR of user k with the effective channel at the solution's IRS vector."""
    h = effective_channels(cs, sol.v)[k]
    signal, interference = _signal_and_interference(sol, h, k)
    return signal / (interference + noise_power)


def user_sinrs(sol: SolutionLike, cs: ChannelSet, noise_power: float) -> np.ndarray:
    h_all = effective_channels(cs, sol.v)
    out = np.empty(cs.n_users)
    for k in range(cs.n_users):
        signal, interference = _signal_and_interference(sol, h_all[k], k)
        out[k] = signal / (interference + noise_power)
    return out


def radar_sinr_full(
    sol: SolutionLike,
    cs: ChannelSet,
    v: np.ndarray,
    noise_power: float,
    loop_interference: bool = True,
) -> float:
    """
    tr(A R A^H (B R B^H + sigma^2 I)^{-1}).

    The inverse is applied through a Hermitian linear solve. With
    loop_interference=False the IRS loop is treated as cancelled (B = 0).
    """
    r = transmit_covariance(sol)
    signal = cs.a_mat @ r @ cs.a_mat.conj().T
    if not loop_interference:
        return float(np.real(np.trace(signal))) / noise_power
    b = irs_loop_matrix(cs, v)
    denom = b @ r @ b.conj().T + noise_power * np.eye(cs.n_rx)
    solved = linalg.solve(hermitian_part(denom), signal, assume_a="her")
    return float(np.real(np.trace(solved)))


def radar_sinr_lower_bound(
    sol: SolutionLike, cs: ChannelSet, v: np.ndarray, noise_power: float
) -> float:
    """tr(A R A^H) / tr(B R B^H + sigma^2 I); never exceeds radar_sinr_full."""
    r = transmit_covariance(sol)
    b = irs_loop_matrix(cs, v)
    signal = float(np.real(np.trace(cs.a_mat @ r @ cs.a_mat.conj().T)))
    loop = float(np.real(np.trace(b @ r @ b.conj().T)))
    return signal / (loop + noise_power * cs.n_rx)


def irs_interference_gram(cs: ChannelSet, r: np.ndarray) -> np.ndarray:
    """
    Q = (G_r^H G_r) o (G_t R G_t^H)^T so that v^H Q v = tr(B R B^H).

    Q is a Hadamard product of PSD matrices, hence PSD.
    """
    left = cs.g_r.conj().T @ cs.g_r
    right = cs.g_t @ r @ cs.g_t.conj().T
    return hermitian_part(left * right.T)


# =============================================================================
# RADAR WAVEFORM QUALITY
# =============================================================================


def _transmit_steering(angles: Sequence[float], n_tx: int, spacing_ratio: float) -> np.ndarray:
    return np.column_stack([steering_vector(t, n_tx, spacing_ratio) for t in angles])


def cross_correlation(
    sol: SolutionLike, target_angles: Sequence[float], spacing_ratio: float = 0.5
) -> float:
    """Sum over target pairs l<j of |a_t(theta_l)^H R a_t(theta_j)|^2."""
    r = transmit_covariance(sol)
    if len(target_angles) < 2:
        return 0.0
    steer = _transmit_steering(target_angles, r.shape[0], spacing_ratio)
    gram = steer.conj().T @ r @ steer
    upper = np.triu_indices(len(target_angles), k=1)
    return float(np.sum(np.abs(gram[upper]) ** 2))


def cross_correlation_coefficients(
    sol: SolutionLike, target_angles: Sequence[float], spacing_ratio: float = 0.5
) -> Dict[Tuple[int, int], float]:
    """Normalized |a^H R a'| / sqrt(a^H R a * a'^H R a') for every target pair."""
    r = transmit_covariance(sol)
    steer = _transmit_steering(target_angles, r.shape[0], spacing_ratio)
    gram = steer.conj().T @ r @ steer
    diag = np.real(np.diag(gram))
    coefficients = {}
    for i, j in itertools.combinations(range(len(target_angles)), 2):
        denom = math.sqrt(max(diag[i], 0.0) * max(diag[j], 0.0))
        coefficients[(i, j)] = float(abs(gram[i, j]) / denom) if denom > 0 else 0.0
    return coefficients


def beampattern(
    sol: SolutionLike, angle_grid: Sequence[float], spacing_ratio: float = 0.5
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Transmit beampattern P(theta) = a_t(theta)^H R a_t(theta).

    Returns:
        (power, normalized) where normalized = power / max(power)
    """
    if len(angle_grid) == 0:
        raise ValueError("beampattern needs a nonempty angle grid")
    r = hermitian_part(transmit_covariance(sol))
    steer = _transmit_steering(angle_grid, r.shape[0], spacing_ratio)
    power = np.real(np.einsum("ig,ij,jg->g", steer.conj(), r, steer))
    power = np.clip(power, 0.0, None)
    peak = power.max()
    normalized = power / peak if peak > 0 else np.zeros_like(power)
    return power, normalized


# =============================================================================
# FEASIBILITY
# =============================================================================


def radar_constraint_terms(
    sol: SolutionLike,
    cs: ChannelSet,
    noise_power: float,
    loop_interference: bool,
) -> Tuple[float, float]:
    """
    Signal tr(A R A^H) and the required-denominator term of the radar constraint.

    Without loop interference the exact constraint is tr(ARA^H) >= r sigma^2.
    With it the trace-ratio surrogate is tr(ARA^H) >= r (tr(BRB^H) + sigma^2 N_r).
    """
    r = transmit_covariance(sol)
    signal = float(np.real(np.trace(cs.a_mat @ r @ cs.a_mat.conj().T)))
    if not loop_interference:
        return signal, noise_power
    b = irs_loop_matrix(cs, sol.v)
    loop = float(np.real(np.trace(b @ r @ b.conj().T)))
    return signal, loop + noise_power * cs.n_rx


def feasibility_report(
    sol: SolutionLike,
    cfg: SystemConfig,
    cs: ChannelSet,
    loop_interference: bool = True,
    irs_enabled: bool = True,
    tolerance: float = DEFAULT_TOLERANCE,
) -> FeasibilityReport:
    """
    Signed residuals of the user-SINR, radar-SINR, cross-correlation and
    unit-modulus constraints; positive means violated.
    """
    noise = cfg.noise_power_w
    thresholds = cfg.sinr_user_linear
    h_all = effective_channels(cs, sol.v)

    user_res: List[float] = []
    user_norm: List[float] = []
    for k in range(cs.n_users):
        signal, interference = _signal_and_interference(sol, h_all[k], k)
        residual = thresholds[k] * (interference + noise) - signal
        user_res.append(float(residual))
        user_norm.append(float(residual / (thresholds[k] * noise)))

    signal, denom = radar_constraint_terms(sol, cs, noise, loop_interference)
    r_r = cfg.sinr_radar_linear
    radar_res = r_r * denom - signal
    radar_norm = radar_res / (r_r * denom)

    if cfg.xcorr_active:
        xcorr = cross_correlation(sol, cfg.target_angles, cfg.antenna_spacing_ratio)
        xcorr_res = xcorr - cfg.cross_corr_limit
        xcorr_norm = xcorr_res / max(cfg.cross_corr_limit, 1e-300)
    else:
        xcorr_res = -math.inf
        xcorr_norm = -math.inf

    modulus_dev = float(np.max(np.abs(np.abs(sol.v) - 1.0))) if irs_enabled and sol.v.size else 0.0

    feasible = (
        max(user_norm) <= tolerance
        and radar_norm <= tolerance
        and xcorr_norm <= tolerance
        and modulus_dev <= tolerance
    )
    return FeasibilityReport(
        user_residuals=user_res,
        user_residuals_normalized=user_norm,
        radar_residual=float(radar_res),
        radar_residual_normalized=float(radar_norm),
        cross_corr_residual=float(xcorr_res),
        unit_modulus_deviation=modulus_dev,
        tolerance=tolerance,
        feasible=bool(feasible),
    )
