"""
scene.py - Scenario Geometry and Channel Generation

Generates everything one Monte-Carlo trial needs:
- steering vectors of uniform linear arrays
- distance-dependent path loss
- Rician (BS-IRS, IRS-BS, IRS-user) and Rayleigh (BS-user) channels
- target response matrix A = sum_l beta_l a_r(theta_l) a_t(theta_l)^H
- effective user channels and the IRS loop matrix B = G_r diag(v) G_t

Geometry:
    BS ULA at (0, 0, 3.5) along the y-axis (broadside +x, targets measured
    from broadside). IRS ULA at (d_x, 0, 3.5) along the x-axis. Users uniform
    in a disc of radius 2 m centred at (d_x, 0, 1). LoS components use the
    direction cosine between the link and the array axis.

IRS vector convention:
    v holds the reflection coefficients, Theta = diag(v). With
    Phi_k = diag(h_{r,k}^H) G_t the effective channel satisfies
    h_k^H = h_{d,k}^H + v^T Phi_k.
"""

from __future__ import annotations

import logging
import math
from dataclasses import replace
from typing import Sequence

import numpy as np

from models import ChannelSet, SystemConfig

logger = logging.getLogger(__name__)

BS_AXIS = np.array([0.0, 1.0, 0.0])
IRS_AXIS = np.array([1.0, 0.0, 0.0])


# =============================================================================
# RANDOM STREAMS
# =============================================================================


def trial_rng(seed: int, *path: int) -> np.random.Generator:
    """
    Independent generator for a (seed, path...) coordinate.

    Streams depend only on the coordinate, never on scheduling, so parallel
    sweeps reproduce serial ones.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *path])))


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples CN(0, variance)."""
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


# =============================================================================
# ARRAY RESPONSE AND PATH LOSS
# =============================================================================


def steering_from_cosine(cosine: float, n: int, spacing_ratio: float = 0.5) -> np.ndarray:
    """ULA response for a direction cosine (sin of the broadside angle)."""
    index = np.arange(n)
    return np.exp(-2j * np.pi * spacing_ratio * index * cosine)


def steering_vector(theta: float, n: int, spacing_ratio: float = 0.5) -> np.ndarray:
    """
    ULA steering vector a(theta) with entries exp(-j 2 pi (d/lambda) i sin(theta)).

    Args:
        theta: Angle from broadside in radians
        n: Number of elements (>= 1)
        spacing_ratio: Element spacing over wavelength

    Returns:
        Complex vector of length n with unit-modulus entries
    """
    if n < 1:
        raise ValueError(f"steering vector needs n >= 1, got {n}")
    return steering_from_cosine(math.sin(theta), n, spacing_ratio)


def path_loss(distance: float, exponent: float, ref_db: float = -30.0) -> float:
    """Linear power gain 10^(ref_db/10) * distance^(-exponent)."""
    if distance <= 0:
        raise ValueError(f"path loss needs a positive distance, got {distance}")
    return 10.0 ** (ref_db / 10.0) * distance ** (-exponent)


def direction_cosine(origin: np.ndarray, target: np.ndarray, axis: np.ndarray) -> float:
    delta = np.asarray(target, dtype=float) - np.asarray(origin, dtype=float)
    return float(delta @ axis / np.linalg.norm(delta))


def target_matrix(
    beta: np.ndarray,
    angles: Sequence[float],
    n_rx: int,
    n_tx: int,
    spacing_ratio: float = 0.5,
) -> np.ndarray:
    """A = sum_l beta_l a_r(theta_l) a_t(theta_l)^H."""
    a_mat = np.zeros((n_rx, n_tx), dtype=complex)
    for b, theta in zip(beta, angles):
        a_r = steering_vector(theta, n_rx, spacing_ratio)
        a_t = steering_vector(theta, n_tx, spacing_ratio)
        a_mat += b * np.outer(a_r, a_t.conj())
    return a_mat


def rician(
    los: np.ndarray,
    gain: float,
    kappa: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """sqrt(L) (sqrt(k/(1+k)) LoS + sqrt(1/(1+k)) NLoS); kappa=inf gives pure LoS."""
    nlos = complex_normal(rng, los.shape)
    if math.isinf(kappa):
        return math.sqrt(gain) * los
    return math.sqrt(gain) * (
        math.sqrt(kappa / (1.0 + kappa)) * los + math.sqrt(1.0 / (1.0 + kappa)) * nlos
    )


# =============================================================================
# CHANNEL GENERATION
# =============================================================================


def sample_user_positions(cfg: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """Users uniform in the disc around (d_x, 0, user_center_height)."""
    radius = cfg.user_radius * np.sqrt(rng.uniform(size=cfg.n_users))
    phase = rng.uniform(0.0, 2.0 * np.pi, size=cfg.n_users)
    return np.column_stack(
        [
            cfg.irs_x + radius * np.cos(phase),
            radius * np.sin(phase),
            np.full(cfg.n_users, cfg.user_center_height),
        ]
    )


def generate_channels(cfg: SystemConfig, rng: np.random.Generator) -> ChannelSet:
    """
    Draw one channel realization.

    Draw order is fixed (user positions, G_t, G_r, h_d, h_r, beta) so a
    given generator state always yields the same ChannelSet.
    """
    bs = np.asarray(cfg.bs_position, dtype=float)
    irs = np.array([cfg.irs_x, 0.0, cfg.irs_height])
    kappa = cfg.rician_factor
    ratio = cfg.antenna_spacing_ratio
    ref = cfg.path_loss_ref_db

    users = sample_user_positions(cfg, rng)

    d_bi = float(np.linalg.norm(irs - bs))
    gain_bi = path_loss(d_bi, cfg.alpha_bs_irs, ref)
    a_irs_to_bs = steering_from_cosine(direction_cosine(irs, bs, IRS_AXIS), cfg.n_irs, ratio)
    a_bs_to_irs_t = steering_from_cosine(direction_cosine(bs, irs, BS_AXIS), cfg.n_tx, ratio)
    a_bs_to_irs_r = steering_from_cosine(direction_cosine(bs, irs, BS_AXIS), cfg.n_rx, ratio)

    g_t = rician(np.outer(a_irs_to_bs, a_bs_to_irs_t.conj()), gain_bi, kappa, rng)
    g_r = rician(np.outer(a_bs_to_irs_r, a_irs_to_bs.conj()), gain_bi, kappa, rng)

    h_d = np.empty((cfg.n_users, cfg.n_tx), dtype=complex)
    for k, pos in enumerate(users):
        gain = path_loss(float(np.linalg.norm(pos - bs)), cfg.alpha_bs_user, ref)
        h_d[k] = complex_normal(rng, cfg.n_tx, gain)

    h_r = np.empty((cfg.n_users, cfg.n_irs), dtype=complex)
    for k, pos in enumerate(users):
        gain = path_loss(float(np.linalg.norm(pos - irs)), cfg.alpha_irs_user, ref)
        los = steering_from_cosine(direction_cosine(irs, pos, IRS_AXIS), cfg.n_irs, ratio)
        h_r[k] = rician(los, gain, kappa, rng)

    beta = complex_normal(rng, cfg.n_targets, cfg.target_rcs_power_w)
    a_mat = target_matrix(beta, cfg.target_angles, cfg.n_rx, cfg.n_tx, ratio)

    return ChannelSet(
        g_t=g_t,
        g_r=g_r,
        h_d=h_d,
        h_r=h_r,
        beta=beta,
        a_mat=a_mat,
        target_angles=tuple(cfg.target_angles),
        spacing_ratio=ratio,
        user_positions=users,
    )


def with_target_gains(cs: ChannelSet, beta: np.ndarray) -> ChannelSet:
    """Same channels with replaced reflection coefficients (A reassembled)."""
    beta = np.asarray(beta, dtype=complex)
    a_mat = target_matrix(beta, cs.target_angles, cs.n_rx, cs.n_tx, cs.spacing_ratio)
    return replace(cs, beta=beta, a_mat=a_mat)


def normalize_noise(cs: ChannelSet, noise_power: float) -> ChannelSet:
    """
    Scale every receive-side quantity by 1/sigma.

    Solvers then work with unit noise power while beamformers stay in watts.
    G_t is shared by the user and radar paths; scaling h_r and G_r instead
    covers both IRS paths exactly once.
    """
    scale = 1.0 / math.sqrt(noise_power)
    return replace(
        cs,
        g_r=cs.g_r * scale,
        h_d=cs.h_d * scale,
        h_r=cs.h_r * scale,
        beta=cs.beta * scale,
        a_mat=cs.a_mat * scale,
    )


# =============================================================================
# DERIVED CHANNELS
# =============================================================================


def cascaded_channel(cs: ChannelSet, k: int) -> np.ndarray:
    """Phi_k = diag(h_{r,k}^H) G_t, shape (M, N_t)."""
    return cs.h_r[k].conj()[:, None] * cs.g_t


def effective_channels(cs: ChannelSet, v: np.ndarray) -> np.ndarray:
    """All effective channels h_k as rows of a (K, N_t) matrix."""
    v = np.asarray(v, dtype=complex)
    return cs.h_d + (cs.h_r * v.conj()[None, :]) @ cs.g_t.conj()


def effective_user_channel(cs: ChannelSet, v: np.ndarray, k: int) -> np.ndarray:
    """
    Effective channel h_k with h_k^H = h_{d,k}^H + h_{r,k}^H diag(v) G_t.

    v enters unconjugated on the h^H side (the same diag(v) as in
    B = G_r diag(v) G_t), so the returned h_k carries conj(v): with M = 1
    and every channel equal to 1, h = 1 + exp(-j phi) for v = exp(j phi).

    Raises:
        IndexError: If k is not a valid user index
    """
    if not 0 <= k < cs.n_users:
        raise IndexError(f"user index {k} out of range for {cs.n_users} users")
    return effective_channels(cs, v)[k]


def irs_loop_matrix(cs: ChannelSet, v: np.ndarray) -> np.ndarray:
    """B = G_r diag(v) G_t, shape (N_r, N_t)."""
    v = np.asarray(v, dtype=complex)
    return (cs.g_r * v[None, :]) @ cs.g_t


def random_unit_phases(n: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-modulus vector with uniform random phases."""
    return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=n))
