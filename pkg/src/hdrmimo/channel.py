"""Synthetic mmWave uplink channels, near-far power control, and the
median-SNR noise model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ScenarioConfig:
    """Uplink scenario: array/user geometry plus channel-model knobs.

    ``rho_db`` is the receive-power dynamic range (dB) between the strongest
    and weakest user; all other users are power-controlled to within
    ``dr_limit_db``. The geometric channel model draws ``paths`` propagation
    paths per user with angles uniform in ``+-angle_sector_deg``, per-path
    powers decaying by ``path_decay_db`` per path, and log-normal shadowing
    of ``shadowing_std_db`` (median 1).
    """

    bs_antennas: int = 256
    ues: int = 32
    clusters: int = 32
    rho_db: float = 30.0
    dr_limit_db: float = 6.0
    paths: int = 5
    angle_sector_deg: float = 60.0
    path_decay_db: float = 5.0
    shadowing_std_db: float = 8.0

    def __post_init__(self) -> None:
        if self.bs_antennas < 1 or self.ues < 2:
            raise ValueError("need bs_antennas >= 1 and ues >= 2")
        if self.bs_antennas < self.ues:
            raise ValueError(
                f"bs_antennas ({self.bs_antennas}) must be >= ues ({self.ues})"
            )
        if self.clusters < 1 or self.bs_antennas % self.clusters != 0:
            raise ValueError(
                f"bs_antennas ({self.bs_antennas}) must be divisible by "
                f"clusters ({self.clusters})"
            )
        if self.rho_db < self.dr_limit_db:
            raise ValueError(
                f"rho_db ({self.rho_db}) must be >= dr_limit_db "
                f"({self.dr_limit_db})"
            )
        if self.paths < 1:
            raise ValueError("paths must be >= 1")
        if self.angle_sector_deg < 0 or self.path_decay_db < 0:
            raise ValueError("angle_sector_deg and path_decay_db must be >= 0")
        if self.shadowing_std_db < 0:
            raise ValueError("shadowing_std_db must be >= 0")

    @property
    def antennas_per_cluster(self) -> int:
        return self.bs_antennas // self.clusters


@dataclass(frozen=True)
class ChannelRealization:
    """One channel draw: propagation matrix, control gains, effective channel.

    Columns of ``h = g * diag(gains)`` are sorted by descending norm, so the
    strongest user is always column 0.
    """

    g: np.ndarray  # (B, U) propagation channel
    gains: np.ndarray  # (U,) power-control amplitudes d_u
    h: np.ndarray  # (B, U) effective channel, columns sorted by norm
    strongest_index: int


@dataclass(frozen=True)
class NoiseModel:
    """Per-entry complex noise variance (linear power); 0 means noiseless."""

    n0: float

    def __post_init__(self) -> None:
        if not self.n0 >= 0:
            raise ValueError(f"noise variance must be nonnegative, got {self.n0}")


def steering_vector(theta_rad: float, n: int) -> np.ndarray:
    """Half-wavelength ULA steering vector [1, e^{j pi sin t}, ...]."""
    return np.exp(1j * np.pi * np.arange(n) * np.sin(theta_rad))


def complex_noise(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    """I.i.d. circularly-symmetric complex Gaussian, given variance per entry."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def generate_channel(cfg: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw a (B, U) geometric multipath channel matrix.

    Each column is a sum of ``cfg.paths`` ULA steering vectors with complex
    Gaussian path gains and log-normal shadowing. Path powers are normalized
    so that, conditional on unit shadowing, the expected column energy equals
    the antenna count B.
    """
    b, u, npaths = cfg.bs_antennas, cfg.ues, cfg.paths
    # Geometric per-path power profile, normalized to mean 1 so that the
    # 1/sqrt(L) combining below keeps E||g_u||^2 = B for unit shadowing.
    profile = 10.0 ** (-cfg.path_decay_db * np.arange(npaths) / 10.0)
    profile *= npaths / profile.sum()

    sector = np.deg2rad(cfg.angle_sector_deg)
    theta = rng.uniform(-sector, sector, size=(npaths, u))
    alpha = complex_noise(rng, (npaths, u), 1.0) * np.sqrt(profile)[:, None]
    shadow_db = rng.normal(0.0, cfg.shadowing_std_db, size=u)
    beta = 10.0 ** (shadow_db / 10.0)

    steer = np.exp(
        1j * np.pi * np.arange(b)[:, None, None] * np.sin(theta)[None, :, :]
    )
    g = (steer * alpha[None, :, :]).sum(axis=1) / np.sqrt(npaths)
    return g * np.sqrt(beta)[None, :]


def apply_power_control(
    g: np.ndarray, dr_limit_db: float, controlled: np.ndarray
) -> np.ndarray:
    """Min-rule power control gains for the given set of columns of g.

    With P_min the smallest receive power in the controlled set, each
    controlled user gets d^2 = min(1, 10^(limit/10) * P_min / ||g_u||^2), so
    post-control powers span at most ``dr_limit_db`` decibels. Returns the
    amplitude gains aligned with ``controlled``.
    """
    controlled = np.asarray(controlled, dtype=int)
    if controlled.size == 0:
        raise ValueError("power control requires a nonempty controlled set")
    powers = np.sum(np.abs(g[:, controlled]) ** 2, axis=0)
    if np.any(powers == 0.0):
        raise ValueError("power control undefined for a zero-norm channel column")
    p_min = powers.min()
    limit = 10.0 ** (dr_limit_db / 10.0)
    return np.sqrt(np.minimum(1.0, limit * p_min / powers))


def set_strong_ue_gain(
    g_strong: np.ndarray, weakest_power: float, rho_db: float
) -> float:
    """Gain that puts the strong user exactly ``rho_db`` above ``weakest_power``."""
    p_strong = float(np.sum(np.abs(g_strong) ** 2))
    if p_strong == 0.0:
        raise ValueError("strong user's channel column has zero norm")
    return float(np.sqrt(10.0 ** (rho_db / 10.0) * weakest_power / p_strong))


def realize_channel(
    cfg: ScenarioConfig,
    rng: np.random.Generator,
    power_control_all: bool = False,
) -> ChannelRealization:
    """Draw a channel and assemble the power-controlled effective matrix.

    In the default (high dynamic range) mode, the user with the largest raw
    channel norm is boosted to ``cfg.rho_db`` above the weakest controlled
    user, while the remaining users obey the ``cfg.dr_limit_db`` control
    rule. With ``power_control_all`` every user is controlled and no boost
    is applied. Columns are sorted by descending effective norm.
    """
    g = generate_channel(cfg, rng)
    u = cfg.ues
    gains = np.ones(u)
    if power_control_all:
        gains = apply_power_control(g, cfg.dr_limit_db, np.arange(u))
    else:
        col_powers = np.sum(np.abs(g) ** 2, axis=0)
        strong = int(np.argmax(col_powers))
        rest = np.array([i for i in range(u) if i != strong])
        gains[rest] = apply_power_control(g, cfg.dr_limit_db, rest)
        weakest = float(np.min(gains[rest] ** 2 * col_powers[rest]))
        gains[strong] = set_strong_ue_gain(g[:, strong], weakest, cfg.rho_db)
    h = g * gains[None, :]
    order = np.argsort(-np.sum(np.abs(h) ** 2, axis=0), kind="stable")
    return ChannelRealization(
        g=g[:, order], gains=gains[order], h=h[:, order], strongest_index=0
    )


def noise_variance_from_msnr(h: np.ndarray, msnr_db: float) -> NoiseModel:
    """Noise variance that hits the requested median receive SNR (dB).

    Defined as N0 = U * median(||h_u||^2) / (B * 10^(msnr/10)); for an even
    number of users the median averages the two central order statistics.
    """
    b, u = h.shape
    med = float(np.median(np.sum(np.abs(h) ** 2, axis=0)))
    return NoiseModel(u * med / (b * 10.0 ** (msnr_db / 10.0)))


def observe(
    h: np.ndarray,
    s: np.ndarray,
    noise: NoiseModel,
    rng: np.random.Generator,
) -> np.ndarray:
    """Receive vector(s) h @ s + n with i.i.d. complex Gaussian noise.

    ``s`` may be a length-U symbol vector or a (U, n) block of symbol
    vectors; the noise is drawn per entry of the output.
    """
    s = np.asarray(s)
    if s.shape[0] != h.shape[1]:
        raise ValueError(
            f"symbol dimension {s.shape[0]} does not match user count {h.shape[1]}"
        )
    out_shape = (h.shape[0],) if s.ndim == 1 else (h.shape[0], s.shape[1])
    return h @ s + complex_noise(rng, out_shape, noise.n0)
