"""Pilot-based training: orthogonal pilots, least-squares channel
estimation, sample covariance, and strongest-user identification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import NoiseModel, complex_noise
from .linalg import hadamard, posdef_inverse_apply


@dataclass(frozen=True)
class TrainingOutput:
    """Everything the receiver learns from one training phase."""

    y_train: np.ndarray  # (B, K) received training block
    h_hat: np.ndarray  # (B, U) least-squares channel estimate
    c_y_hat: np.ndarray  # (B, B) sample covariance of the training block
    strong_index: int  # estimated strongest-user column
    h_strong: np.ndarray  # (B,) that user's estimated channel


def generate_pilots(u: int, k: int) -> np.ndarray:
    """First u rows of an order-k Hadamard matrix; entries +-1, orthogonal rows."""
    if k < u:
        raise ValueError(f"pilot length k ({k}) must be >= user count u ({u})")
    return hadamard(k)[:u, :]


def simulate_training(
    h: np.ndarray,
    pilots: np.ndarray,
    noise: NoiseModel,
    rng: np.random.Generator,
) -> np.ndarray:
    """Unquantized training observations H @ S_T + N_T."""
    if pilots.shape[0] != h.shape[1]:
        raise ValueError(
            f"pilot rows {pilots.shape[0]} do not match user count {h.shape[1]}"
        )
    return h @ pilots + complex_noise(rng, (h.shape[0], pilots.shape[1]), noise.n0)


def ls_channel_estimate(y_train: np.ndarray, pilots: np.ndarray) -> np.ndarray:
    """Least-squares estimate Y_T S_T^H (S_T S_T^H)^{-1}.

    With orthogonal pilots this equals (1/K) Y_T S_T^H; the general solve is
    used so any full-row-rank pilot matrix works. Rank-deficient pilots make
    the Gram factorization fail.
    """
    pilots = np.asarray(pilots, dtype=complex)
    gram = pilots @ pilots.conj().T
    proj = y_train @ pilots.conj().T
    return posdef_inverse_apply(gram, proj.conj().T).conj().T


def sample_covariance(y_train: np.ndarray, k: int | None = None) -> np.ndarray:
    """Sample covariance (1/K) Y_T Y_T^H of the training block."""
    y_train = np.asarray(y_train, dtype=complex)
    if k is None:
        k = y_train.shape[1]
    if k < 1:
        raise ValueError("sample covariance needs at least one snapshot")
    return (y_train @ y_train.conj().T) / k


def strongest_ue_index(h_hat: np.ndarray) -> int:
    """Column with the largest estimated norm; ties go to the lowest index."""
    return int(np.argmax(np.sum(np.abs(h_hat) ** 2, axis=0)))


def estimate_from_training(y_train: np.ndarray, pilots: np.ndarray) -> TrainingOutput:
    """LS estimate, sample covariance, and strongest-user pick in one pass."""
    h_hat = ls_channel_estimate(y_train, pilots)
    c_y_hat = sample_covariance(y_train)
    strong = strongest_ue_index(h_hat)
    return TrainingOutput(
        y_train=y_train,
        h_hat=h_hat,
        c_y_hat=c_y_hat,
        strong_index=strong,
        h_strong=h_hat[:, strong],
    )
