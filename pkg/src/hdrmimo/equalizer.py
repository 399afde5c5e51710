"""Bussgang-linearized LMMSE equalization, Gray-mapped 16-QAM, and
bit-error accounting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .frontend import AgcGains, QuantizerModel, SpatialTransform, apply_transform
from .linalg import posdef_inverse_apply

# Gray-mapped square 16-QAM, unit average symbol energy. Per real dimension
# a bit pair selects a level: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3 (all
# scaled by 1/sqrt(10)); the first two bits drive the in-phase level, the
# last two the quadrature level.
QAM16_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0]) / np.sqrt(10.0)
_PAIR_TO_LEVEL = np.array([0, 1, 3, 2])  # indexed by 2*b0 + b1
_LEVEL_TO_BITS = np.array([[0, 0], [0, 1], [1, 1], [1, 0]])


@dataclass(frozen=True)
class EqualizerMatrix:
    """Linear detector W plus the constants it was built from."""

    w: np.ndarray  # (U, B)
    gamma: float
    dist_power: float
    n0: float
    h_hat: Optional[np.ndarray] = None
    transform: Optional[SpatialTransform] = None
    omega: Optional[np.ndarray] = None


def modulate(bits: np.ndarray) -> np.ndarray:
    """Map a bit vector (length 4n) to n Gray-coded 16-QAM symbols."""
    bits = np.asarray(bits, dtype=int).reshape(-1)
    if bits.size % 4 != 0:
        raise ValueError(f"bit count must be a multiple of 4, got {bits.size}")
    groups = bits.reshape(-1, 4)
    i_idx = _PAIR_TO_LEVEL[2 * groups[:, 0] + groups[:, 1]]
    q_idx = _PAIR_TO_LEVEL[2 * groups[:, 2] + groups[:, 3]]
    return QAM16_LEVELS[i_idx] + 1j * QAM16_LEVELS[q_idx]


def hard_slice(s_hat: np.ndarray) -> np.ndarray:
    """Nearest-level 16-QAM decisions followed by the inverse Gray map.

    Returns 4 bits per input symbol; hard_slice(modulate(b)) == b.
    """
    s_hat = np.asarray(s_hat, dtype=complex).reshape(-1)
    scaled_i = s_hat.real * np.sqrt(10.0)
    scaled_q = s_hat.imag * np.sqrt(10.0)
    i_idx = np.clip(np.floor((scaled_i + 4.0) / 2.0), 0, 3).astype(int)
    q_idx = np.clip(np.floor((scaled_q + 4.0) / 2.0), 0, 3).astype(int)
    bits = np.concatenate(
        [_LEVEL_TO_BITS[i_idx], _LEVEL_TO_BITS[q_idx]], axis=1
    )
    return bits.reshape(-1)


def count_bit_errors(tx_bits: np.ndarray, rx_bits: np.ndarray) -> tuple[int, int]:
    """Hamming distance and total length of two equal-length bit vectors."""
    tx = np.asarray(tx_bits).reshape(-1)
    rx = np.asarray(rx_bits).reshape(-1)
    if tx.size != rx.size:
        raise ValueError(f"bit vector lengths differ: {tx.size} vs {rx.size}")
    return int(np.count_nonzero(tx != rx)), int(tx.size)


def build_lmmse(
    h_hat: np.ndarray,
    transform: SpatialTransform,
    gains: AgcGains,
    quant: QuantizerModel,
    n0: float,
) -> EqualizerMatrix:
    """Linearized-model LMMSE detector for the quantized receive chain.

    W = (1/gamma) Hh^H F^H O (O F Hh Hh^H F^H O + N0 O F F^H O
        + (2 D / gamma^2) I)^{-1}

    The transform is applied through per-cluster rank-1 reflections (never a
    dense B x B matrix), and the inverse is realized as a Hermitian
    positive-definite solve. Since the transform blocks are unitary,
    F F^H = I and the noise term reduces to N0 O^2.
    """
    if quant.gamma <= 0:
        raise ValueError("Bussgang gain must be positive")
    h_hat = np.asarray(h_hat, dtype=complex)
    m = gains.omega[:, None] * apply_transform(transform, h_hat)
    inner = m @ m.conj().T
    diag = np.diagonal(inner).real + n0 * gains.omega**2 + (
        2.0 * quant.dist_power / quant.gamma**2
    )
    np.fill_diagonal(inner, diag)
    x = posdef_inverse_apply(inner, m)
    return EqualizerMatrix(
        w=x.conj().T / quant.gamma,
        gamma=quant.gamma,
        dist_power=quant.dist_power,
        n0=n0,
        h_hat=h_hat,
        transform=transform,
        omega=gains.omega,
    )


def build_unquantized_lmmse(h_hat: np.ndarray, n0: float) -> EqualizerMatrix:
    """Classical LMMSE detector Hh^H (Hh Hh^H + N0 I)^{-1} on raw observations."""
    h_hat = np.asarray(h_hat, dtype=complex)
    gram = h_hat @ h_hat.conj().T
    np.fill_diagonal(gram, np.diagonal(gram).real + n0)
    x = posdef_inverse_apply(gram, h_hat)
    return EqualizerMatrix(
        w=x.conj().T, gamma=1.0, dist_power=0.0, n0=n0, h_hat=h_hat
    )


def equalize(eq: EqualizerMatrix, r: np.ndarray) -> np.ndarray:
    """Symbol estimates W @ r; r may be a vector or a (B, n) block."""
    return eq.w @ np.asarray(r, dtype=complex)
