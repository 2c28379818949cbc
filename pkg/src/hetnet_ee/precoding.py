"""Zero-forcing and block-diagonalisation precoders for multi-antenna links.

Channels are complex matrices whose rows are the conjugated channel vectors
of the receive antennas (``H`` is ``n_rx x M``), so the received signal is
``H @ W @ s``.
"""

from __future__ import annotations

import numpy as np

from .errors import RankDeficient

# Reciprocal condition numbers below this are treated as singular.
RCOND_MIN = 1e-12


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. CN(0, 1) entries."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _gram_inverse(H: np.ndarray) -> np.ndarray:
    G = H @ H.conj().T
    if 1.0 / np.linalg.cond(G) < RCOND_MIN:
        raise RankDeficient("channel Gram matrix is numerically singular")
    return np.linalg.inv(G)


def zf_precoder(H: np.ndarray) -> tuple[np.ndarray, float]:
    """``W = xi * H^* (H H^*)^-1`` with ``xi**2 = 1 / tr[(H H^*)^-1]``.

    ``W`` has unit total power (``||W||_F = 1``) and ``H @ W = xi * I``.
    Returns ``(W, xi)``.
    """
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    K, M = H.shape
    if K > M:
        raise RankDeficient(f"cannot zero-force {K} streams with {M} antennas")
    Ginv = _gram_inverse(H)
    xi = 1.0 / np.sqrt(np.real(np.trace(Ginv)))
    return xi * H.conj().T @ Ginv, float(xi)


def zf_receive_noise_factors(H: np.ndarray) -> np.ndarray:
    """Diagonal of ``(H^* H)^-1`` for an ``M x K`` uplink channel ``H``.

    With the ZF receive filter the post-filter SINR of stream ``k`` is
    ``P / (N0 * factor_k)``.
    """
    H = np.asarray(H, dtype=complex)
    return np.real(np.diag(_gram_inverse(H.conj().T)))


def column_normalised_zf(H: np.ndarray) -> np.ndarray:
    """ZF directions with every column scaled to unit norm (per-stream power)."""
    W = H.conj().T @ _gram_inverse(np.atleast_2d(H))
    return W / np.linalg.norm(W, axis=0, keepdims=True)


def waterfill(gains: np.ndarray, total_power: float, noise: float) -> np.ndarray:
    """Powers maximising ``sum log(1 + p_i g_i / noise)`` under ``sum p_i = total_power``."""
    g = np.asarray(gains, dtype=float)
    order = np.argsort(g)[::-1]
    gs = g[order]
    inv = noise / np.where(gs > 0, gs, np.inf)
    p = np.zeros_like(g)
    for n in range(len(gs), 0, -1):
        level = (total_power + inv[:n].sum()) / n
        if level > inv[n - 1]:
            p[order[:n]] = level - inv[:n]
            break
    return p


def bd_precoder(H_blocks: list[np.ndarray], total_power: float, noise: float):
    """Block diagonalisation with SVD and waterfilling over all eigenmodes.

    ``H_blocks[k]`` is the ``M_s x M`` channel of receiver ``k``. Each block's
    precoder lies in the null space of every other receiver's channel.
    Returns ``(precoders, powers, gains)``: ``precoders[k]`` is ``M x r_k``
    with orthonormal columns, ``powers[k]`` and ``gains[k]`` the per-mode
    power and squared singular value.
    """
    Kb = len(H_blocks)
    M = H_blocks[0].shape[1]
    if sum(h.shape[0] for h in H_blocks) > M:
        raise RankDeficient("block diagonalisation needs sum of receive antennas <= transmit antennas")
    precoders, gains = [], []
    for k in range(Kb):
        others = [H_blocks[j] for j in range(Kb) if j != k]
        if others:
            Ho = np.vstack(others)
            _, s, Vh = np.linalg.svd(Ho)
            rank = int(np.sum(s > RCOND_MIN * s[0]))
            if rank < Ho.shape[0]:
                raise RankDeficient("interfering receivers' channels are rank deficient")
            V0 = Vh[rank:].conj().T
        else:
            V0 = np.eye(M, dtype=complex)
        _, s, Vh = np.linalg.svd(H_blocks[k] @ V0, full_matrices=False)
        precoders.append(V0 @ Vh.conj().T)
        gains.append(s ** 2)
    p = waterfill(np.concatenate(gains), total_power, noise)
    powers, i = [], 0
    for g in gains:
        powers.append(p[i:i + len(g)])
        i += len(g)
    return precoders, powers, gains


def bd_sum_rate(H_blocks: list[np.ndarray], total_power: float, noise: float) -> float:
    _, powers, gains = bd_precoder(H_blocks, total_power, noise)
    return float(sum(np.sum(np.log2(1.0 + p * g / noise)) for p, g in zip(powers, gains)))


def zf_sum_rate(H_blocks: list[np.ndarray], total_power: float, noise: float) -> float:
    """Sum rate when every receive antenna is zero-forced as a separate stream."""
    H = np.vstack(H_blocks)
    _, xi = zf_precoder(H)
    return float(H.shape[0] * np.log2(1.0 + total_power * xi ** 2 / noise))
