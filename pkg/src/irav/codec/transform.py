"""Orthonormal 2D DCT, residual zeroing, and scalar quantization.

The transform is the separable orthonormal DCT-II computed with cached
basis matrices, so the inverse is the exact transpose and Parseval's
identity holds to floating precision. Block sizes are 8, 16, and 32.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

SUPPORTED_SIZES = (8, 16, 32)


@lru_cache(maxsize=None)
def _dct_basis(n: int) -> np.ndarray:
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    basis = np.cos(math.pi * (2 * m + 1) * k / (2 * n))
    basis *= math.sqrt(2.0 / n)
    basis[0] *= math.sqrt(0.5)
    return basis


def _check_size(block: np.ndarray):
    if block.ndim != 2 or block.shape[0] != block.shape[1]:
        raise ValueError(f"expected a square block, got shape {block.shape}")
    if block.shape[0] not in SUPPORTED_SIZES:
        raise ValueError(
            f"unsupported block size {block.shape[0]}, expected one of {SUPPORTED_SIZES}"
        )


def forward_dct(residual: np.ndarray) -> np.ndarray:
    """Orthonormal 2D DCT-II of a residual block."""
    residual = np.asarray(residual, dtype=np.float64)
    _check_size(residual)
    d = _dct_basis(residual.shape[0])
    return d @ residual @ d.T


def inverse_dct(coeffs: np.ndarray) -> np.ndarray:
    """Exact inverse of forward_dct."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    _check_size(coeffs)
    d = _dct_basis(coeffs.shape[0])
    return d.T @ coeffs @ d


def zero_inactive_residual(residual: np.ndarray, active: np.ndarray) -> np.ndarray:
    """Zero the residual at inactive positions; active values pass through."""
    residual = np.asarray(residual)
    active = np.asarray(active, dtype=bool)
    if active.shape != residual.shape:
        raise ValueError(
            f"mask shape {active.shape} does not match residual {residual.shape}"
        )
    return np.where(active, residual, 0)


def quant_step(qp: int) -> float:
    if not 0 <= qp <= 51:
        raise ValueError(f"qp must be in [0, 51], got {qp}")
    return 2.0 ** ((qp - 4) / 6.0)


def quantize(coeffs: np.ndarray, qp: int, is_intra: bool) -> np.ndarray:
    """Dead-zone scalar quantization to integer levels.

    level = sign(c) * floor(|c| / qstep + f), f = 1/3 intra, 1/6 inter.
    Levels fit 16-bit signed for all valid inputs (8-bit, size <= 32).
    """
    step = quant_step(qp)
    f = 1.0 / 3.0 if is_intra else 1.0 / 6.0
    coeffs = np.asarray(coeffs, dtype=np.float64)
    return (np.sign(coeffs) * np.floor(np.abs(coeffs) / step + f)).astype(np.int32)


def dequantize(levels: np.ndarray, qp: int) -> np.ndarray:
    """Reconstruct transform coefficients from quantized levels."""
    return np.asarray(levels, dtype=np.float64) * quant_step(qp)


def reconstruct_block(pred: np.ndarray, levels: np.ndarray, qp: int) -> np.ndarray:
    """Prediction plus the decoded residual, rounded and clipped to 8 bits."""
    res = np.rint(inverse_dct(dequantize(levels, qp))).astype(np.int64)
    return np.clip(pred.astype(np.int64) + res, 0, 255).astype(np.uint8)
