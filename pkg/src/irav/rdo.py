"""Distortion metrics and rate-distortion decisions.

Three block distortion measures are provided, each in a plain and a
mask-aware variant: SAD, SSD, and SATD (sum of absolute Hadamard-transformed
differences over 4x4 tiles). The mask-aware variants exclude inactive pixels:
SAD/SSD sum over active positions only, SATD zeroes the inactive sample
differences before the transform.

Accumulators are 64-bit so a 32x32 block of 8-bit samples cannot overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SATD_TILE = 4

_H4 = np.array(
    [[1, 1, 1, 1],
     [1, -1, 1, -1],
     [1, 1, -1, -1],
     [1, -1, -1, 1]],
    dtype=np.int64,
)


@dataclass
class DistortionKind:
    kind: str  # one of "sad", "ssd", "satd"
    masked: bool = False

    def __post_init__(self):
        if self.kind not in ("sad", "ssd", "satd"):
            raise ValueError(f"unknown distortion kind {self.kind!r}")


@dataclass
class RdDecision:
    """Outcome of a rate-distortion choice: J = D + lambda * R."""

    mode: object
    distortion: float
    rate_bits: float
    cost: float


def _check_geometry(a: np.ndarray, b: np.ndarray, active: np.ndarray | None = None):
    if a.shape != b.shape:
        raise ValueError(f"block shapes differ: {a.shape} vs {b.shape}")
    if active is not None and active.shape != a.shape:
        raise ValueError(f"mask shape {active.shape} does not match block {a.shape}")


def _diff(a, b):
    return np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64)


def sad(a, b) -> int:
    """Sum of absolute differences over all positions."""
    _check_geometry(np.asarray(a), np.asarray(b))
    return int(np.abs(_diff(a, b)).sum())


def masked_sad(a, b, active) -> int:
    """Sum of absolute differences over active positions only."""
    active = np.asarray(active, dtype=bool)
    _check_geometry(np.asarray(a), np.asarray(b), active)
    return int((np.abs(_diff(a, b)) * active).sum())


def ssd(a, b) -> int:
    """Sum of squared differences over all positions."""
    _check_geometry(np.asarray(a), np.asarray(b))
    d = _diff(a, b)
    return int((d * d).sum())


def masked_ssd(a, b, active) -> int:
    """Sum of squared differences over active positions only."""
    active = np.asarray(active, dtype=bool)
    _check_geometry(np.asarray(a), np.asarray(b), active)
    d = _diff(a, b)
    return int((d * d * active).sum())


def _satd_of_diff(d: np.ndarray) -> float:
    n, m = d.shape
    if n % SATD_TILE or m % SATD_TILE:
        raise ValueError(f"block dimensions {d.shape} not a multiple of {SATD_TILE}")
    tiles = d.reshape(n // SATD_TILE, SATD_TILE, m // SATD_TILE, SATD_TILE)
    tiles = tiles.transpose(0, 2, 1, 3).reshape(-1, SATD_TILE, SATD_TILE)
    t = _H4 @ tiles @ _H4
    return float(np.abs(t).sum()) / SATD_TILE


def satd_batch(diffs: np.ndarray) -> np.ndarray:
    """SATD of a stack of difference blocks; returns one value per block."""
    k, n, m = diffs.shape
    if n % SATD_TILE or m % SATD_TILE:
        raise ValueError(f"block dimensions {(n, m)} not a multiple of {SATD_TILE}")
    tiles = diffs.reshape(k, n // SATD_TILE, SATD_TILE, m // SATD_TILE, SATD_TILE)
    tiles = tiles.transpose(0, 1, 3, 2, 4).reshape(-1, SATD_TILE, SATD_TILE)
    t = _H4 @ tiles.astype(np.int64) @ _H4
    per_tile = np.abs(t).sum(axis=(1, 2))
    return per_tile.reshape(k, -1).sum(axis=1) / SATD_TILE


def satd(a, b) -> float:
    """Sum of absolute 4x4-Hadamard-transformed differences, scaled by 1/4."""
    _check_geometry(np.asarray(a), np.asarray(b))
    return _satd_of_diff(_diff(a, b))


def masked_satd(a, b, active) -> float:
    """SATD with inactive sample differences zeroed before the transform."""
    active = np.asarray(active, dtype=bool)
    _check_geometry(np.asarray(a), np.asarray(b), active)
    return _satd_of_diff(_diff(a, b) * active)


def rd_cost(distortion: float, rate_bits: float, lam: float) -> float:
    """Lagrangian cost J = D + lambda * R."""
    if distortion < 0 or rate_bits < 0:
        raise ValueError("distortion and rate must be non-negative")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return distortion + lam * rate_bits


def choose_mode(candidates, lam: float) -> RdDecision:
    """Pick the candidate minimizing J = D + lambda * R.

    ``candidates`` yields (mode, distortion, rate_bits) tuples in a fixed
    order; ties keep the earliest candidate.
    """
    best = None
    for mode, dist, rate in candidates:
        cost = rd_cost(dist, rate, lam)
        if best is None or cost < best.cost:
            best = RdDecision(mode, dist, rate, cost)
    if best is None:
        raise ValueError("choose_mode requires at least one candidate")
    return best


def lambda_ssd(qp: int) -> float:
    """Lagrange multiplier for SSD-based decisions."""
    return 0.85 * 2.0 ** ((qp - 12) / 3.0)


def lambda_pred(qp: int) -> float:
    """Lagrange multiplier for SAD/SATD-based prediction decisions."""
    return math.sqrt(lambda_ssd(qp))
