"""Quality and rate metrics: PSNR, masked PSNR, sphere-weighted PSNR, BD-Rate.

Identical inputs would give infinite PSNR; all PSNR variants cap at 99.99 dB
instead. BD-Rate uses the classical cubic-polynomial fit of log10(rate) as a
function of quality, integrated over the overlapping quality range of the
two curves; negative results mean the test curve needs less rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ws_weights_erp

PSNR_CAP_DB = 99.99


@dataclass
class RdPoint:
    """One rate-distortion measurement."""

    rate_kbps: float
    quality_db: float


@dataclass
class BdRateResult:
    """Average rate difference of test vs anchor, in percent (negative = savings)."""

    percent: float
    overlap_low: float
    overlap_high: float
    fit: str = "cubic-polynomial"


def _plane_array(p) -> np.ndarray:
    return p.samples if hasattr(p, "samples") else np.asarray(p)


def _check_same_shape(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise ValueError(f"plane shapes differ: {a.shape} vs {b.shape}")


def _psnr_from_mse(mse: float, peak: float) -> float:
    if mse <= 0:
        return PSNR_CAP_DB
    return min(10.0 * math.log10(peak * peak / mse), PSNR_CAP_DB)


def psnr(a, b, peak: float = 255.0) -> float:
    """PSNR in dB over all pixels."""
    a, b = _plane_array(a), _plane_array(b)
    _check_same_shape(a, b)
    d = a.astype(np.float64) - b.astype(np.float64)
    return _psnr_from_mse(float(np.mean(d * d)), peak)


def masked_psnr(a, b, mask, peak: float = 255.0) -> float:
    """PSNR in dB over active pixels only."""
    a, b = _plane_array(a), _plane_array(b)
    _check_same_shape(a, b)
    active = mask.bits if hasattr(mask, "bits") else np.asarray(mask, dtype=bool)
    _check_same_shape(a, active)
    n = int(np.count_nonzero(active))
    if n == 0:
        raise ValueError("masked PSNR requires at least one active pixel")
    d = a.astype(np.float64) - b.astype(np.float64)
    return _psnr_from_mse(float((d * d * active).sum() / n), peak)


def ws_psnr_erp(a, b, peak: float = 255.0) -> float:
    """Sphere-weighted PSNR for ERP frames (width == 2*height)."""
    a, b = _plane_array(a), _plane_array(b)
    _check_same_shape(a, b)
    h, w = a.shape
    weights = ws_weights_erp(w, h).weights  # validates the 2:1 aspect
    d = a.astype(np.float64) - b.astype(np.float64)
    wmse = float((weights * d * d).sum() / weights.sum())
    return _psnr_from_mse(wmse, peak)


def bd_rate(anchor, test) -> BdRateResult:
    """Bjontegaard-Delta rate of ``test`` against ``anchor``.

    Each side needs at least four (rate, quality) points with distinct
    qualities and positive rates; quality should be monotone in log-rate
    (not enforced). Raises on duplicate qualities or an empty quality
    overlap.
    """
    results = []
    for name, points in (("anchor", anchor), ("test", test)):
        pts = sorted(points, key=lambda p: p.quality_db)
        if len(pts) < 4:
            raise ValueError(f"{name} curve needs at least 4 points, got {len(pts)}")
        q = np.array([p.quality_db for p in pts])
        r = np.array([p.rate_kbps for p in pts])
        if (r <= 0).any():
            raise ValueError(f"{name} curve has non-positive rates")
        if np.unique(q).size != q.size:
            raise ValueError(f"{name} curve has duplicate quality values")
        results.append((q, np.log10(r)))
    (qa, la), (qt, lt) = results
    low = max(qa.min(), qt.min())
    high = min(qa.max(), qt.max())
    if not low < high:
        raise ValueError(
            f"quality ranges do not overlap: [{qa.min():.4f}, {qa.max():.4f}] vs "
            f"[{qt.min():.4f}, {qt.max():.4f}]"
        )
    ints = []
    for q, lr in ((qa, la), (qt, lt)):
        poly = np.polyfit(q, lr, 3)
        anti = np.polyint(poly)
        ints.append(np.polyval(anti, high) - np.polyval(anti, low))
    avg_log_diff = (ints[1] - ints[0]) / (high - low)
    return BdRateResult((10.0 ** avg_log_diff - 1.0) * 100.0, low, high)


def rate_kbps(total_bits: int, frame_count: int, fps: float) -> float:
    """Sequence bitrate in kilobits per second."""
    if frame_count <= 0 or fps <= 0:
        raise ValueError("frame_count and fps must be positive")
    return total_bits * fps / frame_count / 1000.0
