"""Sample-adaptive-offset in-loop filter with mask-aware statistics.

Statistics pair a counter with the sum of original-minus-reconstructed
differences per category. Under mask-aware collection, inactive pixels are
skipped entirely (no categorization, no count, no sum), but an inactive
sample adjacent to an active one still participates as a neighbor when
classifying the active sample. Offset application is mask-free: the decoder
never sees the mask.

Edge-offset categories follow the conventional scheme: 1 = local minimum,
2 = concave edge (below one neighbor, equal to the other), 3 = convex edge,
4 = local maximum, 0 = none. Band offset splits the 8-bit range into 32
bands of 8 values; four consecutive bands starting at band_start are
corrected. Pixels lacking a neighbor inside the block along the chosen
direction are excluded from both statistics and application.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SAO_OFF, SAO_BO, SAO_EO = 0, 1, 2

# (dy, dx) neighbor offsets per EO direction: 0, 90, 135, 45 degrees
EO_NEIGHBORS = (
    ((0, -1), (0, 1)),
    ((-1, 0), (1, 0)),
    ((-1, -1), (1, 1)),
    ((-1, 1), (1, -1)),
)

NUM_BANDS = 32
MAX_OFFSET = 7

# fixed-length signaling cost in bits per CTU decision
RATE_OFF_BITS = 1
RATE_EO_BITS = 20
RATE_BO_BITS = 23


@dataclass
class SaoParams:
    mode: int  # SAO_OFF, SAO_BO, SAO_EO
    eo_direction: int = 0
    band_start: int = 0
    offsets: tuple = (0, 0, 0, 0)

    def __post_init__(self):
        if self.mode not in (SAO_OFF, SAO_BO, SAO_EO):
            raise ValueError(f"invalid SAO mode {self.mode}")
        if self.mode == SAO_EO and not 0 <= self.eo_direction < 4:
            raise ValueError(f"invalid EO direction {self.eo_direction}")
        if self.mode == SAO_BO and not 0 <= self.band_start <= NUM_BANDS - 4:
            raise ValueError(f"band_start {self.band_start} leaves fewer than 4 bands")
        offs = tuple(int(o) for o in self.offsets)
        if len(offs) != 4 or any(abs(o) > MAX_OFFSET for o in offs):
            raise ValueError("offsets must be 4 integers in [-7, 7]")
        self.offsets = offs


@dataclass
class SaoStats:
    """Per-category counters and difference sums (orig - recon)."""

    kind: str  # "eo" or "bo"
    counts: np.ndarray = field(default=None)
    diff_sums: np.ndarray = field(default=None)

    def __post_init__(self):
        size = 4 if self.kind == "eo" else NUM_BANDS
        if self.counts is None:
            self.counts = np.zeros(size, dtype=np.int64)
        if self.diff_sums is None:
            self.diff_sums = np.zeros(size, dtype=np.int64)


def classify_eo(center: int, n1: int, n2: int) -> int:
    """Edge-offset category of a pixel given its two directional neighbors."""
    lower = int(center < n1) + int(center < n2)
    higher = int(center > n1) + int(center > n2)
    if lower == 2:
        return 1
    if lower == 1 and higher == 0:
        return 2
    if higher == 1 and lower == 0:
        return 3
    if higher == 2:
        return 4
    return 0


def _eo_categories(recon: np.ndarray, direction: int):
    """Vectorized EO categories; returns (categories, valid) over the block.

    ``valid`` is False for border pixels lacking a neighbor inside the block.
    """
    h, w = recon.shape
    (dy1, dx1), (dy2, dx2) = EO_NEIGHBORS[direction]
    cats = np.zeros((h, w), dtype=np.int8)
    valid = np.zeros((h, w), dtype=bool)
    y0, y1 = max(0, -dy1, -dy2), h - max(0, dy1, dy2)
    x0, x1 = max(0, -dx1, -dx2), w - max(0, dx1, dx2)
    if y0 >= y1 or x0 >= x1:
        return cats, valid
    c = recon[y0:y1, x0:x1].astype(np.int16)
    a = recon[y0 + dy1 : y1 + dy1, x0 + dx1 : x1 + dx1].astype(np.int16)
    b = recon[y0 + dy2 : y1 + dy2, x0 + dx2 : x1 + dx2].astype(np.int16)
    lower = (c < a).astype(np.int8) + (c < b)
    higher = (c > a).astype(np.int8) + (c > b)
    cat = np.zeros_like(lower)
    cat[(lower == 2)] = 1
    cat[(lower == 1) & (higher == 0)] = 2
    cat[(higher == 1) & (lower == 0)] = 3
    cat[(higher == 2)] = 4
    cats[y0:y1, x0:x1] = cat
    valid[y0:y1, x0:x1] = True
    return cats, valid


def collect_stats(orig: np.ndarray, recon: np.ndarray, active: np.ndarray,
                  kind: str, direction: int = 0, masked: bool = False) -> SaoStats:
    """Collect SAO statistics over one block view.

    With ``masked`` set, inactive pixels contribute nothing; their values may
    still serve as neighbors for classifying adjacent active pixels.
    """
    if orig.shape != recon.shape or orig.shape != active.shape:
        raise ValueError(
            f"geometry mismatch: orig {orig.shape}, recon {recon.shape}, "
            f"mask {active.shape}"
        )
    diff = orig.astype(np.int64) - recon.astype(np.int64)
    stats = SaoStats(kind)
    if kind == "eo":
        cats, valid = _eo_categories(recon, direction)
        include = valid if not masked else (valid & active)
        sel = include & (cats > 0)
        idx = cats[sel].astype(np.int64) - 1
        stats.counts += np.bincount(idx, minlength=4)
        stats.diff_sums += np.bincount(idx, weights=diff[sel], minlength=4).astype(np.int64)
    elif kind == "bo":
        bands = (recon >> 3).astype(np.int64)
        include = np.ones_like(active) if not masked else active
        stats.counts += np.bincount(bands[include], minlength=NUM_BANDS)
        stats.diff_sums += np.bincount(
            bands[include], weights=diff[include], minlength=NUM_BANDS
        ).astype(np.int64)
    else:
        raise ValueError(f"unknown stats kind {kind!r}")
    return stats


def _best_offsets(counts: np.ndarray, diff_sums: np.ndarray):
    """Clamped rounded per-category mean offsets and the estimated SSD change."""
    offsets = np.zeros(len(counts), dtype=np.int64)
    nz = counts > 0
    means = np.zeros(len(counts))
    means[nz] = diff_sums[nz] / counts[nz]
    # round half away from zero, then clamp
    offsets[nz] = np.sign(means[nz]) * np.floor(np.abs(means[nz]) + 0.5)
    offsets = np.clip(offsets, -MAX_OFFSET, MAX_OFFSET)
    delta_d = (counts * offsets * offsets - 2 * offsets * diff_sums).sum()
    return offsets, float(delta_d)


def choose_params(eo_stats, bo_stats: SaoStats, lam: float) -> SaoParams:
    """Pick the SAO decision minimizing estimated-distortion-change + rate.

    Candidates in tie-break order: OFF, the four EO directions, then BO band
    starts ascending. Rates are the exact fixed-length signaling costs.
    """
    best = SaoParams(SAO_OFF)
    best_cost = lam * RATE_OFF_BITS
    for direction, stats in enumerate(eo_stats):
        offsets, delta_d = _best_offsets(stats.counts, stats.diff_sums)
        cost = delta_d + lam * RATE_EO_BITS
        if cost < best_cost:
            best = SaoParams(SAO_EO, eo_direction=direction, offsets=tuple(offsets))
            best_cost = cost
    for start in range(NUM_BANDS - 3):
        window = slice(start, start + 4)
        offsets, delta_d = _best_offsets(
            bo_stats.counts[window], bo_stats.diff_sums[window]
        )
        cost = delta_d + lam * RATE_BO_BITS
        if cost < best_cost:
            best = SaoParams(SAO_BO, band_start=start, offsets=tuple(offsets))
            best_cost = cost
    return best


def apply_sao(recon: np.ndarray, params: SaoParams) -> np.ndarray:
    """Apply chosen offsets to a block (mask-free); returns a new array."""
    if params.mode == SAO_OFF:
        return recon.copy()
    out = recon.astype(np.int16)
    if params.mode == SAO_BO:
        bands = recon >> 3
        for k, off in enumerate(params.offsets):
            out[bands == params.band_start + k] += off
    else:
        cats, valid = _eo_categories(recon, params.eo_direction)
        for k, off in enumerate(params.offsets):
            out[valid & (cats == k + 1)] += off
    return np.clip(out, 0, 255).astype(np.uint8)
