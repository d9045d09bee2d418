"""Intra prediction and motion estimation.

Intra reference samples come from the working reconstruction plane, which is
initialized to 128, so not-yet-decoded neighbors read back as mid-gray on
both encoder and decoder. Frame borders replicate edge samples.

Motion vectors describe content displacement from reference to current
frame: the predictor for position p is ref[p - mv]. The integer search is
exhaustive over [-range, range]^2 in raster order over mv with
strictly-less-cost updates; half-pel refinement evaluates the eight
bilinear-interpolated neighbors with SATD.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rdo import satd_batch

INTRA_MODES = ("dc", "planar", "hor", "ver", "diag45", "diag135")
INTRA_MODE_BITS = 3

UNDECODED = 128


@dataclass
class IntraRefs:
    """Reference rows for intra prediction of an n x n block.

    ``top`` and ``left`` hold 2n samples (extensions replicate the last
    in-frame sample) or None when that side has no decoded neighbor; the
    missing side is substituted with the corner value at prediction time.
    """

    size: int
    top: np.ndarray | None
    left: np.ndarray | None
    corner: int


def gather_intra_refs(recon: np.ndarray, x: int, y: int, n: int) -> IntraRefs:
    h, w = recon.shape
    top = left = None
    if y > 0:
        cols = np.minimum(np.arange(x, x + 2 * n), w - 1)
        top = recon[y - 1, cols].astype(np.int64)
    if x > 0:
        rows = np.minimum(np.arange(y, y + 2 * n), h - 1)
        left = recon[rows, x - 1].astype(np.int64)
    if x > 0 and y > 0:
        corner = int(recon[y - 1, x - 1])
    elif y > 0:
        corner = int(top[0])
    elif x > 0:
        corner = int(left[0])
    else:
        corner = UNDECODED
    return IntraRefs(n, top, left, corner)


def intra_predict(mode: str, refs: IntraRefs) -> np.ndarray:
    """Deterministic intra prediction; returns an (n, n) uint8 block."""
    if mode not in INTRA_MODES:
        raise ValueError(f"unknown intra mode {mode!r}")
    n = refs.size
    if refs.top is None and refs.left is None:
        return np.full((n, n), UNDECODED, dtype=np.uint8)
    top = refs.top if refs.top is not None else np.full(2 * n, refs.corner, dtype=np.int64)
    left = refs.left if refs.left is not None else np.full(2 * n, refs.corner, dtype=np.int64)

    if mode == "dc":
        vals = []
        if refs.top is not None:
            vals.append(refs.top[:n])
        if refs.left is not None:
            vals.append(refs.left[:n])
        mean = int(np.concatenate(vals).sum() + len(vals) * n // 2) // (len(vals) * n)
        pred = np.full((n, n), mean, dtype=np.int64)
    elif mode == "planar":
        jx = np.arange(n, dtype=np.int64)
        iy = jx[:, None]
        horiz = (n - 1 - jx) * left[iy] + (jx + 1) * top[n]
        vert = (n - 1 - iy) * top[jx] + (iy + 1) * left[n]
        pred = (horiz + vert + n) // (2 * n)
    elif mode == "hor":
        pred = np.repeat(left[:n, None], n, axis=1)
    elif mode == "ver":
        pred = np.repeat(top[None, :n], n, axis=0)
    elif mode == "diag45":
        idx = np.arange(n)[:, None] + np.arange(n)[None, :] + 1
        pred = top[idx]
    else:  # diag135
        iy = np.arange(n)[:, None]
        jx = np.arange(n)[None, :]
        d = jx - iy
        pred = np.where(d > 0, top[np.abs(d) - 1], left[np.abs(d) - 1])
        pred = np.where(d == 0, refs.corner, pred)
    # every mode emits means/copies of 8-bit refs, so no clipping is needed
    return pred.astype(np.uint8)


def _clamped_region(ref: np.ndarray, x0: int, y0: int, width: int, height: int) -> np.ndarray:
    h, w = ref.shape
    if 0 <= x0 and 0 <= y0 and x0 + width <= w and y0 + height <= h:
        return ref[y0 : y0 + height, x0 : x0 + width]
    rows = np.clip(np.arange(y0, y0 + height), 0, h - 1)
    cols = np.clip(np.arange(x0, x0 + width), 0, w - 1)
    return ref[np.ix_(rows, cols)]


def motion_search(block: np.ndarray, ref: np.ndarray, origin: tuple[int, int],
                  search_range: int, active: np.ndarray | None = None):
    """Exhaustive integer-pel search; returns ((mvy, mvx), cost).

    Cost is SAD, or mask-aware SAD when ``active`` is given. Candidates out
    of frame are evaluated against replicated-edge padding.
    """
    x, y = origin
    n = block.shape[0]
    r = search_range
    region = _clamped_region(ref, x - r, y - r, n + 2 * r, n + 2 * r)
    windows = np.lib.stride_tricks.sliding_window_view(region, (n, n))
    diffs = np.abs(windows.astype(np.int16) - block.astype(np.int16))
    if active is not None:
        diffs = diffs * active
    costs = diffs.sum(axis=(2, 3), dtype=np.int64)
    # windows[dy+r, dx+r] predicts with ref[p + d]; mv = -d, so raster order
    # over mv is the flipped cost map.
    costs = costs[::-1, ::-1]
    best = int(np.argmin(costs))
    my, mx = divmod(best, 2 * r + 1)
    return (my - r, mx - r), int(costs.flat[best])


def predict_inter(ref: np.ndarray, origin: tuple[int, int], n: int,
                  mv_half: tuple[int, int]) -> np.ndarray:
    """Motion-compensated predictor for a half-pel motion vector."""
    x, y = origin
    mvy, mvx = mv_half
    # position on the half-pel grid: 2*p - mv
    qx = 2 * x - mvx
    qy = 2 * y - mvy
    ix, fx = qx >> 1, qx & 1
    iy, fy = qy >> 1, qy & 1
    a = _clamped_region(ref, ix, iy, n + 1, n + 1).astype(np.int32)
    tl, tr = a[:n, :n], a[:n, 1 : n + 1]
    bl, br = a[1 : n + 1, :n], a[1 : n + 1, 1 : n + 1]
    acc = (
        (2 - fx) * (2 - fy) * tl
        + fx * (2 - fy) * tr
        + (2 - fx) * fy * bl
        + fx * fy * br
    )
    return ((acc + 2) >> 2).astype(np.uint8)


# half-pel candidate order: integer-pel center first, then raster neighbors
_HALF_PEL_DELTAS = ((0, 0), (-1, -1), (-1, 0), (-1, 1), (0, -1),
                    (0, 1), (1, -1), (1, 0), (1, 1))


def half_pel_candidates(ref: np.ndarray, origin: tuple[int, int], n: int,
                        mv_int: tuple[int, int]) -> np.ndarray:
    """All nine half-pel predictors around an integer mv, in candidate order."""
    x, y = origin
    mvy, mvx = mv_int
    region = _clamped_region(ref, x - mvx - 1, y - mvy - 1, n + 2, n + 2)
    r = region.astype(np.int32)
    # horizontal blends, scaled by 2: index 0 -> dx=-1, 1 -> dx=0, 2 -> dx=+1
    hx = (r[:, 1 : n + 1] + r[:, 2 : n + 2],
          2 * r[:, 1 : n + 1],
          r[:, 0:n] + r[:, 1 : n + 1])
    preds = np.empty((9, n, n), dtype=np.uint8)
    for k, (dy, dx) in enumerate(_HALF_PEL_DELTAS):
        h = hx[dx + 1]
        if dy == 0:
            acc = 2 * h[1 : n + 1]
        elif dy == 1:
            acc = h[0:n] + h[1 : n + 1]
        else:
            acc = h[1 : n + 1] + h[2 : n + 2]
        preds[k] = (acc + 2) >> 2
    return preds


def refine_half_pel(block: np.ndarray, ref: np.ndarray, origin: tuple[int, int],
                    mv_int: tuple[int, int], active: np.ndarray | None = None):
    """Refine an integer mv over its 8 half-pel neighbors using SATD."""
    n = block.shape[0]
    preds = half_pel_candidates(ref, origin, n, mv_int)
    diffs = preds.astype(np.int32) - block.astype(np.int32)
    if active is not None:
        diffs = diffs * active
    costs = satd_batch(diffs)
    best = int(np.argmin(costs))  # first strict minimum in candidate order
    dy, dx = _HALF_PEL_DELTAS[best]
    return (2 * mv_int[0] + dy, 2 * mv_int[1] + dx), float(costs[best])
