"""Deterministic synthetic test sequences with global motion.

Each kind renders a fixed base image larger than the frame and crops it at
integer offsets that move along a sinusoidal orbit, so consecutive frames
are exact shifted copies of each other in the interior and inter prediction
has something real to find. Identical seeds give byte-identical output.
"""

from __future__ import annotations

import math

import numpy as np

from .frame_io import Frame420, FramePlane

KINDS = ("gradient", "checker", "orbit")

MOTION_AMPLITUDE = 5
MOTION_PERIOD = 16
_MARGIN = MOTION_AMPLITUDE + 3


def _box_axis0(a: np.ndarray, k: int) -> np.ndarray:
    w = 2 * k + 1
    ap = np.pad(a, ((k, k), (0, 0)), mode="edge").astype(np.float64)
    c = np.vstack([np.zeros((1, ap.shape[1])), np.cumsum(ap, axis=0)])
    return (c[w:] - c[:-w]) / w


def _box_blur(img: np.ndarray, k: int) -> np.ndarray:
    return _box_axis0(_box_axis0(img, k).T, k).T


def _stretch(img: np.ndarray, lo: float, hi: float) -> np.ndarray:
    mn, mx = img.min(), img.max()
    if mx <= mn:
        return np.full_like(img, (lo + hi) / 2.0)
    return lo + (img - mn) * (hi - lo) / (mx - mn)


def _base_orbit(rng, h, w):
    return _stretch(_box_blur(rng.random((h, w)), 3), 16.0, 240.0)


def _base_checker(rng, h, w):
    cell = 8
    ch, cw = -(-h // cell), -(-w // cell)
    shade = rng.integers(0, 48, size=(ch, cw)).astype(np.float64)
    row = np.arange(ch)[:, None]
    col = np.arange(cw)[None, :]
    board = np.where((row + col) % 2 == 0, 64.0, 192.0) + shade
    return np.kron(board, np.ones((cell, cell)))[:h, :w]


def _base_gradient(rng, h, w):
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    phase = rng.random() * 2 * math.pi
    return 128.0 + 96.0 * np.sin(2 * math.pi * (0.8 * xs / w + 0.2 * ys / h) + phase)


_BASES = {"orbit": _base_orbit, "checker": _base_checker, "gradient": _base_gradient}


def _offsets(t: int) -> tuple[int, int]:
    angle = 2 * math.pi * t / MOTION_PERIOD
    ox = int(round(MOTION_AMPLITUDE * math.sin(angle)))
    oy = int(round(MOTION_AMPLITUDE * math.cos(angle)))
    return oy, ox


def synthesize_sequence(kind: str, width: int, height: int, frames: int, seed: int):
    """Generate a deterministic YUV420 test sequence as a list of Frame420."""
    if kind not in KINDS:
        raise ValueError(f"unknown sequence kind {kind!r}, expected one of {KINDS}")
    if width % 2 or height % 2:
        raise ValueError(f"dimensions must be even, got {width}x{height}")
    if frames < 0:
        raise ValueError("frame count must be >= 0")
    rng = np.random.default_rng(seed)
    base_fn = _BASES[kind]
    m = _MARGIN
    luma_base = np.clip(base_fn(rng, height + 2 * m, width + 2 * m), 0, 255)
    cw, ch = width // 2, height // 2
    cb_base = _stretch(_box_blur(rng.random((ch + 2 * m, cw + 2 * m)), 4), 96.0, 160.0)
    cr_base = _stretch(_box_blur(rng.random((ch + 2 * m, cw + 2 * m)), 4), 96.0, 160.0)

    out = []
    for t in range(frames):
        oy, ox = _offsets(t)
        y = luma_base[m + oy : m + oy + height, m + ox : m + ox + width]
        u = cb_base[m + oy // 2 : m + oy // 2 + ch, m + ox // 2 : m + ox // 2 + cw]
        v = cr_base[m + oy // 2 : m + oy // 2 + ch, m + ox // 2 : m + ox // 2 + cw]
        out.append(Frame420(
            FramePlane(width, height, np.rint(y).astype(np.uint8)),
            FramePlane(cw, ch, np.rint(u).astype(np.uint8)),
            FramePlane(cw, ch, np.rint(v).astype(np.uint8)),
        ))
    return out
