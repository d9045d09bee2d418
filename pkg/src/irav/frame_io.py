"""Raw YUV420 and binary-PGM mask file I/O plus the in-memory frame model.

All video is 8-bit planar YUV 4:2:0 with no container or per-frame headers.
Activity masks are stored as binary PGM (P5) images at luma resolution:
pixel values >= 128 mean active, below 128 mean inactive.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

BIT_DEPTH = 8


@dataclass
class FramePlane:
    """One 8-bit sample plane, stored row-major as a (height, width) array."""

    width: int
    height: int
    samples: np.ndarray

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(
                f"plane dimensions must be positive, got {self.width}x{self.height}"
            )
        arr = np.asarray(self.samples)
        if arr.ndim == 1:
            if arr.size != self.width * self.height:
                raise ValueError(
                    f"flat sample array has {arr.size} values, "
                    f"expected {self.width * self.height}"
                )
            arr = arr.reshape(self.height, self.width)
        if arr.shape != (self.height, self.width):
            raise ValueError(
                f"sample array shape {arr.shape} does not match "
                f"{self.height}x{self.width}"
            )
        if arr.dtype != np.uint8:
            if arr.min() < 0 or arr.max() > 255:
                raise ValueError("sample values must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        self.samples = arr

    @property
    def bitdepth(self) -> int:
        return BIT_DEPTH


@dataclass
class Frame420:
    """One YUV 4:2:0 frame: full-size luma plus half-size chroma planes."""

    luma: FramePlane
    cb: FramePlane
    cr: FramePlane

    def __post_init__(self):
        w, h = self.luma.width, self.luma.height
        if w % 2 or h % 2:
            raise ValueError(f"luma dimensions must be even, got {w}x{h}")
        for name, p in (("cb", self.cb), ("cr", self.cr)):
            if p.width != w // 2 or p.height != h // 2:
                raise ValueError(
                    f"{name} plane is {p.width}x{p.height}, "
                    f"expected {w // 2}x{h // 2} for {w}x{h} luma"
                )

    @property
    def width(self) -> int:
        return self.luma.width

    @property
    def height(self) -> int:
        return self.luma.height


@dataclass
class ActivityMask:
    """Per-pixel active/inactive map at input (luma) resolution.

    ``bits`` is a (height, width) boolean array, True = active. The mask is
    constant over a sequence.
    """

    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(
                f"mask dimensions must be positive, got {self.width}x{self.height}"
            )
        arr = np.asarray(self.bits)
        if arr.ndim == 1:
            arr = arr.reshape(self.height, self.width)
        if arr.shape != (self.height, self.width):
            raise ValueError(
                f"mask bit array shape {arr.shape} does not match "
                f"{self.height}x{self.width}"
            )
        self.bits = arr.astype(bool)

    @property
    def inactive_count(self) -> int:
        return int(self.bits.size - np.count_nonzero(self.bits))

    @property
    def inactive_fraction(self) -> float:
        return self.inactive_count / self.bits.size

    @property
    def all_active(self) -> bool:
        return bool(self.bits.all())


def frame_size_bytes(width: int, height: int) -> int:
    """Byte size of one YUV420 frame."""
    return width * height * 3 // 2


def read_yuv420(path, width: int, height: int, max_frames: int | None = None):
    """Read a raw planar YUV420 file into a list of Frame420.

    The file must hold a whole number of frames; a partial final frame is an
    error. Returns min(max_frames, available) frames in storage order.
    """
    if width % 2 or height % 2:
        raise ValueError(f"dimensions must be even, got {width}x{height}")
    fsize = frame_size_bytes(width, height)
    total = os.path.getsize(path)
    if total % fsize:
        raise ValueError(
            f"truncated YUV file {path}: partial frame starting at byte "
            f"{(total // fsize) * fsize} (file is {total} bytes, frame size {fsize})"
        )
    available = total // fsize
    count = available if max_frames is None else min(max_frames, available)
    cw, ch = width // 2, height // 2
    frames = []
    with open(path, "rb") as fh:
        for _ in range(count):
            buf = np.frombuffer(fh.read(fsize), dtype=np.uint8)
            y = buf[: width * height].reshape(height, width)
            u = buf[width * height : width * height + cw * ch].reshape(ch, cw)
            v = buf[width * height + cw * ch :].reshape(ch, cw)
            frames.append(
                Frame420(
                    FramePlane(width, height, y.copy()),
                    FramePlane(cw, ch, u.copy()),
                    FramePlane(cw, ch, v.copy()),
                )
            )
    return frames


def write_yuv420(frames, path) -> int:
    """Write frames as concatenated planar YUV420. Returns bytes written."""
    frames = list(frames)
    if frames:
        w, h = frames[0].width, frames[0].height
        for i, f in enumerate(frames):
            if f.width != w or f.height != h:
                raise ValueError(
                    f"frame {i} is {f.width}x{f.height}, expected {w}x{h}"
                )
    written = 0
    with open(path, "wb") as fh:
        for f in frames:
            for plane in (f.luma, f.cb, f.cr):
                data = plane.samples.tobytes()
                fh.write(data)
                written += len(data)
    return written


def _next_pgm_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # skip whitespace and '#' comment lines
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise ValueError("unexpected end of PGM header")
    return data[start:pos], pos


def read_mask_pgm(path) -> ActivityMask:
    """Read a binary PGM (P5) file as an activity mask (>=128 means active)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] != b"P5":
        raise ValueError(f"not a binary PGM (P5) file: magic {data[:2]!r}")
    pos = 2
    fields = []
    for _ in range(3):
        tok, pos = _next_pgm_token(data, pos)
        fields.append(int(tok))
    width, height, maxval = fields
    if maxval != 255:
        raise ValueError(f"unsupported PGM maxval {maxval}, expected 255")
    pos += 1  # single whitespace byte between header and raster
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise ValueError(
            f"PGM raster holds {len(raster)} bytes but header says "
            f"{width}x{height} = {width * height}"
        )
    values = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return ActivityMask(width, height, values >= 128)


def write_mask_pgm(mask: ActivityMask, path) -> int:
    """Write an activity mask as binary PGM (255 active, 0 inactive)."""
    header = f"P5\n{mask.width} {mask.height}\n255\n".encode("ascii")
    raster = np.where(mask.bits, 255, 0).astype(np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(raster)
    return len(header) + len(raster)


def subsample_mask_420(mask: ActivityMask) -> ActivityMask:
    """Derive the chroma-resolution mask for 4:2:0 sampling.

    A chroma pixel is inactive only when all four covered luma pixels are
    inactive, so no active luma pixel ever depends on an inactive chroma one.
    """
    if mask.width % 2 or mask.height % 2:
        raise ValueError(
            f"mask dimensions must be even to subsample, got {mask.width}x{mask.height}"
        )
    h2, w2 = mask.height // 2, mask.width // 2
    quads = mask.bits.reshape(h2, 2, w2, 2)
    return ActivityMask(w2, h2, quads.any(axis=(1, 3)))
