"""Bitstream decoder.

Fully self-contained: everything needed to reconstruct the sequence is in
the stream, and the activity mask is never consulted. The tool-flag byte in
the header is informational; the decoding loop ignores it.
"""

from __future__ import annotations

import struct

import numpy as np

from ..frame_io import Frame420, FramePlane
from ..sao import SAO_BO, SAO_EO, SAO_OFF, SaoParams, apply_sao
from .bitio import BitReader, BitstreamError, unsigned_to_signed
from .bitstream import HEADER_BYTES, SequenceHeader
from .encoder import MIN_CU
from .entropy import entropy_decode_block
from .predict import (
    INTRA_MODE_BITS,
    INTRA_MODES,
    UNDECODED,
    gather_intra_refs,
    intra_predict,
    predict_inter,
)
from .transform import reconstruct_block


def read_sao_params(reader: BitReader) -> SaoParams:
    if not reader.read_bit():
        return SaoParams(SAO_OFF)
    is_eo = reader.read_bit()
    if is_eo:
        direction, band = reader.read_uint(2), 0
    else:
        direction, band = 0, reader.read_uint(5)
    offsets = []
    for _ in range(4):
        mag = reader.read_uint(3)
        neg = reader.read_bit()
        offsets.append(-mag if neg else mag)
    if is_eo:
        return SaoParams(SAO_EO, eo_direction=direction, offsets=tuple(offsets))
    return SaoParams(SAO_BO, band_start=band, offsets=tuple(offsets))


class _PlaneDecoder:
    def __init__(self, recon, ref, qp, ctu, is_intra_frame):
        self.recon = recon
        self.ref = ref
        self.qp = qp
        self.ctu = ctu
        self.is_intra_frame = is_intra_frame
        self.h, self.w = recon.shape

    def _parse_cu(self, reader, x, y, size):
        if x >= self.w or y >= self.h:
            return
        half = size // 2
        forced = x + size > self.w or y + size > self.h
        split = False
        if forced:
            split = True
        elif size > MIN_CU:
            split = bool(reader.read_bit())
        if split:
            for oy, ox in ((0, 0), (0, half), (half, 0), (half, half)):
                self._parse_cu(reader, x + ox, y + oy, half)
            return
        is_intra = True if self.is_intra_frame else bool(reader.read_bit())
        if is_intra:
            mode_idx = reader.read_uint(INTRA_MODE_BITS)
            if mode_idx >= len(INTRA_MODES):
                raise BitstreamError(
                    f"invalid intra mode {mode_idx} at bit offset {reader.bit_position}"
                )
            refs = gather_intra_refs(self.recon, x, y, size)
            pred = intra_predict(INTRA_MODES[mode_idx], refs)
        else:
            mvy = unsigned_to_signed(reader.read_ue())
            mvx = unsigned_to_signed(reader.read_ue())
            pred = predict_inter(self.ref, (x, y), size, (mvy, mvx))
        levels = entropy_decode_block(reader, size)
        self.recon[y : y + size, x : x + size] = reconstruct_block(
            pred, levels, self.qp
        )

    def decode_from(self, reader):
        for cy in range(0, self.h, self.ctu):
            for cx in range(0, self.w, self.ctu):
                self._parse_cu(reader, cx, cy, self.ctu)
        if reader.read_bit():
            for cy in range(0, self.h, self.ctu):
                for cx in range(0, self.w, self.ctu):
                    sl = np.s_[cy : min(cy + self.ctu, self.h),
                               cx : min(cx + self.ctu, self.w)]
                    params = read_sao_params(reader)
                    self.recon[sl] = apply_sao(self.recon[sl], params)


def decode_sequence(data: bytes):
    """Decode a bitstream into frames identical to the encoder reconstruction."""
    header = SequenceHeader.parse(data)
    if header.intra_period < 1:
        raise BitstreamError(f"invalid intra period {header.intra_period}")
    if header.width % 16 or header.height % 16 or header.width == 0:
        raise BitstreamError(f"invalid dimensions {header.width}x{header.height}")
    w, h = header.width, header.height
    cw, ch = w // 2, h // 2
    offset = HEADER_BYTES
    prev = None
    frames = []
    for idx in range(header.frame_count):
        if offset + 4 > len(data):
            raise BitstreamError(f"truncated stream: missing length of frame {idx}")
        (bits,) = struct.unpack_from(">I", data, offset)
        offset += 4
        nbytes = (bits + 7) // 8
        if offset + nbytes > len(data):
            raise BitstreamError(
                f"truncated payload for frame {idx}: need {nbytes} bytes, "
                f"have {len(data) - offset}"
            )
        reader = BitReader(data[offset : offset + nbytes])
        offset += nbytes
        is_i = idx % header.intra_period == 0
        recons = []
        for p, (pw, ph, ctu) in enumerate(
            ((w, h, header.ctu_size), (cw, ch, header.ctu_size // 2),
             (cw, ch, header.ctu_size // 2))
        ):
            recon = np.full((ph, pw), UNDECODED, dtype=np.uint8)
            ref = None if is_i else prev[p]
            _PlaneDecoder(recon, ref, header.qp, ctu, is_i).decode_from(reader)
            recons.append(recon)
        if reader.bit_position > bits:
            raise BitstreamError(
                f"frame {idx} payload overran its declared length "
                f"({reader.bit_position} > {bits} bits)"
            )
        prev = recons
        frames.append(Frame420(
            FramePlane(w, h, recons[0]),
            FramePlane(cw, ch, recons[1]),
            FramePlane(cw, ch, recons[2]),
        ))
    return frames
