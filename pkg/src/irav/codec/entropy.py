"""Coefficient-block entropy coding.

Per block: a coded-block flag; if any level is nonzero, the last significant
position in zigzag order as order-0 exp-golomb, then for each position up to
it a significance bit and, when significant, (|level|-1) as order-1
exp-golomb plus a sign bit (1 = negative).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .bitio import BitReader, BitstreamError, BitWriter, ue_bits

# bit_length lookup for vectorized rate computation (levels fit 16 bits)
_BITLEN = np.zeros(1 << 16, dtype=np.int64)
for _b in range(1, 17):
    _BITLEN[1 << (_b - 1) : 1 << _b] = _b


@lru_cache(maxsize=None)
def zigzag_order(n: int) -> np.ndarray:
    """Flat indices of the classic zigzag scan over an n x n block."""
    order = []
    for s in range(2 * n - 1):
        lo = max(0, s - n + 1)
        hi = min(s, n - 1)
        rows = range(lo, hi + 1) if s % 2 else range(hi, lo - 1, -1)
        order.extend(i * n + (s - i) for i in rows)
    return np.asarray(order, dtype=np.int64)


def entropy_encode_block(levels: np.ndarray, writer: BitWriter):
    """Append the coded representation of a quantized block to ``writer``."""
    levels = np.asarray(levels)
    n = levels.shape[0]
    scan = levels.reshape(-1)[zigzag_order(n)]
    nz = np.nonzero(scan)[0]
    if nz.size == 0:
        writer.write_bit(0)
        return
    writer.write_bit(1)
    last = int(nz[-1])
    writer.write_ue(last, 0)
    for k in range(last + 1):
        v = int(scan[k])
        if v == 0:
            writer.write_bit(0)
        else:
            writer.write_bit(1)
            writer.write_ue(abs(v) - 1, 1)
            writer.write_bit(1 if v < 0 else 0)


def entropy_decode_block(reader: BitReader, n: int) -> np.ndarray:
    """Inverse of entropy_encode_block; returns an (n, n) int32 block."""
    scan = np.zeros(n * n, dtype=np.int32)
    if reader.read_bit():
        last = reader.read_ue(0)
        if last >= n * n:
            raise BitstreamError(
                f"last significant index {last} out of range for {n}x{n} block "
                f"at bit offset {reader.bit_position}"
            )
        for k in range(last + 1):
            if reader.read_bit():
                mag = reader.read_ue(1) + 1
                scan[k] = -mag if reader.read_bit() else mag
    out = np.zeros(n * n, dtype=np.int32)
    out[zigzag_order(n)] = scan
    return out.reshape(n, n)


def block_bits(levels: np.ndarray) -> int:
    """Exact bit count entropy_encode_block would produce, without encoding."""
    levels = np.asarray(levels)
    n = levels.shape[0]
    scan = levels.reshape(-1)[zigzag_order(n)]
    nz = np.nonzero(scan)[0]
    if nz.size == 0:
        return 1
    last = int(nz[-1])
    sig = scan[nz]
    mags = np.abs(sig).astype(np.int64)  # >= 1
    # order-1 exp-golomb of (mag - 1): 2*bitlen(((mag-1)>>1)+1) - 1 + 1
    eg1 = 2 * _BITLEN[((mags - 1) >> 1) + 1]
    coeff_bits = int(eg1.sum()) + nz.size  # + sign bits
    return 1 + ue_bits(last, 0) + (last + 1) + coeff_bits
