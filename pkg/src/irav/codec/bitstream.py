"""Bitstream container: header layout and framing.

Stream layout (big-endian): an 18-byte header, then per frame a u32 payload
bit-length followed by the payload padded to a byte boundary. The header
carries everything the decoder needs; in particular the decoder never reads
the activity mask. The tool-flag byte is informational only: the decoding
loop parses the payload identically whatever its value.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .bitio import BitstreamError

MAGIC = b"IRAV"
VERSION = 1

_HEADER = struct.Struct(">4sBHHIBHBB")
HEADER_BYTES = _HEADER.size

# tool-flag byte bits
TOOL_MASKED_RDO = 1 << 0
TOOL_ZERO_RESIDUAL = 1 << 1
TOOL_MASKED_SAO = 1 << 2
TOOL_SAO_ENABLED = 1 << 3


@dataclass
class SequenceHeader:
    width: int
    height: int
    frame_count: int
    qp: int
    intra_period: int
    ctu_size: int
    tool_bits: int

    def pack(self) -> bytes:
        return _HEADER.pack(
            MAGIC, VERSION, self.width, self.height, self.frame_count,
            self.qp, self.intra_period, self.ctu_size, self.tool_bits,
        )

    @classmethod
    def parse(cls, data: bytes) -> "SequenceHeader":
        if len(data) < HEADER_BYTES:
            raise BitstreamError(
                f"truncated header: {len(data)} bytes, need {HEADER_BYTES}"
            )
        magic, version, w, h, n, qp, period, ctu, tools = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise BitstreamError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != VERSION:
            raise BitstreamError(f"unsupported bitstream version {version}")
        return cls(w, h, n, qp, period, ctu, tools)
