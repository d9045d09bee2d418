"""Big-endian bit-level writer/reader and exponential-Golomb codes."""

from __future__ import annotations


class BitstreamError(Exception):
    """Malformed or truncated bitstream."""


class BitWriter:
    """Accumulates bits MSB-first into a byte buffer."""

    def __init__(self):
        self._buf = bytearray()
        self._cur = 0
        self._nbits = 0

    @property
    def bit_position(self) -> int:
        return len(self._buf) * 8 + self._nbits

    def write_bit(self, bit: int):
        self._cur = (self._cur << 1) | (bit & 1)
        self._nbits += 1
        if self._nbits == 8:
            self._buf.append(self._cur)
            self._cur = 0
            self._nbits = 0

    def write_uint(self, value: int, nbits: int):
        if value < 0 or value >> nbits:
            raise ValueError(f"value {value} does not fit in {nbits} bits")
        for shift in range(nbits - 1, -1, -1):
            self.write_bit((value >> shift) & 1)

    def write_ue(self, value: int, order: int = 0):
        """Order-k exponential-Golomb code for an unsigned integer."""
        if value < 0:
            raise ValueError("exp-golomb values must be non-negative")
        if order:
            self.write_ue(value >> order, 0)
            self.write_uint(value & ((1 << order) - 1), order)
        else:
            m = value + 1
            nbits = m.bit_length()
            self.write_uint(0, nbits - 1)
            self.write_uint(m, nbits)

    def byte_align(self):
        while self._nbits:
            self.write_bit(0)

    def getvalue(self) -> bytes:
        if self._nbits:
            raise ValueError("bit buffer not byte-aligned")
        return bytes(self._buf)


class BitCounter:
    """Same interface as BitWriter but only counts bits."""

    def __init__(self):
        self.bits = 0

    @property
    def bit_position(self) -> int:
        return self.bits

    def write_bit(self, bit: int):
        self.bits += 1

    def write_uint(self, value: int, nbits: int):
        self.bits += nbits

    def write_ue(self, value: int, order: int = 0):
        self.bits += ue_bits(value, order)

    def byte_align(self):
        self.bits = (self.bits + 7) // 8 * 8


class BitReader:
    """Reads bits MSB-first from a byte buffer."""

    def __init__(self, data: bytes, start_bit: int = 0):
        self._data = data
        self._pos = start_bit

    @property
    def bit_position(self) -> int:
        return self._pos

    def read_bit(self) -> int:
        byte, off = divmod(self._pos, 8)
        if byte >= len(self._data):
            raise BitstreamError(f"bitstream exhausted at bit offset {self._pos}")
        self._pos += 1
        return (self._data[byte] >> (7 - off)) & 1

    def read_uint(self, nbits: int) -> int:
        value = 0
        for _ in range(nbits):
            value = (value << 1) | self.read_bit()
        return value

    def read_ue(self, order: int = 0) -> int:
        if order:
            q = self.read_ue(0)
            return (q << order) | self.read_uint(order)
        zeros = 0
        while self.read_bit() == 0:
            zeros += 1
            if zeros > 64:
                raise BitstreamError(
                    f"runaway exp-golomb prefix at bit offset {self._pos}"
                )
        return ((1 << zeros) | self.read_uint(zeros)) - 1


def ue_bits(value: int, order: int = 0) -> int:
    """Bit length of the order-k exp-golomb code for ``value``."""
    return 2 * ((value >> order) + 1).bit_length() - 1 + order


def signed_to_unsigned(v: int) -> int:
    """Map a signed integer to the unsigned exp-golomb domain."""
    return 2 * v - 1 if v > 0 else -2 * v


def unsigned_to_signed(u: int) -> int:
    q, r = divmod(u, 2)
    return q + 1 if r else -q
