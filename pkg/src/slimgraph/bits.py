"""Packed bit strings.

Bit 0 of a string is the most significant bit of its first byte.  All
positions in this module are 0-based; the 1-based conventions used by the
dictionary and container APIs are applied at their boundaries.
"""
from __future__ import annotations

import numpy as np

from .errors import TruncatedError


def ceil_log2(x: int) -> int:
    """Smallest k with 2**k >= x, with ceil_log2(0) == ceil_log2(1) == 0."""
    return (x - 1).bit_length() if x > 1 else 0


def int_bits(value: int, width: int) -> np.ndarray:
    if width == 0:
        return np.zeros(0, dtype=np.uint8)
    if value < 0 or value >> width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return np.frombuffer(format(value, f"0{width}b").encode(), dtype=np.uint8) - 48


def uint_array_bits(values, width: int) -> np.ndarray:
    """Fixed-width big-endian bits of every entry of `values`, concatenated."""
    vals = np.asarray(values, dtype=np.uint64)
    if width == 0 or vals.size == 0:
        return np.zeros(0, dtype=np.uint8)
    if width > 64:
        raise ValueError("word width above 64 bits")
    if width < 64 and vals.size and int(vals.max()) >> width:
        raise ValueError(f"value does not fit in {width} bits")
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    return ((vals[:, None] >> shifts) & np.uint64(1)).astype(np.uint8).ravel()


class BitString:
    """Immutable bit string over a bytes buffer."""

    __slots__ = ("data", "length")

    def __init__(self, data: bytes = b"", length: int | None = None):
        if length is None:
            length = 8 * len(data)
        if length > 8 * len(data):
            raise ValueError("length exceeds buffer")
        self.data = bytes(data)
        self.length = length

    @classmethod
    def from_bits(cls, bits) -> "BitString":
        arr = np.asarray(bits, dtype=np.uint8)
        return cls(np.packbits(arr).tobytes(), int(arr.size))

    @classmethod
    def from_str(cls, s: str) -> "BitString":
        s = s.replace("|", "").replace(" ", "")
        if s.strip("01"):
            raise ValueError(f"not a bit string: {s!r}")
        return cls.from_bits(np.frombuffer(s.encode(), dtype=np.uint8) - 48)

    @classmethod
    def from_int(cls, value: int, width: int) -> "BitString":
        return cls.from_bits(int_bits(value, width))

    @classmethod
    def from_uints(cls, values, width: int) -> "BitString":
        return cls.from_bits(uint_array_bits(values, width))

    @staticmethod
    def concat(parts) -> "BitString":
        arrays = [p.to_bits() if isinstance(p, BitString) else np.asarray(p, dtype=np.uint8) for p in parts]
        if not arrays:
            return BitString()
        return BitString.from_bits(np.concatenate(arrays))

    def to_bits(self) -> np.ndarray:
        return np.unpackbits(np.frombuffer(self.data, dtype=np.uint8), count=self.length)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise TruncatedError(f"bit {i} outside string of {self.length} bits")
        return (self.data[i >> 3] >> (7 - (i & 7))) & 1

    def read(self, pos: int, width: int) -> int:
        """Unsigned integer stored in bits [pos, pos+width)."""
        if width == 0:
            return 0
        end = pos + width
        if pos < 0 or end > self.length:
            raise TruncatedError(f"read of {width} bits at {pos} overruns {self.length}-bit string")
        lo = pos >> 3
        hi = (end + 7) >> 3
        chunk = int.from_bytes(self.data[lo:hi], "big")
        return (chunk >> ((hi << 3) - end)) & ((1 << width) - 1)

    def leading_zeros(self, pos: int, limit: int) -> int:
        """Number of 0 bits starting at pos, scanning at most `limit` bits."""
        n = 0
        while n < limit:
            w = min(64, limit - n)
            word = self.read(pos + n, w)
            if word:
                return n + w - word.bit_length()
            n += w
        return limit

    def slice(self, start: int, length: int) -> "BitString":
        if start < 0 or length < 0 or start + length > self.length:
            raise TruncatedError(f"slice [{start}, {start + length}) outside {self.length}-bit string")
        if start & 7 == 0:
            lo = start >> 3
            return BitString(self.data[lo:lo + ((length + 7) >> 3)], length)
        return BitString.from_bits(self.to_bits()[start:start + length])

    def to_bytes_padded(self) -> bytes:
        """Bytes with the final partial byte zero-filled (the buffer already is)."""
        n = (self.length + 7) >> 3
        data = bytearray(self.data[:n])
        if self.length & 7:
            data[-1] &= (0xFF << (8 - (self.length & 7))) & 0xFF
        return bytes(data)

    def __str__(self) -> str:
        return "".join(map(str, self.to_bits()))

    def __repr__(self) -> str:
        s = str(self)
        if len(s) > 64:
            s = s[:61] + "..."
        return f"BitString({s!r}, length={self.length})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self.length == other.length and self.to_bytes_padded() == other.to_bytes_padded()

    def __hash__(self) -> int:
        return hash((self.length, self.to_bytes_padded()))


class BitWriter:
    """Accumulates fields and produces one BitString."""

    def __init__(self):
        self._chunks: list[np.ndarray] = []
        self.length = 0

    def write(self, value: int, width: int) -> None:
        bits = int_bits(value, width)
        self._chunks.append(bits)
        self.length += width

    def write_array(self, values, width: int) -> None:
        bits = uint_array_bits(values, width)
        self._chunks.append(bits)
        self.length += int(bits.size)

    def write_bits(self, bits) -> None:
        if isinstance(bits, BitString):
            bits = bits.to_bits()
        bits = np.asarray(bits, dtype=np.uint8)
        self._chunks.append(bits)
        self.length += int(bits.size)

    def write_gamma(self, value: int) -> None:
        """Elias gamma code of value >= 1."""
        n = value.bit_length()
        self.write(0, n - 1)
        self.write(value, n)

    def finish(self) -> BitString:
        return BitString.concat(self._chunks)


class BitReader:
    """Sequential reader over a region of a BitString."""

    def __init__(self, bits: BitString, pos: int = 0, end: int | None = None):
        self.bits = bits
        self.pos = pos
        self.end = bits.length if end is None else end

    def read(self, width: int) -> int:
        if self.pos + width > self.end:
            raise TruncatedError(f"field of {width} bits overruns region ending at {self.end}")
        v = self.bits.read(self.pos, width)
        self.pos += width
        return v

    def read_gamma(self) -> int:
        z = self.bits.leading_zeros(self.pos, min(64, self.end - self.pos))
        if z >= 64 or self.pos + 2 * z + 1 > self.end:
            raise TruncatedError("unterminated gamma code")
        self.pos += z
        return self.read(z + 1)

    def remaining(self) -> int:
        return self.end - self.pos


class ReadCounter:
    """Counts fixed-width word reads made through WordArray views."""

    def __init__(self):
        self.reads = 0

    def reset(self) -> int:
        n, self.reads = self.reads, 0
        return n


READS = ReadCounter()


class WordArray:
    """Array of `count` fixed-width words stored at bits[pos:]."""

    __slots__ = ("bits", "pos", "count", "width")

    def __init__(self, bits: BitString, pos: int, count: int, width: int):
        if pos + count * width > len(bits):
            raise TruncatedError("word array overruns its bit string")
        self.bits = bits
        self.pos = pos
        self.count = count
        self.width = width

    def __len__(self) -> int:
        return self.count

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.count:
            raise IndexError(f"word {i} outside 0..{self.count - 1}")
        READS.reads += 1
        w = self.width
        if not w:
            return 0
        start = self.pos + i * w
        end = start + w
        hi = (end + 7) >> 3
        chunk = int.from_bytes(self.bits.data[start >> 3:hi], "big")
        return (chunk >> ((hi << 3) - end)) & ((1 << w) - 1)

    def to_array(self) -> np.ndarray:
        if self.count == 0:
            return np.zeros(0, dtype=np.int64)
        if self.width == 0:
            return np.zeros(self.count, dtype=np.int64)
        raw = self.bits.to_bits()[self.pos:self.pos + self.count * self.width]
        mat = raw.reshape(self.count, self.width).astype(np.uint64)
        weights = np.uint64(1) << np.arange(self.width - 1, -1, -1, dtype=np.uint64)
        return (mat * weights).sum(axis=1, dtype=np.uint64).astype(np.int64)
